use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use super::intern::Interner;
use crate::error::{Error, Result};

/// Follow graph in compressed sparse form.
///
/// An edge `u -> v` means "u follows v", so the followers of `v` are its
/// in-neighbours and follower count is in-degree. Undirected graphs are stored
/// symmetrically.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SocialGraph {
    directed: bool,
    nodes: Interner,
    out_offsets: Vec<usize>,
    out_targets: Vec<u32>,
    in_offsets: Vec<usize>,
    in_sources: Vec<u32>,
}

fn compress(n: usize, arcs: &[(u32, u32)]) -> (Vec<usize>, Vec<u32>) {
    let mut offsets = vec![0usize; n + 1];
    for &(s, _) in arcs {
        offsets[s as usize + 1] += 1;
    }
    for i in 0..n {
        offsets[i + 1] += offsets[i];
    }
    let mut fill = offsets.clone();
    let mut targets = vec![0u32; arcs.len()];
    for &(s, d) in arcs {
        targets[fill[s as usize]] = d;
        fill[s as usize] += 1;
    }
    for v in 0..n {
        targets[offsets[v]..offsets[v + 1]].sort_unstable();
    }
    (offsets, targets)
}

impl SocialGraph {
    /// Builds a graph over `nodes` from raw edges given as node indices.
    ///
    /// Self-loops and duplicates are dropped; undirected input is symmetrized.
    pub fn from_edges(directed: bool, nodes: Interner, edges: impl IntoIterator<Item = (u32, u32)>) -> Self {
        let n = nodes.len();
        let mut arcs: Vec<(u32, u32)> = Vec::new();
        for (s, d) in edges {
            assert!((s as usize) < n && (d as usize) < n, "edge endpoint out of range");
            if s == d {
                continue;
            }
            arcs.push((s, d));
            if !directed {
                arcs.push((d, s));
            }
        }
        arcs.sort_unstable();
        arcs.dedup();
        let (out_offsets, out_targets) = compress(n, &arcs);
        let reversed: Vec<(u32, u32)> = arcs.iter().map(|&(s, d)| (d, s)).collect();
        let (in_offsets, in_sources) = compress(n, &reversed);
        Self {
            directed,
            nodes,
            out_offsets,
            out_targets,
            in_offsets,
            in_sources,
        }
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn nodes(&self) -> &Interner {
        &self.nodes
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Directed arcs for directed graphs, unordered friendships otherwise.
    pub fn edge_count(&self) -> usize {
        if self.directed {
            self.out_targets.len()
        } else {
            self.out_targets.len() / 2
        }
    }

    pub fn node(&self, name: &str) -> Option<u32> {
        self.nodes.get(name)
    }

    /// Users that follow `v` (in-neighbours), sorted ascending.
    pub fn followers(&self, v: u32) -> &[u32] {
        let v = v as usize;
        &self.in_sources[self.in_offsets[v]..self.in_offsets[v + 1]]
    }

    /// Users that `u` follows (out-neighbours), sorted ascending.
    pub fn following(&self, u: u32) -> &[u32] {
        let u = u as usize;
        &self.out_targets[self.out_offsets[u]..self.out_offsets[u + 1]]
    }

    pub fn follower_count(&self, v: u32) -> usize {
        self.in_offsets[v as usize + 1] - self.in_offsets[v as usize]
    }

    pub fn following_count(&self, u: u32) -> usize {
        self.out_offsets[u as usize + 1] - self.out_offsets[u as usize]
    }

    pub fn has_edge(&self, u: u32, v: u32) -> bool {
        self.following(u).binary_search(&v).is_ok()
    }

    /// All stored arcs in (source, target) order.
    pub fn arcs(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        (0..self.node_count() as u32).flat_map(move |u| self.following(u).iter().map(move |&v| (u, v)))
    }

    /// Edges as written to disk: every arc for directed graphs, each friendship once otherwise.
    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        let directed = self.directed;
        self.arcs().filter(move |&(u, v)| directed || u < v)
    }

    pub fn write_tsv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = BufWriter::new(file);
        for (u, v) in self.edges() {
            writeln!(w, "{}\t{}", self.nodes.name(u), self.nodes.name(v)).map_err(|e| Error::io(path, e))?;
        }
        w.flush().map_err(|e| Error::io(path, e))
    }
}

fn split_fields<'a>(line: &'a str, n: usize) -> Option<Vec<&'a str>> {
    let fields: Vec<&str> = line.split('\t').map(str::trim).collect();
    (fields.len() == n && fields.iter().all(|f| !f.is_empty())).then_some(fields)
}

pub(crate) fn data_lines(path: &Path) -> Result<Vec<(usize, String)>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let trimmed = line.trim_end_matches('\r');
        if trimmed.trim().is_empty() || trimmed.starts_with('#') {
            continue;
        }
        out.push((i + 1, trimmed.to_string()));
    }
    if out.is_empty() {
        return Err(Error::Empty(path.to_path_buf()));
    }
    Ok(out)
}

pub(crate) fn parse_fields<'a>(path: &Path, lineno: usize, line: &'a str, n: usize) -> Result<Vec<&'a str>> {
    split_fields(line, n)
        .ok_or_else(|| Error::parse(path, lineno, format!("expected {n} tab-separated fields, got `{line}`")))
}

/// Loads a `src \t dst` edge list.
pub fn load_graph(path: impl AsRef<Path>, directed: bool) -> Result<SocialGraph> {
    let path = path.as_ref();
    let lines = data_lines(path)?;
    let mut raw = Vec::with_capacity(lines.len());
    for (lineno, line) in &lines {
        let f = parse_fields(path, *lineno, line, 2)?;
        raw.push((f[0].to_string(), f[1].to_string()));
    }
    let nodes = Interner::from_names(raw.iter().flat_map(|(s, d)| [s.clone(), d.clone()]));
    let edges: Vec<(u32, u32)> = raw
        .iter()
        .map(|(s, d)| (nodes.get(s).unwrap(), nodes.get(d).unwrap()))
        .collect();
    let graph = SocialGraph::from_edges(directed, nodes, edges);
    log::info!(
        "loaded graph {}: {} nodes, {} edges",
        path.display(),
        graph.node_count(),
        graph.edge_count()
    );
    Ok(graph)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tsv(contents: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f
    }

    fn names(g: &SocialGraph, ids: &[u32]) -> Vec<String> {
        ids.iter().map(|&i| g.nodes().name(i).to_string()).collect()
    }

    #[test]
    fn directed_three_edges() {
        let f = tsv("u2\tu1\nu3\tu1\nu3\tu2\n");
        let g = load_graph(f.path(), true).unwrap();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edge_count(), 3);
        let u1 = g.node("u1").unwrap();
        assert_eq!(names(&g, g.followers(u1)), ["u2", "u3"]);
    }

    #[test]
    fn duplicate_lines_are_dropped() {
        let a = load_graph(tsv("u2\tu1\nu3\tu1\nu3\tu2\n").path(), true).unwrap();
        let b = load_graph(tsv("u2\tu1\nu3\tu1\nu3\tu2\nu3\tu1\n").path(), true).unwrap();
        assert_eq!(a, b);
        assert_eq!(b.edge_count(), 3);
    }

    #[test]
    fn self_loops_dropped() {
        let g = load_graph(tsv("a\ta\na\tb\n").path(), true).unwrap();
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn undirected_is_symmetrized() {
        let f = tsv("u2\tu1\nu3\tu1\nu3\tu2\n");
        let g = load_graph(f.path(), false).unwrap();
        // brute-force symmetrization: every listed pair in both directions
        let pairs = [("u2", "u1"), ("u3", "u1"), ("u3", "u2")];
        for (a, b) in pairs {
            let (a, b) = (g.node(a).unwrap(), g.node(b).unwrap());
            assert!(g.has_edge(a, b) && g.has_edge(b, a));
            assert!(g.followers(a).contains(&b) && g.followers(b).contains(&a));
        }
        let u3 = g.node("u3").unwrap();
        assert!(names(&g, g.followers(u3)).contains(&"u2".to_string()));
        assert_eq!(g.edge_count(), 3);
        for v in 0..g.node_count() as u32 {
            assert_eq!(g.followers(v), g.following(v));
        }
    }

    #[test]
    fn malformed_line_reports_line_number() {
        let err = load_graph(tsv("a\tb\nbad line\n").path(), true).unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn empty_file_errors() {
        assert!(matches!(load_graph(tsv("").path(), true), Err(Error::Empty(_))));
    }

    #[test]
    fn tsv_round_trip() {
        for directed in [true, false] {
            let g = load_graph(tsv("3\t1\n2\t1\n3\t2\n1\t3\n").path(), directed).unwrap();
            let out = tempfile::NamedTempFile::new().unwrap();
            g.write_tsv(out.path()).unwrap();
            assert_eq!(load_graph(out.path(), directed).unwrap(), g);
        }
    }
}
