use crate::corpus::SocialGraph;

#[derive(Debug, Clone, PartialEq)]
pub struct EgoFeatures {
    /// Follower counts of adopters `2..=k`.
    pub in_degree: Vec<usize>,
    pub reach: usize,
    pub connections: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubgraphFeatures {
    /// Mean full-graph follower count of the adopters.
    pub indegree_sub: f64,
    pub density_sub: usize,
    pub cc_sub: usize,
    /// Mean undirected distance over connected pairs; `None` without such pairs.
    pub dist_sub: Option<f64>,
    /// In-degree of each adopter within the induced subgraph.
    pub sub_in: Vec<usize>,
}

fn followers<'g>(graph: &'g SocialGraph, node: Option<u32>) -> &'g [u32] {
    node.map_or(&[], |v| graph.followers(v))
}

fn following<'g>(graph: &'g SocialGraph, node: Option<u32>) -> &'g [u32] {
    node.map_or(&[], |v| graph.following(v))
}

/// Arcs (i, j) between adopter positions with `adopter i -> adopter j`.
fn induced_arcs(nodes: &[Option<u32>], graph: &SocialGraph) -> Vec<(usize, usize)> {
    let mut arcs = Vec::new();
    for (i, &u) in nodes.iter().enumerate() {
        let Some(u) = u else { continue };
        for (j, &v) in nodes.iter().enumerate() {
            if let Some(v) = v {
                if i != j && graph.has_edge(u, v) {
                    arcs.push((i, j));
                }
            }
        }
    }
    arcs
}

/// Number of edges among the adopters; friendships count once in undirected graphs.
fn induced_edge_count(arcs: &[(usize, usize)], graph: &SocialGraph) -> usize {
    if graph.is_directed() {
        arcs.len()
    } else {
        arcs.len() / 2
    }
}

/// Ego-network features of the adopters (graph nodes; `None` = absent from the graph).
pub fn ego_structural_features(nodes: &[Option<u32>], graph: &SocialGraph) -> EgoFeatures {
    let in_degree = nodes[1..].iter().map(|&v| followers(graph, v).len()).collect();

    let members: Vec<u32> = nodes.iter().flatten().copied().collect();
    let mut exposed: Vec<u32> = nodes.iter().flat_map(|&v| followers(graph, v).iter().copied()).collect();
    exposed.sort_unstable();
    exposed.dedup();
    let reach = exposed.iter().filter(|v| !members.contains(v)).count();

    let incident: usize = if graph.is_directed() {
        nodes
            .iter()
            .map(|&v| followers(graph, v).len() + following(graph, v).len())
            .sum()
    } else {
        nodes.iter().map(|&v| followers(graph, v).len()).sum()
    };
    let internal = induced_edge_count(&induced_arcs(nodes, graph), graph);

    EgoFeatures {
        in_degree,
        reach,
        connections: incident - internal,
    }
}

/// Features of the subgraph induced by the adopters.
pub fn subgraph_structural_features(nodes: &[Option<u32>], graph: &SocialGraph) -> SubgraphFeatures {
    let k = nodes.len();
    let arcs = induced_arcs(nodes, graph);

    let mut sub_in = vec![0usize; k];
    let mut adj = vec![Vec::new(); k];
    for &(i, j) in &arcs {
        sub_in[j] += 1;
        adj[i].push(j);
        adj[j].push(i);
    }

    // BFS from every adopter over the undirected view.
    let mut seen = vec![false; k];
    let mut cc = 0;
    let mut dist_sum = 0usize;
    let mut pairs = 0usize;
    let mut dist = vec![usize::MAX; k];
    let mut queue = std::collections::VecDeque::new();
    for s in 0..k {
        if !seen[s] {
            cc += 1;
        }
        dist.fill(usize::MAX);
        dist[s] = 0;
        queue.push_back(s);
        while let Some(u) = queue.pop_front() {
            seen[u] = true;
            for &v in &adj[u] {
                if dist[v] == usize::MAX {
                    dist[v] = dist[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        for &d in &dist[s + 1..] {
            if d != usize::MAX {
                dist_sum += d;
                pairs += 1;
            }
        }
    }

    let indegree_sub = nodes.iter().map(|&v| followers(graph, v).len()).sum::<usize>() as f64 / k as f64;
    SubgraphFeatures {
        indegree_sub,
        density_sub: induced_edge_count(&arcs, graph),
        cc_sub: cc,
        dist_sub: (pairs > 0).then(|| dist_sum as f64 / pairs as f64),
        sub_in,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Interner;

    /// u1..u6 are nodes 0..5.
    fn fixture(directed: bool) -> SocialGraph {
        let edges = [(2, 1), (3, 1), (3, 2), (4, 3), (5, 1), (5, 4), (6, 5)];
        SocialGraph::from_edges(
            directed,
            Interner::from_names(["u1", "u2", "u3", "u4", "u5", "u6"]),
            edges.map(|(s, d)| (s - 1, d - 1)),
        )
    }

    const ADOPTERS: [Option<u32>; 3] = [Some(0), Some(1), Some(2)];

    #[test]
    fn ego_fixture() {
        let f = ego_structural_features(&ADOPTERS, &fixture(true));
        assert_eq!(f.in_degree, [1, 1]);
        assert_eq!(f.reach, 2);
        assert_eq!(f.connections, 5);
    }

    #[test]
    fn subgraph_fixture() {
        let f = subgraph_structural_features(&ADOPTERS, &fixture(true));
        assert_eq!(f.density_sub, 3);
        assert_eq!(f.cc_sub, 1);
        assert_eq!(f.dist_sub, Some(1.0));
        assert_eq!(f.sub_in, [2, 1, 0]);
        assert_eq!(f.indegree_sub, 5.0 / 3.0);
    }

    #[test]
    fn isolated_adopters() {
        let g = fixture(true);
        let nodes = [None, None, Some(5)];
        let e = ego_structural_features(&nodes, &g);
        assert_eq!(e.in_degree, [0, 0]);
        assert_eq!(e.reach, 0);
        assert_eq!(e.connections, 1);
        let s = subgraph_structural_features(&nodes, &g);
        assert_eq!((s.density_sub, s.cc_sub, s.dist_sub), (0, 3, None));
        assert_eq!(s.sub_in, [0, 0, 0]);
        let e = ego_structural_features(&[None, None], &g);
        assert_eq!((e.reach, e.connections), (0, 0));
    }

    #[test]
    fn undirected_counts_friendships_once() {
        let g = fixture(false);
        let s = subgraph_structural_features(&ADOPTERS, &g);
        assert_eq!(s.density_sub, 3);
        assert_eq!(s.sub_in, [2, 2, 2]);
        // incident friendships: the three internal ones plus u3-u4 and u1-u5
        assert_eq!(ego_structural_features(&ADOPTERS, &g).connections, 5);
    }

    #[test]
    fn path_distances() {
        // chain a-b-c plus isolated d: pairs (a,b)=1 (b,c)=1 (a,c)=2
        let g = SocialGraph::from_edges(true, Interner::sequential(4), [(0, 1), (2, 1)]);
        let s = subgraph_structural_features(&[Some(0), Some(1), Some(2), Some(3)], &g);
        assert_eq!(s.cc_sub, 2);
        assert_eq!(s.dist_sub, Some(4.0 / 3.0));
    }
}
