//! Binary cache for loaded corpora.
//!
//! Layout (little-endian): magic `CLB1`, `u32` format version, `u8` kind
//! (`b'L'` adoption log, `b'G'` graph), then the payload. String tables are a
//! `u32` count followed by `u32` length-prefixed UTF-8 strings.
//!
//! * log: user table, item table, `u64` event count, events as `(u32 user, u32 item, u64 time)`.
//! * graph: `u8` directed flag, node table, `u64` arc count, arcs as `(u32 src, u32 dst)`.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::graph::SocialGraph;
use super::intern::Interner;
use super::log::{AdoptionEvent, AdoptionLog, ItemId, UserId};
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 4] = b"CLB1";
pub const VERSION: u32 = 1;
const KIND_LOG: u8 = b'L';
const KIND_GRAPH: u8 = b'G';

struct Writer<W: Write>(W);

impl<W: Write> Writer<W> {
    fn bytes(&mut self, b: &[u8]) -> std::io::Result<()> {
        self.0.write_all(b)
    }
    fn u8(&mut self, v: u8) -> std::io::Result<()> {
        self.bytes(&[v])
    }
    fn u32(&mut self, v: u32) -> std::io::Result<()> {
        self.bytes(&v.to_le_bytes())
    }
    fn u64(&mut self, v: u64) -> std::io::Result<()> {
        self.bytes(&v.to_le_bytes())
    }
    fn strings(&mut self, table: &Interner) -> std::io::Result<()> {
        self.u32(table.len() as u32)?;
        for s in table.names() {
            self.u32(s.len() as u32)?;
            self.bytes(s.as_bytes())?;
        }
        Ok(())
    }
}

struct Reader<R: Read>(R);

impl<R: Read> Reader<R> {
    fn array<const N: usize>(&mut self) -> Result<[u8; N]> {
        let mut buf = [0u8; N];
        self.0
            .read_exact(&mut buf)
            .map_err(|e| Error::Cache(format!("truncated input: {e}")))?;
        Ok(buf)
    }
    fn u8(&mut self) -> Result<u8> {
        Ok(self.array::<1>()?[0])
    }
    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.array()?))
    }
    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.array()?))
    }
    fn strings(&mut self) -> Result<Interner> {
        let n = self.u32()? as usize;
        let mut names = Vec::with_capacity(n.min(1 << 20));
        for _ in 0..n {
            let len = self.u32()? as usize;
            let mut buf = vec![0u8; len];
            self.0
                .read_exact(&mut buf)
                .map_err(|e| Error::Cache(format!("truncated string: {e}")))?;
            names.push(String::from_utf8(buf).map_err(|e| Error::Cache(e.to_string()))?);
        }
        Ok(Interner::from_ordered(names))
    }
    fn header(&mut self, kind: u8) -> Result<()> {
        if &self.array::<4>()? != MAGIC {
            return Err(Error::Cache("bad magic".into()));
        }
        let version = self.u32()?;
        if version != VERSION {
            return Err(Error::Cache(format!("unsupported version {version}")));
        }
        let found = self.u8()?;
        if found != kind {
            return Err(Error::Cache(format!("expected kind {:?}, found {:?}", kind as char, found as char)));
        }
        Ok(())
    }
}

fn create(path: &Path) -> Result<Writer<BufWriter<File>>> {
    let f = File::create(path).map_err(|e| Error::io(path, e))?;
    Ok(Writer(BufWriter::new(f)))
}

fn open(path: &Path) -> Result<Reader<BufReader<File>>> {
    let f = File::open(path).map_err(|e| Error::io(path, e))?;
    Ok(Reader(BufReader::new(f)))
}

pub fn write_log(log: &AdoptionLog, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut w = create(path)?;
    let io = |e| Error::io(path, e);
    w.bytes(MAGIC).map_err(io)?;
    w.u32(VERSION).map_err(io)?;
    w.u8(KIND_LOG).map_err(io)?;
    w.strings(log.users()).map_err(io)?;
    w.strings(log.items()).map_err(io)?;
    w.u64(log.len() as u64).map_err(io)?;
    for e in log.events() {
        w.u32(e.user.0).map_err(io)?;
        w.u32(e.item.0).map_err(io)?;
        w.u64(e.time).map_err(io)?;
    }
    w.0.flush().map_err(io)
}

pub fn read_log(path: impl AsRef<Path>) -> Result<AdoptionLog> {
    let mut r = open(path.as_ref())?;
    r.header(KIND_LOG)?;
    let users = r.strings()?;
    let items = r.strings()?;
    let n = r.u64()? as usize;
    let mut events = Vec::with_capacity(n.min(1 << 24));
    for _ in 0..n {
        let user = r.u32()?;
        let item = r.u32()?;
        let time = r.u64()?;
        if user as usize >= users.len() || item as usize >= items.len() {
            return Err(Error::Cache("event id outside intern table".into()));
        }
        events.push(AdoptionEvent {
            time,
            user: UserId(user),
            item: ItemId(item),
        });
    }
    Ok(AdoptionLog::from_events(users, items, events))
}

pub fn write_graph(graph: &SocialGraph, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut w = create(path)?;
    let io = |e| Error::io(path, e);
    w.bytes(MAGIC).map_err(io)?;
    w.u32(VERSION).map_err(io)?;
    w.u8(KIND_GRAPH).map_err(io)?;
    w.u8(graph.is_directed() as u8).map_err(io)?;
    w.strings(graph.nodes()).map_err(io)?;
    let arcs: Vec<(u32, u32)> = graph.edges().collect();
    w.u64(arcs.len() as u64).map_err(io)?;
    for (s, d) in arcs {
        w.u32(s).map_err(io)?;
        w.u32(d).map_err(io)?;
    }
    w.0.flush().map_err(io)
}

pub fn read_graph(path: impl AsRef<Path>) -> Result<SocialGraph> {
    let mut r = open(path.as_ref())?;
    r.header(KIND_GRAPH)?;
    let directed = r.u8()? != 0;
    let nodes = r.strings()?;
    let n = r.u64()? as usize;
    let mut arcs = Vec::with_capacity(n.min(1 << 24));
    for _ in 0..n {
        let s = r.u32()?;
        let d = r.u32()?;
        if s as usize >= nodes.len() || d as usize >= nodes.len() {
            return Err(Error::Cache("arc endpoint outside intern table".into()));
        }
        arcs.push((s, d));
    }
    Ok(SocialGraph::from_edges(directed, nodes, arcs))
}
