//! Binary snapshot of a [`KnowledgeGraph`].
//!
//! Little-endian layout:
//!
//! ```text
//! magic        8 bytes  "SEDKGSNP"
//! version      u32
//! nodes        u64      N
//! edges        u64      E
//! predicates   u64      P
//! ids          N x (u32 len, utf-8 bytes)
//! titles       N x (u32 len, utf-8 bytes)
//! predicates   P x (u32 len, utf-8 bytes)
//! offsets      (N+1) x u64
//! adjacency    2E x (u32 neighbor, u32 edge)
//! endpoints    E x (u32, u32)
//! pred offsets (E+1) x u64
//! pred ids     u32 each
//! ```
//!
//! Encoding is a pure function of graph structure, so saving a loaded
//! snapshot reproduces the original bytes.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::{EdgeSpec, KnowledgeGraph, NodeId, PredicateId};

pub const MAGIC: &[u8; 8] = b"SEDKGSNP";
pub const VERSION: u32 = 1;

pub fn encode(g: &KnowledgeGraph) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    put_u64(&mut out, g.node_count() as u64);
    put_u64(&mut out, g.edge_count() as u64);
    put_u64(&mut out, g.predicate_count() as u64);
    for s in g.ids().iter().chain(g.titles()).chain(g.predicate_names()) {
        put_u32(&mut out, s.len() as u32);
        out.extend_from_slice(s.as_bytes());
    }
    let mut offset = 0u64;
    put_u64(&mut out, 0);
    for n in g.nodes() {
        offset += g.degree(n) as u64;
        put_u64(&mut out, offset);
    }
    for n in g.nodes() {
        for a in g.neighbors(n) {
            put_u32(&mut out, a.node.0);
            put_u32(&mut out, a.edge.0);
        }
    }
    for e in g.edges() {
        let (a, b) = g.endpoints(e);
        put_u32(&mut out, a.0);
        put_u32(&mut out, b.0);
    }
    let mut offset = 0u64;
    put_u64(&mut out, 0);
    for e in g.edges() {
        offset += g.edge_predicates(e).len() as u64;
        put_u64(&mut out, offset);
    }
    for e in g.edges() {
        for p in g.edge_predicates(e) {
            put_u32(&mut out, p.0);
        }
    }
    out
}

pub fn decode(bytes: &[u8]) -> Result<KnowledgeGraph> {
    let mut r = Reader { bytes, pos: 0 };
    if r.take(MAGIC.len())? != MAGIC {
        return Err(Error::Snapshot("bad magic bytes, not a graph snapshot".into()));
    }
    let version = r.u32()?;
    if version != VERSION {
        return Err(Error::Snapshot(format!(
            "unsupported format version {version} (expected {VERSION})"
        )));
    }
    let n = r.count()?;
    let e = r.count()?;
    let p = r.count()?;
    let ids = r.strings(n)?;
    let titles = r.strings(n)?;
    let predicates = r.strings(p)?;

    let offsets = r.u64s(n + 1)?;
    let adjacency_len = 2 * e;
    let mut adjacency = Vec::with_capacity(adjacency_len.min(r.remaining() / 8));
    for _ in 0..adjacency_len {
        adjacency.push((r.u32()?, r.u32()?));
    }
    let mut edges = Vec::with_capacity(e.min(r.remaining() / 8));
    for _ in 0..e {
        edges.push((r.u32()?, r.u32()?));
    }
    let pred_offsets = r.u64s(e + 1)?;
    let total_preds = *pred_offsets.last().unwrap_or(&0) as usize;
    let mut pred_ids = Vec::with_capacity(total_preds.min(r.remaining() / 4));
    for _ in 0..total_preds {
        pred_ids.push(r.u32()?);
    }
    if r.remaining() != 0 {
        return Err(Error::Snapshot(format!("{} trailing bytes", r.remaining())));
    }
    if pred_offsets.first() != Some(&0) || pred_offsets.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::Snapshot("predicate offsets not monotone".into()));
    }

    let specs = edges
        .iter()
        .enumerate()
        .map(|(i, &(a, b))| EdgeSpec {
            a: NodeId(a),
            b: NodeId(b),
            predicates: pred_ids[pred_offsets[i] as usize..pred_offsets[i + 1] as usize]
                .iter()
                .map(|&p| PredicateId(p))
                .collect(),
        })
        .collect();
    let graph = KnowledgeGraph::from_parts(ids, titles, predicates, specs)
        .map_err(|err| Error::Snapshot(format!("inconsistent graph data: {err}")))?;

    // The stored adjacency must agree with the one rebuilt from edges.
    let consistent = graph.edges().all(|eid| {
        let (a, b) = graph.endpoints(eid);
        edges[eid.index()] == (a.0, b.0)
    }) && graph.nodes().all(|v| {
        let lo = offsets[v.index()] as usize;
        let hi = offsets[v.index() + 1] as usize;
        hi >= lo
            && adjacency.get(lo..hi).is_some_and(|stored| {
                stored.len() == graph.degree(v)
                    && stored
                        .iter()
                        .zip(graph.neighbors(v))
                        .all(|(&(node, edge), a)| node == a.node.0 && edge == a.edge.0)
            })
    });
    if !consistent {
        return Err(Error::Snapshot("adjacency does not match edge list".into()));
    }
    Ok(graph)
}

pub fn save_snapshot(g: &KnowledgeGraph, path: &Path) -> Result<()> {
    fs::write(path, encode(g)).map_err(|e| Error::io(path, e))
}

pub fn load_snapshot(path: &Path) -> Result<KnowledgeGraph> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode(&bytes).map_err(|e| match e {
        Error::Snapshot(msg) => Error::Snapshot(format!("{}: {msg}", path.display())),
        other => other,
    })
}

fn put_u32(out: &mut Vec<u8>, v: u32) {
    out.extend_from_slice(&v.to_le_bytes());
}

fn put_u64(out: &mut Vec<u8>, v: u64) {
    out.extend_from_slice(&v.to_le_bytes());
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn remaining(&self) -> usize {
        self.bytes.len() - self.pos
    }

    fn take(&mut self, len: usize) -> Result<&'a [u8]> {
        if self.remaining() < len {
            return Err(Error::Snapshot(format!(
                "truncated: needed {len} bytes at offset {}, {} left",
                self.pos,
                self.remaining()
            )));
        }
        let s = &self.bytes[self.pos..self.pos + len];
        self.pos += len;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    /// A length field; bounded by the bytes left so corrupt counts cannot
    /// trigger huge allocations.
    fn count(&mut self) -> Result<usize> {
        let v = self.u64()?;
        if v > self.bytes.len() as u64 {
            return Err(Error::Snapshot(format!("implausible count {v}")));
        }
        Ok(v as usize)
    }

    fn u64s(&mut self, len: usize) -> Result<Vec<u64>> {
        let mut v = Vec::with_capacity(len.min(self.remaining() / 8));
        for _ in 0..len {
            v.push(self.u64()?);
        }
        Ok(v)
    }

    fn strings(&mut self, len: usize) -> Result<Vec<String>> {
        let mut v = Vec::with_capacity(len.min(self.remaining() / 4));
        for _ in 0..len {
            let n = self.u32()? as usize;
            let raw = self.take(n)?;
            let s = std::str::from_utf8(raw)
                .map_err(|_| Error::Snapshot(format!("invalid UTF-8 string at offset {}", self.pos - n)))?;
            v.push(s.to_string());
        }
        Ok(v)
    }
}
