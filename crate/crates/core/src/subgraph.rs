//! Per-article subgraphs grown by bounded breadth-first expansion.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::io::Write;

use crate::error::{Error, Result};
use crate::graph::{EdgeId, KnowledgeGraph, NodeId};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExpansionConfig {
    radius: u8,
}

impl ExpansionConfig {
    pub const MAX_RADIUS: u8 = 2;

    pub fn new(radius: u8) -> Result<Self> {
        if !(1..=Self::MAX_RADIUS).contains(&radius) {
            return Err(Error::Config(format!(
                "expansion radius must be 1 or 2, got {radius}"
            )));
        }
        Ok(ExpansionConfig { radius })
    }

    pub fn radius(&self) -> u8 {
        self.radius
    }
}

impl Default for ExpansionConfig {
    fn default() -> Self {
        ExpansionConfig { radius: 1 }
    }
}

/// An undirected edge of a subgraph, smaller endpoint first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SubEdge {
    pub a: NodeId,
    pub b: NodeId,
    pub edge: EdgeId,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubGraph {
    graph_token: u64,
    pub seeds: BTreeSet<NodeId>,
    pub members: BTreeSet<NodeId>,
    pub edges: BTreeSet<SubEdge>,
    /// Seed identifiers that were not in the graph.
    pub missing_seeds: usize,
}

impl SubGraph {
    pub fn empty(g: &KnowledgeGraph) -> Self {
        SubGraph {
            graph_token: g.token(),
            seeds: BTreeSet::new(),
            members: BTreeSet::new(),
            edges: BTreeSet::new(),
            missing_seeds: 0,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn built_from(&self, g: &KnowledgeGraph) -> bool {
        self.graph_token == g.token()
    }

    /// Writes one `node<TAB>node<TAB>predicates` line per edge, predicates
    /// joined by `,`.
    pub fn write_edge_list<W: Write>(&self, g: &KnowledgeGraph, mut out: W) -> std::io::Result<()> {
        for e in &self.edges {
            let preds: Vec<&str> = g
                .edge_predicates(e.edge)
                .iter()
                .map(|&p| g.predicate_name(p))
                .collect();
            writeln!(out, "{}\t{}\t{}", g.id(e.a), g.id(e.b), preds.join(","))?;
        }
        Ok(())
    }
}

/// Expands seed identifiers; unknown ones are dropped and counted.
pub fn expand_ids<S: AsRef<str>>(g: &KnowledgeGraph, seeds: &[S], cfg: ExpansionConfig) -> SubGraph {
    let mut present = Vec::new();
    let mut missing = 0;
    for s in seeds {
        match g.node(s.as_ref()) {
            Some(n) => present.push(n),
            None => missing += 1,
        }
    }
    let mut sub = expand(g, &present, cfg);
    sub.missing_seeds = missing;
    sub
}

/// Multi-source BFS to `cfg.radius()` hops.
///
/// A parent edge is kept when both endpoints are members and it extends a
/// shortest path from some seed without exceeding the radius, i.e. the
/// nearer endpoint is at depth < radius. Edges between two nodes on the
/// outermost ring are therefore excluded.
pub fn expand(g: &KnowledgeGraph, seeds: &[NodeId], cfg: ExpansionConfig) -> SubGraph {
    let radius = cfg.radius() as u32;
    let mut depth: HashMap<NodeId, u32> = HashMap::new();
    let mut queue = VecDeque::new();
    let mut seed_set = BTreeSet::new();
    for &s in seeds {
        if !g.contains(s) {
            continue;
        }
        seed_set.insert(s);
        if depth.insert(s, 0).is_none() {
            queue.push_back(s);
        }
    }
    let mut edges = BTreeSet::new();
    while let Some(u) = queue.pop_front() {
        let du = depth[&u];
        if du >= radius {
            continue;
        }
        for adj in g.neighbors(u) {
            let dv = *depth.entry(adj.node).or_insert_with(|| {
                queue.push_back(adj.node);
                du + 1
            });
            // Each qualifying edge is seen from its nearer endpoint.
            if du <= dv {
                edges.insert(SubEdge {
                    a: u.min(adj.node),
                    b: u.max(adj.node),
                    edge: adj.edge,
                });
            }
        }
    }
    SubGraph {
        graph_token: g.token(),
        seeds: seed_set,
        members: depth.into_keys().collect(),
        edges,
        missing_seeds: 0,
    }
}

pub fn union(s1: &SubGraph, s2: &SubGraph) -> Result<SubGraph> {
    if s1.graph_token != s2.graph_token {
        return Err(Error::GraphMismatch);
    }
    Ok(SubGraph {
        graph_token: s1.graph_token,
        seeds: s1.seeds.union(&s2.seeds).copied().collect(),
        members: s1.members.union(&s2.members).copied().collect(),
        edges: s1.edges.union(&s2.edges).copied().collect(),
        missing_seeds: s1.missing_seeds + s2.missing_seeds,
    })
}
