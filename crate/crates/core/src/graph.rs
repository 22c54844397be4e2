//! Immutable undirected knowledge graph in compressed adjacency form.
//!
//! Every node pair is connected by at most one edge; the edge carries the
//! sorted, duplicate-free list of predicates that linked the pair in the
//! source data (in either direction).

use std::collections::HashMap;
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};

use crate::error::{Error, Result};

static NEXT_TOKEN: AtomicU64 = AtomicU64::new(1);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PredicateId(pub u32);

impl NodeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl EdgeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl PredicateId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// One adjacency entry: the neighbor and the edge leading to it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Adjacent {
    pub node: NodeId,
    pub edge: EdgeId,
}

/// An edge as handed to [`KnowledgeGraph::from_parts`]: endpoints plus
/// predicate ids. Order of endpoints and predicates does not matter.
#[derive(Debug, Clone)]
pub struct EdgeSpec {
    pub a: NodeId,
    pub b: NodeId,
    pub predicates: Vec<PredicateId>,
}

pub struct KnowledgeGraph {
    token: u64,
    ids: Vec<String>,
    titles: Vec<String>,
    index: HashMap<String, NodeId>,
    offsets: Vec<usize>,
    adjacency: Vec<Adjacent>,
    endpoints: Vec<(NodeId, NodeId)>,
    predicate_offsets: Vec<usize>,
    edge_predicates: Vec<PredicateId>,
    predicates: Vec<String>,
}

impl fmt::Debug for KnowledgeGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("KnowledgeGraph")
            .field("nodes", &self.node_count())
            .field("edges", &self.edge_count())
            .field("predicates", &self.predicates.len())
            .finish()
    }
}

impl KnowledgeGraph {
    /// Assembles a graph from interned parts.
    ///
    /// Edges are put in canonical order (by sorted endpoint pair) and their
    /// predicate lists sorted, so equal inputs always yield identical edge
    /// indices. Rejects self-loops, repeated node pairs, empty predicate
    /// lists, duplicate identifiers and out-of-range ids.
    pub fn from_parts(
        ids: Vec<String>,
        titles: Vec<String>,
        predicates: Vec<String>,
        edges: Vec<EdgeSpec>,
    ) -> Result<Self> {
        let n = ids.len();
        if titles.len() != n {
            return Err(Error::Config(format!(
                "{} titles for {} nodes",
                titles.len(),
                n
            )));
        }
        if n > u32::MAX as usize || edges.len() > u32::MAX as usize {
            return Err(Error::Config("graph too large for 32-bit ids".into()));
        }
        let mut index = HashMap::with_capacity(n);
        for (i, id) in ids.iter().enumerate() {
            if index.insert(id.clone(), NodeId(i as u32)).is_some() {
                return Err(Error::Config(format!("duplicate node identifier `{id}`")));
            }
        }

        let mut canonical: Vec<((NodeId, NodeId), Vec<PredicateId>)> = Vec::with_capacity(edges.len());
        for e in edges {
            if e.a.index() >= n || e.b.index() >= n {
                return Err(Error::Config("edge endpoint out of range".into()));
            }
            if e.a == e.b {
                return Err(Error::Config(format!("self-loop on `{}`", ids[e.a.index()])));
            }
            let mut preds = e.predicates;
            preds.sort_unstable();
            preds.dedup();
            if preds.is_empty() {
                return Err(Error::Config("edge without predicates".into()));
            }
            if preds.iter().any(|p| p.index() >= predicates.len()) {
                return Err(Error::Config("predicate id out of range".into()));
            }
            canonical.push(((e.a.min(e.b), e.a.max(e.b)), preds));
        }
        canonical.sort_unstable_by_key(|(pair, _)| *pair);
        if let Some(w) = canonical.windows(2).find(|w| w[0].0 == w[1].0) {
            let (a, b) = w[0].0;
            return Err(Error::Config(format!(
                "more than one edge between `{}` and `{}`",
                ids[a.index()],
                ids[b.index()]
            )));
        }

        let mut degree = vec![0usize; n];
        for ((a, b), _) in &canonical {
            degree[a.index()] += 1;
            degree[b.index()] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut fill = offsets[..n].to_vec();
        let mut adjacency = vec![
            Adjacent {
                node: NodeId(0),
                edge: EdgeId(0)
            };
            offsets[n]
        ];
        let mut endpoints = Vec::with_capacity(canonical.len());
        let mut predicate_offsets = Vec::with_capacity(canonical.len() + 1);
        predicate_offsets.push(0);
        let mut edge_predicates = Vec::new();
        for (i, ((a, b), preds)) in canonical.into_iter().enumerate() {
            let edge = EdgeId(i as u32);
            adjacency[fill[a.index()]] = Adjacent { node: b, edge };
            fill[a.index()] += 1;
            adjacency[fill[b.index()]] = Adjacent { node: a, edge };
            fill[b.index()] += 1;
            endpoints.push((a, b));
            edge_predicates.extend(preds);
            predicate_offsets.push(edge_predicates.len());
        }
        for v in 0..n {
            adjacency[offsets[v]..offsets[v + 1]].sort_unstable();
        }

        Ok(KnowledgeGraph {
            token: NEXT_TOKEN.fetch_add(1, Ordering::Relaxed),
            ids,
            titles,
            index,
            offsets,
            adjacency,
            endpoints,
            predicate_offsets,
            edge_predicates,
            predicates,
        })
    }

    /// Convenience constructor from `(subject, predicate, object)` string
    /// triples, treated as undirected and collapsed per node pair. Nodes are
    /// interned in sorted order; titles default to identifiers.
    pub fn from_labeled_edges<'a, I>(edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (&'a str, &'a str, &'a str)>,
    {
        Self::from_labeled_edges_with_nodes(edges, std::iter::empty())
    }

    /// Like [`from_labeled_edges`](Self::from_labeled_edges) with extra
    /// (possibly isolated) nodes.
    pub fn from_labeled_edges_with_nodes<'a, I, N>(edges: I, extra_nodes: N) -> Result<Self>
    where
        I: IntoIterator<Item = (&'a str, &'a str, &'a str)>,
        N: IntoIterator<Item = &'a str>,
    {
        let edges: Vec<_> = edges.into_iter().collect();
        let mut ids: Vec<String> = edges
            .iter()
            .flat_map(|(s, _, o)| [s.to_string(), o.to_string()])
            .chain(extra_nodes.into_iter().map(str::to_string))
            .collect();
        ids.sort();
        ids.dedup();
        let mut preds: Vec<String> = edges.iter().map(|(_, p, _)| p.to_string()).collect();
        preds.sort();
        preds.dedup();
        let node = |s: &str| NodeId(ids.binary_search_by(|x| x.as_str().cmp(s)).unwrap() as u32);
        let pred = |s: &str| PredicateId(preds.binary_search_by(|x| x.as_str().cmp(s)).unwrap() as u32);

        let mut grouped: std::collections::BTreeMap<(NodeId, NodeId), Vec<PredicateId>> = Default::default();
        for (s, p, o) in &edges {
            let (a, b) = (node(s), node(o));
            if a == b {
                continue;
            }
            grouped.entry((a.min(b), a.max(b))).or_default().push(pred(p));
        }
        let specs = grouped
            .into_iter()
            .map(|((a, b), predicates)| EdgeSpec { a, b, predicates })
            .collect();
        let titles = ids.clone();
        Self::from_parts(ids, titles, preds, specs)
    }

    /// Identity of this in-memory instance; subgraphs record it so that
    /// mixing graphs is detected.
    pub fn token(&self) -> u64 {
        self.token
    }

    pub fn node_count(&self) -> usize {
        self.ids.len()
    }

    pub fn edge_count(&self) -> usize {
        self.endpoints.len()
    }

    pub fn predicate_count(&self) -> usize {
        self.predicates.len()
    }

    pub fn node(&self, id: &str) -> Option<NodeId> {
        self.index.get(id).copied()
    }

    pub fn require_node(&self, id: &str) -> Result<NodeId> {
        self.node(id).ok_or_else(|| Error::UnknownNode(id.to_string()))
    }

    pub fn contains(&self, n: NodeId) -> bool {
        n.index() < self.ids.len()
    }

    pub fn id(&self, n: NodeId) -> &str {
        &self.ids[n.index()]
    }

    pub fn title(&self, n: NodeId) -> &str {
        &self.titles[n.index()]
    }

    pub fn nodes(&self) -> impl ExactSizeIterator<Item = NodeId> {
        (0..self.ids.len() as u32).map(NodeId)
    }

    pub fn degree(&self, n: NodeId) -> usize {
        self.offsets[n.index() + 1] - self.offsets[n.index()]
    }

    /// Neighbors of `n`, sorted by neighbor id.
    pub fn neighbors(&self, n: NodeId) -> &[Adjacent] {
        &self.adjacency[self.offsets[n.index()]..self.offsets[n.index() + 1]]
    }

    pub fn edge_between(&self, u: NodeId, v: NodeId) -> Option<EdgeId> {
        let row = self.neighbors(u);
        row.binary_search_by_key(&v, |a| a.node).ok().map(|i| row[i].edge)
    }

    /// Endpoints with the smaller id first.
    pub fn endpoints(&self, e: EdgeId) -> (NodeId, NodeId) {
        self.endpoints[e.index()]
    }

    pub fn edges(&self) -> impl ExactSizeIterator<Item = EdgeId> {
        (0..self.endpoints.len() as u32).map(EdgeId)
    }

    pub fn edge_predicates(&self, e: EdgeId) -> &[PredicateId] {
        &self.edge_predicates[self.predicate_offsets[e.index()]..self.predicate_offsets[e.index() + 1]]
    }

    pub fn predicate_name(&self, p: PredicateId) -> &str {
        &self.predicates[p.index()]
    }

    pub fn predicate_names(&self) -> &[String] {
        &self.predicates
    }

    /// `{n}` plus every neighbor of `n`, sorted.
    pub fn closed_neighborhood(&self, id: &str) -> Result<Vec<NodeId>> {
        let n = self.require_node(id)?;
        Ok(self.closed_neighborhood_of(n))
    }

    pub fn closed_neighborhood_of(&self, n: NodeId) -> Vec<NodeId> {
        let row = self.neighbors(n);
        let mut out = Vec::with_capacity(row.len() + 1);
        let split = row.partition_point(|a| a.node < n);
        out.extend(row[..split].iter().map(|a| a.node));
        out.push(n);
        out.extend(row[split..].iter().map(|a| a.node));
        out
    }

    pub(crate) fn ids(&self) -> &[String] {
        &self.ids
    }

    pub(crate) fn titles(&self) -> &[String] {
        &self.titles
    }

    /// Full scan of the structural invariants. Used after loading untrusted
    /// snapshots and in tests.
    pub fn check_invariants(&self) -> std::result::Result<(), String> {
        for u in self.nodes() {
            let row = self.neighbors(u);
            for w in row.windows(2) {
                if w[0].node >= w[1].node {
                    return Err(format!("adjacency of {} not strictly sorted", self.id(u)));
                }
            }
            for a in row {
                if a.node == u {
                    return Err(format!("self-loop on {}", self.id(u)));
                }
                if self.edge_between(a.node, u) != Some(a.edge) {
                    return Err(format!(
                        "asymmetric adjacency between {} and {}",
                        self.id(u),
                        self.id(a.node)
                    ));
                }
                let (x, y) = self.endpoints(a.edge);
                if (x, y) != (u.min(a.node), u.max(a.node)) {
                    return Err(format!("edge {} endpoints disagree with adjacency", a.edge.0));
                }
            }
        }
        for e in self.edges() {
            let preds = self.edge_predicates(e);
            if preds.is_empty() || preds.windows(2).any(|w| w[0] >= w[1]) {
                return Err(format!("edge {} predicate list empty or not a set", e.0));
            }
        }
        Ok(())
    }
}

/// Structural equality: same identifiers, titles, predicates, adjacency and
/// predicate lists. The instance token is ignored.
impl PartialEq for KnowledgeGraph {
    fn eq(&self, other: &Self) -> bool {
        self.ids == other.ids
            && self.titles == other.titles
            && self.predicates == other.predicates
            && self.offsets == other.offsets
            && self.adjacency == other.adjacency
            && self.endpoints == other.endpoints
            && self.predicate_offsets == other.predicate_offsets
            && self.edge_predicates == other.edge_predicates
    }
}
