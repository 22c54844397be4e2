//! Edge traversal costs.
//!
//! All costs lie in `[0, 1]`; lower is a stronger relation. The relation
//! weighting scheme (RWS) depends on traversal direction, the
//! frequency-based schemes do not.

use std::fmt;
use std::str::FromStr;

use dashmap::DashMap;

use crate::error::{Error, Result};
use crate::graph::{EdgeId, KnowledgeGraph, NodeId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum WeightingScheme {
    #[default]
    Unweighted,
    /// `1 - |N(from) ∩ N(to)| / |N(from)|` over closed neighborhoods.
    Rws,
    /// Attribute frequency: common predicates are cheap.
    Af,
    /// Inverse attribute frequency: rare predicates are cheap.
    Iaf,
    AfIaf,
    JointIc,
}

impl WeightingScheme {
    pub const ALL: [WeightingScheme; 6] = [
        WeightingScheme::Unweighted,
        WeightingScheme::Rws,
        WeightingScheme::Af,
        WeightingScheme::Iaf,
        WeightingScheme::AfIaf,
        WeightingScheme::JointIc,
    ];

    pub fn name(self) -> &'static str {
        match self {
            WeightingScheme::Unweighted => "unweighted",
            WeightingScheme::Rws => "rws",
            WeightingScheme::Af => "af",
            WeightingScheme::Iaf => "iaf",
            WeightingScheme::AfIaf => "af-iaf",
            WeightingScheme::JointIc => "joint-ic",
        }
    }
}

impl fmt::Display for WeightingScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for WeightingScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.to_ascii_lowercase().replace('_', "-");
        WeightingScheme::ALL
            .into_iter()
            .find(|w| w.name() == norm || (norm == "none" && *w == WeightingScheme::Unweighted))
            .ok_or_else(|| Error::Config(format!("unknown weighting scheme `{s}`")))
    }
}

/// Resolves edge costs for one scheme over one graph.
///
/// Frequency schemes are tabulated up front (one pass over the edges);
/// RWS costs are computed on demand and memoized, since only edges of
/// union subgraphs are ever relaxed. Safe to share across threads.
pub struct EdgeWeigher<'g> {
    graph: &'g KnowledgeGraph,
    scheme: WeightingScheme,
    table: Option<Vec<f64>>,
    memo: DashMap<(NodeId, NodeId), f64>,
}

impl<'g> EdgeWeigher<'g> {
    pub fn new(graph: &'g KnowledgeGraph, scheme: WeightingScheme) -> Self {
        let table = match scheme {
            WeightingScheme::Af | WeightingScheme::Iaf | WeightingScheme::AfIaf => {
                Some(frequency_costs(graph, scheme).expect("frequency scheme"))
            }
            WeightingScheme::JointIc => Some(joint_ic_costs(graph)),
            WeightingScheme::Unweighted | WeightingScheme::Rws => None,
        };
        EdgeWeigher {
            graph,
            scheme,
            table,
            memo: DashMap::new(),
        }
    }

    pub fn scheme(&self) -> WeightingScheme {
        self.scheme
    }

    pub fn graph(&self) -> &'g KnowledgeGraph {
        self.graph
    }

    /// Cost of moving `from -> to` along `edge`. The caller guarantees that
    /// `edge` joins the two nodes.
    pub fn cost(&self, from: NodeId, to: NodeId, edge: EdgeId) -> f64 {
        match self.scheme {
            WeightingScheme::Unweighted => 1.0,
            WeightingScheme::Rws => *self
                .memo
                .entry((from, to))
                .or_insert_with(|| rws_cost_unchecked(self.graph, from, to)),
            _ => self.table.as_ref().expect("tabulated scheme")[edge.index()],
        }
    }

    pub fn cost_between(&self, from: NodeId, to: NodeId) -> Result<f64> {
        let edge = self.graph.edge_between(from, to).ok_or_else(|| Error::NotAdjacent {
            from: self.graph.id(from).to_string(),
            to: self.graph.id(to).to_string(),
        })?;
        Ok(self.cost(from, to, edge))
    }
}

/// RWS cost of traversing `from -> to`. Errors unless the nodes are adjacent.
pub fn rws_cost(g: &KnowledgeGraph, from: &str, to: &str) -> Result<f64> {
    let (u, v) = (g.require_node(from)?, g.require_node(to)?);
    if g.edge_between(u, v).is_none() {
        return Err(Error::NotAdjacent {
            from: from.to_string(),
            to: to.to_string(),
        });
    }
    Ok(rws_cost_unchecked(g, u, v))
}

fn rws_cost_unchecked(g: &KnowledgeGraph, from: NodeId, to: NodeId) -> f64 {
    let nf = g.closed_neighborhood_of(from);
    let nt = g.closed_neighborhood_of(to);
    let (mut i, mut j, mut shared) = (0, 0, 0usize);
    while i < nf.len() && j < nt.len() {
        match nf[i].cmp(&nt[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                shared += 1;
                i += 1;
                j += 1;
            }
        }
    }
    1.0 - shared as f64 / nf.len() as f64
}

/// Per-predicate frequency scores, each normalized to a maximum of 1.
#[derive(Debug, Clone, PartialEq)]
pub struct PredicateScores {
    /// Edges carrying the predicate over the most frequent predicate's count.
    pub af: Vec<f64>,
    /// `ln(|V| / incident nodes)`, divided by its maximum.
    pub iaf: Vec<f64>,
}

impl PredicateScores {
    pub fn compute(g: &KnowledgeGraph) -> Self {
        let p = g.predicate_count();
        let mut count = vec![0usize; p];
        let mut incident: Vec<Vec<NodeId>> = vec![Vec::new(); p];
        for e in g.edges() {
            let (a, b) = g.endpoints(e);
            for &pred in g.edge_predicates(e) {
                count[pred.index()] += 1;
                incident[pred.index()].extend([a, b]);
            }
        }
        let max_count = count.iter().copied().max().unwrap_or(0).max(1) as f64;
        let af = count.iter().map(|&c| c as f64 / max_count).collect();

        let v = g.node_count() as f64;
        let raw_iaf: Vec<f64> = incident
            .into_iter()
            .map(|mut nodes| {
                nodes.sort_unstable();
                nodes.dedup();
                if nodes.is_empty() {
                    0.0
                } else {
                    (v / nodes.len() as f64).ln()
                }
            })
            .collect();
        let max_iaf = raw_iaf.iter().copied().fold(0.0, f64::max);
        let iaf = raw_iaf
            .into_iter()
            .map(|x| if max_iaf > 0.0 { x / max_iaf } else { 0.0 })
            .collect();
        PredicateScores { af, iaf }
    }

    fn score(&self, scheme: WeightingScheme, p: usize) -> f64 {
        match scheme {
            WeightingScheme::Af => self.af[p],
            WeightingScheme::Iaf => self.iaf[p],
            WeightingScheme::AfIaf => self.af[p] * self.iaf[p],
            _ => unreachable!("not a frequency scheme"),
        }
    }
}

/// Symmetric per-edge costs for AF, IAF or AF-IAF: one minus the best
/// score among the edge's predicates.
pub fn frequency_costs(g: &KnowledgeGraph, scheme: WeightingScheme) -> Result<Vec<f64>> {
    if !matches!(
        scheme,
        WeightingScheme::Af | WeightingScheme::Iaf | WeightingScheme::AfIaf
    ) {
        return Err(Error::Config(format!("{scheme} is not a frequency scheme")));
    }
    let scores = PredicateScores::compute(g);
    Ok(g.edges()
        .map(|e| {
            let best = g
                .edge_predicates(e)
                .iter()
                .map(|p| scores.score(scheme, p.index()))
                .fold(0.0, f64::max);
            1.0 - best
        })
        .collect())
}

/// Joint information content per edge, before normalization.
///
/// Every (edge, predicate) pair counts as one statement, read in both
/// directions: `IC(p) = -ln P(p)` and `IC(o | p) = -ln P(o | p)` where
/// `P(o | p)` is the share of `p`-edges touching `o`. An edge takes its most
/// informative predicate and orientation.
pub fn joint_information_content(g: &KnowledgeGraph) -> Vec<f64> {
    let p = g.predicate_count();
    let mut count = vec![0usize; p];
    let mut with_object: std::collections::HashMap<(usize, NodeId), usize> = Default::default();
    for e in g.edges() {
        let (a, b) = g.endpoints(e);
        for &pred in g.edge_predicates(e) {
            count[pred.index()] += 1;
            *with_object.entry((pred.index(), a)).or_default() += 1;
            *with_object.entry((pred.index(), b)).or_default() += 1;
        }
    }
    let total: usize = count.iter().sum();
    g.edges()
        .map(|e| {
            let (a, b) = g.endpoints(e);
            g.edge_predicates(e)
                .iter()
                .flat_map(|pred| [(pred.index(), a), (pred.index(), b)])
                .map(|(pi, obj)| {
                    let ic_pred = -(count[pi] as f64 / total as f64).ln();
                    let ic_obj = -(with_object[&(pi, obj)] as f64 / count[pi] as f64).ln();
                    ic_pred + ic_obj
                })
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect()
}

/// JointIC costs: `1 - (ic - min) / (max - min)` per edge. When every
/// edge carries the same information all costs are 1.
pub fn joint_ic_costs(g: &KnowledgeGraph) -> Vec<f64> {
    let ic = joint_information_content(g);
    let min = ic.iter().copied().fold(f64::INFINITY, f64::min);
    let max = ic.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = max - min;
    ic.into_iter()
        .map(|x| if span > 0.0 { 1.0 - (x - min) / span } else { 1.0 })
        .collect()
}

pub fn joint_ic_cost(g: &KnowledgeGraph, from: &str, to: &str) -> Result<f64> {
    let (u, v) = (g.require_node(from)?, g.require_node(to)?);
    let e = g.edge_between(u, v).ok_or_else(|| Error::NotAdjacent {
        from: from.to_string(),
        to: to.to_string(),
    })?;
    Ok(joint_ic_costs(g)[e.index()])
}
