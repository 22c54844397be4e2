//! Single-source shortest paths restricted to a union subgraph.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};

use crate::error::{Error, Result};
use crate::graph::NodeId;
use crate::subgraph::SubGraph;
use crate::weighting::EdgeWeigher;

/// A subgraph's edges with both traversal costs resolved, in local indices.
#[derive(Debug, Clone)]
pub struct UnionView {
    local: HashMap<NodeId, usize>,
    nodes: Vec<NodeId>,
    adjacency: Vec<Vec<(usize, f64)>>,
}

impl UnionView {
    pub fn new(sub: &SubGraph, weigher: &EdgeWeigher<'_>) -> Result<Self> {
        if !sub.built_from(weigher.graph()) {
            return Err(Error::GraphMismatch);
        }
        let nodes: Vec<NodeId> = sub.members.iter().copied().collect();
        let local: HashMap<NodeId, usize> = nodes.iter().enumerate().map(|(i, &n)| (n, i)).collect();
        let mut adjacency = vec![Vec::new(); nodes.len()];
        for e in &sub.edges {
            let (a, b) = (local[&e.a], local[&e.b]);
            adjacency[a].push((b, weigher.cost(e.a, e.b, e.edge)));
            adjacency[b].push((a, weigher.cost(e.b, e.a, e.edge)));
        }
        Ok(UnionView {
            local,
            nodes,
            adjacency,
        })
    }

    pub fn contains(&self, n: NodeId) -> bool {
        self.local.contains_key(&n)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    fn require(&self, n: NodeId) -> Result<usize> {
        self.local
            .get(&n)
            .copied()
            .ok_or_else(|| Error::UnknownNode(format!("node #{} is not in the union graph", n.0)))
    }

    /// Dijkstra from `from`; `None` marks unreachable nodes. Indexed like
    /// [`UnionView::node_at`].
    pub fn shortest_from(&self, from: NodeId) -> Result<Vec<Option<f64>>> {
        let src = self.require(from)?;
        let mut dist: Vec<Option<f64>> = vec![None; self.nodes.len()];
        let mut done = vec![false; self.nodes.len()];
        let mut heap = BinaryHeap::new();
        dist[src] = Some(0.0);
        heap.push(Frontier { cost: 0.0, node: src });
        while let Some(Frontier { cost, node }) = heap.pop() {
            if done[node] {
                continue;
            }
            done[node] = true;
            for &(next, w) in &self.adjacency[node] {
                let candidate = cost + w;
                if dist[next].is_none_or(|d| candidate < d) {
                    dist[next] = Some(candidate);
                    heap.push(Frontier {
                        cost: candidate,
                        node: next,
                    });
                }
            }
        }
        Ok(dist)
    }

    pub fn index_of(&self, n: NodeId) -> Option<usize> {
        self.local.get(&n).copied()
    }

    pub fn node_at(&self, i: usize) -> NodeId {
        self.nodes[i]
    }
}

/// Shortest traversal cost from `from` to `to` inside the union graph, or
/// `None` when they are disconnected.
pub fn node_pair_distance(view: &UnionView, from: NodeId, to: NodeId) -> Result<Option<f64>> {
    let target = view.require(to)?;
    Ok(view.shortest_from(from)?[target])
}

#[derive(Debug, Clone, Copy)]
struct Frontier {
    cost: f64,
    node: usize,
}

impl PartialEq for Frontier {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Frontier {}

impl PartialOrd for Frontier {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Frontier {
    // Min-heap on cost, ties by node index for determinism.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .cost
            .total_cmp(&self.cost)
            .then_with(|| other.node.cmp(&self.node))
    }
}
