//! Knowledge-graph entity distances for cold-start news recommendation.
//!
//! The pipeline: parse and prune a triple dump into a [`graph::KnowledgeGraph`],
//! expand each article's seed entities into a subgraph, weight edges, and
//! score article pairs by shortest entity distance. [`eval`] scores those
//! distances against human ratings.

pub mod article;
pub mod error;
pub mod eval;
pub mod graph;
pub mod ntriples;
pub mod prune;
pub mod scorer;
pub mod snapshot;
pub mod subgraph;
pub mod weighting;

pub use error::{Error, Result};
