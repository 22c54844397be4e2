//! Shortest entity distance between two articles' seed sets.

use std::fmt;
use std::str::FromStr;

use crate::article::ArticleSeeds;
use crate::error::{Error, Result};
use crate::scorer::paths::UnionView;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum SedVariant {
    /// Average over the first article's seeds of the nearest seed of the
    /// second.
    Row,
    /// Average over all seed pairs.
    Avg,
    /// Mean of both row directions.
    #[default]
    Sym,
}

impl SedVariant {
    pub fn name(self) -> &'static str {
        match self {
            SedVariant::Row => "row",
            SedVariant::Avg => "avg",
            SedVariant::Sym => "sym",
        }
    }
}

impl fmt::Display for SedVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SedVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "row" => Ok(SedVariant::Row),
            "avg" | "all-average" => Ok(SedVariant::Avg),
            "sym" | "symmetric" => Ok(SedVariant::Sym),
            other => Err(Error::Config(format!("unknown SED variant `{other}`"))),
        }
    }
}

/// Maps raw path costs onto `[0, 1]`: finite costs are divided by the
/// largest finite cost seen across the corpus, disconnections take the
/// penalty.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Normalizer {
    pub corpus_max_finite: f64,
    pub penalty: f64,
}

impl Normalizer {
    pub fn new(corpus_max_finite: f64, penalty: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&penalty) {
            return Err(Error::Config(format!("penalty must be in [0, 1], got {penalty}")));
        }
        if !(corpus_max_finite >= 0.0 && corpus_max_finite.is_finite()) {
            return Err(Error::Config(format!("invalid corpus maximum {corpus_max_finite}")));
        }
        Ok(Normalizer {
            corpus_max_finite,
            penalty,
        })
    }

    pub fn apply(&self, raw: Option<f64>) -> f64 {
        normalize_distance(raw, self.corpus_max_finite, self.penalty)
    }
}

pub fn normalize_distance(raw: Option<f64>, corpus_max_finite: f64, penalty: f64) -> f64 {
    match raw {
        None => penalty,
        // Every finite distance is zero when the maximum is.
        Some(_) if corpus_max_finite <= 0.0 => 0.0,
        Some(d) => d / corpus_max_finite,
    }
}

/// Raw node-pair distances between two seed sets, in both directions.
///
/// Seeds are ordered present-then-missing. Missing seeds (absent from the
/// graph) behave like isolated nodes: every distance involving them is
/// `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct PairDistances {
    rows: usize,
    cols: usize,
    /// `forward[i * cols + j]` = D(first_i, second_j).
    forward: Vec<Option<f64>>,
    /// `backward[j * rows + i]` = D(second_j, first_i).
    backward: Vec<Option<f64>>,
}

impl PairDistances {
    pub fn compute(view: &UnionView, first: &ArticleSeeds, second: &ArticleSeeds) -> Result<Self> {
        let rows = first.len();
        let cols = second.len();
        let mut forward = vec![None; rows * cols];
        let mut backward = vec![None; rows * cols];
        let second_local: Vec<Option<usize>> = second.present.iter().map(|&n| view.index_of(n)).collect();
        let first_local: Vec<Option<usize>> = first.present.iter().map(|&n| view.index_of(n)).collect();
        for (i, &m) in first.present.iter().enumerate() {
            let dist = view.shortest_from(m)?;
            for (j, local) in second_local.iter().enumerate() {
                forward[i * cols + j] = local.and_then(|l| dist[l]);
            }
        }
        for (j, &n) in second.present.iter().enumerate() {
            let dist = view.shortest_from(n)?;
            for (i, local) in first_local.iter().enumerate() {
                backward[j * rows + i] = local.and_then(|l| dist[l]);
            }
        }
        Ok(PairDistances {
            rows,
            cols,
            forward,
            backward,
        })
    }

    /// Builds from explicit matrices (row-major, `forward` is rows x cols,
    /// `backward` cols x rows).
    pub fn from_matrices(rows: usize, cols: usize, forward: Vec<Option<f64>>, backward: Vec<Option<f64>>) -> Result<Self> {
        if forward.len() != rows * cols || backward.len() != rows * cols {
            return Err(Error::Config("distance matrix shape mismatch".into()));
        }
        Ok(PairDistances {
            rows,
            cols,
            forward,
            backward,
        })
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn forward(&self, i: usize, j: usize) -> Option<f64> {
        self.forward[i * self.cols + j]
    }

    pub fn backward(&self, j: usize, i: usize) -> Option<f64> {
        self.backward[j * self.rows + i]
    }

    /// Swaps the roles of the two seed sets.
    pub fn reversed(&self) -> Self {
        PairDistances {
            rows: self.cols,
            cols: self.rows,
            forward: self.backward.clone(),
            backward: self.forward.clone(),
        }
    }

    /// Largest finite distance in either direction.
    pub fn max_finite(&self) -> Option<f64> {
        self.forward
            .iter()
            .chain(&self.backward)
            .flatten()
            .copied()
            .reduce(f64::max)
    }

    /// Directional SED: mean over first-set seeds of the normalized
    /// distance to the nearest second-set seed.
    pub fn directional(&self, norm: &Normalizer) -> Result<f64> {
        if self.rows == 0 || self.cols == 0 {
            return Err(Error::EmptySeedSet);
        }
        let total: f64 = (0..self.rows)
            .map(|i| {
                (0..self.cols)
                    .map(|j| norm.apply(self.forward(i, j)))
                    .fold(f64::INFINITY, f64::min)
            })
            .sum();
        Ok(total / self.rows as f64)
    }

    pub fn all_pairs_average(&self, norm: &Normalizer) -> Result<f64> {
        if self.rows == 0 || self.cols == 0 {
            return Err(Error::EmptySeedSet);
        }
        let total: f64 = self.forward.iter().map(|&d| norm.apply(d)).sum();
        Ok(total / (self.rows * self.cols) as f64)
    }

    pub fn variant(&self, variant: SedVariant, norm: &Normalizer) -> Result<f64> {
        match variant {
            SedVariant::Row => self.directional(norm),
            SedVariant::Avg => self.all_pairs_average(norm),
            SedVariant::Sym => {
                let there = self.directional(norm)?;
                let back = self.reversed().directional(norm)?;
                Ok((there + back) / 2.0)
            }
        }
    }
}
