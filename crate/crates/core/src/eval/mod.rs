//! Human-rated article pairs, labeling rules and evaluation metrics.

mod metrics;
mod records;

pub use metrics::{
    average_ranks, evaluate, f1_score, pearson, positive_rate, spearman, Confusion, CorrelationRow, MetricRow, MetricsReport,
};
pub use records::{
    convert_long_format, load_annotated_corpus, load_cnrec, read_records, write_records, AnnotatedCorpus,
    AnnotationRecord, CNREC_ARTICLES, CNREC_PAIRS, RATERS,
};

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    /// Good recommendation: enough raters would recommend the pair.
    Gr,
    /// Diverse recommendation: a good recommendation that at least half of
    /// the raters also find not very similar.
    Dr,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalCondition {
    pub family: Family,
    pub threshold: f64,
}

impl EvalCondition {
    pub const STANDARD_THRESHOLDS: [f64; 2] = [0.5, 0.75];

    pub fn new(family: Family, threshold: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&threshold) {
            return Err(Error::Config(format!("threshold must be in [0, 1], got {threshold}")));
        }
        let cond = EvalCondition { family, threshold };
        if !cond.is_standard() {
            log::warn!("non-standard evaluation threshold {threshold}");
        }
        Ok(cond)
    }

    /// The four conditions reported by default.
    pub fn standard() -> [EvalCondition; 4] {
        [
            EvalCondition { family: Family::Gr, threshold: 0.75 },
            EvalCondition { family: Family::Gr, threshold: 0.5 },
            EvalCondition { family: Family::Dr, threshold: 0.75 },
            EvalCondition { family: Family::Dr, threshold: 0.5 },
        ]
    }

    pub fn is_standard(&self) -> bool {
        Self::STANDARD_THRESHOLDS.contains(&self.threshold)
    }

    /// Applies the labeling rule; both thresholds are inclusive.
    pub fn is_positive(&self, record: &AnnotationRecord) -> bool {
        let good = record.mean_q2() >= self.threshold;
        match self.family {
            Family::Gr => good,
            Family::Dr => good && 2 * record.not_very_similar_count() >= RATERS,
        }
    }
}

impl fmt::Display for EvalCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let family = match self.family {
            Family::Gr => "GR",
            Family::Dr => "DR",
        };
        let t = format!("{:.2}", self.threshold);
        write!(f, "{family}@{}", t.strip_prefix('0').unwrap_or(&t))
    }
}

impl FromStr for EvalCondition {
    type Err = Error;

    /// Accepts `GR@.75`, `gr@0.75` and the percent form `DR@50`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Config(format!("invalid condition `{s}` (expected e.g. GR@.75)"));
        let (family, t) = s.trim().split_once('@').ok_or_else(bad)?;
        let family = match family.to_ascii_uppercase().as_str() {
            "GR" => Family::Gr,
            "DR" => Family::Dr,
            _ => return Err(bad()),
        };
        let mut threshold: f64 = t.parse().map_err(|_| bad())?;
        if threshold > 1.0 {
            threshold /= 100.0;
        }
        EvalCondition::new(family, threshold)
    }
}

/// Label per pair id.
pub fn label_pairs(records: &[AnnotationRecord], cond: EvalCondition) -> BTreeMap<String, bool> {
    records
        .iter()
        .map(|r| (r.pair_id.clone(), cond.is_positive(r)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(q1: [u8; 6], q2: [u8; 6]) -> AnnotationRecord {
        AnnotationRecord {
            pair_id: "1".into(),
            article_a: "a".into(),
            article_b: "b".into(),
            q1,
            q2,
        }
    }

    #[test]
    fn gr_threshold_is_inclusive() {
        let r = rec([0; 6], [1, 1, 1, 0, 0, 0]);
        assert!("GR@.50".parse::<EvalCondition>().unwrap().is_positive(&r));
        assert!(!"GR@.75".parse::<EvalCondition>().unwrap().is_positive(&r));
    }

    #[test]
    fn dr_rule() {
        let r = rec([1, 1, 0, 2, 2, 2], [1, 1, 1, 1, 1, 0]);
        assert!("DR@.75".parse::<EvalCondition>().unwrap().is_positive(&r));
        let similar = rec([2; 6], [1; 6]);
        assert!(!"DR@.5".parse::<EvalCondition>().unwrap().is_positive(&similar));
        assert!("GR@.5".parse::<EvalCondition>().unwrap().is_positive(&similar));
    }

    #[test]
    fn condition_parsing_and_display() {
        for (s, shown) in [("GR@.75", "GR@.75"), ("gr@0.5", "GR@.50"), ("DR@50", "DR@.50"), ("DR@0.75", "DR@.75")] {
            assert_eq!(s.parse::<EvalCondition>().unwrap().to_string(), shown);
        }
        for bad in ["GR", "XR@.5", "GR@abc", "GR@-0.1"] {
            assert!(bad.parse::<EvalCondition>().is_err(), "{bad}");
        }
        assert!(!"GR@.6".parse::<EvalCondition>().unwrap().is_standard());
    }
}
