use std::collections::BTreeMap;
use std::io::Write;

use super::{label_pairs, AnnotationRecord, EvalCondition};
use crate::error::{Error, Result};
use crate::scorer::ScoreTable;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Confusion {
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    pub fn_: usize,
}

impl Confusion {
    /// Counts over pairs present in both maps; the pair sets must match.
    pub fn from_labels(labels: &BTreeMap<String, bool>, decisions: &BTreeMap<String, bool>) -> Result<Self> {
        if let Some(p) = labels.keys().find(|p| !decisions.contains_key(*p)) {
            return Err(Error::data("scores", format!("missing pair `{p}`")));
        }
        if let Some(p) = decisions.keys().find(|p| !labels.contains_key(*p)) {
            return Err(Error::data("scores", format!("unknown pair `{p}`")));
        }
        let mut c = Confusion::default();
        for (pair, &truth) in labels {
            match (truth, decisions[pair]) {
                (true, true) => c.tp += 1,
                (false, true) => c.fp += 1,
                (false, false) => c.tn += 1,
                (true, false) => c.fn_ += 1,
            }
        }
        Ok(c)
    }

    pub fn total(&self) -> usize {
        self.tp + self.fp + self.tn + self.fn_
    }

    /// `None` when nothing was predicted positive.
    pub fn precision(&self) -> Option<f64> {
        ratio(self.tp, self.tp + self.fp)
    }

    /// `None` when there are no positives.
    pub fn recall(&self) -> Option<f64> {
        ratio(self.tp, self.tp + self.fn_)
    }

    pub fn f1(&self) -> f64 {
        f1_score(self.precision().unwrap_or(0.0), self.recall().unwrap_or(0.0))
    }
}

fn ratio(num: usize, den: usize) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

/// Harmonic mean of precision and recall; 0 when both are 0.
pub fn f1_score(precision: f64, recall: f64) -> f64 {
    if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    }
}

pub fn positive_rate(labels: &BTreeMap<String, bool>) -> f64 {
    if labels.is_empty() {
        return 0.0;
    }
    labels.values().filter(|&&l| l).count() as f64 / labels.len() as f64
}

/// Pearson correlation; `None` for fewer than two points or constant input.
pub fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    assert_eq!(x.len(), y.len(), "correlation inputs differ in length");
    let n = x.len();
    if n < 2 {
        return None;
    }
    let mx = x.iter().sum::<f64>() / n as f64;
    let my = y.iter().sum::<f64>() / n as f64;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// 1-based ranks, ties sharing their mean rank.
pub fn average_ranks(x: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    let mut ranks = vec![0.0; x.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && x[order[j + 1]] == x[order[i]] {
            j += 1;
        }
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = rank;
        }
        i = j + 1;
    }
    ranks
}

pub fn spearman(x: &[f64], y: &[f64]) -> Option<f64> {
    pearson(&average_ranks(x), &average_ranks(y))
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricRow {
    pub method: String,
    pub condition: EvalCondition,
    pub confusion: Confusion,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationRow {
    pub method: String,
    pub n: usize,
    pub pearson: Option<f64>,
    pub spearman: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct MetricsReport {
    pub metrics: Vec<MetricRow>,
    pub correlations: Vec<CorrelationRow>,
}

/// Scores every method of `table` against the ratings. Each method must
/// cover exactly the rated pairs. Correlations use the negated z-score, so
/// that higher means more recommendable, against the mean q2 rating.
pub fn evaluate(table: &ScoreTable, records: &[AnnotationRecord], conditions: &[EvalCondition]) -> Result<MetricsReport> {
    let mean_q2: BTreeMap<&str, f64> = records.iter().map(|r| (r.pair_id.as_str(), r.mean_q2())).collect();
    let labels: Vec<BTreeMap<String, bool>> = conditions.iter().map(|&c| label_pairs(records, c)).collect();
    let mut report = MetricsReport::default();
    for method in table.methods() {
        let column = table.column(method);
        let decisions: BTreeMap<String, bool> = column.iter().map(|r| (r.pair_id.clone(), r.decision)).collect();
        for (cond, labels) in conditions.iter().zip(&labels) {
            let confusion =
                Confusion::from_labels(labels, &decisions).map_err(|e| Error::data(format!("method {method}"), e.to_string()))?;
            report.metrics.push(MetricRow {
                method: method.to_string(),
                condition: *cond,
                confusion,
            });
        }
        let mut scores = Vec::with_capacity(column.len());
        let mut targets = Vec::with_capacity(column.len());
        for r in &column {
            let target = mean_q2
                .get(r.pair_id.as_str())
                .ok_or_else(|| Error::data(format!("method {method}"), format!("unknown pair `{}`", r.pair_id)))?;
            scores.push(-r.z_score);
            targets.push(*target);
        }
        if column.len() != records.len() {
            return Err(Error::data(
                format!("method {method}"),
                format!("{} scored pairs, {} rated", column.len(), records.len()),
            ));
        }
        report.correlations.push(CorrelationRow {
            method: method.to_string(),
            n: scores.len(),
            pearson: pearson(&scores, &targets),
            spearman: spearman(&scores, &targets),
        });
    }
    Ok(report)
}

fn opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

impl MetricsReport {
    /// `method,condition,tp,fp,tn,fn,precision,recall,f1`; an undefined
    /// precision or recall is left empty and counts as 0 in f1.
    pub fn write_metrics_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let io = |e: csv::Error| Error::Stream(e.into());
        w.write_record(["method", "condition", "tp", "fp", "tn", "fn", "precision", "recall", "f1"])
            .map_err(io)?;
        for r in &self.metrics {
            let c = &r.confusion;
            w.write_record([
                r.method.clone(),
                r.condition.to_string(),
                c.tp.to_string(),
                c.fp.to_string(),
                c.tn.to_string(),
                c.fn_.to_string(),
                opt(c.precision()),
                opt(c.recall()),
                c.f1().to_string(),
            ])
            .map_err(io)?;
        }
        w.flush()?;
        Ok(())
    }

    /// `method,n,pearson,spearman`; undefined coefficients are left empty.
    pub fn write_correlations_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let io = |e: csv::Error| Error::Stream(e.into());
        w.write_record(["method", "n", "pearson", "spearman"]).map_err(io)?;
        for r in &self.correlations {
            w.write_record([r.method.clone(), r.n.to_string(), opt(r.pearson), opt(r.spearman)])
                .map_err(io)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Method by condition F1 table (percent), methods as rows.
    pub fn comparison_table(&self) -> String {
        let mut conditions: Vec<String> = Vec::new();
        let mut methods: Vec<&str> = Vec::new();
        for r in &self.metrics {
            let c = r.condition.to_string();
            if !conditions.contains(&c) {
                conditions.push(c);
            }
            if !methods.contains(&r.method.as_str()) {
                methods.push(&r.method);
            }
        }
        let width = methods.iter().map(|m| m.len()).max().unwrap_or(0).max(6);
        let mut out = format!("{:<width$}", "method");
        for c in &conditions {
            out.push_str(&format!(" {c:>8}"));
        }
        out.push_str(&format!(" {:>8} {:>8}\n", "pearson", "spearman"));
        for m in methods {
            out.push_str(&format!("{m:<width$}"));
            for c in &conditions {
                let f1 = self
                    .metrics
                    .iter()
                    .find(|r| r.method == m && r.condition.to_string() == *c)
                    .map(|r| format!("{:.2}", 100.0 * r.confusion.f1()))
                    .unwrap_or_default();
                out.push_str(&format!(" {f1:>8}"));
            }
            let corr = self.correlations.iter().find(|r| r.method == m);
            let fmt = |x: Option<f64>| x.map(|v| format!("{v:.4}")).unwrap_or_else(|| "n/a".into());
            out.push_str(&format!(
                " {:>8} {:>8}\n",
                fmt(corr.and_then(|c| c.pearson)),
                fmt(corr.and_then(|c| c.spearman))
            ));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn map(v: &[(&str, bool)]) -> BTreeMap<String, bool> {
        v.iter().map(|(p, b)| (p.to_string(), *b)).collect()
    }

    #[test]
    fn f1_symmetric_point() {
        assert_eq!(f1_score(0.5, 0.5), 0.5);
        assert_eq!(f1_score(0.0, 0.0), 0.0);
    }

    #[test]
    fn confusion_counts_and_degenerate_precision() {
        let labels = map(&[("1", true), ("2", false), ("3", true)]);
        let c = Confusion::from_labels(&labels, &map(&[("1", true), ("2", true), ("3", false)])).unwrap();
        assert_eq!((c.tp, c.fp, c.tn, c.fn_), (1, 1, 0, 1));
        assert_eq!(c.f1(), 0.5);
        let none = Confusion::from_labels(&labels, &map(&[("1", false), ("2", false), ("3", false)])).unwrap();
        assert_eq!(none.precision(), None);
        assert_eq!(none.f1(), 0.0);
        let err = Confusion::from_labels(&labels, &map(&[("1", true), ("2", true)])).unwrap_err();
        assert!(err.to_string().contains("`3`"));
    }

    #[test]
    fn correlations_basic() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        assert!((pearson(&x, &x).unwrap() - 1.0).abs() < 1e-12);
        assert!((spearman(&x, &neg).unwrap() + 1.0).abs() < 1e-12);
        assert_eq!(pearson(&x, &[1.0; 4]), None);
    }

    #[test]
    fn ties_get_mean_rank() {
        assert_eq!(average_ranks(&[10.0, 20.0, 10.0, 5.0]), vec![2.5, 4.0, 2.5, 1.0]);
    }

    proptest! {
        #[test]
        fn confusion_sums_to_total(bits in proptest::collection::vec((any::<bool>(), any::<bool>()), 1..60)) {
            let labels: BTreeMap<String, bool> = bits.iter().enumerate().map(|(i, b)| (i.to_string(), b.0)).collect();
            let decisions: BTreeMap<String, bool> = bits.iter().enumerate().map(|(i, b)| (i.to_string(), b.1)).collect();
            let c = Confusion::from_labels(&labels, &decisions).unwrap();
            prop_assert_eq!(c.total(), bits.len());
            let f1 = c.f1();
            prop_assert!((0.0..=1.0).contains(&f1));
        }

        #[test]
        fn f1_ignores_pair_names(bits in proptest::collection::vec((any::<bool>(), any::<bool>()), 1..40), salt in 0u32..1000) {
            let name = |i: usize, s: u32| format!("p{}", (i as u32 * 7919 + s) % 100_003);
            let f = |s: u32| {
                let labels = bits.iter().enumerate().map(|(i, b)| (name(i, s), b.0)).collect();
                let decisions = bits.iter().enumerate().map(|(i, b)| (name(i, s), b.1)).collect();
                Confusion::from_labels(&labels, &decisions).unwrap().f1()
            };
            prop_assert_eq!(f(0), f(salt));
        }

        #[test]
        fn spearman_monotone_invariance(xs in proptest::collection::vec(-100.0f64..100.0, 3..40)) {
            let ys: Vec<f64> = xs.iter().enumerate().map(|(i, x)| (i as f64 * 0.37).sin() + 0.01 * x).collect();
            let transformed: Vec<f64> = xs.iter().map(|x| (x / 50.0).exp() * 3.0 - 2.0).collect();
            match (spearman(&xs, &ys), spearman(&transformed, &ys)) {
                (Some(a), Some(b)) => prop_assert!((a - b).abs() < 1e-12),
                (a, b) => prop_assert_eq!(a.is_none(), b.is_none()),
            }
        }
    }
}
