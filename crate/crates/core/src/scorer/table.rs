//! Per-pair scores for several methods, z-normalization and ensembles.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap, HashSet};
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Orders pair ids numerically when both are integers, otherwise
/// lexicographically (numeric ids first).
pub fn cmp_pair_ids(a: &str, b: &str) -> Ordering {
    match (a.parse::<u64>(), b.parse::<u64>()) {
        (Ok(x), Ok(y)) => x.cmp(&y).then_with(|| a.cmp(b)),
        (Ok(_), Err(_)) => Ordering::Less,
        (Err(_), Ok(_)) => Ordering::Greater,
        (Err(_), Err(_)) => a.cmp(b),
    }
}

/// The recommendation rule on z-scored distances: closer than average.
pub fn recommend(z_score: f64) -> bool {
    z_score < 0.0
}

#[derive(Debug, Clone, PartialEq)]
pub struct ZScores {
    pub values: Vec<f64>,
    pub mean: f64,
    /// Population standard deviation.
    pub std_dev: f64,
    /// True when the input was constant; all values are then 0.
    pub degenerate: bool,
}

pub fn znormalize(xs: &[f64]) -> Result<ZScores> {
    if xs.len() < 2 {
        return Err(Error::Config(format!(
            "z-normalization needs at least 2 values, got {}",
            xs.len()
        )));
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    let std_dev = var.sqrt();
    if std_dev == 0.0 || !std_dev.is_finite() {
        log::warn!("constant score column; every z-score set to 0");
        return Ok(ZScores {
            values: vec![0.0; xs.len()],
            mean,
            std_dev: 0.0,
            degenerate: true,
        });
    }
    Ok(ZScores {
        values: xs.iter().map(|x| (x - mean) / std_dev).collect(),
        mean,
        std_dev,
        degenerate: false,
    })
}

/// Per-pair mean of several z-score columns, sorted by pair id. Every
/// column must cover exactly the same pairs.
pub fn ensemble(columns: &[Vec<(String, f64)>]) -> Result<Vec<(String, f64)>> {
    let Some(first) = columns.first() else {
        return Err(Error::Config("ensemble needs at least one column".into()));
    };
    let mut sums: BTreeMap<&str, f64> = BTreeMap::new();
    for (pair, z) in first {
        if sums.insert(pair, *z).is_some() {
            return Err(Error::data("ensemble", format!("duplicate pair `{pair}`")));
        }
    }
    for (k, col) in columns.iter().enumerate().skip(1) {
        if col.len() != first.len() {
            return Err(Error::data(
                "ensemble",
                format!("column {k} has {} pairs, expected {}", col.len(), first.len()),
            ));
        }
        let mut seen = HashSet::new();
        for (pair, z) in col {
            match sums.get_mut(pair.as_str()) {
                Some(s) if seen.insert(pair.as_str()) => *s += z,
                Some(_) => return Err(Error::data("ensemble", format!("duplicate pair `{pair}`"))),
                None => return Err(Error::data("ensemble", format!("pair `{pair}` missing from column 0"))),
            }
        }
    }
    let k = columns.len() as f64;
    let mut out: Vec<(String, f64)> = sums.into_iter().map(|(p, s)| (p.to_string(), s / k)).collect();
    out.sort_by(|a, b| cmp_pair_ids(&a.0, &b.0));
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairScore {
    pub pair_id: String,
    pub method: String,
    pub raw_distance: f64,
    pub z_score: f64,
    #[serde(with = "bool_as_int")]
    pub decision: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MethodStats {
    pub method: String,
    pub mean: f64,
    pub std_dev: f64,
    /// Largest finite raw node-pair cost (SED methods only).
    pub max_finite: Option<f64>,
    pub degenerate: bool,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ScoreTable {
    rows: Vec<PairScore>,
    stats: Vec<MethodStats>,
}

impl ScoreTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds one method's raw distances, z-normalized over all its pairs.
    pub fn add_method(&mut self, method: &str, distances: Vec<(String, f64)>, max_finite: Option<f64>) -> Result<()> {
        if self.stats.iter().any(|s| s.method == method) {
            return Err(Error::Config(format!("method `{method}` already present")));
        }
        let mut seen = HashSet::new();
        if let Some((dup, _)) = distances.iter().find(|(p, _)| !seen.insert(p.as_str())) {
            return Err(Error::data(method, format!("duplicate pair `{dup}`")));
        }
        let mut distances = distances;
        distances.sort_by(|a, b| cmp_pair_ids(&a.0, &b.0));
        let raw: Vec<f64> = distances.iter().map(|(_, d)| *d).collect();
        let z = znormalize(&raw)?;
        for ((pair_id, raw_distance), z_score) in distances.into_iter().zip(&z.values) {
            self.rows.push(PairScore {
                pair_id,
                method: method.to_string(),
                raw_distance,
                z_score: *z_score,
                decision: recommend(*z_score),
            });
        }
        self.stats.push(MethodStats {
            method: method.to_string(),
            mean: z.mean,
            std_dev: z.std_dev,
            max_finite,
            degenerate: z.degenerate,
        });
        Ok(())
    }

    /// Combines member methods by mean z-score and adds the result under
    /// `label`, re-normalized.
    pub fn add_ensemble(&mut self, label: &str, members: &[&str]) -> Result<()> {
        if members.len() < 2 {
            return Err(Error::Config("an ensemble needs at least two methods".into()));
        }
        let columns = members
            .iter()
            .map(|m| {
                let col = self.z_column(m);
                if col.is_empty() {
                    Err(Error::Config(format!("unknown method `{m}`")))
                } else {
                    Ok(col)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        let combined = ensemble(&columns)?;
        self.add_method(label, combined, None)
    }

    pub fn rows(&self) -> &[PairScore] {
        &self.rows
    }

    pub fn stats(&self) -> &[MethodStats] {
        &self.stats
    }

    pub fn methods(&self) -> Vec<&str> {
        self.stats.iter().map(|s| s.method.as_str()).collect()
    }

    /// Rows of one method, ordered by pair id.
    pub fn column(&self, method: &str) -> Vec<&PairScore> {
        let mut col: Vec<&PairScore> = self.rows.iter().filter(|r| r.method == method).collect();
        col.sort_by(|a, b| cmp_pair_ids(&a.pair_id, &b.pair_id));
        col
    }

    pub fn z_column(&self, method: &str) -> Vec<(String, f64)> {
        self.column(method)
            .into_iter()
            .map(|r| (r.pair_id.clone(), r.z_score))
            .collect()
    }

    /// Merges another table; method names must not collide.
    pub fn extend(&mut self, other: ScoreTable) -> Result<()> {
        for s in &other.stats {
            if self.stats.iter().any(|x| x.method == s.method) {
                return Err(Error::Config(format!("method `{}` present in two score tables", s.method)));
            }
        }
        self.rows.extend(other.rows);
        self.stats.extend(other.stats);
        Ok(())
    }

    /// Writes `pair_id,method,raw_distance,z_score,decision`, methods in
    /// insertion order, pairs by id.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(writer);
        let io = |e: csv::Error| Error::Stream(e.into());
        w.write_record(["pair_id", "method", "raw_distance", "z_score", "decision"])
            .map_err(io)?;
        for m in self.methods() {
            for r in self.column(m) {
                w.serialize(r).map_err(io)?;
            }
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_csv_file(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_csv(std::io::BufWriter::new(file))
    }

    /// Reads a score CSV. Normalization statistics are recomputed from the
    /// raw distances; stored z-scores and decisions are kept as written.
    pub fn read_csv<R: Read>(reader: R, source: &str) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(reader);
        let mut by_method: Vec<(String, Vec<PairScore>)> = Vec::new();
        let mut index: HashMap<String, usize> = HashMap::new();
        for (i, row) in rdr.deserialize::<PairScore>().enumerate() {
            let row = row.map_err(|e| Error::data(format!("{source}: row {}", i + 2), e.to_string()))?;
            let k = *index.entry(row.method.clone()).or_insert_with(|| {
                by_method.push((row.method.clone(), Vec::new()));
                by_method.len() - 1
            });
            by_method[k].1.push(row);
        }
        let mut table = ScoreTable::new();
        for (method, rows) in by_method {
            let mut seen = HashSet::new();
            if let Some(dup) = rows.iter().find(|r| !seen.insert(r.pair_id.as_str())) {
                return Err(Error::data(source, format!("duplicate pair `{}` for {method}", dup.pair_id)));
            }
            let raw: Vec<f64> = rows.iter().map(|r| r.raw_distance).collect();
            let z = znormalize(&raw)?;
            table.stats.push(MethodStats {
                method,
                mean: z.mean,
                std_dev: z.std_dev,
                max_finite: None,
                degenerate: z.degenerate,
            });
            table.rows.extend(rows);
        }
        Ok(table)
    }

    pub fn read_csv_file(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read_csv(std::io::BufReader::new(file), &path.display().to_string())
    }
}

/// Reads `pair_id,distance` rows of externally computed (embedding)
/// distances. Every expected pair must appear exactly once, nothing else
/// may, and distances must lie in `[0, 1]`.
pub fn parse_embedding_scores<R: Read>(reader: R, expected_pairs: &[String], source: &str) -> Result<Vec<(String, f64)>> {
    #[derive(Deserialize)]
    struct Row {
        pair_id: String,
        distance: f64,
    }
    let expected: HashSet<&str> = expected_pairs.iter().map(String::as_str).collect();
    let mut rdr = csv::Reader::from_reader(reader);
    let mut out = Vec::with_capacity(expected_pairs.len());
    let mut seen = HashSet::new();
    for (i, row) in rdr.deserialize::<Row>().enumerate() {
        let location = format!("{source}: row {}", i + 2);
        let row = row.map_err(|e| Error::data(&location, e.to_string()))?;
        if !(0.0..=1.0).contains(&row.distance) {
            return Err(Error::data(
                location,
                format!("distance {} for pair `{}` outside [0, 1]", row.distance, row.pair_id),
            ));
        }
        if !expected.contains(row.pair_id.as_str()) {
            return Err(Error::data(location, format!("unknown pair `{}`", row.pair_id)));
        }
        if !seen.insert(row.pair_id.clone()) {
            return Err(Error::data(location, format!("duplicate pair `{}`", row.pair_id)));
        }
        out.push((row.pair_id, row.distance));
    }
    if let Some(missing) = expected_pairs.iter().find(|p| !seen.contains(*p)) {
        return Err(Error::data(source, format!("missing pair `{missing}`")));
    }
    Ok(out)
}

pub fn import_embedding_scores(path: &Path, expected_pairs: &[String]) -> Result<Vec<(String, f64)>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    parse_embedding_scores(file, expected_pairs, &path.display().to_string())
}

mod bool_as_int {
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &bool, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_u8(*v as u8)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<bool, D::Error> {
        match String::deserialize(d)?.trim() {
            "1" | "true" => Ok(true),
            "0" | "false" => Ok(false),
            other => Err(de::Error::custom(format!("invalid decision `{other}`"))),
        }
    }
}
