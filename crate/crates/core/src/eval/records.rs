use std::collections::{BTreeMap, HashSet};
use std::io::{Read, Write};
use std::path::Path;

use crate::article::{load_corpus, Article};
use crate::error::{Error, Result};
use crate::scorer::{cmp_pair_ids, ArticlePair};

/// Raters per pair.
pub const RATERS: usize = 6;
pub const CNREC_ARTICLES: usize = 300;
pub const CNREC_PAIRS: usize = 2700;

/// One rated pair. `q1` is similarity (0 not, 1 similar, 2 very similar);
/// `q2` is whether the pair is a good recommendation (0/1).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnnotationRecord {
    pub pair_id: String,
    pub article_a: String,
    pub article_b: String,
    pub q1: [u8; RATERS],
    pub q2: [u8; RATERS],
}

impl AnnotationRecord {
    pub fn mean_q1(&self) -> f64 {
        self.q1.iter().map(|&x| x as f64).sum::<f64>() / RATERS as f64
    }

    pub fn mean_q2(&self) -> f64 {
        self.q2.iter().map(|&x| x as f64).sum::<f64>() / RATERS as f64
    }

    /// Raters who rated the pair at most "similar".
    pub fn not_very_similar_count(&self) -> usize {
        self.q1.iter().filter(|&&x| x <= 1).count()
    }

    pub fn pair(&self) -> ArticlePair {
        ArticlePair::new(&self.pair_id, &self.article_a, &self.article_b)
    }
}

fn header() -> Vec<String> {
    let mut h = vec!["pair_id".to_string(), "article_a".into(), "article_b".into()];
    h.extend((1..=RATERS).map(|i| format!("q1_{i}")));
    h.extend((1..=RATERS).map(|i| format!("q2_{i}")));
    h
}

/// Reads the canonical annotation CSV
/// (`pair_id,article_a,article_b,q1_1..q1_6,q2_1..q2_6`).
pub fn read_records<R: Read>(reader: R, source: &str) -> Result<Vec<AnnotationRecord>> {
    let mut rdr = csv::Reader::from_reader(reader);
    let expected = header();
    let found = rdr.headers().map_err(|e| Error::data(source, e.to_string()))?.clone();
    if found.iter().map(str::trim).ne(expected.iter().map(String::as_str)) {
        return Err(Error::data(
            source,
            format!("header must be `{}`", expected.join(",")),
        ));
    }
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    for (i, row) in rdr.records().enumerate() {
        let line = i + 2;
        let row = row.map_err(|e| Error::data(format!("{source}: row {line}"), e.to_string()))?;
        let rating = |col: usize, max: u8| -> Result<u8> {
            let raw = row[col].trim();
            match raw.parse::<u8>() {
                Ok(v) if v <= max => Ok(v),
                _ => Err(Error::data(
                    format!("{source}: row {line}, column {}", expected[col]),
                    format!("rating `{raw}` outside 0..={max}"),
                )),
            }
        };
        let mut q1 = [0u8; RATERS];
        let mut q2 = [0u8; RATERS];
        for k in 0..RATERS {
            q1[k] = rating(3 + k, 2)?;
            q2[k] = rating(3 + RATERS + k, 1)?;
        }
        let rec = AnnotationRecord {
            pair_id: row[0].trim().to_string(),
            article_a: row[1].trim().to_string(),
            article_b: row[2].trim().to_string(),
            q1,
            q2,
        };
        if !seen.insert(rec.pair_id.clone()) {
            return Err(Error::data(
                format!("{source}: row {line}"),
                format!("duplicate pair `{}`", rec.pair_id),
            ));
        }
        out.push(rec);
    }
    out.sort_by(|a, b| cmp_pair_ids(&a.pair_id, &b.pair_id));
    Ok(out)
}

pub fn write_records<W: Write>(records: &[AnnotationRecord], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let io = |e: csv::Error| Error::Stream(e.into());
    w.write_record(header()).map_err(io)?;
    for r in records {
        let mut row = vec![r.pair_id.clone(), r.article_a.clone(), r.article_b.clone()];
        row.extend(r.q1.iter().chain(&r.q2).map(u8::to_string));
        w.write_record(&row).map_err(io)?;
    }
    w.flush()?;
    Ok(())
}

/// Articles and rated pairs loaded from one dataset directory.
#[derive(Debug, Clone)]
pub struct AnnotatedCorpus {
    pub articles: Vec<Article>,
    pub records: Vec<AnnotationRecord>,
}

impl AnnotatedCorpus {
    pub fn pairs(&self) -> Vec<ArticlePair> {
        self.records.iter().map(AnnotationRecord::pair).collect()
    }
}

/// Loads `<root>/articles/*.txt` and `<root>/pairs.csv`, checking that every
/// pair refers to known articles and, when `expected` is given, the exact
/// article and pair counts.
pub fn load_annotated_corpus(root: &Path, expected: Option<(usize, usize)>) -> Result<AnnotatedCorpus> {
    let articles = load_corpus(&root.join("articles"))?;
    let pairs_path = root.join("pairs.csv");
    let file = std::fs::File::open(&pairs_path).map_err(|e| Error::io(&pairs_path, e))?;
    let records = read_records(std::io::BufReader::new(file), &pairs_path.display().to_string())?;
    let ids: HashSet<&str> = articles.iter().map(|a| a.id.as_str()).collect();
    for r in &records {
        for side in [&r.article_a, &r.article_b] {
            if !ids.contains(side.as_str()) {
                return Err(Error::data(
                    format!("pair {}", r.pair_id),
                    format!("references missing article `{side}`"),
                ));
            }
        }
    }
    if let Some((n_articles, n_pairs)) = expected {
        if articles.len() != n_articles {
            return Err(Error::data(
                root.display().to_string(),
                format!("expected {n_articles} articles, found {}", articles.len()),
            ));
        }
        if records.len() != n_pairs {
            return Err(Error::data(
                root.display().to_string(),
                format!("expected {n_pairs} pairs, found {}", records.len()),
            ));
        }
    }
    Ok(AnnotatedCorpus { articles, records })
}

/// Strict loader for the full benchmark: 300 articles, 2700 pairs.
pub fn load_cnrec(root: &Path) -> Result<AnnotatedCorpus> {
    load_annotated_corpus(root, Some((CNREC_ARTICLES, CNREC_PAIRS)))
}

fn parse_q1(raw: &str) -> Option<u8> {
    match raw.trim().to_ascii_lowercase().as_str() {
        "0" | "not similar" => Some(0),
        "1" | "similar" => Some(1),
        "2" | "very similar" => Some(2),
        _ => None,
    }
}

fn parse_q2(raw: &str) -> Option<u8> {
    match raw.trim().to_ascii_lowercase().as_str() {
        "0" | "no" => Some(0),
        "1" | "yes" => Some(1),
        _ => None,
    }
}

/// Converts one-row-per-rating data (`pair_id,article_a,article_b,annotator,
/// q1,q2`, ratings as numbers or as the questionnaire's answer texts) into
/// records. Raters fill the six slots in annotator order.
pub fn convert_long_format<R: Read>(reader: R, source: &str) -> Result<Vec<AnnotationRecord>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers().map_err(|e| Error::data(source, e.to_string()))?.clone();
    let col = |name: &str| -> Result<usize> {
        headers
            .iter()
            .position(|h| h.eq_ignore_ascii_case(name))
            .ok_or_else(|| Error::data(source, format!("missing column `{name}`")))
    };
    let (c_pair, c_a, c_b, c_who, c_q1, c_q2) =
        (col("pair_id")?, col("article_a")?, col("article_b")?, col("annotator")?, col("q1")?, col("q2")?);

    type Ratings = BTreeMap<String, (u8, u8)>;
    let mut pairs: BTreeMap<String, (String, String, Ratings)> = BTreeMap::new();
    for (i, row) in rdr.records().enumerate() {
        let location = format!("{source}: row {}", i + 2);
        let row = row.map_err(|e| Error::data(&location, e.to_string()))?;
        let q1 = parse_q1(&row[c_q1]).ok_or_else(|| Error::data(&location, format!("bad q1 `{}`", &row[c_q1])))?;
        let q2 = parse_q2(&row[c_q2]).ok_or_else(|| Error::data(&location, format!("bad q2 `{}`", &row[c_q2])))?;
        let entry = pairs
            .entry(row[c_pair].to_string())
            .or_insert_with(|| (row[c_a].to_string(), row[c_b].to_string(), BTreeMap::new()));
        if entry.0 != row[c_a] || entry.1 != row[c_b] {
            return Err(Error::data(location, format!("pair `{}` changes its articles", &row[c_pair])));
        }
        if entry.2.insert(row[c_who].to_string(), (q1, q2)).is_some() {
            return Err(Error::data(
                location,
                format!("annotator `{}` rated pair `{}` twice", &row[c_who], &row[c_pair]),
            ));
        }
    }
    let mut out = Vec::with_capacity(pairs.len());
    for (pair_id, (article_a, article_b, ratings)) in pairs {
        if ratings.len() != RATERS {
            return Err(Error::data(
                source,
                format!("pair `{pair_id}` has {} ratings, expected {RATERS}", ratings.len()),
            ));
        }
        let mut q1 = [0u8; RATERS];
        let mut q2 = [0u8; RATERS];
        for (k, (a, b)) in ratings.into_values().enumerate() {
            q1[k] = a;
            q2[k] = b;
        }
        out.push(AnnotationRecord {
            pair_id,
            article_a,
            article_b,
            q1,
            q2,
        });
    }
    out.sort_by(|a, b| cmp_pair_ids(&a.pair_id, &b.pair_id));
    Ok(out)
}
