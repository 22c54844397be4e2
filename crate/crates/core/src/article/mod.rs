//! Articles, their entity annotations, and the seed sets derived from them.

mod context;
mod gazetteer;
mod screening;
mod tfidf;

pub use context::{augment_context_words, ContextWordConfig, TitleIndex};
pub use gazetteer::GazetteerLinker;
pub use screening::{screen_entities, ScreeningConfig};
pub use tfidf::{tfidf_vectors, tokenize, SparseVector, TfIdf, STOP_WORDS};

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{KnowledgeGraph, NodeId};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Article {
    pub id: String,
    pub title: String,
    pub body: String,
}

impl Article {
    pub fn new(id: impl Into<String>, title: impl Into<String>, body: impl Into<String>) -> Self {
        Article {
            id: id.into(),
            title: title.into(),
            body: body.into(),
        }
    }

    /// Title and body as one text, the way they are stored on disk.
    pub fn text(&self) -> String {
        format!("{}\n{}", self.title, self.body)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum EntityType {
    #[serde(rename = "PER")]
    Per,
    #[serde(rename = "LOC")]
    Loc,
    #[serde(rename = "ORG")]
    Org,
    #[serde(rename = "GPE")]
    Gpe,
    #[serde(rename = "FAC")]
    Fac,
}

impl EntityType {
    pub fn code(self) -> &'static str {
        match self {
            EntityType::Per => "PER",
            EntityType::Loc => "LOC",
            EntityType::Org => "ORG",
            EntityType::Gpe => "GPE",
            EntityType::Fac => "FAC",
        }
    }
}

impl fmt::Display for EntityType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for EntityType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "PER" => Ok(EntityType::Per),
            "LOC" => Ok(EntityType::Loc),
            "ORG" => Ok(EntityType::Org),
            "GPE" => Ok(EntityType::Gpe),
            "FAC" => Ok(EntityType::Fac),
            other => Err(Error::Config(format!("unknown entity type `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntityAnnotation {
    pub article_id: String,
    pub mention: String,
    pub entity_id: String,
    pub entity_type: EntityType,
    pub count: u32,
    pub first_offset: u64,
}

const ANNOTATION_HEADER: [&str; 6] = [
    "article_id",
    "mention",
    "entity_id",
    "entity_type",
    "count",
    "first_offset",
];

/// Reads the tab-separated annotation file.
pub fn read_annotations(path: &Path) -> Result<Vec<EntityAnnotation>> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    parse_annotations(file).map_err(|e| match e {
        Error::Data { location, message } => Error::data(format!("{}: {location}", path.display()), message),
        other => other,
    })
}

pub fn parse_annotations<R: std::io::Read>(reader: R) -> Result<Vec<EntityAnnotation>> {
    let mut rdr = csv::ReaderBuilder::new()
        .delimiter(b'\t')
        .quoting(false)
        .from_reader(reader);
    let headers = rdr.headers().map_err(|e| Error::data("header", e.to_string()))?;
    if headers.iter().map(str::trim).ne(ANNOTATION_HEADER) {
        return Err(Error::data(
            "header",
            format!("expected columns {}", ANNOTATION_HEADER.join("\\t")),
        ));
    }
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for (i, row) in rdr.deserialize::<EntityAnnotation>().enumerate() {
        let row_no = i + 2;
        let ann = row.map_err(|e| Error::data(format!("row {row_no}"), e.to_string()))?;
        if ann.count == 0 {
            return Err(Error::data(format!("row {row_no}"), "count must be at least 1"));
        }
        if !seen.insert((ann.article_id.clone(), ann.entity_id.clone())) {
            return Err(Error::data(
                format!("row {row_no}"),
                format!("duplicate entity {} for article {}", ann.entity_id, ann.article_id),
            ));
        }
        out.push(ann);
    }
    Ok(out)
}

pub fn write_annotations<W: std::io::Write>(annotations: &[EntityAnnotation], writer: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .delimiter(b'\t')
        .quote_style(csv::QuoteStyle::Never)
        .from_writer(writer);
    let io = |e: csv::Error| Error::Stream(e.into());
    for a in annotations {
        w.serialize(a).map_err(io)?;
    }
    if annotations.is_empty() {
        w.write_record(ANNOTATION_HEADER).map_err(io)?;
    }
    w.flush()?;
    Ok(())
}

/// Groups annotations by article id.
pub fn annotations_by_article(annotations: Vec<EntityAnnotation>) -> BTreeMap<String, Vec<EntityAnnotation>> {
    let mut map: BTreeMap<String, Vec<EntityAnnotation>> = BTreeMap::new();
    for a in annotations {
        map.entry(a.article_id.clone()).or_default().push(a);
    }
    map
}

/// Loads every `<article_id>.txt` in `dir`; the first line is the title.
/// Articles come back sorted by id.
pub fn load_corpus(dir: &Path) -> Result<Vec<Article>> {
    let entries = fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut articles = Vec::new();
    for entry in entries {
        let entry = entry.map_err(|e| Error::io(dir, e))?;
        let path = entry.path();
        if path.extension().and_then(|e| e.to_str()) != Some("txt") {
            continue;
        }
        let Some(id) = path.file_stem().and_then(|s| s.to_str()) else {
            continue;
        };
        let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        let (title, body) = text.split_once('\n').unwrap_or((text.as_str(), ""));
        articles.push(Article::new(id, title.trim_end_matches('\r'), body));
    }
    articles.sort_by(|a, b| a.id.cmp(&b.id));
    Ok(articles)
}

/// An article's seed entities: those found in the graph and the count of
/// identifiers that were not.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ArticleSeeds {
    pub present: Vec<NodeId>,
    pub missing: Vec<String>,
}

impl ArticleSeeds {
    pub fn len(&self) -> usize {
        self.present.len() + self.missing.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Builds a seed set from resolved node ids only.
    pub fn from_nodes(nodes: impl IntoIterator<Item = NodeId>) -> Self {
        let mut present: Vec<NodeId> = Vec::new();
        for n in nodes {
            if !present.contains(&n) {
                present.push(n);
            }
        }
        ArticleSeeds {
            present,
            missing: Vec::new(),
        }
    }
}

/// Screened entities plus context-word nodes, duplicates removed, first
/// occurrence order kept.
pub fn assemble_seeds(kg: &KnowledgeGraph, screened: &[EntityAnnotation], context: &[NodeId]) -> ArticleSeeds {
    let mut seeds = ArticleSeeds::default();
    for a in screened {
        match kg.node(&a.entity_id) {
            Some(n) if !seeds.present.contains(&n) => seeds.present.push(n),
            Some(_) => {}
            None if !seeds.missing.contains(&a.entity_id) => seeds.missing.push(a.entity_id.clone()),
            None => {}
        }
    }
    for &n in context {
        if !seeds.present.contains(&n) {
            seeds.present.push(n);
        }
    }
    seeds
}
