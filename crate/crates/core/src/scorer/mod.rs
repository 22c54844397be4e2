//! Article-pair distances: SED over knowledge-graph subgraphs and cosine
//! baselines, plus the per-method score table.

mod baseline;
mod paths;
mod sed;
mod table;

pub use baseline::{baseline_distance, baseline_distance_dense, cosine_dense, cosine_sparse, similarity_to_distance};
pub use paths::{node_pair_distance, UnionView};
pub use sed::{normalize_distance, Normalizer, PairDistances, SedVariant};
pub use table::{
    cmp_pair_ids, ensemble, import_embedding_scores, parse_embedding_scores, recommend, znormalize, MethodStats,
    PairScore, ScoreTable, ZScores,
};

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;

use crate::article::{
    assemble_seeds, augment_context_words, screen_entities, tfidf_vectors, Article, ArticleSeeds, ContextWordConfig,
    EntityAnnotation, ScreeningConfig, TitleIndex,
};
use crate::error::{Error, Result};
use crate::graph::KnowledgeGraph;
use crate::subgraph::{expand, union, ExpansionConfig, SubGraph};
use crate::weighting::{EdgeWeigher, WeightingScheme};

pub const DEFAULT_PENALTY: f64 = 0.98;

#[derive(Debug, Clone, PartialEq)]
pub struct ScoringConfig {
    pub variant: SedVariant,
    pub penalty: f64,
    pub weighting: WeightingScheme,
    pub expansion: ExpansionConfig,
    pub screening: ScreeningConfig,
    pub context_words: ContextWordConfig,
}

impl Default for ScoringConfig {
    fn default() -> Self {
        ScoringConfig {
            variant: SedVariant::Sym,
            penalty: DEFAULT_PENALTY,
            weighting: WeightingScheme::Rws,
            expansion: ExpansionConfig::default(),
            screening: ScreeningConfig::default(),
            context_words: ContextWordConfig::default(),
        }
    }
}

impl ScoringConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.penalty) {
            return Err(Error::Config(format!("penalty must be in [0, 1], got {}", self.penalty)));
        }
        Ok(())
    }
}

/// Two articles to compare, under a stable pair id.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ArticlePair {
    pub pair_id: String,
    pub article_a: String,
    pub article_b: String,
}

impl ArticlePair {
    pub fn new(pair_id: impl Into<String>, a: impl Into<String>, b: impl Into<String>) -> Self {
        ArticlePair {
            pair_id: pair_id.into(),
            article_a: a.into(),
            article_b: b.into(),
        }
    }
}

/// Seed sets for every article in `corpus`: screened annotated entities
/// followed by context-word nodes.
pub fn article_seeds(
    kg: &KnowledgeGraph,
    corpus: &[Article],
    annotations: &BTreeMap<String, Vec<EntityAnnotation>>,
    screening: &ScreeningConfig,
    context_words: ContextWordConfig,
) -> BTreeMap<String, ArticleSeeds> {
    let tfidf = tfidf_vectors(corpus);
    let titles = TitleIndex::new(kg);
    let empty = Vec::new();
    corpus
        .iter()
        .map(|article| {
            let anns = annotations.get(&article.id).unwrap_or(&empty);
            let screened = screen_entities(anns, screening);
            let context = tfidf
                .get(&article.id)
                .map(|w| augment_context_words(w, &titles, context_words))
                .unwrap_or_default();
            (article.id.clone(), assemble_seeds(kg, &screened, &context))
        })
        .collect()
}

/// Raw SED distances for a batch of pairs and the normalization constant
/// that produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct SedRun {
    pub distances: Vec<(String, f64)>,
    /// Largest finite node-pair cost over every pair in the batch.
    pub max_finite: Option<f64>,
}

/// Scores article pairs by SED. Each article's subgraph is expanded once and
/// shared across the pairs it takes part in.
pub struct SedScorer<'g> {
    weigher: EdgeWeigher<'g>,
    config: ScoringConfig,
    seeds: BTreeMap<String, ArticleSeeds>,
    subgraphs: HashMap<String, SubGraph>,
}

impl<'g> SedScorer<'g> {
    pub fn new(kg: &'g KnowledgeGraph, config: ScoringConfig, seeds: BTreeMap<String, ArticleSeeds>) -> Result<Self> {
        config.validate()?;
        let subgraphs = seeds
            .par_iter()
            .map(|(id, s)| (id.clone(), expand(kg, &s.present, config.expansion)))
            .collect();
        Ok(SedScorer {
            weigher: EdgeWeigher::new(kg, config.weighting),
            config,
            seeds,
            subgraphs,
        })
    }

    pub fn config(&self) -> &ScoringConfig {
        &self.config
    }

    pub fn seeds(&self, article: &str) -> Option<&ArticleSeeds> {
        self.seeds.get(article)
    }

    fn lookup(&self, article: &str, pair_id: &str) -> Result<(&ArticleSeeds, &SubGraph)> {
        match (self.seeds.get(article), self.subgraphs.get(article)) {
            (Some(s), Some(g)) => Ok((s, g)),
            _ => Err(Error::data(
                format!("pair {pair_id}"),
                format!("unknown article `{article}`"),
            )),
        }
    }

    /// The union subgraph the pair is scored on.
    pub fn union_subgraph(&self, pair: &ArticlePair) -> Result<SubGraph> {
        let (_, ga) = self.lookup(&pair.article_a, &pair.pair_id)?;
        let (_, gb) = self.lookup(&pair.article_b, &pair.pair_id)?;
        union(ga, gb)
    }

    /// Raw distances between the pair's seeds, or `None` when either seed
    /// set is empty.
    pub fn pair_distances(&self, pair: &ArticlePair) -> Result<Option<PairDistances>> {
        let (sa, ga) = self.lookup(&pair.article_a, &pair.pair_id)?;
        let (sb, gb) = self.lookup(&pair.article_b, &pair.pair_id)?;
        if sa.is_empty() || sb.is_empty() {
            return Ok(None);
        }
        let u = union(ga, gb)?;
        let view = UnionView::new(&u, &self.weigher)?;
        PairDistances::compute(&view, sa, sb).map(Some)
    }

    /// Two passes: raw distances for every pair (in parallel), then
    /// normalization by the batch-wide maximum finite cost. `reverse` swaps
    /// the articles of every pair before scoring.
    pub fn score_pairs(&self, pairs: &[ArticlePair], reverse: bool) -> Result<SedRun> {
        let raw: Vec<Option<PairDistances>> = pairs
            .par_iter()
            .map(|p| {
                let d = self.pair_distances(p)?;
                Ok(if reverse { d.map(|d| d.reversed()) } else { d })
            })
            .collect::<Result<_>>()?;
        let max_finite = raw.iter().flatten().filter_map(PairDistances::max_finite).reduce(f64::max);
        let norm = Normalizer::new(max_finite.unwrap_or(0.0), self.config.penalty)?;
        let distances = pairs
            .iter()
            .zip(&raw)
            .map(|(p, d)| {
                let value = match d {
                    Some(d) => d.variant(self.config.variant, &norm)?,
                    None => {
                        log::warn!("pair {}: an article has no seed entities; distance set to 1", p.pair_id);
                        1.0
                    }
                };
                Ok((p.pair_id.clone(), value))
            })
            .collect::<Result<_>>()?;
        Ok(SedRun { distances, max_finite })
    }
}

/// TF-IDF cosine distances for each pair.
pub fn tfidf_distances(corpus: &[Article], pairs: &[ArticlePair]) -> Result<Vec<(String, f64)>> {
    let vectors = tfidf_vectors(corpus);
    pairs
        .iter()
        .map(|p| {
            let get = |id: &str| {
                vectors
                    .get(id)
                    .ok_or_else(|| Error::data(format!("pair {}", p.pair_id), format!("unknown article `{id}`")))
            };
            Ok((p.pair_id.clone(), baseline_distance(get(&p.article_a)?, get(&p.article_b)?)))
        })
        .collect()
}
