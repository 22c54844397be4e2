use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};

use sedrec::article::{annotations_by_article, load_corpus, read_annotations, ContextWordConfig, EntityType, ScreeningConfig};
use sedrec::eval::{convert_long_format, evaluate as evaluate_report, read_records, write_records, AnnotationRecord, EvalCondition};
use sedrec::graph::KnowledgeGraph;
use sedrec::ntriples::{for_each_triple, open_ntriples};
use sedrec::prune::{build_graph, read_stoplist, PruneConfig};
use sedrec::scorer::{
    article_seeds, cmp_pair_ids, import_embedding_scores, tfidf_distances, ArticlePair, ScoreTable, ScoringConfig,
    SedScorer,
};
use sedrec::snapshot::{load_snapshot, save_snapshot};
use sedrec::subgraph::{expand_ids, ExpansionConfig};
use sedrec::Error;

use crate::error::{CliError, CliResult};
use crate::manifest::RunManifest;
use crate::{CompareArgs, ConvertArgs, EvaluateArgs, IngestArgs, Method, ScoreArgs, SubgraphArgs};

/// Writes `body` to `out` with its manifest, or to stdout.
fn emit(out: Option<&Path>, body: &[u8], manifest: &RunManifest) -> CliResult<()> {
    match out {
        Some(path) => {
            fs::write(path, body).map_err(|e| Error::io(path, e))?;
            manifest.write_for(path)?;
        }
        None => std::io::stdout().lock().write_all(body).map_err(Error::Stream)?,
    }
    Ok(())
}

fn require_kg(kg: Option<&PathBuf>) -> CliResult<&PathBuf> {
    kg.ok_or_else(|| CliError::Usage("no knowledge graph: pass --kg or set SEDREC_KG".into()))
}

fn read_pairs_file(path: &Path) -> CliResult<Vec<AnnotationRecord>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    Ok(read_records(BufReader::new(file), &path.display().to_string())?)
}

pub fn ingest(args: &IngestArgs) -> CliResult<()> {
    let mut manifest = RunManifest::new("ingest", args)?;
    manifest.input(&args.triples)?;
    let stoplist = match &args.stoplist {
        Some(p) => {
            manifest.input(p)?;
            read_stoplist(p)?
        }
        None => Default::default(),
    };
    let cfg = PruneConfig {
        english_only: args.english_only,
        min_out_degree: args.min_out_degree,
        stoplist,
        drop_leaves: args.drop_leaves,
    };
    let mut records = Vec::new();
    let tally = for_each_triple(open_ntriples(&args.triples)?, |t| records.push(t))?;
    for e in &tally.errors {
        log::warn!("{}: {e}", args.triples.display());
    }
    let built = build_graph(records, &cfg)?;
    save_snapshot(&built.graph, &args.out)?;
    manifest.write_for(&args.out)?;
    println!(
        "read {} lines: {} triples, {} malformed",
        tally.lines, tally.records, tally.error_count
    );
    print!("{}", built.stats);
    println!(
        "wrote {} ({} nodes, {} edges, {} predicates)",
        args.out.display(),
        built.graph.node_count(),
        built.graph.edge_count(),
        built.graph.predicate_count()
    );
    Ok(())
}

pub fn convert(args: &ConvertArgs) -> CliResult<()> {
    let mut manifest = RunManifest::new("convert", args)?;
    manifest.input(&args.input)?;
    let file = File::open(&args.input).map_err(|e| Error::io(&args.input, e))?;
    let records = convert_long_format(BufReader::new(file), &args.input.display().to_string())?;
    let mut body = Vec::new();
    write_records(&records, &mut body)?;
    emit(args.out.as_deref(), &body, &manifest)
}

pub fn subgraph(args: &SubgraphArgs) -> CliResult<()> {
    let kg_path = require_kg(args.kg.as_ref())?;
    let mut manifest = RunManifest::new("subgraph", args)?;
    manifest.input(kg_path)?;
    let kg = load_snapshot(kg_path)?;
    let sub = expand_ids(&kg, &args.seeds, ExpansionConfig::new(args.hops)?);
    for missing in args.seeds.iter().filter(|s| kg.node(s).is_none()) {
        log::warn!("seed `{missing}` is not in the graph");
    }
    let mut body = Vec::new();
    sub.write_edge_list(&kg, &mut body).map_err(Error::Stream)?;
    emit(args.out.as_deref(), &body, &manifest)
}

fn screening(args: &ScoreArgs) -> CliResult<ScreeningConfig> {
    let drop = args
        .drop_types
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::parse::<EntityType>)
        .collect::<Result<Vec<_>, _>>()?;
    let top_k = (args.top_entities > 0).then_some(args.top_entities);
    Ok(ScreeningConfig::new(drop, top_k)?)
}

/// Article directory and pairs file for `--corpus` / `--pairs`.
fn dataset_paths(corpus: &Path, pairs: Option<&Path>) -> CliResult<(PathBuf, PathBuf)> {
    let nested = corpus.join("articles");
    if nested.is_dir() {
        let pairs = pairs.map(Path::to_path_buf).unwrap_or_else(|| corpus.join("pairs.csv"));
        return Ok((nested, pairs));
    }
    match pairs {
        Some(p) => Ok((corpus.to_path_buf(), p.to_path_buf())),
        None => Err(CliError::Usage(format!(
            "{} has no articles/ directory; pass --pairs",
            corpus.display()
        ))),
    }
}

fn pool(jobs: usize) -> CliResult<rayon::ThreadPool> {
    Ok(rayon::ThreadPoolBuilder::new().num_threads(jobs).build()?)
}

pub fn score(args: &ScoreArgs) -> CliResult<()> {
    let mut manifest = RunManifest::new("score", args)?;
    let (articles_dir, pairs_path) = dataset_paths(&args.corpus, args.pairs.as_deref())?;
    manifest.input(&pairs_path)?;
    let pairs: Vec<ArticlePair> = read_pairs_file(&pairs_path)?.iter().map(AnnotationRecord::pair).collect();
    let label = args.label.clone().unwrap_or_else(|| {
        match args.method {
            Method::Sed => "sed",
            Method::Tfidf => "tfidf",
            Method::Embedding => "embedding",
        }
        .to_string()
    });
    let mut table = ScoreTable::new();
    match args.method {
        Method::Embedding => {
            let path = args
                .embedding_scores
                .as_ref()
                .ok_or_else(|| CliError::Usage("--method embedding needs --embedding-scores".into()))?;
            manifest.input(path)?;
            let ids: Vec<String> = pairs.iter().map(|p| p.pair_id.clone()).collect();
            table.add_method(&label, import_embedding_scores(path, &ids)?, None)?;
        }
        Method::Tfidf => {
            manifest.input(&articles_dir)?;
            let corpus = load_corpus(&articles_dir)?;
            table.add_method(&label, tfidf_distances(&corpus, &pairs)?, None)?;
        }
        Method::Sed => {
            let kg_path = require_kg(args.kg.as_ref())?;
            let ann_path = args
                .annotations
                .as_ref()
                .ok_or_else(|| CliError::Usage("--method sed needs --annotations".into()))?;
            let config = ScoringConfig {
                variant: args.variant.parse()?,
                penalty: args.penalty,
                weighting: args.weighting.parse()?,
                expansion: ExpansionConfig::new(args.hops)?,
                screening: screening(args)?,
                context_words: ContextWordConfig::new(args.context_words)?,
            };
            config.validate()?;
            for p in [kg_path, &articles_dir, ann_path] {
                manifest.input(p)?;
            }
            let kg = load_snapshot(kg_path)?;
            let corpus = load_corpus(&articles_dir)?;
            let annotations = annotations_by_article(read_annotations(ann_path)?);
            let run = pool(args.jobs)?.install(|| sed_run(&kg, &corpus, &annotations, config, &pairs, args.reverse_direction))?;
            table.add_method(&label, run.distances, run.max_finite)?;
        }
    }
    let mut body = Vec::new();
    table.write_csv(&mut body)?;
    emit(args.out.as_deref(), &body, &manifest)
}

fn sed_run(
    kg: &KnowledgeGraph,
    corpus: &[sedrec::article::Article],
    annotations: &BTreeMap<String, Vec<sedrec::article::EntityAnnotation>>,
    config: ScoringConfig,
    pairs: &[ArticlePair],
    reverse: bool,
) -> CliResult<sedrec::scorer::SedRun> {
    let seeds = article_seeds(kg, corpus, annotations, &config.screening, config.context_words);
    let missing: usize = seeds.values().map(|s| s.missing.len()).sum();
    let present: usize = seeds.values().map(|s| s.present.len()).sum();
    log::info!(
        "{} articles, {:.2} seeds per article, {missing} seed entities absent from the graph",
        seeds.len(),
        (present + missing) as f64 / seeds.len().max(1) as f64
    );
    let scorer = SedScorer::new(kg, config, seeds)?;
    Ok(scorer.score_pairs(pairs, reverse)?)
}

fn load_tables(paths: &[PathBuf], manifest: &mut RunManifest) -> CliResult<ScoreTable> {
    let mut table = ScoreTable::new();
    for p in paths {
        manifest.input(p)?;
        table.extend(ScoreTable::read_csv_file(p)?)?;
    }
    Ok(table)
}

pub fn evaluate(args: &EvaluateArgs) -> CliResult<()> {
    let mut manifest = RunManifest::new("evaluate", args)?;
    let pairs_path = match (&args.dataset, &args.pairs) {
        (Some(d), _) => d.join("pairs.csv"),
        (None, Some(p)) => p.clone(),
        (None, None) => return Err(CliError::Usage("pass --dataset or --pairs".into())),
    };
    manifest.input(&pairs_path)?;
    let records = read_pairs_file(&pairs_path)?;
    let conditions = args
        .conditions
        .iter()
        .map(|c| c.parse::<EvalCondition>())
        .collect::<Result<Vec<_>, _>>()?;
    let mut table = load_tables(&args.scores, &mut manifest)?;
    for spec in &args.ensemble {
        let members: Vec<&str> = spec.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
        table.add_ensemble(&members.join("+"), &members)?;
    }
    let report = evaluate_report(&table, &records, &conditions)?;
    if let Some(path) = &args.out {
        let mut body = Vec::new();
        report.write_metrics_csv(&mut body)?;
        emit(Some(path), &body, &manifest)?;
    }
    if let Some(path) = &args.correlations {
        let mut body = Vec::new();
        report.write_correlations_csv(&mut body)?;
        emit(Some(path), &body, &manifest)?;
    }
    print!("{}", report.comparison_table());
    Ok(())
}

pub fn compare(args: &CompareArgs) -> CliResult<()> {
    let mut manifest = RunManifest::new("compare", args)?;
    let table = load_tables(&args.scores, &mut manifest)?;
    let methods = table.methods();
    let columns: Vec<BTreeMap<&str, &sedrec::scorer::PairScore>> = methods
        .iter()
        .map(|m| table.column(m).into_iter().map(|r| (r.pair_id.as_str(), r)).collect())
        .collect();
    let mut pair_ids: Vec<&str> = columns.first().map(|c| c.keys().copied().collect()).unwrap_or_default();
    pair_ids.sort_by(|a, b| cmp_pair_ids(a, b));
    for (m, col) in methods.iter().zip(&columns) {
        if col.len() != pair_ids.len() || pair_ids.iter().any(|p| !col.contains_key(p)) {
            let missing = pair_ids.iter().find(|p| !col.contains_key(*p));
            return Err(Error::data(
                format!("method {m}"),
                match missing {
                    Some(p) => format!("missing pair `{p}`"),
                    None => format!("has {} pairs, expected {}", col.len(), pair_ids.len()),
                },
            )
            .into());
        }
    }
    let ratings: Option<BTreeMap<String, AnnotationRecord>> = match &args.pairs {
        Some(p) => {
            manifest.input(p)?;
            Some(read_pairs_file(p)?.into_iter().map(|r| (r.pair_id.clone(), r)).collect())
        }
        None => None,
    };

    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["pair_id".to_string()];
    if ratings.is_some() {
        header.extend(["mean_q1".to_string(), "mean_q2".to_string()]);
    }
    for m in &methods {
        header.extend([format!("{m}_distance"), format!("{m}_z"), format!("{m}_decision")]);
    }
    let csv_err = |e: csv::Error| CliError::Core(Error::Stream(e.into()));
    w.write_record(&header).map_err(csv_err)?;
    for p in &pair_ids {
        let mut row = vec![p.to_string()];
        if let Some(r) = &ratings {
            let rec = r
                .get(*p)
                .ok_or_else(|| Error::data("pairs", format!("no ratings for pair `{p}`")))?;
            row.extend([rec.mean_q1().to_string(), rec.mean_q2().to_string()]);
        }
        for col in &columns {
            let s = col[p];
            row.extend([
                s.raw_distance.to_string(),
                s.z_score.to_string(),
                (s.decision as u8).to_string(),
            ]);
        }
        w.write_record(&row).map_err(csv_err)?;
    }
    let body = w.into_inner().map_err(|e| CliError::Core(Error::Stream(e.into_error())))?;
    emit(args.out.as_deref(), &body, &manifest)
}
