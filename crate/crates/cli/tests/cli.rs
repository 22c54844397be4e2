use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const TRIPLES: &str = r#"<m.lebron> <type.object.name> "LeBron James"@en .
<m.wade> <type.object.name> "Dwyane Wade"@en .
<m.heat> <type.object.name> "Miami Heat"@en .
<m.cavs> <type.object.name> "Cleveland Cavaliers"@en .
<m.nba> <type.object.name> "NBA"@en .
<m.apple> <type.object.name> "Apple"@en .
<m.cook> <type.object.name> "Tim Cook"@en .
<m.iphone> <type.object.name> "iPhone"@en .
<m.samsung> <type.object.name> "Samsung"@en .
<m.lebron> <sports.team> <m.heat> .
<m.lebron> <sports.team> <m.cavs> .
<m.wade> <sports.team> <m.heat> .
<m.heat> <sports.league> <m.nba> .
<m.cavs> <sports.league> <m.nba> .
<m.cook> <business.employer> <m.apple> .
<m.apple> <business.product> <m.iphone> .
<m.samsung> <business.competitor> <m.apple> .
<m.samsung> <business.product> <m.iphone> .
this line is not a triple
"#;

const ARTICLES: [(&str, &str); 4] = [
    ("a1", "LeBron returns\nLeBron James rejoins the Cavaliers in a basketball homecoming for the NBA season."),
    ("a2", "Wade and the Heat\nDwyane Wade leads the Miami Heat to another basketball win in the NBA."),
    ("a3", "Apple earnings\nTim Cook says the iPhone keeps Apple ahead of rivals this quarter."),
    ("a4", "Samsung phones\nSamsung launches a new phone to compete with the iPhone and Apple."),
];

const ANNOTATIONS: &str = "article_id\tmention\tentity_id\tentity_type\tcount\tfirst_offset
a1\tLeBron James\tm.lebron\tPER\t3\t0
a1\tCavaliers\tm.cavs\tORG\t1\t20
a2\tDwyane Wade\tm.wade\tPER\t2\t0
a2\tMiami Heat\tm.heat\tORG\t2\t15
a3\tTim Cook\tm.cook\tPER\t1\t0
a3\tApple\tm.apple\tORG\t2\t30
a3\tMars\tm.not_there\tORG\t1\t50
a4\tSamsung\tm.samsung\tORG\t2\t0
a4\tiPhone\tm.iphone\tORG\t1\t40
";

const PAIRS: &str = "pair_id,article_a,article_b,q1_1,q1_2,q1_3,q1_4,q1_5,q1_6,q2_1,q2_2,q2_3,q2_4,q2_5,q2_6
1,a1,a2,2,2,1,2,1,2,1,1,1,1,0,1
2,a1,a3,0,0,0,0,0,0,0,0,0,0,0,0
3,a1,a4,0,0,0,1,0,0,0,0,0,0,0,0
4,a2,a3,0,0,0,0,0,1,0,0,0,0,0,0
5,a2,a4,0,0,0,0,0,0,0,0,0,0,0,0
6,a3,a4,1,1,2,1,1,2,1,1,1,0,1,1
";

fn sedrec() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_sedrec"));
    cmd.env_remove("SEDREC_KG");
    cmd
}

fn run(args: &[&str]) -> Output {
    sedrec().args(args).output().expect("binary runs")
}

fn ok(args: &[&str]) -> Output {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

struct Workspace {
    dir: TempDir,
}

impl Workspace {
    fn new() -> Self {
        let dir = tempfile::tempdir().unwrap();
        let root = dir.path();
        fs::write(root.join("kg.nt"), TRIPLES).unwrap();
        fs::create_dir_all(root.join("data/articles")).unwrap();
        for (id, text) in ARTICLES {
            fs::write(root.join(format!("data/articles/{id}.txt")), text).unwrap();
        }
        fs::write(root.join("data/pairs.csv"), PAIRS).unwrap();
        fs::write(root.join("annotations.tsv"), ANNOTATIONS).unwrap();
        Workspace { dir }
    }

    fn path(&self, rel: &str) -> PathBuf {
        self.dir.path().join(rel)
    }

    fn arg(&self, rel: &str) -> String {
        self.path(rel).display().to_string()
    }

    fn ingest(&self) -> String {
        let out = self.arg("kg.snap");
        ok(&["ingest", "--triples", &self.arg("kg.nt"), "--min-out-degree", "0", "--out", &out]);
        out
    }

    fn score(&self, out: &str, extra: &[&str]) -> String {
        let kg = self.ingest();
        let out = self.arg(out);
        let mut args = vec![
            "score",
            "--kg",
            &kg,
            "--corpus",
            self.dir.path().join("data").to_str().unwrap(),
        ]
        .into_iter()
        .map(String::from)
        .collect::<Vec<_>>();
        args.extend(["--annotations".into(), self.arg("annotations.tsv"), "--out".into(), out.clone()]);
        args.extend(extra.iter().map(|s| s.to_string()));
        let refs: Vec<&str> = args.iter().map(String::as_str).collect();
        ok(&refs);
        out
    }
}

fn read_scores(path: &str) -> Vec<(String, String, f64, f64, u8)> {
    let mut rdr = csv::Reader::from_path(path).unwrap();
    assert_eq!(
        rdr.headers().unwrap().iter().collect::<Vec<_>>(),
        ["pair_id", "method", "raw_distance", "z_score", "decision"]
    );
    rdr.records()
        .map(|r| {
            let r = r.unwrap();
            (
                r[0].to_string(),
                r[1].to_string(),
                r[2].parse().unwrap(),
                r[3].parse().unwrap(),
                r[4].parse().unwrap(),
            )
        })
        .collect()
}

fn manifest_of(path: &str) -> serde_json::Value {
    let text = fs::read_to_string(format!("{path}.manifest.json")).expect("manifest written");
    serde_json::from_str(&text).unwrap()
}

#[test]
fn ingest_reports_counts_and_writes_manifest() {
    let ws = Workspace::new();
    let out = ws.arg("kg.snap");
    let res = ok(&["ingest", "--triples", &ws.arg("kg.nt"), "--min-out-degree", "0", "--out", &out]);
    let stdout = String::from_utf8_lossy(&res.stdout);
    assert!(stdout.contains("18 triples, 1 malformed"), "{stdout}");
    assert!(stdout.contains("(9 nodes, 9 edges"), "{stdout}");
    let manifest = manifest_of(&out);
    assert_eq!(manifest["command"], "ingest");
    assert_eq!(manifest["inputs"].as_array().unwrap().len(), 1);
    assert_eq!(manifest["outputs"][0]["sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn missing_input_exits_with_usage_code() {
    let ws = Workspace::new();
    let res = run(&["ingest", "--triples", &ws.arg("nope.nt"), "--out", &ws.arg("kg.snap")]);
    assert_eq!(res.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&res.stderr).contains("nope.nt"));
}

#[test]
fn subgraph_lists_edges_around_seeds() {
    let ws = Workspace::new();
    let kg = ws.ingest();
    let res = ok(&["subgraph", "--kg", &kg, "--seeds", "m.wade,m.ghost", "--hops", "1"]);
    let body = String::from_utf8_lossy(&res.stdout);
    assert!(body.contains("m.wade") && body.contains("m.heat"), "{body}");
    assert!(!body.contains("m.apple"));
}

#[test]
fn tfidf_and_sed_scores_cover_every_pair() {
    let ws = Workspace::new();
    let tfidf = ws.score("tfidf.csv", &["--method", "tfidf"]);
    let sed = ws.score("sed.csv", &["--hops", "2"]);
    for (path, method) in [(&tfidf, "tfidf"), (&sed, "sed")] {
        let rows = read_scores(path);
        assert_eq!(rows.len(), 6);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.0, (i + 1).to_string());
            assert_eq!(r.1, method);
            assert!((0.0..=1.0).contains(&r.2));
            assert_eq!(r.4 == 1, r.3 < 0.0);
        }
        assert_eq!(manifest_of(path)["command"], "score");
    }
    let sed_rows = read_scores(&sed);
    // Same-topic pairs sit closer than cross-topic ones.
    assert!(sed_rows[0].2 < sed_rows[1].2);
    assert!(sed_rows[5].2 < sed_rows[4].2);
}

#[test]
fn thread_count_does_not_change_output() {
    let ws = Workspace::new();
    let one = ws.score("one.csv", &["--jobs", "1", "--hops", "2"]);
    let four = ws.score("four.csv", &["--jobs", "4", "--hops", "2"]);
    assert_eq!(fs::read(one).unwrap(), fs::read(four).unwrap());
}

#[test]
fn row_and_reverse_row_average_to_sym() {
    let ws = Workspace::new();
    let fwd = read_scores(&ws.score("row.csv", &["--variant", "row"]));
    let back = read_scores(&ws.score("rev.csv", &["--variant", "row", "--reverse-direction"]));
    let sym = read_scores(&ws.score("sym.csv", &["--variant", "sym"]));
    for ((f, b), s) in fwd.iter().zip(&back).zip(&sym) {
        assert!(((f.2 + b.2) / 2.0 - s.2).abs() < 1e-12, "pair {}", f.0);
    }
}

#[test]
fn evaluate_writes_one_row_per_condition() {
    let ws = Workspace::new();
    let sed = ws.score("sed.csv", &[]);
    let metrics = ws.arg("metrics.csv");
    let corr = ws.arg("corr.csv");
    let res = ok(&[
        "evaluate",
        "--scores",
        &sed,
        "--dataset",
        &ws.arg("data"),
        "--out",
        &metrics,
        "--correlations",
        &corr,
    ]);
    let text = fs::read_to_string(&metrics).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "method,condition,tp,fp,tn,fn,precision,recall,f1");
    assert_eq!(lines.len(), 5);
    for (line, cond) in lines[1..].iter().zip(["GR@.75", "GR@.50", "DR@.75", "DR@.50"]) {
        assert!(line.starts_with(&format!("sed,{cond},")), "{line}");
    }
    assert!(fs::read_to_string(&corr).unwrap().starts_with("method,n,pearson,spearman"));
    assert!(String::from_utf8_lossy(&res.stdout).contains("sed"));
    assert!(Path::new(&format!("{metrics}.manifest.json")).is_file());
}

#[test]
fn evaluate_names_a_missing_pair() {
    let ws = Workspace::new();
    let sed = ws.score("sed.csv", &[]);
    let trimmed: String = fs::read_to_string(&sed)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with("4,"))
        .map(|l| format!("{l}\n"))
        .collect();
    let partial = ws.arg("partial.csv");
    fs::write(&partial, trimmed).unwrap();
    let res = run(&["evaluate", "--scores", &partial, "--pairs", &ws.arg("data/pairs.csv")]);
    assert_eq!(res.status.code(), Some(2));
    let err = String::from_utf8_lossy(&res.stderr);
    assert!(err.contains('4'), "{err}");
}

#[test]
fn ensemble_adds_a_combined_method() {
    let ws = Workspace::new();
    let sed = ws.score("sed.csv", &[]);
    let tfidf = ws.score("tfidf.csv", &["--method", "tfidf"]);
    let metrics = ws.arg("metrics.csv");
    ok(&[
        "evaluate",
        "--scores",
        &sed,
        &tfidf,
        "--pairs",
        &ws.arg("data/pairs.csv"),
        "--ensemble",
        "sed,tfidf",
        "--conditions",
        "GR@.5",
        "--out",
        &metrics,
    ]);
    let text = fs::read_to_string(&metrics).unwrap();
    let methods: Vec<&str> = text.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(methods.len(), 3);
    assert!(methods.contains(&"sed+tfidf"));
}

#[test]
fn convert_builds_the_pairs_file() {
    let ws = Workspace::new();
    let mut long = String::from("pair_id,article_a,article_b,annotator,q1,q2\n");
    for rater in 1..=6 {
        long.push_str(&format!("7,a1,a2,r{rater},Very Similar,YES\n"));
        long.push_str(&format!("8,a3,a4,r{rater},{},NO\n", if rater % 2 == 0 { "Similar" } else { "Not Similar" }));
    }
    let input = ws.arg("long.csv");
    fs::write(&input, long).unwrap();
    let out = ws.arg("pairs.csv");
    ok(&["convert", "--input", &input, "--out", &out]);
    let text = fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], PAIRS.lines().next().unwrap());
    assert_eq!(lines[1], "7,a1,a2,2,2,2,2,2,2,1,1,1,1,1,1");
    assert_eq!(lines[2], "8,a3,a4,0,1,0,1,0,1,0,0,0,0,0,0");
}

#[test]
fn compare_lines_up_methods() {
    let ws = Workspace::new();
    let sed = ws.score("sed.csv", &[]);
    let tfidf = ws.score("tfidf.csv", &["--method", "tfidf"]);
    let res = ok(&["compare", "--scores", &sed, &tfidf, "--pairs", &ws.arg("data/pairs.csv")]);
    let text = String::from_utf8_lossy(&res.stdout);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines[0],
        "pair_id,mean_q1,mean_q2,sed_distance,sed_z,sed_decision,tfidf_distance,tfidf_z,tfidf_decision"
    );
    assert_eq!(lines.len(), 7);
    assert!(lines[1].starts_with("1,"));
}

#[test]
fn sed_without_annotations_is_a_usage_error() {
    let ws = Workspace::new();
    let kg = ws.ingest();
    let res = run(&["score", "--kg", &kg, "--corpus", &ws.arg("data")]);
    assert_eq!(res.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&res.stderr).contains("--annotations"));
}
