//! Independent reference implementations and fixtures for the integration
//! suites. Nothing here calls into the library's path, weighting or SED
//! code; it works from plain edge lists.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use rand::Rng;
use sedrec::article::{Article, EntityAnnotation, EntityType};
use sedrec::graph::KnowledgeGraph;
use sedrec::ntriples::TripleRecord;
use sedrec::prune::{build_graph, PruneConfig};

/// Undirected simple graph over string ids.
#[derive(Debug, Clone)]
pub struct RefGraph {
    pub ids: Vec<String>,
    pub index: BTreeMap<String, usize>,
    pub adj: Vec<BTreeSet<usize>>,
}

impl RefGraph {
    pub fn new(nodes: &[String], edges: &[(String, String)]) -> Self {
        let mut ids: Vec<String> = nodes.to_vec();
        for (a, b) in edges {
            ids.push(a.clone());
            ids.push(b.clone());
        }
        ids.sort();
        ids.dedup();
        let index: BTreeMap<String, usize> = ids.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
        let mut adj = vec![BTreeSet::new(); ids.len()];
        for (a, b) in edges {
            let (i, j) = (index[a], index[b]);
            if i != j {
                adj[i].insert(j);
                adj[j].insert(i);
            }
        }
        RefGraph { ids, index, adj }
    }

    pub fn closed(&self, u: usize) -> BTreeSet<usize> {
        let mut s = self.adj[u].clone();
        s.insert(u);
        s
    }

    /// `1 - |N[u] ∩ N[v]| / |N[u]|` over closed neighborhoods.
    pub fn rws(&self, u: usize, v: usize) -> f64 {
        let (nu, nv) = (self.closed(u), self.closed(v));
        1.0 - nu.intersection(&nv).count() as f64 / nu.len() as f64
    }

    /// BFS depths from all seeds.
    pub fn depths(&self, seeds: &[usize]) -> Vec<Option<usize>> {
        let mut depth = vec![None; self.ids.len()];
        let mut queue = VecDeque::new();
        for &s in seeds {
            if depth[s].is_none() {
                depth[s] = Some(0);
                queue.push_back(s);
            }
        }
        while let Some(u) = queue.pop_front() {
            let d = depth[u].unwrap();
            for &v in &self.adj[u] {
                if depth[v].is_none() {
                    depth[v] = Some(d + 1);
                    queue.push_back(v);
                }
            }
        }
        depth
    }

    /// Members within `radius` hops and edges whose nearer endpoint is
    /// closer than `radius`.
    pub fn expand(&self, seeds: &[usize], radius: usize) -> (BTreeSet<usize>, BTreeSet<(usize, usize)>) {
        let depth = self.depths(seeds);
        let members: BTreeSet<usize> = (0..self.ids.len())
            .filter(|&u| depth[u].is_some_and(|d| d <= radius))
            .collect();
        let mut edges = BTreeSet::new();
        for u in 0..self.ids.len() {
            for &v in &self.adj[u] {
                if u < v {
                    let near = match (depth[u], depth[v]) {
                        (Some(a), Some(b)) => a.min(b),
                        (Some(a), None) | (None, Some(a)) => a,
                        (None, None) => continue,
                    };
                    if near < radius {
                        edges.insert((u, v));
                    }
                }
            }
        }
        (members, edges)
    }
}

/// Directed cost lists over an undirected edge set.
pub fn cost_lists(
    n: usize,
    edges: &BTreeSet<(usize, usize)>,
    cost: impl Fn(usize, usize) -> f64,
) -> Vec<Vec<(usize, f64)>> {
    let mut adj = vec![Vec::new(); n];
    for &(u, v) in edges {
        adj[u].push((v, cost(u, v)));
        adj[v].push((u, cost(v, u)));
    }
    adj
}

/// Minimum over all simple paths of the left-to-right sum of costs.
/// Costs must be non-negative; partial paths no cheaper than the best found
/// are cut.
pub fn min_simple_path(adj: &[Vec<(usize, f64)>], from: usize, to: usize) -> Option<f64> {
    fn walk(adj: &[Vec<(usize, f64)>], at: usize, to: usize, cost: f64, seen: &mut [bool], best: &mut Option<f64>) {
        if at == to {
            if best.is_none_or(|b| cost < b) {
                *best = Some(cost);
            }
            return;
        }
        if best.is_some_and(|b| cost >= b) {
            return;
        }
        seen[at] = true;
        for &(next, w) in &adj[at] {
            if !seen[next] {
                walk(adj, next, to, cost + w, seen, best);
            }
        }
        seen[at] = false;
    }
    let mut best = None;
    let mut seen = vec![false; adj.len()];
    walk(adj, from, to, 0.0, &mut seen, &mut best);
    best
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RefVariant {
    Row,
    Avg,
    Sym,
}

/// Raw node-pair costs between two seed lists; `None` entries are missing
/// seeds or disconnected pairs. `forward[i][j]` is first_i to second_j,
/// `backward[j][i]` second_j to first_i.
#[derive(Debug, Clone)]
pub struct RefPair {
    pub forward: Vec<Vec<Option<f64>>>,
    pub backward: Vec<Vec<Option<f64>>>,
}

impl RefPair {
    pub fn max_finite(&self) -> Option<f64> {
        self.forward
            .iter()
            .chain(&self.backward)
            .flatten()
            .flatten()
            .copied()
            .reduce(f64::max)
    }
}

/// Everything the SED oracle needs for one article pair: seeds as ids (some
/// possibly absent from the graph), radius, and a cost function on the
/// full graph.
pub fn ref_pair_costs(
    g: &RefGraph,
    first: &[&str],
    second: &[&str],
    radius: usize,
    cost: &dyn Fn(usize, usize) -> f64,
) -> RefPair {
    let resolve = |ids: &[&str]| -> Vec<Option<usize>> { ids.iter().map(|s| g.index.get(*s).copied()).collect() };
    let (a, b) = (resolve(first), resolve(second));
    let present = |v: &[Option<usize>]| -> Vec<usize> { v.iter().flatten().copied().collect() };
    let (_, ea) = g.expand(&present(&a), radius);
    let (_, eb) = g.expand(&present(&b), radius);
    let edges: BTreeSet<(usize, usize)> = ea.union(&eb).copied().collect();
    let adj = cost_lists(g.ids.len(), &edges, cost);
    let dist = |x: Option<usize>, y: Option<usize>| match (x, y) {
        (Some(x), Some(y)) => min_simple_path(&adj, x, y),
        _ => None,
    };
    RefPair {
        forward: a.iter().map(|&x| b.iter().map(|&y| dist(x, y)).collect()).collect(),
        backward: b.iter().map(|&y| a.iter().map(|&x| dist(y, x)).collect()).collect(),
    }
}

pub fn ref_normalize(raw: Option<f64>, max: f64, penalty: f64) -> f64 {
    match raw {
        None => penalty,
        Some(_) if max <= 0.0 => 0.0,
        Some(d) => d / max,
    }
}

fn ref_row(m: &[Vec<Option<f64>>], max: f64, penalty: f64) -> f64 {
    let mins: Vec<f64> = m
        .iter()
        .map(|row| {
            row.iter()
                .map(|&d| ref_normalize(d, max, penalty))
                .fold(f64::INFINITY, f64::min)
        })
        .collect();
    mins.iter().sum::<f64>() / mins.len() as f64
}

pub fn ref_sed(p: &RefPair, variant: RefVariant, max: f64, penalty: f64) -> f64 {
    match variant {
        RefVariant::Row => ref_row(&p.forward, max, penalty),
        RefVariant::Sym => (ref_row(&p.forward, max, penalty) + ref_row(&p.backward, max, penalty)) / 2.0,
        RefVariant::Avg => {
            let all: Vec<f64> = p.forward.iter().flatten().map(|&d| ref_normalize(d, max, penalty)).collect();
            all.iter().sum::<f64>() / all.len() as f64
        }
    }
}

/// Population z-scores, computed the textbook way.
pub fn ref_zscores(xs: &[f64]) -> Vec<f64> {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let sd = (xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n).sqrt();
    xs.iter().map(|x| (x - mean) / sd).collect()
}

/// A random labeled edge list over at most `max_nodes` nodes; some nodes
/// may be isolated.
pub fn random_edges(rng: &mut impl Rng, max_nodes: usize, density: f64) -> (Vec<String>, Vec<(String, String, String)>) {
    let n = rng.gen_range(2..=max_nodes);
    let nodes: Vec<String> = (0..n).map(|i| format!("n{i}")).collect();
    let preds = ["p", "q", "r", "s"];
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if rng.gen_bool(density) {
                let p = preds[rng.gen_range(0..preds.len())];
                let (s, o) = if rng.gen_bool(0.5) { (i, j) } else { (j, i) };
                edges.push((nodes[s].clone(), p.to_string(), nodes[o].clone()));
                if rng.gen_bool(0.15) {
                    let p2 = preds[rng.gen_range(0..preds.len())];
                    edges.push((nodes[o].clone(), p2.to_string(), nodes[s].clone()));
                }
            }
        }
    }
    (nodes, edges)
}

pub fn graph_from(nodes: &[String], edges: &[(String, String, String)]) -> KnowledgeGraph {
    KnowledgeGraph::from_labeled_edges_with_nodes(
        edges.iter().map(|(s, p, o)| (s.as_str(), p.as_str(), o.as_str())),
        nodes.iter().map(String::as_str),
    )
    .unwrap()
}

pub fn ref_graph_from(nodes: &[String], edges: &[(String, String, String)]) -> RefGraph {
    let pairs: Vec<(String, String)> = edges.iter().map(|(s, _, o)| (s.clone(), o.clone())).collect();
    RefGraph::new(nodes, &pairs)
}

// The 30-node end-to-end fixture.

pub const MINI_NODES: [(&str, &str); 30] = [
    ("m.lebron", "LeBron James"),
    ("m.wade", "Dwyane Wade"),
    ("m.cavs", "Cleveland Cavaliers"),
    ("m.heat", "Miami Heat"),
    ("m.nba", "National Basketball Association"),
    ("m.cleveland", "Cleveland Ohio"),
    ("m.miami", "Miami Florida"),
    ("m.basketball", "Basketball"),
    ("m.olympics", "Summer Olympics"),
    ("m.marathon", "Marathon"),
    ("m.kipchoge", "Eliud Kipchoge"),
    ("m.apple", "Apple Inc."),
    ("m.cook", "Tim Cook"),
    ("m.iphone", "Smartphone"),
    ("m.google", "Google LLC"),
    ("m.pichai", "Sundar Pichai"),
    ("m.android", "Android OS"),
    ("m.cupertino", "Cupertino California"),
    ("m.california", "State of California"),
    ("m.samsung", "Samsung Electronics"),
    ("m.obama", "Barack Obama"),
    ("m.biden", "Joe Biden"),
    ("m.whitehouse", "White House"),
    ("m.congress", "United States Congress"),
    ("m.senate", "Senate"),
    ("m.washington", "Washington D.C."),
    ("m.democrats", "Democratic Party"),
    ("m.election", "Election"),
    ("m.usa", "United States"),
    ("m.forbes", "Forbes Magazine"),
];

pub const MINI_EDGES: [(&str, &str, &str); 46] = [
    ("m.lebron", "plays_for", "m.cavs"),
    ("m.lebron", "former_team", "m.heat"),
    ("m.wade", "plays_for", "m.heat"),
    ("m.cavs", "league", "m.nba"),
    ("m.heat", "league", "m.nba"),
    ("m.cavs", "located_in", "m.cleveland"),
    ("m.heat", "located_in", "m.miami"),
    ("m.nba", "sport", "m.basketball"),
    ("m.lebron", "sport", "m.basketball"),
    ("m.wade", "sport", "m.basketball"),
    ("m.lebron", "competed_in", "m.olympics"),
    ("m.wade", "competed_in", "m.olympics"),
    ("m.kipchoge", "competed_in", "m.olympics"),
    ("m.kipchoge", "sport", "m.marathon"),
    ("m.olympics", "event", "m.marathon"),
    ("m.lebron", "teammate", "m.wade"),
    ("m.cook", "ceo_of", "m.apple"),
    ("m.apple", "product", "m.iphone"),
    ("m.apple", "headquarters", "m.cupertino"),
    ("m.cupertino", "located_in", "m.california"),
    ("m.google", "headquarters", "m.california"),
    ("m.pichai", "ceo_of", "m.google"),
    ("m.google", "product", "m.android"),
    ("m.samsung", "uses", "m.android"),
    ("m.samsung", "competitor", "m.iphone"),
    ("m.apple", "competitor", "m.google"),
    ("m.obama", "residence", "m.whitehouse"),
    ("m.biden", "residence", "m.whitehouse"),
    ("m.obama", "colleague", "m.biden"),
    ("m.obama", "member_of", "m.democrats"),
    ("m.biden", "member_of", "m.democrats"),
    ("m.democrats", "party_in", "m.congress"),
    ("m.congress", "chamber", "m.senate"),
    ("m.senate", "located_in", "m.washington"),
    ("m.whitehouse", "located_in", "m.washington"),
    ("m.obama", "won", "m.election"),
    ("m.biden", "won", "m.election"),
    ("m.congress", "decided_by", "m.election"),
    ("m.usa", "capital", "m.washington"),
    ("m.usa", "state", "m.california"),
    ("m.usa", "city", "m.cleveland"),
    ("m.usa", "city", "m.miami"),
    ("m.usa", "country", "m.nba"),
    ("m.forbes", "listed", "m.lebron"),
    ("m.forbes", "listed", "m.cook"),
    ("m.obama", "met", "m.lebron"),
];

/// The fixture graph, built through the triple pipeline so that titles come
/// from name literals.
pub fn mini_kg() -> KnowledgeGraph {
    let mut triples: Vec<TripleRecord> = MINI_EDGES.iter().map(|(s, p, o)| TripleRecord::nodes(s, p, o)).collect();
    for (id, title) in MINI_NODES {
        triples.push(TripleRecord::literal(id, "type.object.name", title, Some("en")));
    }
    build_graph(triples, &PruneConfig::identity()).unwrap().graph
}

pub fn mini_ref_graph() -> RefGraph {
    let nodes: Vec<String> = MINI_NODES.iter().map(|(id, _)| id.to_string()).collect();
    let edges: Vec<(String, String)> = MINI_EDGES.iter().map(|(s, _, o)| (s.to_string(), o.to_string())).collect();
    RefGraph::new(&nodes, &edges)
}

pub fn mini_articles() -> Vec<Article> {
    vec![
        Article::new(
            "a1",
            "LeBron James returns to Cleveland",
            "LeBron James signed again with the Cleveland Cavaliers. Fans of basketball cheered. \
             The NBA star said basketball in Ohio felt like home, and basketball fans agreed.",
        ),
        Article::new(
            "a2",
            "Wade stays with the Heat",
            "Dwyane Wade will remain in Miami with the Heat. His old teammate LeBron James called. \
             Wade said basketball keeps him young and basketball is his life.",
        ),
        Article::new(
            "a3",
            "Kipchoge eyes another Olympic title",
            "Eliud Kipchoge trained for the marathon at altitude. The Olympics marathon course is flat. \
             A rival runner also entered the marathon field.",
        ),
        Article::new(
            "a4",
            "Apple unveils a new smartphone",
            "Tim Cook presented the smartphone in Cupertino. Apple expects the smartphone to beat Samsung. \
             Apple shares rose as Apple investors cheered.",
        ),
        Article::new(
            "a5",
            "Google ships Android update",
            "Sundar Pichai said Google will ship Android updates faster. Android phones from every maker \
             will get the update, and Google hopes each smartphone benefits. California engineers worked late.",
        ),
        Article::new(
            "a6",
            "Obama and Biden rally before the vote",
            "Barack Obama and Joe Biden spoke near the White House in Washington. The Senate race matters, \
             Obama said, and the Senate could shift. Congress watched the election closely while Democrats organized.",
        ),
    ]
}

fn ann(article: &str, entity: &str, ty: EntityType, count: u32, offset: u64) -> EntityAnnotation {
    EntityAnnotation {
        article_id: article.into(),
        mention: entity.trim_start_matches("m.").into(),
        entity_id: entity.into(),
        entity_type: ty,
        count,
        first_offset: offset,
    }
}

pub fn mini_annotations() -> BTreeMap<String, Vec<EntityAnnotation>> {
    use EntityType::*;
    let all = vec![
        ann("a1", "m.lebron", Per, 4, 0),
        ann("a1", "m.cavs", Org, 3, 60),
        ann("a1", "m.cleveland", Gpe, 2, 25),
        ann("a1", "m.nba", Org, 1, 120),
        ann("a2", "m.wade", Per, 3, 0),
        ann("a2", "m.heat", Org, 2, 20),
        ann("a2", "m.miami", Gpe, 2, 50),
        ann("a2", "m.lebron", Per, 1, 90),
        ann("a3", "m.kipchoge", Per, 3, 0),
        ann("a3", "m.olympics", Org, 2, 30),
        ann("a3", "m.ghost_runner", Per, 1, 110),
        ann("a4", "m.apple", Org, 4, 0),
        ann("a4", "m.cook", Per, 3, 30),
        ann("a4", "m.cupertino", Gpe, 1, 70),
        ann("a4", "m.samsung", Org, 1, 120),
        ann("a5", "m.google", Org, 3, 0),
        ann("a5", "m.pichai", Per, 2, 20),
        ann("a5", "m.android", Org, 2, 40),
        ann("a5", "m.california", Gpe, 1, 150),
        ann("a6", "m.obama", Per, 3, 0),
        ann("a6", "m.biden", Per, 2, 15),
        ann("a6", "m.whitehouse", Fac, 2, 30),
        ann("a6", "m.washington", Gpe, 2, 50),
        ann("a6", "m.congress", Org, 1, 140),
        ann("a6", "m.democrats", Org, 1, 180),
    ];
    let mut by: BTreeMap<String, Vec<EntityAnnotation>> = BTreeMap::new();
    for a in all {
        by.entry(a.article_id.clone()).or_default().push(a);
    }
    by
}

/// Seeds each article must end up with under the default screening and two
/// context words, worked out by hand: screened entities (count, then
/// offset) followed by title-matching terms.
pub const MINI_SEEDS: [(&str, &[&str]); 6] = [
    ("a1", &["m.lebron", "m.cavs", "m.nba", "m.basketball"]),
    ("a2", &["m.wade", "m.heat", "m.lebron", "m.basketball"]),
    ("a3", &["m.kipchoge", "m.olympics", "m.ghost_runner", "m.marathon"]),
    ("a4", &["m.apple", "m.cook", "m.samsung", "m.iphone"]),
    ("a5", &["m.google", "m.pichai", "m.android", "m.iphone"]),
    ("a6", &["m.obama", "m.biden", "m.whitehouse", "m.congress", "m.democrats", "m.senate", "m.election"]),
];

/// All 15 unordered article pairs, ids "1".."15".
pub fn mini_pairs() -> Vec<(String, &'static str, &'static str)> {
    let ids: Vec<&str> = MINI_SEEDS.iter().map(|(a, _)| *a).collect();
    let mut out = Vec::new();
    for i in 0..ids.len() {
        for j in (i + 1)..ids.len() {
            out.push(((out.len() + 1).to_string(), ids[i], ids[j]));
        }
    }
    out
}

/// Oracle SED values over the mini fixture for RWS weights.
pub fn mini_oracle(radius: usize, variant: RefVariant, penalty: f64) -> (Vec<f64>, f64) {
    let g = mini_ref_graph();
    let seeds: BTreeMap<&str, &[&str]> = MINI_SEEDS.iter().copied().collect();
    let cost = |u: usize, v: usize| g.rws(u, v);
    let raw: Vec<RefPair> = mini_pairs()
        .iter()
        .map(|(_, a, b)| ref_pair_costs(&g, seeds[a], seeds[b], radius, &cost))
        .collect();
    let max = raw.iter().filter_map(RefPair::max_finite).fold(0.0, f64::max);
    (raw.iter().map(|p| ref_sed(p, variant, max, penalty)).collect(), max)
}
