//! Turns raw triples into a pruned [`KnowledgeGraph`].
//!
//! Passes run once each, in this order:
//! 1. drop non-English literals (`english_only`),
//! 2. remove stoplisted nodes with every triple touching them,
//! 3. remove nodes whose directed out-degree (distinct node-valued objects)
//!    is below `min_out_degree`,
//! 4. collapse to undirected edges, one per node pair,
//! 5. remove degree-1 vertices (`drop_leaves`).
//!
//! Literal triples never become edges; an English `type.object.name`
//! literal becomes the node title.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::{EdgeSpec, KnowledgeGraph, NodeId, PredicateId};
use crate::ntriples::{Object, TripleRecord};

const NAME_PREDICATE: &str = "type.object.name";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PruneConfig {
    pub english_only: bool,
    /// 0 disables degree pruning.
    pub min_out_degree: usize,
    pub stoplist: HashSet<String>,
    pub drop_leaves: bool,
}

impl Default for PruneConfig {
    fn default() -> Self {
        PruneConfig {
            english_only: true,
            min_out_degree: 20,
            stoplist: HashSet::new(),
            drop_leaves: false,
        }
    }
}

impl PruneConfig {
    /// Keeps everything; only collapses parallel edges.
    pub fn identity() -> Self {
        PruneConfig {
            english_only: false,
            min_out_degree: 0,
            stoplist: HashSet::new(),
            drop_leaves: false,
        }
    }
}

/// Reads a stoplist: one identifier per line, `#` starts a comment.
pub fn read_stoplist(path: &Path) -> Result<HashSet<String>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(parse_stoplist(&text))
}

pub fn parse_stoplist(text: &str) -> HashSet<String> {
    text.lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
        .map(|l| l.trim_start_matches('<').trim_end_matches('>').to_string())
        .collect()
}

/// Node and link counts after one pass. Before the undirected collapse,
/// `links` counts directed node-to-node triples; afterwards, edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PassStats {
    pub pass: &'static str,
    pub nodes: usize,
    pub links: usize,
    pub literals: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PruneStats {
    pub passes: Vec<PassStats>,
}

impl fmt::Display for PruneStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<16} {:>12} {:>14} {:>12}", "pass", "nodes", "links", "literals")?;
        for p in &self.passes {
            writeln!(f, "{:<16} {:>12} {:>14} {:>12}", p.pass, p.nodes, p.links, p.literals)?;
        }
        Ok(())
    }
}

pub struct BuildOutput {
    pub graph: KnowledgeGraph,
    pub stats: PruneStats,
}

struct Literal {
    subject: u32,
    is_name: bool,
    english: bool,
    untagged: bool,
    value: String,
}

fn is_english(lang: &str) -> bool {
    let primary = lang.split('-').next().unwrap_or("");
    primary.eq_ignore_ascii_case("en")
}

fn is_name_predicate(p: &str) -> bool {
    p == NAME_PREDICATE || p.ends_with(&format!("/{NAME_PREDICATE}"))
}

#[derive(Default)]
struct Interner {
    ids: Vec<String>,
    map: HashMap<String, u32>,
}

impl Interner {
    fn intern(&mut self, s: String) -> u32 {
        if let Some(&i) = self.map.get(&s) {
            return i;
        }
        let i = self.ids.len() as u32;
        self.map.insert(s.clone(), i);
        self.ids.push(s);
        i
    }
}

pub fn build_graph<I>(triples: I, cfg: &PruneConfig) -> Result<BuildOutput>
where
    I: IntoIterator<Item = TripleRecord>,
{
    let mut nodes = Interner::default();
    let mut preds = Interner::default();
    let mut relations: Vec<(u32, u32, u32)> = Vec::new();
    let mut literals: Vec<Literal> = Vec::new();
    let mut stats = PruneStats::default();

    for t in triples {
        let s = nodes.intern(t.subject);
        match t.object {
            Object::Node(o) => {
                let o = nodes.intern(o);
                let p = preds.intern(t.predicate);
                relations.push((s, p, o));
            }
            Object::Literal { value, lang } => {
                let english = lang.as_deref().is_some_and(is_english);
                literals.push(Literal {
                    subject: s,
                    is_name: is_name_predicate(&t.predicate),
                    english,
                    untagged: lang.is_none(),
                    value,
                });
            }
        }
    }
    let n = nodes.ids.len();
    // Nodes that appear in at least one surviving triple.
    let mut alive = vec![false; n];
    let mark_alive = |alive: &mut Vec<bool>, rel: &[(u32, u32, u32)], lit: &[Literal]| {
        alive.iter_mut().for_each(|a| *a = false);
        for &(s, _, o) in rel {
            alive[s as usize] = true;
            alive[o as usize] = true;
        }
        for l in lit {
            alive[l.subject as usize] = true;
        }
        alive.iter().filter(|&&a| a).count()
    };
    let count = mark_alive(&mut alive, &relations, &literals);
    stats.passes.push(PassStats {
        pass: "input",
        nodes: count,
        links: relations.len(),
        literals: literals.len(),
    });

    if cfg.english_only {
        literals.retain(|l| l.english || l.untagged);
    }
    let count = mark_alive(&mut alive, &relations, &literals);
    stats.passes.push(PassStats {
        pass: "english-only",
        nodes: count,
        links: relations.len(),
        literals: literals.len(),
    });

    let stopped: Vec<bool> = nodes.ids.iter().map(|id| cfg.stoplist.contains(id)).collect();
    relations.retain(|&(s, _, o)| !stopped[s as usize] && !stopped[o as usize]);
    literals.retain(|l| !stopped[l.subject as usize]);
    let count = mark_alive(&mut alive, &relations, &literals);
    stats.passes.push(PassStats {
        pass: "stoplist",
        nodes: count,
        links: relations.len(),
        literals: literals.len(),
    });

    if cfg.min_out_degree > 0 {
        let mut pairs: Vec<(u32, u32)> = relations
            .iter()
            .filter(|&&(s, _, o)| s != o)
            .map(|&(s, _, o)| (s, o))
            .collect();
        pairs.sort_unstable();
        pairs.dedup();
        let mut out_degree = vec![0usize; n];
        for (s, _) in pairs {
            out_degree[s as usize] += 1;
        }
        let keep: Vec<bool> = out_degree.iter().map(|&d| d >= cfg.min_out_degree).collect();
        relations.retain(|&(s, _, o)| keep[s as usize] && keep[o as usize]);
        literals.retain(|l| keep[l.subject as usize]);
        for (a, k) in alive.iter_mut().zip(&keep) {
            *a &= *k;
        }
    }
    // A node that passed the threshold stays even if all its neighbors went.
    let survivors_after_degree = alive.clone();
    stats.passes.push(PassStats {
        pass: "min-out-degree",
        nodes: survivors_after_degree.iter().filter(|&&a| a).count(),
        links: relations.len(),
        literals: literals.len(),
    });

    // Undirected collapse.
    let mut grouped: HashMap<(u32, u32), Vec<u32>> = HashMap::new();
    for &(s, p, o) in &relations {
        if s == o {
            continue;
        }
        grouped.entry((s.min(o), s.max(o))).or_default().push(p);
    }
    drop(relations);
    let mut keep_node = survivors_after_degree;
    stats.passes.push(PassStats {
        pass: "undirected",
        nodes: keep_node.iter().filter(|&&a| a).count(),
        links: grouped.len(),
        literals: literals.len(),
    });

    if cfg.drop_leaves {
        let mut degree = vec![0usize; n];
        for &(a, b) in grouped.keys() {
            degree[a as usize] += 1;
            degree[b as usize] += 1;
        }
        for (k, d) in keep_node.iter_mut().zip(&degree) {
            if *d == 1 {
                *k = false;
            }
        }
        grouped.retain(|&(a, b), _| keep_node[a as usize] && keep_node[b as usize]);
        literals.retain(|l| keep_node[l.subject as usize]);
    }
    stats.passes.push(PassStats {
        pass: "drop-leaves",
        nodes: keep_node.iter().filter(|&&a| a).count(),
        links: grouped.len(),
        literals: literals.len(),
    });

    // Titles: English name, else untagged name, else identifier.
    let mut best_title: HashMap<u32, (u8, String)> = HashMap::new();
    for l in literals.into_iter().filter(|l| l.is_name) {
        let rank = if l.english {
            0
        } else if l.untagged {
            1
        } else {
            continue;
        };
        match best_title.get(&l.subject) {
            Some((r, _)) if *r <= rank => {}
            _ => {
                best_title.insert(l.subject, (rank, l.value));
            }
        }
    }

    // Final interning in sorted identifier order.
    let mut survivors: Vec<u32> = (0..n as u32).filter(|&i| keep_node[i as usize]).collect();
    survivors.sort_unstable_by(|&a, &b| nodes.ids[a as usize].cmp(&nodes.ids[b as usize]));
    let mut final_index = vec![u32::MAX; n];
    for (new, &old) in survivors.iter().enumerate() {
        final_index[old as usize] = new as u32;
    }
    let mut used_preds: Vec<u32> = grouped.values().flatten().copied().collect();
    used_preds.sort_unstable_by(|&a, &b| preds.ids[a as usize].cmp(&preds.ids[b as usize]));
    used_preds.dedup();
    let mut pred_index = vec![u32::MAX; preds.ids.len()];
    for (new, &old) in used_preds.iter().enumerate() {
        pred_index[old as usize] = new as u32;
    }

    let titles = survivors
        .iter()
        .map(|old| match best_title.remove(old) {
            Some((_, t)) => t,
            None => nodes.ids[*old as usize].clone(),
        })
        .collect();
    let edges = grouped
        .into_iter()
        .map(|((a, b), ps)| EdgeSpec {
            a: NodeId(final_index[a as usize]),
            b: NodeId(final_index[b as usize]),
            predicates: ps.into_iter().map(|p| PredicateId(pred_index[p as usize])).collect(),
        })
        .collect();
    let predicate_names = used_preds.iter().map(|&p| preds.ids[p as usize].clone()).collect();
    let ids = survivors
        .iter()
        .map(|&old| std::mem::take(&mut nodes.ids[old as usize]))
        .collect();

    let graph = KnowledgeGraph::from_parts(ids, titles, predicate_names, edges)?;
    Ok(BuildOutput { graph, stats })
}
