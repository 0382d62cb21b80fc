//! Seeded generator for clustered corpora where gold nodes are reachable
//! from the best vector matches but are poor vector matches themselves.
//!
//! Every cluster has one query made of four cluster-specific key words.
//! Node roles within a cluster:
//!
//! * bridges carry three key words, so they lead vector search;
//! * gold nodes carry all four key words buried in many filler words, and
//!   each is linked to two bridges;
//! * distractors carry two key words and sit elsewhere in the cluster;
//! * fillers carry no key words.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use fastinsight::{CorpusGraph, NodeRecord};
use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::dataset::{Qrels, Query};
use crate::error::{EvalError, Result};

const VOCABULARY: usize = 4000;
const KEY_WORDS: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Role {
    Gold,
    Bridge,
    Distractor,
    Filler,
}

#[derive(Debug, Clone)]
pub struct SynthDataset {
    pub nodes: Vec<NodeRecord>,
    pub edges: Vec<(String, String)>,
    pub queries: Vec<Query>,
    pub qrels: Qrels,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct SynthStats {
    pub nodes: usize,
    pub edges: usize,
    pub queries: usize,
    pub gold: usize,
}

fn filler(rng: &mut ChaCha8Rng, n: usize) -> Vec<String> {
    (0..n).map(|_| format!("w{}", rng.random_range(0..VOCABULARY))).collect()
}

fn content(mut words: Vec<String>, rng: &mut ChaCha8Rng) -> String {
    words.shuffle(rng);
    words.join(" ")
}

/// Generates `n_clusters` clusters of `cluster_size` nodes each.
///
/// # Panics
///
/// If either size is below 2.
pub fn synth_bridge(n_clusters: usize, cluster_size: usize, seed: u64) -> SynthDataset {
    assert!(n_clusters >= 2 && cluster_size >= 2, "sizes must be at least 2");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut nodes = Vec::with_capacity(n_clusters * cluster_size);
    let mut edges = Vec::new();
    let mut queries = Vec::new();
    let mut qrels = Qrels::new();
    let mut outer: Vec<Vec<String>> = Vec::new();

    for c in 0..n_clusters {
        let m = cluster_size;
        let keys: Vec<String> = (0..KEY_WORDS).map(|j| format!("k{c}x{j}")).collect();
        let n_gold = (m / 20).clamp(1, 10);
        let n_bridge = (m / 40).clamp(1, 10).min(m - n_gold);
        let n_distractor = (m / 5).min(m - n_gold - n_bridge);
        let mut roles: Vec<Role> = std::iter::repeat_n(Role::Gold, n_gold)
            .chain(std::iter::repeat_n(Role::Bridge, n_bridge))
            .chain(std::iter::repeat_n(Role::Distractor, n_distractor))
            .chain(std::iter::repeat_n(Role::Filler, m - n_gold - n_bridge - n_distractor))
            .collect();
        roles.shuffle(&mut rng);

        let node_key = |i: usize| format!("c{c:03}n{i:04}");
        let by_role = |r: Role| -> Vec<usize> { (0..m).filter(|&i| roles[i] == r).collect() };
        let (gold, bridges, fillers) = (by_role(Role::Gold), by_role(Role::Bridge), by_role(Role::Filler));

        for (i, role) in roles.iter().enumerate() {
            let text = match role {
                Role::Gold => {
                    let n = rng.random_range(6..60);
                    let mut w = filler(&mut rng, n);
                    w.extend(keys.iter().cloned());
                    content(w, &mut rng)
                }
                Role::Bridge => {
                    let mut w: Vec<String> = keys.choose_multiple(&mut rng, 3).cloned().collect();
                    w.extend(filler(&mut rng, 1));
                    content(w, &mut rng)
                }
                Role::Distractor => {
                    let mut w: Vec<String> = keys.choose_multiple(&mut rng, 2).cloned().collect();
                    w.extend(filler(&mut rng, 2));
                    content(w, &mut rng)
                }
                Role::Filler => {
                    let n = rng.random_range(4..9);
                    content(filler(&mut rng, n), &mut rng)
                }
            };
            nodes.push(NodeRecord::new(node_key(i), text));
        }

        // backbone: random tree plus chords over every non-gold node
        let mut backbone: Vec<usize> = (0..m).filter(|&i| roles[i] != Role::Gold).collect();
        backbone.shuffle(&mut rng);
        for j in 1..backbone.len() {
            let parent = backbone[rng.random_range(0..j)];
            edges.push((node_key(backbone[j]), node_key(parent)));
        }
        for _ in 0..backbone.len() / 2 {
            let (a, b) = (*backbone.choose(&mut rng).unwrap(), *backbone.choose(&mut rng).unwrap());
            edges.push((node_key(a), node_key(b)));
        }
        for &g in &gold {
            for &b in bridges.choose_multiple(&mut rng, 2) {
                edges.push((node_key(g), node_key(b)));
            }
            if let Some(&f) = fillers.choose(&mut rng) {
                edges.push((node_key(f), node_key(g)));
            }
        }
        outer.push(fillers.iter().map(|&i| node_key(i)).collect());

        let qid = format!("q{c:03}");
        let mut words = keys.clone();
        words.shuffle(&mut rng);
        queries.push(Query {
            id: qid.clone(),
            text: words.join(" "),
        });
        qrels.insert(qid, gold.iter().map(|&i| node_key(i)).collect());
    }

    for _ in 0..2 * n_clusters {
        let (a, b) = (rng.random_range(0..n_clusters), rng.random_range(0..n_clusters));
        if a == b || outer[a].is_empty() || outer[b].is_empty() {
            continue;
        }
        let x = outer[a].choose(&mut rng).unwrap().clone();
        let y = outer[b].choose(&mut rng).unwrap().clone();
        edges.push((x, y));
    }
    // the loader drops these; keep the file clean
    edges.retain(|(a, b)| a != b);
    edges.sort();
    edges.dedup();

    SynthDataset {
        nodes,
        edges,
        queries,
        qrels,
    }
}

impl SynthDataset {
    pub fn stats(&self) -> SynthStats {
        SynthStats {
            nodes: self.nodes.len(),
            edges: self.edges.len(),
            queries: self.queries.len(),
            gold: self.qrels.values().map(Vec::len).sum(),
        }
    }

    pub fn graph(&self) -> Result<CorpusGraph> {
        Ok(CorpusGraph::from_parts(self.nodes.clone(), self.edges.iter().map(|(a, b)| (a.as_str(), b.as_str())))?.0)
    }

    /// Writes `nodes.jsonl`, `edges.tsv`, `queries.jsonl` and `qrels.tsv`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(EvalError::file(dir))?;
        let create = |name: &str| -> Result<BufWriter<File>> {
            let p = dir.join(name);
            Ok(BufWriter::new(File::create(&p).map_err(EvalError::file(p))?))
        };
        let mut w = create("nodes.jsonl")?;
        for n in &self.nodes {
            serde_json::to_writer(&mut w, n)?;
            w.write_all(b"\n")?;
        }
        w.flush()?;
        let mut w = create("edges.tsv")?;
        for (a, b) in &self.edges {
            writeln!(w, "{a}\t{b}")?;
        }
        w.flush()?;
        let mut w = create("queries.jsonl")?;
        for q in &self.queries {
            serde_json::to_writer(&mut w, q)?;
            w.write_all(b"\n")?;
        }
        w.flush()?;
        let mut w = create("qrels.tsv")?;
        for (qid, gold) in &self.qrels {
            for k in gold {
                writeln!(w, "{qid}\t{k}\t1")?;
            }
        }
        w.flush()?;
        Ok(())
    }
}
