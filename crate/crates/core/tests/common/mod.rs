#![allow(dead_code)]

use fastinsight::{CorpusGraph, NodeRecord};
use rand::seq::IndexedRandom;
use rand::Rng;

pub const WORDS: &[&str] = &[
    "graph", "vector", "node", "edge", "query", "rank", "score", "model", "token", "hash",
    "paper", "cite", "search", "layer", "latent", "budget", "batch", "bridge", "hub", "walk",
    "path", "degree", "recall", "oracle", "signal", "smooth", "noise", "frontier", "seed", "index",
];

pub fn key(i: usize) -> String {
    format!("n{i:03}")
}

pub fn text<R: Rng>(rng: &mut R, words: usize) -> String {
    (0..words)
        .map(|_| *WORDS.choose(rng).unwrap())
        .collect::<Vec<_>>()
        .join(" ")
}

/// Erdős–Rényi graph on `n` nodes keyed `n000..`, each with a short random text.
pub fn random_graph<R: Rng>(rng: &mut R, n: usize, p: f64) -> CorpusGraph {
    let nodes = (0..n)
        .map(|i| {
            let w = rng.random_range(3..8);
            NodeRecord::new(key(i), text(rng, w))
        })
        .collect();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j && rng.random::<f64>() < p {
                edges.push((key(i), key(j)));
            }
        }
    }
    CorpusGraph::from_parts(nodes, edges).unwrap().0
}

pub fn build(keys: &[&str], edges: &[(&str, &str)]) -> CorpusGraph {
    let nodes = keys.iter().map(|k| NodeRecord::new(*k, format!("text {k}"))).collect();
    CorpusGraph::from_parts(nodes, edges.iter().map(|(a, b)| (a.to_string(), b.to_string())))
        .unwrap()
        .0
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
