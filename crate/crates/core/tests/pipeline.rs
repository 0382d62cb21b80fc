mod common;

use fastinsight::encoding::{build_index, vector_search, HashEmbedder, IndexOptions};
use fastinsight::rerank::{ContentWeighting, HashReranker};
use fastinsight::{
    fastinsight_retrieve, rerank_plain, stex, CorpusGraph, EmbeddingIndex, FastInsightConfig,
    NodeRecord, Pipeline, RankedList, StexConfig, View,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn index_for(g: &CorpusGraph) -> (HashEmbedder, EmbeddingIndex) {
    let emb = HashEmbedder::new(128).unwrap();
    let index = build_index(g, &emb, &IndexOptions::default()).unwrap();
    (emb, index)
}

fn reranker() -> HashReranker {
    HashReranker::new(128, ContentWeighting::Normalized, HashReranker::seeded_head(128, 17, 0.5))
}

#[test]
fn default_loop_runs_ten_rerank_and_nine_expansion_rounds() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let g = common::random_graph(&mut rng, 400, 0.02);
    let (emb, index) = index_for(&g);
    let rr = reranker();
    let out = fastinsight_retrieve("graph rank bridge", &g, &index, &emb, &rr, &FastInsightConfig::default()).unwrap();
    assert_eq!(out.ranked.len(), 100);
    assert_eq!(out.trace.vector_search_calls, 1);
    assert_eq!(out.trace.granker_calls, 10);
    assert_eq!(out.trace.stex_calls, 9);
    let sizes: Vec<usize> = out.trace.snapshots.iter().map(Vec::len).collect();
    assert_eq!(sizes, (1..=10).map(|i| 10 * i).collect::<Vec<_>>());
}

#[test]
fn isolated_component_stops_early() {
    // twelve nodes about the query, cut off from a large unrelated remainder
    let mut nodes = Vec::new();
    let mut edges = Vec::new();
    for i in 0..12 {
        nodes.push(NodeRecord::new(format!("c{i:02}"), format!("orchid petal bloom {i}")));
        if i > 0 {
            edges.push((format!("c{:02}", i - 1), format!("c{i:02}")));
        }
    }
    for i in 0..200 {
        nodes.push(NodeRecord::new(format!("z{i:03}"), format!("granite basalt quartz {i}")));
        edges.push((format!("z{i:03}"), format!("z{:03}", (i + 1) % 200)));
    }
    let g = CorpusGraph::from_parts(nodes, edges).unwrap().0;
    let (emb, index) = index_for(&g);
    let out = fastinsight_retrieve("orchid petal", &g, &index, &emb, &reranker(), &FastInsightConfig::default()).unwrap();
    assert_eq!(out.ranked.len(), 12);
    assert!(out.ranked.keys(&g).iter().all(|k| k.starts_with('c')));
    // the final expansion finds an empty frontier
    assert_eq!(out.trace.stex_calls, out.trace.granker_calls);
}

#[test]
fn budget_equal_to_batch_is_a_single_rerank() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let g = common::random_graph(&mut rng, 50, 0.1);
    let (emb, index) = index_for(&g);
    let cfg = FastInsightConfig { budget: 10, ..Default::default() };
    let out = fastinsight_retrieve("seed walk", &g, &index, &emb, &reranker(), &cfg).unwrap();
    assert_eq!((out.trace.vector_search_calls, out.trace.granker_calls, out.trace.stex_calls), (1, 1, 0));
    assert_eq!(out.ranked.len(), 10);
}

/// The loop composed by hand from the public operators, with fusion and
/// structural scores switched off.
fn hand_composed(q: &str, g: &CorpusGraph, emb: &HashEmbedder, index: &EmbeddingIndex, rr: &HashReranker, batch: usize, budget: usize) -> RankedList {
    use fastinsight::Embedder;
    let v_q = index.prepare_query(emb.encode_query(q).unwrap()).unwrap();
    let seeds = vector_search(&v_q, index, batch).unwrap();
    let mut ret = rerank_plain(q, &seeds, g, rr, seeds.len()).unwrap();
    while ret.len() < budget {
        let add = stex(&v_q, index, g, &ret, &StexConfig { beta: 0.0, view: View::Undirected }).unwrap();
        if add.is_empty() {
            break;
        }
        let room = (ret.len() + batch).min(budget) - ret.len();
        let mut grown = ret.clone();
        for e in add.iter().take(room) {
            grown.push(*e);
        }
        ret = rerank_plain(q, &grown, g, rr, grown.len()).unwrap();
    }
    ret
}

#[test]
fn degenerate_settings_match_hand_composition() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let rr = reranker();
    for _ in 0..10 {
        let g = common::random_graph(&mut rng, 120, 0.03);
        let (emb, index) = index_for(&g);
        let q = common::text(&mut rng, 3);
        let cfg = FastInsightConfig { alpha: 0.0, beta: 0.0, batch: 5, budget: 40, ..Default::default() };
        let got = fastinsight_retrieve(&q, &g, &index, &emb, &rr, &cfg).unwrap();
        assert_eq!(got.ranked.node_vec(), hand_composed(&q, &g, &emb, &index, &rr, 5, 40).node_vec());
    }
}

#[test]
fn repeated_runs_are_identical() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let g = common::random_graph(&mut rng, 200, 0.03);
    let (emb, index) = index_for(&g);
    let rr = reranker();
    let p = Pipeline::new(&g, &index, &emb, &rr).unwrap();
    let a = p.fastinsight("hub signal", &FastInsightConfig::default()).unwrap();
    let b = p.fastinsight("hub signal", &FastInsightConfig::default()).unwrap();
    assert_eq!(a.ranked, b.ranked);
    assert_eq!(a.trace.snapshots, b.trace.snapshots);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn loop_respects_budget_and_counts(seed in 0u64..10_000, batch in 1usize..8, extra in 0usize..40, p in 0.0f64..0.08) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = common::random_graph(&mut rng, 60, p);
        let (emb, index) = index_for(&g);
        let cfg = FastInsightConfig { batch, budget: batch + extra, ..Default::default() };
        let out = fastinsight_retrieve("graph edge node", &g, &index, &emb, &reranker(), &cfg).unwrap();
        let t = &out.trace;
        prop_assert!(out.ranked.len() <= cfg.budget);
        let mut sorted = out.ranked.node_vec();
        sorted.sort();
        sorted.dedup();
        prop_assert_eq!(sorted.len(), out.ranked.len());
        prop_assert!(t.snapshots.windows(2).all(|w| w[0].len() <= w[1].len()));
        let rounds = t.granker_calls - 1;
        prop_assert!(rounds <= extra);
        let full = t.snapshots.windows(2).all(|w| w[1].len() - w[0].len() == batch.min(cfg.budget - w[0].len()));
        if full {
            prop_assert!(rounds <= extra.div_ceil(batch));
        }
        prop_assert!(t.stex_calls == rounds || t.stex_calls == rounds + 1);
    }
}
