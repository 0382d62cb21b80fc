//! Accumulated log-degree distance from a retrieved set to target nodes.
//!
//! A path from a retrieved node to a target costs the sum of
//! `ln(1 + deg(n))` over its nodes, target excluded. Unreachable targets
//! get `f64::INFINITY`, retrieved targets get zero.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::graph::{CorpusGraph, NodeId, View};

/// Which paths the distance is taken over.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PathMode {
    /// Cheapest path by accumulated log-degree.
    #[default]
    MinCost,
    /// Fewest hops per retrieved node, cheapest among equally short
    /// paths; the minimum is then taken over retrieved nodes.
    HopShortest,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrConfig {
    pub view: View,
    pub path_mode: PathMode,
}

#[inline]
pub(crate) fn node_cost(g: &CorpusGraph, n: NodeId, view: View) -> f64 {
    (g.degree(n, view) as f64).ln_1p()
}

#[derive(Copy, Clone, PartialEq)]
struct Entry {
    cost: f64,
    node: NodeId,
}

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .cost
            .total_cmp(&self.cost)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Uncertainty of every node in `targets` with respect to `retrieved`,
/// aligned with `targets`.
pub fn uncertainties(
    g: &CorpusGraph,
    retrieved: &[NodeId],
    targets: &[NodeId],
    cfg: &TrConfig,
) -> Vec<f64> {
    match cfg.path_mode {
        PathMode::MinCost => min_cost(g, retrieved, targets, cfg.view),
        PathMode::HopShortest => hop_shortest(g, retrieved, targets, cfg.view),
    }
}

pub fn uncertainty(g: &CorpusGraph, retrieved: &[NodeId], target: NodeId, cfg: &TrConfig) -> f64 {
    uncertainties(g, retrieved, &[target], cfg)[0]
}

/// Multi-source Dijkstra where leaving node `u` costs `ln(1 + deg(u))`.
/// Stops once every target is settled.
fn min_cost(g: &CorpusGraph, retrieved: &[NodeId], targets: &[NodeId], view: View) -> Vec<f64> {
    if targets.is_empty() {
        return Vec::new();
    }
    let n = g.len();
    let mut dist = vec![f64::INFINITY; n];
    let mut is_target = vec![false; n];
    for t in targets {
        is_target[t.index()] = true;
    }
    let mut remaining = targets.len();
    let mut heap = BinaryHeap::new();
    for &s in retrieved {
        if dist[s.index()] > 0.0 {
            dist[s.index()] = 0.0;
            heap.push(Entry { cost: 0.0, node: s });
        }
    }
    let mut settled = vec![false; n];
    while let Some(Entry { cost, node }) = heap.pop() {
        if settled[node.index()] {
            continue;
        }
        settled[node.index()] = true;
        if is_target[node.index()] {
            is_target[node.index()] = false;
            remaining -= 1;
            if remaining == 0 {
                break;
            }
        }
        let next = cost + node_cost(g, node, view);
        for &nb in g.neighbors(node, view) {
            if next < dist[nb.index()] {
                dist[nb.index()] = next;
                heap.push(Entry { cost: next, node: nb });
            }
        }
    }
    targets.iter().map(|t| dist[t.index()]).collect()
}

/// One BFS per retrieved node, keeping the cheapest cost within each hop
/// layer.
fn hop_shortest(g: &CorpusGraph, retrieved: &[NodeId], targets: &[NodeId], view: View) -> Vec<f64> {
    let n = g.len();
    let mut best = vec![f64::INFINITY; targets.len()];
    let mut in_ret = vec![false; n];
    for &s in retrieved {
        in_ret[s.index()] = true;
    }
    for (b, t) in best.iter_mut().zip(targets) {
        if in_ret[t.index()] {
            *b = 0.0;
        }
    }
    let mut hops = vec![usize::MAX; n];
    let mut cost = vec![f64::INFINITY; n];
    let mut queue = VecDeque::new();
    for &s in retrieved {
        hops.iter_mut().for_each(|h| *h = usize::MAX);
        cost.iter_mut().for_each(|c| *c = f64::INFINITY);
        hops[s.index()] = 0;
        cost[s.index()] = 0.0;
        queue.clear();
        queue.push_back(s);
        while let Some(u) = queue.pop_front() {
            let through = cost[u.index()] + node_cost(g, u, view);
            for &v in g.neighbors(u, view) {
                let vi = v.index();
                if hops[vi] == usize::MAX {
                    hops[vi] = hops[u.index()] + 1;
                    cost[vi] = through;
                    queue.push_back(v);
                } else if hops[vi] == hops[u.index()] + 1 && through < cost[vi] {
                    cost[vi] = through;
                }
            }
        }
        for (b, t) in best.iter_mut().zip(targets) {
            *b = b.min(cost[t.index()]);
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::{graph, path_abc};

    #[test]
    fn path_example() {
        let g = path_abc();
        let a = g.id("a").unwrap();
        let c = g.id("c").unwrap();
        let u = uncertainty(&g, &[a], c, &TrConfig::default());
        assert!((u - (2f64.ln() + 3f64.ln())).abs() < 1e-12);
        assert!((u - 1.791_759_469_228_055).abs() < 1e-12);
    }

    #[test]
    fn retrieved_target_is_free() {
        let g = path_abc();
        let a = g.id("a").unwrap();
        for mode in [PathMode::MinCost, PathMode::HopShortest] {
            let cfg = TrConfig { path_mode: mode, ..Default::default() };
            assert_eq!(uncertainty(&g, &[a], a, &cfg), 0.0);
        }
    }

    #[test]
    fn unreachable_is_infinite() {
        let g = graph(&["a", "b", "x", "y"], &[("a", "b"), ("x", "y")]);
        let u = uncertainty(&g, &[g.id("a").unwrap()], g.id("y").unwrap(), &TrConfig::default());
        assert!(u.is_infinite());
    }

    #[test]
    fn modes_differ_on_cheap_detour() {
        // s–h–t is two hops through a hub h of degree 14; s–p–q–t is three
        // hops through degree-2 nodes
        let g = graph(
            &["s", "h", "t", "p", "q", "x1", "x2", "x3", "x4", "x5", "x6", "x7", "x8", "x9", "xa", "xb", "xc"],
            &[
                ("s", "h"), ("h", "t"), ("h", "x1"), ("h", "x2"), ("h", "x3"), ("h", "x4"),
                ("h", "x5"), ("h", "x6"), ("h", "x7"), ("h", "x8"), ("h", "x9"), ("h", "xa"),
                ("h", "xb"), ("h", "xc"),
                ("s", "p"), ("p", "q"), ("q", "t"),
            ],
        );
        let (s, t) = (g.id("s").unwrap(), g.id("t").unwrap());
        let ln = |d: f64| d.ln_1p();
        let cheap = uncertainty(&g, &[s], t, &TrConfig::default());
        let short = uncertainty(&g, &[s], t, &TrConfig { path_mode: PathMode::HopShortest, ..Default::default() });
        assert!((short - (ln(2.0) + ln(14.0))).abs() < 1e-12);
        assert!((cheap - (ln(2.0) + ln(2.0) + ln(2.0))).abs() < 1e-12);
        assert!(cheap < short);
    }
}
