//! Corpus graph storage and topology queries.
//!
//! Nodes are stored sorted by key, so [`NodeId`] order coincides with key
//! order. Every "key ascending" tie-break in the crate relies on this.

mod load;
mod ppr;

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ranked::RankedList;

pub use load::LoadStats;
pub use ppr::{personalized_pagerank, ppr_scores, PprConfig, PprRun};

/// Dense node handle. Ids are assigned in ascending key order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(u32);

impl NodeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub(crate) fn from_index(i: usize) -> Self {
        NodeId(i as u32)
    }
}

/// Which orientation of the stored (directed) edges a query follows.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum View {
    /// Follow edges src → dst.
    Out,
    /// Follow edges dst → src.
    In,
    /// Union of both orientations.
    #[default]
    Undirected,
}

impl View {
    /// The orientation that walks back along edges followed by `self`.
    pub fn reversed(self) -> View {
        match self {
            View::Out => View::In,
            View::In => View::Out,
            View::Undirected => View::Undirected,
        }
    }
}

impl std::str::FromStr for View {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "out" => Ok(View::Out),
            "in" => Ok(View::In),
            "undirected" => Ok(View::Undirected),
            other => Err(Error::InvalidParameter(format!("unknown view `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeRecord {
    pub key: String,
    pub content: String,
}

impl NodeRecord {
    pub fn new(key: impl Into<String>, content: impl Into<String>) -> Self {
        Self {
            key: key.into(),
            content: content.into(),
        }
    }
}

/// Immutable corpus graph: keyed text nodes plus a directed edge set.
#[derive(Clone, Debug, PartialEq)]
pub struct CorpusGraph {
    nodes: Vec<NodeRecord>,
    ids: HashMap<String, NodeId>,
    out_adj: Vec<Vec<NodeId>>,
    in_adj: Vec<Vec<NodeId>>,
    und_adj: Vec<Vec<NodeId>>,
    edge_count: usize,
}

impl CorpusGraph {
    /// Builds a validated graph. Duplicate edges collapse and self-loops are
    /// dropped; both are counted in the returned [`LoadStats`].
    pub fn from_parts<I, S>(nodes: Vec<NodeRecord>, edges: I) -> Result<(Self, LoadStats)>
    where
        I: IntoIterator<Item = (S, S)>,
        S: AsRef<str>,
    {
        let mut nodes = nodes;
        if let Some(n) = nodes.iter().find(|n| n.key.is_empty()) {
            return Err(Error::InvalidGraph(format!(
                "empty node key (content {:?})",
                truncate(&n.content, 40)
            )));
        }
        nodes.sort_by(|a, b| a.key.cmp(&b.key));
        if let Some(w) = nodes.windows(2).find(|w| w[0].key == w[1].key) {
            return Err(Error::InvalidGraph(format!("duplicate node key `{}`", w[0].key)));
        }
        if nodes.len() > u32::MAX as usize {
            return Err(Error::InvalidGraph("too many nodes".into()));
        }
        let ids: HashMap<String, NodeId> = nodes
            .iter()
            .enumerate()
            .map(|(i, n)| (n.key.clone(), NodeId::from_index(i)))
            .collect();

        let mut stats = LoadStats::default();
        let mut unknown: Vec<String> = Vec::new();
        let mut pairs: Vec<(NodeId, NodeId)> = Vec::new();
        for (src, dst) in edges {
            let (src, dst) = (src.as_ref(), dst.as_ref());
            let s = ids.get(src).copied();
            let d = ids.get(dst).copied();
            if s.is_none() {
                unknown.push(src.to_string());
            }
            if d.is_none() {
                unknown.push(dst.to_string());
            }
            let (Some(s), Some(d)) = (s, d) else { continue };
            if s == d {
                stats.self_loops_dropped += 1;
                continue;
            }
            pairs.push((s, d));
        }
        if !unknown.is_empty() {
            unknown.sort();
            unknown.dedup();
            return Err(Error::UnknownEdgeKeys { keys: unknown });
        }
        let before = pairs.len();
        pairs.sort_unstable();
        pairs.dedup();
        stats.duplicate_edges = before - pairs.len();
        if stats.self_loops_dropped > 0 {
            log::warn!("dropped {} self-loop edge(s)", stats.self_loops_dropped);
        }

        let n = nodes.len();
        let mut out_adj = vec![Vec::new(); n];
        let mut in_adj = vec![Vec::new(); n];
        for &(s, d) in &pairs {
            out_adj[s.index()].push(d);
            in_adj[d.index()].push(s);
        }
        for list in &mut in_adj {
            list.sort_unstable();
        }
        let und_adj = out_adj
            .iter()
            .zip(&in_adj)
            .map(|(o, i)| {
                let mut u: Vec<NodeId> = o.iter().chain(i).copied().collect();
                u.sort_unstable();
                u.dedup();
                u
            })
            .collect();

        Ok((
            Self {
                nodes,
                ids,
                out_adj,
                in_adj,
                und_adj,
                edge_count: pairs.len(),
            },
            stats,
        ))
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn node_ids(&self) -> impl ExactSizeIterator<Item = NodeId> + '_ {
        (0..self.nodes.len()).map(NodeId::from_index)
    }

    pub fn nodes(&self) -> &[NodeRecord] {
        &self.nodes
    }

    pub fn node(&self, id: NodeId) -> &NodeRecord {
        &self.nodes[id.index()]
    }

    pub fn key(&self, id: NodeId) -> &str {
        &self.nodes[id.index()].key
    }

    pub fn content(&self, id: NodeId) -> &str {
        &self.nodes[id.index()].content
    }

    pub fn get(&self, key: &str) -> Option<NodeId> {
        self.ids.get(key).copied()
    }

    pub fn id(&self, key: &str) -> Result<NodeId> {
        self.get(key).ok_or_else(|| Error::UnknownKey(key.to_string()))
    }

    /// Distinct neighbors of `id` under `view`, ascending.
    #[inline]
    pub fn neighbors(&self, id: NodeId, view: View) -> &[NodeId] {
        match view {
            View::Out => &self.out_adj[id.index()],
            View::In => &self.in_adj[id.index()],
            View::Undirected => &self.und_adj[id.index()],
        }
    }

    pub fn neighbor_keys(&self, key: &str, view: View) -> Result<Vec<&str>> {
        let id = self.id(key)?;
        Ok(self
            .neighbors(id, view)
            .iter()
            .map(|&n| self.key(n))
            .collect())
    }

    /// Full-graph degree: number of distinct neighbors under `view`.
    #[inline]
    pub fn degree(&self, id: NodeId, view: View) -> usize {
        self.neighbors(id, view).len()
    }

    pub fn has_edge(&self, src: NodeId, dst: NodeId, view: View) -> bool {
        self.neighbors(src, view).binary_search(&dst).is_ok()
    }

    /// Stored directed edges in (src, dst) order.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.out_adj
            .iter()
            .enumerate()
            .flat_map(|(s, ds)| ds.iter().map(move |&d| (NodeId::from_index(s), d)))
    }

    /// Nodes adjacent to some member of `ret` that are not themselves in
    /// `ret`, ascending by key.
    pub fn frontier(&self, ret: &RankedList, view: View) -> Vec<NodeId> {
        let mut seen = vec![false; self.len()];
        for node in ret.nodes() {
            seen[node.index()] = true;
        }
        let mut out = Vec::new();
        for node in ret.nodes() {
            for &nb in self.neighbors(node, view) {
                if !seen[nb.index()] {
                    seen[nb.index()] = true;
                    out.push(nb);
                }
            }
        }
        out.sort_unstable();
        out
    }
}

fn truncate(s: &str, max: usize) -> &str {
    match s.char_indices().nth(max) {
        Some((i, _)) => &s[..i],
        None => s,
    }
}
