//! Ordered retrieval state with constant-time rank lookup.

use std::cmp::Ordering;
use std::collections::HashMap;

use crate::graph::{CorpusGraph, NodeId};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Scored {
    pub node: NodeId,
    pub score: f64,
}

impl Scored {
    pub fn new(node: NodeId, score: f64) -> Self {
        Self { node, score }
    }
}

/// Score descending, then key ascending (node ids follow key order).
#[inline]
pub fn rank_order(a: &Scored, b: &Scored) -> Ordering {
    b.score.total_cmp(&a.score).then(a.node.cmp(&b.node))
}

/// A duplicate-free ordered list of scored nodes.
#[derive(Clone, Debug, Default)]
pub struct RankedList {
    entries: Vec<Scored>,
    positions: HashMap<NodeId, usize>,
}

impl PartialEq for RankedList {
    fn eq(&self, other: &Self) -> bool {
        self.entries == other.entries
    }
}

impl RankedList {
    /// Keeps the given order. Later duplicates of a node are ignored.
    pub fn from_ordered(entries: impl IntoIterator<Item = Scored>) -> Self {
        let mut list = Self::default();
        for e in entries {
            list.push(e);
        }
        list
    }

    pub fn from_ordered_ids(ids: impl IntoIterator<Item = NodeId>) -> Self {
        Self::from_ordered(ids.into_iter().map(|n| Scored::new(n, 0.0)))
    }

    /// Sorts by [`rank_order`].
    pub fn from_scored(entries: impl IntoIterator<Item = Scored>) -> Self {
        let mut v: Vec<Scored> = entries.into_iter().collect();
        v.sort_by(rank_order);
        Self::from_ordered(v)
    }

    /// The `k` best entries by [`rank_order`], using a partial selection.
    pub fn top_k(entries: impl IntoIterator<Item = Scored>, k: usize) -> Self {
        let mut v: Vec<Scored> = entries.into_iter().collect();
        if k == 0 {
            return Self::default();
        }
        if k < v.len() {
            v.select_nth_unstable_by(k - 1, rank_order);
            v.truncate(k);
        }
        v.sort_by(rank_order);
        Self::from_ordered(v)
    }

    /// Appends at the tail. Returns `false` if the node is already present.
    pub fn push(&mut self, entry: Scored) -> bool {
        if self.positions.contains_key(&entry.node) {
            return false;
        }
        self.positions.insert(entry.node, self.entries.len());
        self.entries.push(entry);
        true
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn contains(&self, node: NodeId) -> bool {
        self.positions.contains_key(&node)
    }

    /// 1-based rank of `node`.
    pub fn rank(&self, node: NodeId) -> Option<usize> {
        self.positions.get(&node).map(|p| p + 1)
    }

    pub fn entries(&self) -> &[Scored] {
        &self.entries
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Scored> {
        self.entries.iter()
    }

    pub fn nodes(&self) -> impl ExactSizeIterator<Item = NodeId> + '_ {
        self.entries.iter().map(|e| e.node)
    }

    pub fn node_vec(&self) -> Vec<NodeId> {
        self.nodes().collect()
    }

    pub fn scores(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        self.entries.iter().map(|e| e.score)
    }

    pub fn keys<'g>(&self, g: &'g CorpusGraph) -> Vec<&'g str> {
        self.nodes().map(|n| g.key(n)).collect()
    }

    pub fn truncated(&self, k: usize) -> Self {
        Self::from_ordered(self.entries.iter().take(k).copied())
    }
}

impl<'a> IntoIterator for &'a RankedList {
    type Item = &'a Scored;
    type IntoIter = std::slice::Iter<'a, Scored>;

    fn into_iter(self) -> Self::IntoIter {
        self.entries.iter()
    }
}
