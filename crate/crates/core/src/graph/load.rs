use std::io::{BufRead, Read, Write};
use std::path::Path;

use serde::Serialize;

use super::{CorpusGraph, NodeRecord};
use crate::error::{Error, Result};
use crate::io;

/// Counters for input that was accepted but normalized away.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct LoadStats {
    pub self_loops_dropped: usize,
    pub duplicate_edges: usize,
}

impl CorpusGraph {
    /// Loads nodes (JSON lines: `{"key", "content"}`) and edges
    /// (tab-separated `src<TAB>dst`, no header). Either stream may be gzip.
    pub fn load<N, E>(nodes: N, edges: E) -> Result<(Self, LoadStats)>
    where
        N: Read + 'static,
        E: Read + 'static,
    {
        let nodes = parse_nodes(io::decompressing(nodes)?)?;
        let edges = parse_edges(io::decompressing(edges)?)?;
        Self::from_parts(nodes, edges)
    }

    pub fn load_files(
        nodes: impl AsRef<Path>,
        edges: impl AsRef<Path>,
    ) -> Result<(Self, LoadStats)> {
        let nodes = parse_nodes(io::open(nodes)?)?;
        let edges = parse_edges(io::open(edges)?)?;
        Self::from_parts(nodes, edges)
    }

    pub fn write_nodes<W: Write>(&self, mut w: W) -> Result<()> {
        for node in &self.nodes {
            serde_json::to_writer(&mut w, node).map_err(std::io::Error::from)?;
            w.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn write_edges<W: Write>(&self, mut w: W) -> Result<()> {
        for (s, d) in self.edges() {
            writeln!(w, "{}\t{}", self.key(s), self.key(d))?;
        }
        Ok(())
    }
}

pub(crate) fn parse_nodes<R: BufRead>(reader: R) -> Result<Vec<NodeRecord>> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: NodeRecord = serde_json::from_str(&line).map_err(|e| Error::Parse {
            source_name: "nodes",
            line: i + 1,
            message: e.to_string(),
        })?;
        out.push(rec);
    }
    Ok(out)
}

pub(crate) fn parse_edges<R: BufRead>(reader: R) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let line = line.strip_suffix('\r').unwrap_or(&line);
        if line.is_empty() {
            continue;
        }
        let mut cols = line.split('\t');
        match (cols.next(), cols.next(), cols.next()) {
            (Some(s), Some(d), None) if !s.is_empty() && !d.is_empty() => {
                out.push((s.to_string(), d.to_string()))
            }
            _ => {
                return Err(Error::Parse {
                    source_name: "edges",
                    line: i + 1,
                    message: format!("expected `src<TAB>dst`, got {line:?}"),
                })
            }
        }
    }
    Ok(out)
}
