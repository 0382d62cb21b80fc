use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::PathBuf;

use rayon::prelude::*;

use super::Embedder;
use crate::error::{Error, Result};
use crate::graph::{CorpusGraph, NodeId};
use crate::ranked::{RankedList, Scored};

pub const CACHE_MAGIC: &[u8; 4] = b"GSIX";
pub const CACHE_VERSION: u32 = 1;

#[derive(Clone, Debug)]
pub struct IndexOptions {
    /// Store unit-length vectors so that dot product equals cosine.
    pub normalize: bool,
    /// Binary vector cache, read if present and written otherwise.
    pub cache: Option<PathBuf>,
    /// Texts per encoder call.
    pub batch_size: usize,
}

impl Default for IndexOptions {
    fn default() -> Self {
        Self {
            normalize: true,
            cache: None,
            batch_size: 64,
        }
    }
}

/// Node vectors row-aligned with the [`NodeId`]s of one graph.
#[derive(Clone, Debug, PartialEq)]
pub struct EmbeddingIndex {
    dim: usize,
    data: Vec<f64>,
    normalized: bool,
}

fn normalize_in_place(v: &mut [f64]) {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        v.iter_mut().for_each(|x| *x /= norm);
    }
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl EmbeddingIndex {
    /// Builds an index from rows given in node-id order.
    pub fn from_rows(dim: usize, rows: Vec<Vec<f64>>, normalize: bool) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("dimension must be positive".into()));
        }
        let mut data = Vec::with_capacity(rows.len() * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    actual: row.len(),
                });
            }
            data.extend(row);
        }
        let mut index = Self {
            dim,
            data,
            normalized: false,
        };
        if normalize {
            index.normalize();
        }
        Ok(index)
    }

    fn normalize(&mut self) {
        self.data.chunks_mut(self.dim).for_each(normalize_in_place);
        self.normalized = true;
    }

    pub fn dimension(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn vector(&self, id: NodeId) -> &[f64] {
        let i = id.index() * self.dim;
        &self.data[i..i + self.dim]
    }

    pub fn get(&self, id: NodeId) -> Option<&[f64]> {
        (id.index() < self.len()).then(|| self.vector(id))
    }

    /// Dot product of `v_q` with the stored vector of `id`.
    #[inline]
    pub fn similarity(&self, v_q: &[f64], id: NodeId) -> f64 {
        dot(v_q, self.vector(id))
    }

    /// Brings a raw query vector into the index's space (normalizing it
    /// when the index is normalized).
    pub fn prepare_query(&self, mut v: Vec<f64>) -> Result<Vec<f64>> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                actual: v.len(),
            });
        }
        if self.normalized {
            normalize_in_place(&mut v);
        }
        Ok(v)
    }

    pub fn write_cache<W: Write>(&self, g: &CorpusGraph, w: W) -> Result<()> {
        if g.len() != self.len() {
            return Err(Error::Shape(format!(
                "index has {} rows, graph has {} nodes",
                self.len(),
                g.len()
            )));
        }
        let mut w = BufWriter::new(w);
        w.write_all(CACHE_MAGIC)?;
        w.write_all(&CACHE_VERSION.to_le_bytes())?;
        w.write_all(&(self.dim as u32).to_le_bytes())?;
        w.write_all(&(self.len() as u64).to_le_bytes())?;
        for id in g.node_ids() {
            let key = g.key(id).as_bytes();
            w.write_all(&(key.len() as u32).to_le_bytes())?;
            w.write_all(key)?;
            for &x in self.vector(id) {
                w.write_all(&(x as f32).to_le_bytes())?;
            }
        }
        w.flush()?;
        Ok(())
    }

    /// Reads a vector cache and checks it covers exactly the nodes of `g`
    /// with vectors of length `expected_dim`.
    pub fn read_cache<R: Read>(
        r: R,
        g: &CorpusGraph,
        expected_dim: usize,
        normalize: bool,
    ) -> Result<Self> {
        let mut r = BufReader::new(r);
        let eof = |e: std::io::Error| {
            if e.kind() == std::io::ErrorKind::UnexpectedEof {
                Error::CacheInvalid("truncated file".into())
            } else {
                Error::Io(e)
            }
        };
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic).map_err(eof)?;
        if &magic != CACHE_MAGIC {
            return Err(Error::CacheInvalid("bad magic".into()));
        }
        let version = read_u32(&mut r).map_err(eof)?;
        if version != CACHE_VERSION {
            return Err(Error::CacheInvalid(format!("unsupported version {version}")));
        }
        let dim = read_u32(&mut r).map_err(eof)? as usize;
        if dim != expected_dim {
            return Err(Error::CacheInvalid(format!(
                "cache dimension {dim} does not match encoder dimension {expected_dim}"
            )));
        }
        let count = read_u64(&mut r).map_err(eof)? as usize;
        if count != g.len() {
            return Err(Error::CacheInvalid(format!(
                "cache holds {count} vectors, graph has {} nodes",
                g.len()
            )));
        }
        let mut data = vec![0.0; count * dim];
        let mut filled = vec![false; count];
        let mut buf = vec![0u8; dim * 4];
        for _ in 0..count {
            let klen = read_u32(&mut r).map_err(eof)? as usize;
            let mut key = vec![0u8; klen];
            r.read_exact(&mut key).map_err(eof)?;
            let key = String::from_utf8(key)
                .map_err(|_| Error::CacheInvalid("key is not UTF-8".into()))?;
            let id = g
                .get(&key)
                .ok_or_else(|| Error::CacheInvalid(format!("unknown key `{key}`")))?;
            if std::mem::replace(&mut filled[id.index()], true) {
                return Err(Error::CacheInvalid(format!("duplicate key `{key}`")));
            }
            r.read_exact(&mut buf).map_err(eof)?;
            let row = &mut data[id.index() * dim..(id.index() + 1) * dim];
            for (x, b) in row.iter_mut().zip(buf.chunks_exact(4)) {
                *x = f32::from_le_bytes([b[0], b[1], b[2], b[3]]) as f64;
            }
        }
        let mut index = Self {
            dim,
            data,
            normalized: false,
        };
        if normalize {
            index.normalize();
        }
        Ok(index)
    }
}

fn read_u32<R: Read>(r: &mut R) -> std::io::Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_u64<R: Read>(r: &mut R) -> std::io::Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

/// Encodes every node of `g`, honoring the vector cache in `opts`.
pub fn build_index<E: Embedder + ?Sized>(
    g: &CorpusGraph,
    emb: &E,
    opts: &IndexOptions,
) -> Result<EmbeddingIndex> {
    let dim = emb.dimension();
    if let Some(path) = opts.cache.as_ref().filter(|p| p.exists()) {
        log::info!("reading vector cache {}", path.display());
        return EmbeddingIndex::read_cache(File::open(path)?, g, dim, opts.normalize);
    }

    let ids: Vec<NodeId> = g.node_ids().collect();
    let batch = opts.batch_size.max(1);
    let chunks: Vec<Vec<Vec<f64>>> = ids
        .par_chunks(batch)
        .map(|chunk| {
            let texts: Vec<&str> = chunk.iter().map(|&id| g.content(id)).collect();
            let key_of = |i: Option<usize>| g.key(chunk[i.unwrap_or(0).min(chunk.len() - 1)]).to_string();
            let rows = emb.encode_nodes(&texts).map_err(|e| Error::Encoder {
                key: key_of(e.index),
                message: e.message,
            })?;
            if rows.len() != chunk.len() {
                return Err(Error::Encoder {
                    key: key_of(None),
                    message: format!("expected {} vectors, got {}", chunk.len(), rows.len()),
                });
            }
            for (i, row) in rows.iter().enumerate() {
                if row.len() != dim {
                    return Err(Error::Encoder {
                        key: key_of(Some(i)),
                        message: format!("vector has length {}, expected {dim}", row.len()),
                    });
                }
                if row.iter().any(|x| !x.is_finite()) {
                    return Err(Error::Encoder {
                        key: key_of(Some(i)),
                        message: "vector has non-finite entries".into(),
                    });
                }
            }
            Ok(rows)
        })
        .collect::<Result<_>>()?;
    let index = EmbeddingIndex::from_rows(dim, chunks.into_iter().flatten().collect(), opts.normalize)?;

    if let Some(path) = &opts.cache {
        let tmp = path.with_extension("tmp");
        index.write_cache(g, File::create(&tmp)?)?;
        std::fs::rename(&tmp, path)?;
    }
    Ok(index)
}

/// Exact top-`k` by dot product, ties broken by key. Returns every node when
/// `k` exceeds the index size.
pub fn vector_search(v_q: &[f64], index: &EmbeddingIndex, k: usize) -> Result<RankedList> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    if index.is_empty() {
        return Err(Error::InvalidParameter("index is empty".into()));
    }
    if v_q.len() != index.dim {
        return Err(Error::DimensionMismatch {
            expected: index.dim,
            actual: v_q.len(),
        });
    }
    let scored = index
        .data
        .chunks_exact(index.dim)
        .enumerate()
        .map(|(i, row)| Scored::new(NodeId::from_index(i), dot(v_q, row)));
    Ok(RankedList::top_k(scored, k))
}
