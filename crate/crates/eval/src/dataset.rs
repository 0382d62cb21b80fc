//! Query and relevance-judgment files. Both may be gzip-compressed.

use std::collections::BTreeMap;
use std::io::BufRead;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{EvalError, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Query {
    pub id: String,
    pub text: String,
}

/// Gold node keys per query id.
pub type Qrels = BTreeMap<String, Vec<String>>;

/// Reads JSON lines `{"id": .., "text": ..}`. Duplicate ids are rejected.
pub fn read_queries<R: BufRead>(reader: R, source_name: &str) -> Result<Vec<Query>> {
    let mut out: Vec<Query> = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let q: Query = serde_json::from_str(line).map_err(|e| EvalError::Parse {
            source_name: source_name.to_string(),
            line: i + 1,
            message: e.to_string(),
        })?;
        if !seen.insert(q.id.clone()) {
            return Err(EvalError::Parse {
                source_name: source_name.to_string(),
                line: i + 1,
                message: format!("duplicate query id `{}`", q.id),
            });
        }
        out.push(q);
    }
    Ok(out)
}

/// Reads tab-separated `query-id, node-key, relevance` without header.
/// Rows with relevance ≤ 0 are not gold.
pub fn read_qrels<R: BufRead>(reader: R, source_name: &str) -> Result<Qrels> {
    let mut out = Qrels::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let line = line.trim_end_matches(['\r', '\n']);
        if line.trim().is_empty() {
            continue;
        }
        let err = |message: String| EvalError::Parse {
            source_name: source_name.to_string(),
            line: i + 1,
            message,
        };
        let fields: Vec<&str> = line.split('\t').collect();
        let [qid, key, rel] = fields[..] else {
            return Err(err(format!("expected 3 tab-separated fields, found {}", fields.len())));
        };
        let rel: f64 = rel
            .trim()
            .parse()
            .map_err(|_| err(format!("relevance `{rel}` is not a number")))?;
        if rel > 0.0 {
            let gold = out.entry(qid.to_string()).or_default();
            if !gold.iter().any(|k| k == key) {
                gold.push(key.to_string());
            }
        }
    }
    Ok(out)
}

pub fn load_queries(path: &Path) -> Result<Vec<Query>> {
    let r = fastinsight::io::open(path).map_err(EvalError::file(path))?;
    read_queries(r, &path.display().to_string())
}

pub fn load_qrels(path: &Path) -> Result<Qrels> {
    let r = fastinsight::io::open(path).map_err(EvalError::file(path))?;
    read_qrels(r, &path.display().to_string())
}
