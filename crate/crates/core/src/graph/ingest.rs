use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Edge, NodeId};
use crate::error::{Error, Result};

/// Dense id -> original label.
///
/// When every label in the input is an integer, ids follow ascending numeric
/// order, so an input already using `0..n` keeps its ids. Otherwise ids follow
/// order of first appearance.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeLabels(pub Vec<String>);

impl NodeLabels {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn label(&self, id: NodeId) -> Option<&str> {
        self.0.get(id as usize).map(String::as_str)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestSummary {
    pub records: usize,
    pub edges: usize,
    pub duplicates: usize,
    pub self_loops: usize,
}

#[derive(Clone, Debug)]
pub struct Ingested {
    /// Canonical, deduplicated, ascending.
    pub edges: Vec<Edge>,
    pub labels: NodeLabels,
    pub summary: IngestSummary,
}

impl Ingested {
    pub fn num_nodes(&self) -> usize {
        self.labels.len()
    }
}

fn is_separator(c: char) -> bool {
    c == ',' || c.is_whitespace()
}

/// Parses a text edge list.
///
/// Records are `src<sep>dst[<sep>weight]` where the separator is any run of
/// whitespace, tabs or commas. Lines starting with `#` are comments. Weights
/// are validated and then discarded.
pub fn ingest_edge_list<R: BufRead>(source: R) -> Result<Ingested> {
    let mut intern: HashMap<String, u32> = HashMap::new();
    let mut names: Vec<String> = Vec::new();
    let mut raw: Vec<(u32, u32)> = Vec::new();

    for (idx, line) in source.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split(is_separator).filter(|f| !f.is_empty()).collect();
        if fields.len() != 2 && fields.len() != 3 {
            return Err(Error::Malformed {
                line: line_no,
                reason: format!("expected 2 or 3 fields, found {}", fields.len()),
            });
        }
        if let Some(w) = fields.get(2) {
            match w.parse::<f64>() {
                Ok(w) if w.is_finite() && w > 0.0 => {}
                _ => {
                    return Err(Error::Malformed {
                        line: line_no,
                        reason: format!("weight {w:?} is not a positive number"),
                    })
                }
            }
        }
        let mut ids = [0u32; 2];
        for (slot, name) in ids.iter_mut().zip(&fields[..2]) {
            *slot = match intern.get(*name) {
                Some(&id) => id,
                None => {
                    let id = names.len() as u32;
                    intern.insert(name.to_string(), id);
                    names.push(name.to_string());
                    id
                }
            };
        }
        raw.push((ids[0], ids[1]));
    }

    let records = raw.len();
    let (remap, labels) = dense_labels(&names);

    let mut self_loops = 0;
    let mut edges = Vec::with_capacity(raw.len());
    for (a, b) in raw {
        match Edge::new(remap[a as usize], remap[b as usize]) {
            Ok(e) => edges.push(e),
            Err(_) => self_loops += 1,
        }
    }
    edges.sort_unstable();
    let before = edges.len();
    edges.dedup();
    let duplicates = before - edges.len();

    if edges.is_empty() {
        return Err(Error::EmptyInput);
    }
    let summary = IngestSummary {
        records,
        edges: edges.len(),
        duplicates,
        self_loops,
    };
    Ok(Ingested {
        edges,
        labels,
        summary,
    })
}

/// Interned-name id -> dense id, plus the label table.
fn dense_labels(names: &[String]) -> (Vec<NodeId>, NodeLabels) {
    let numeric: Option<Vec<u64>> = names.iter().map(|n| n.parse::<u64>().ok()).collect();
    match numeric {
        Some(values) => {
            let mut distinct = values.clone();
            distinct.sort_unstable();
            distinct.dedup();
            let remap = values
                .iter()
                .map(|v| distinct.binary_search(v).expect("present") as NodeId)
                .collect();
            let labels = distinct.iter().map(u64::to_string).collect();
            (remap, NodeLabels(labels))
        }
        None => (
            (0..names.len() as NodeId).collect(),
            NodeLabels(names.to_vec()),
        ),
    }
}

pub fn read_edge_list_file(path: &Path) -> Result<Ingested> {
    let file = File::open(path)?;
    ingest_edge_list(BufReader::new(file))
}
