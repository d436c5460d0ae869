//! Heuristic-ranked negatives: for every evaluation positive `(u, v)`, the
//! highest-scoring single-endpoint corruptions `(u, w)` and `(w, v)`.
//!
//! Candidates are scored on the training graph. Half the budget goes to each
//! side (the `u` side gets the extra one when `m` is odd) and a side that runs
//! short hands its remainder to the other. Ties are broken by a key derived
//! from `(seed, positive, side, w)`, which acts as a seeded shuffle that no
//! scheduling order can perturb.

use std::collections::HashSet;
use std::io::{BufRead, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Edge, Graph, NodeId};
use crate::heuristics::{single_source_distances, HeuristicKind, UNREACHED};
use crate::rng;
use crate::splitter::DatasetSplit;

pub const DEFAULT_M: usize = 250;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    /// `(u, w)`: the positive's second endpoint is replaced.
    U = 0,
    /// `(w, v)`: the positive's first endpoint is replaced.
    V = 1,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NegativeRow {
    pub positive: Edge,
    pub negatives: Vec<(NodeId, NodeId)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NegativeTable {
    pub m: usize,
    pub heuristic: HeuristicKind,
    pub seed: u64,
    pub rows: Vec<NegativeRow>,
}

impl NegativeTable {
    /// Rows that received fewer than `m` negatives.
    pub fn short_rows(&self) -> usize {
        self.rows.iter().filter(|r| r.negatives.len() < self.m).count()
    }
}

/// Tie-break key of candidate `w` on `side` for `positive`.
pub fn tie_key(seed: u64, positive: Edge, side: Side, w: NodeId) -> u64 {
    let key = rng::derive_key(seed, "negatives/ties");
    rng::mix(
        key,
        ((positive.u as u64) << 32) | positive.v as u64,
        ((side as u64) << 32) | w as u64,
    )
}

/// How many candidates each side contributes given `available` per side.
pub fn side_budget(m: usize, available: (usize, usize)) -> (usize, usize) {
    let (quota_u, quota_v) = (m.div_ceil(2), m / 2);
    let (au, av) = available;
    let take_u = au.min(quota_u + quota_v.saturating_sub(av));
    let take_v = av.min(quota_v + quota_u.saturating_sub(au));
    (take_u, take_v)
}

/// Per-worker buffers for single-source scoring.
pub struct SourceScratch {
    acc: Vec<f64>,
    touched: Vec<NodeId>,
}

impl SourceScratch {
    pub fn new(num_nodes: usize) -> Self {
        SourceScratch {
            acc: vec![0.0; num_nodes],
            touched: Vec::new(),
        }
    }
}

/// Scores `(source, w)` for every node `w` at once.
enum SourceScores {
    Sparse,
    Degree(f64),
    Distance(Vec<u32>),
}

/// Shared context for generating negatives against one split.
pub struct NegativeSampler<'a> {
    full: &'a Graph,
    train: &'a Graph,
    positives: HashSet<Edge>,
    train_nodes: Vec<NodeId>,
    m: usize,
    kind: HeuristicKind,
    seed: u64,
}

impl<'a> NegativeSampler<'a> {
    pub fn new(full: &'a Graph, ds: &'a DatasetSplit, m: usize, kind: HeuristicKind, seed: u64) -> Result<Self> {
        if full.num_nodes() != ds.train_graph.num_nodes() {
            return Err(Error::InvalidParameter(format!(
                "full graph has {} nodes but train graph has {}",
                full.num_nodes(),
                ds.train_graph.num_nodes()
            )));
        }
        let train = &ds.train_graph;
        Ok(NegativeSampler {
            full,
            train,
            positives: ds.positives().copied().collect(),
            train_nodes: (0..train.num_nodes() as NodeId).filter(|&w| train.is_covered(w)).collect(),
            m,
            kind,
            seed,
        })
    }

    fn excluded(&self, a: NodeId, b: NodeId) -> bool {
        match Edge::new(a, b) {
            Ok(e) => self.full.has_edge(a, b) || self.positives.contains(&e),
            Err(_) => true,
        }
    }

    fn prepare(&self, source: NodeId, scratch: &mut SourceScratch) -> SourceScores {
        let g = self.train;
        match self.kind {
            HeuristicKind::CommonNeighbors | HeuristicKind::ResourceAllocation => {
                for &x in g.neighbors(source) {
                    let inc = match self.kind {
                        HeuristicKind::CommonNeighbors => 1.0,
                        _ => 1.0 / g.degree(x) as f64,
                    };
                    for &w in g.neighbors(x) {
                        if scratch.acc[w as usize] == 0.0 {
                            scratch.touched.push(w);
                        }
                        scratch.acc[w as usize] += inc;
                    }
                }
                SourceScores::Sparse
            }
            HeuristicKind::PreferentialAttachment => SourceScores::Degree(g.degree(source) as f64),
            HeuristicKind::ShortestPathScore => SourceScores::Distance(single_source_distances(g, source)),
        }
    }

    fn reset(scratch: &mut SourceScratch) {
        for &w in &scratch.touched {
            scratch.acc[w as usize] = 0.0;
        }
        scratch.touched.clear();
    }

    /// Ranked candidates for one side, best first, truncated to `m`.
    fn ranked_side(&self, positive: Edge, side: Side, scratch: &mut SourceScratch) -> Vec<(f64, u64, NodeId)> {
        let (source, keep) = match side {
            Side::U => (positive.u, positive.v),
            Side::V => (positive.v, positive.u),
        };
        let scores = self.prepare(source, scratch);
        let mut cands: Vec<(f64, u64, NodeId)> = Vec::new();
        for &w in &self.train_nodes {
            if w == source || w == keep || self.excluded(source, w) {
                continue;
            }
            let s = match &scores {
                SourceScores::Sparse => scratch.acc[w as usize],
                SourceScores::Degree(d) => d * self.train.degree(w) as f64,
                SourceScores::Distance(dist) => match dist[w as usize] {
                    UNREACHED => 0.0,
                    d => 1.0 / d as f64,
                },
            };
            cands.push((s, tie_key(self.seed, positive, side, w), w));
        }
        Self::reset(scratch);
        let order = |a: &(f64, u64, NodeId), b: &(f64, u64, NodeId)| {
            b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2))
        };
        if cands.len() > self.m && self.m > 0 {
            cands.select_nth_unstable_by(self.m - 1, order);
            cands.truncate(self.m);
        }
        cands.sort_unstable_by(order);
        cands
    }

    /// Negatives for one positive: `u`-side pairs `(u, w)` first, then
    /// `v`-side pairs `(w, v)`, each in descending score order.
    pub fn sample(&self, positive: Edge, scratch: &mut SourceScratch) -> Result<Vec<(NodeId, NodeId)>> {
        for node in [positive.u, positive.v] {
            self.train.check_node(node)?;
        }
        let side_u = self.ranked_side(positive, Side::U, scratch);
        let side_v = self.ranked_side(positive, Side::V, scratch);
        if side_u.is_empty() && side_v.is_empty() {
            return Err(Error::NoNegativeCandidates {
                u: positive.u,
                v: positive.v,
            });
        }
        let (take_u, take_v) = side_budget(self.m, (side_u.len(), side_v.len()));
        let mut out = Vec::with_capacity(take_u + take_v);
        out.extend(side_u[..take_u].iter().map(|&(_, _, w)| (positive.u, w)));
        out.extend(side_v[..take_v].iter().map(|&(_, _, w)| (w, positive.v)));
        Ok(out)
    }

    pub fn table(&self, positives: &[Edge]) -> Result<NegativeTable> {
        let n = self.train.num_nodes();
        let rows = positives
            .par_iter()
            .map_init(
                || SourceScratch::new(n),
                |scratch, &p| {
                    self.sample(p, scratch).map(|negatives| NegativeRow {
                        positive: p,
                        negatives,
                    })
                },
            )
            .collect::<Result<Vec<_>>>()?;
        Ok(NegativeTable {
            m: self.m,
            heuristic: self.kind,
            seed: self.seed,
            rows,
        })
    }
}

/// Negatives for a single positive edge of `ds`.
pub fn generate_negatives(
    full_g: &Graph,
    ds: &DatasetSplit,
    positive: Edge,
    m: usize,
    kind: HeuristicKind,
    seed: u64,
) -> Result<Vec<(NodeId, NodeId)>> {
    let sampler = NegativeSampler::new(full_g, ds, m, kind, seed)?;
    sampler.sample(positive, &mut SourceScratch::new(full_g.num_nodes()))
}

pub fn generate_table(
    full_g: &Graph,
    ds: &DatasetSplit,
    positives: &[Edge],
    m: usize,
    kind: HeuristicKind,
    seed: u64,
) -> Result<NegativeTable> {
    NegativeSampler::new(full_g, ds, m, kind, seed)?.table(positives)
}

/// Header line, then `u v | w1 x1 w2 x2 ...` per positive.
pub fn write_negatives<W: Write>(table: &NegativeTable, mut out: W) -> Result<()> {
    writeln!(out, "# m={} heuristic={} seed={}", table.m, table.heuristic, table.seed)?;
    for row in &table.rows {
        write!(out, "{} {} |", row.positive.u, row.positive.v)?;
        for (a, b) in &row.negatives {
            write!(out, " {a} {b}")?;
        }
        writeln!(out)?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_negatives<R: BufRead>(input: R) -> Result<NegativeTable> {
    let mut lines = input.lines().enumerate();
    let header = match lines.next() {
        Some((_, line)) => line?,
        None => return Err(Error::Malformed { line: 1, reason: "missing header".into() }),
    };
    let bad_header = || Error::Malformed {
        line: 1,
        reason: format!("bad negatives header {header:?}"),
    };
    let mut m = None;
    let mut heuristic = None;
    let mut seed = None;
    for field in header.trim_start_matches('#').split_whitespace() {
        match field.split_once('=') {
            Some(("m", x)) => m = x.parse().ok(),
            Some(("heuristic", x)) => heuristic = x.parse().ok(),
            Some(("seed", x)) => seed = x.parse().ok(),
            _ => return Err(bad_header()),
        }
    }
    let (m, heuristic, seed) = match (m, heuristic, seed) {
        (Some(m), Some(h), Some(s)) => (m, h, s),
        _ => return Err(bad_header()),
    };

    let mut rows = Vec::new();
    for (idx, line) in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let malformed = |reason: &str| Error::Malformed {
            line: idx + 1,
            reason: reason.to_string(),
        };
        let (pos, negs) = line.split_once('|').ok_or_else(|| malformed("missing '|'"))?;
        let parse = |s: &str| -> Result<Vec<NodeId>> {
            s.split_whitespace()
                .map(|t| t.parse().map_err(|_| malformed("bad node id")))
                .collect()
        };
        let pos = parse(pos)?;
        let negs = parse(negs)?;
        if pos.len() != 2 || negs.len() % 2 != 0 {
            return Err(malformed("expected a node pair before '|' and pairs after it"));
        }
        rows.push(NegativeRow {
            positive: Edge::new(pos[0], pos[1]).map_err(|_| malformed("self-loop positive"))?,
            negatives: negs.chunks(2).map(|c| (c[0], c[1])).collect(),
        });
    }
    Ok(NegativeTable {
        m,
        heuristic,
        seed,
        rows,
    })
}
