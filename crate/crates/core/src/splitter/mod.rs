//! Heuristic-threshold train/valid/test splitting.
//!
//! Every edge of the input graph is scored once, bucketed by the threshold
//! triple, optionally swapped (inverse direction), capped, and then cleaned of
//! leakage and uncovered endpoints.

mod io;
mod triple;

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use rand::seq::index;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Edge, Graph};
use crate::heuristics::{score_all_edges, HeuristicKind};
use crate::rng;
use crate::shift::Histogram;

pub use io::{read_split, write_split, read_edge_tsv, write_edge_tsv};
pub use triple::{LabelTriple, ThresholdLabel};

pub const DEFAULT_EVAL_CAP: usize = 100_000;
const HISTOGRAM_BINS: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Forward,
    Inverse,
}

impl Direction {
    pub fn as_str(self) -> &'static str {
        match self {
            Direction::Forward => "forward",
            Direction::Inverse => "inverse",
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Direction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "forward" | "fwd" => Ok(Direction::Forward),
            "inverse" | "inv" => Ok(Direction::Inverse),
            other => Err(Error::InvalidParameter(format!("unknown direction {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Category {
    Train,
    Valid,
    Test,
    /// Score strictly between the valid bound and the test minimum.
    Gap,
}

/// Everything that determines a split. Bounds live in score space; for the
/// shortest-path heuristic a path length `L` is stored as `1/L`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub heuristic: HeuristicKind,
    pub train_bound: f64,
    pub valid_bound: f64,
    pub test_min: f64,
    pub direction: Direction,
    pub valid_cap: usize,
    pub test_cap: usize,
    pub train_cap: Option<usize>,
    pub seed: u64,
}

impl SplitSpec {
    /// A `SplitSpec` with the default 100k valid/test caps and no train cap.
    pub fn new(heuristic: HeuristicKind, bounds: [f64; 3], direction: Direction, seed: u64) -> Result<Self> {
        let spec = SplitSpec {
            heuristic,
            train_bound: bounds[0],
            valid_bound: bounds[1],
            test_min: bounds[2],
            direction,
            valid_cap: DEFAULT_EVAL_CAP,
            test_cap: DEFAULT_EVAL_CAP,
            train_cap: None,
            seed,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn from_labels(heuristic: HeuristicKind, triple: &LabelTriple, direction: Direction, seed: u64) -> Result<Self> {
        SplitSpec::new(heuristic, triple.to_score_bounds(heuristic)?, direction, seed)
    }

    pub fn validate(&self) -> Result<()> {
        let bounds = [self.train_bound, self.valid_bound, self.test_min];
        if bounds.iter().any(|b| !b.is_finite() || *b < 0.0) {
            return Err(Error::InvalidSpec(format!(
                "bounds must be finite and non-negative, got {bounds:?}"
            )));
        }
        if !(self.train_bound <= self.valid_bound && self.valid_bound <= self.test_min) {
            return Err(Error::InvalidSpec(format!(
                "bounds must satisfy train <= valid <= test_min, got {bounds:?}"
            )));
        }
        if self.valid_cap == 0 || self.test_cap == 0 || self.train_cap == Some(0) {
            return Err(Error::InvalidSpec("caps must be at least 1".into()));
        }
        Ok(())
    }

    /// Forward-direction category of a score.
    #[inline]
    pub fn category(&self, h: f64) -> Category {
        if h <= self.train_bound {
            Category::Train
        } else if h <= self.valid_bound {
            Category::Valid
        } else if h >= self.test_min {
            Category::Test
        } else {
            Category::Gap
        }
    }

    /// `CN (0, 1, 2) forward` style label using score-space bounds.
    pub fn default_label(&self) -> String {
        format!(
            "{} ({}, {}, {}) {}",
            self.heuristic.label(),
            self.train_bound,
            self.valid_bound,
            self.test_min,
            self.direction
        )
    }
}

/// Scores and forward categories for every canonical edge of a graph.
#[derive(Clone, Debug)]
pub struct Categorized {
    pub edges: Vec<Edge>,
    pub scores: Vec<f64>,
    pub categories: Vec<Category>,
}

pub fn categorize_scores(scores: &[f64], spec: &SplitSpec) -> Vec<Category> {
    scores.iter().map(|&h| spec.category(h)).collect()
}

/// Scores every edge of `g` with the configured heuristic and assigns forward
/// categories. The direction is applied separately.
pub fn categorize_edges(g: &Graph, spec: &SplitSpec) -> Categorized {
    let edges = g.edge_vec();
    let scores = score_all_edges(g, spec.heuristic);
    let categories = categorize_scores(&scores, spec);
    Categorized {
        edges,
        scores,
        categories,
    }
}

/// Inverse swaps train and test; valid and gap are untouched.
pub fn apply_direction(categories: &mut [Category], direction: Direction) {
    if direction == Direction::Forward {
        return;
    }
    for c in categories.iter_mut() {
        *c = match *c {
            Category::Train => Category::Test,
            Category::Test => Category::Train,
            other => other,
        };
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitCounts {
    pub train: usize,
    pub valid: usize,
    pub test: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DroppedCounts {
    pub gap: usize,
    pub duplicate: usize,
    pub uncovered: usize,
    pub cap: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SplitHistograms {
    pub train: Histogram,
    pub valid: Histogram,
    pub test: Histogram,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplitManifest {
    pub label: String,
    pub spec: SplitSpec,
    /// Thresholds as the user typed them, when known.
    pub label_triple: Option<String>,
    pub num_nodes: usize,
    pub input_edges: usize,
    pub counts: SplitCounts,
    pub dropped: DroppedCounts,
    pub seed: u64,
    pub input_sha256: Option<String>,
    /// Scores on the input graph, per emitted split.
    pub histograms: SplitHistograms,
    pub gap_policy: String,
    pub warnings: Vec<String>,
}

impl SplitManifest {
    pub fn reconciles(&self) -> bool {
        let c = &self.counts;
        let d = &self.dropped;
        c.train + c.valid + c.test + d.gap + d.duplicate + d.uncovered + d.cap == self.input_edges
    }
}

#[derive(Clone, Debug)]
pub struct DatasetSplit {
    pub train_edges: Vec<Edge>,
    pub valid_edges: Vec<Edge>,
    pub test_edges: Vec<Edge>,
    pub train_graph: Graph,
    pub manifest: SplitManifest,
}

impl DatasetSplit {
    pub fn positives(&self) -> impl Iterator<Item = &Edge> {
        self.train_edges.iter().chain(&self.valid_edges).chain(&self.test_edges)
    }

    /// Checks disjointness, leakage, coverage, caps and count reconciliation.
    pub fn check_invariants(&self) -> std::result::Result<(), String> {
        let spec = &self.manifest.spec;
        let train: HashSet<Edge> = self.train_edges.iter().copied().collect();
        if train.len() != self.train_edges.len() {
            return Err("duplicate train edge".into());
        }
        let valid: HashSet<Edge> = self.valid_edges.iter().copied().collect();
        for e in &self.test_edges {
            if valid.contains(e) {
                return Err(format!("edge {e:?} in both valid and test"));
            }
        }
        if self.train_graph.edge_vec() != {
            let mut t = self.train_edges.clone();
            t.sort_unstable();
            t
        } {
            return Err("train graph does not match train edges".into());
        }
        for (name, edges) in [("valid", &self.valid_edges), ("test", &self.test_edges)] {
            for e in edges {
                if train.contains(e) || self.train_graph.has_edge(e.u, e.v) {
                    return Err(format!("{name} edge {e:?} leaks into train"));
                }
                if !self.train_graph.is_covered(e.u) || !self.train_graph.is_covered(e.v) {
                    return Err(format!("{name} edge {e:?} has an endpoint outside train"));
                }
            }
        }
        if self.valid_edges.len() > spec.valid_cap || self.test_edges.len() > spec.test_cap {
            return Err("evaluation cap exceeded".into());
        }
        if let Some(cap) = spec.train_cap {
            if self.train_edges.len() > cap {
                return Err("train cap exceeded".into());
            }
        }
        let c = &self.manifest.counts;
        if (c.train, c.valid, c.test)
            != (self.train_edges.len(), self.valid_edges.len(), self.test_edges.len())
        {
            return Err("manifest counts disagree with edge sets".into());
        }
        if !self.manifest.reconciles() {
            return Err("manifest counts do not reconcile with input size".into());
        }
        Ok(())
    }
}

/// Uniform sample of `cap` indices from `items`, kept in original order.
fn cap_sample(items: Vec<usize>, cap: usize, seed: u64, name: &str) -> (Vec<usize>, usize) {
    if items.len() <= cap {
        return (items, 0);
    }
    let mut rng = rng::stream(seed, &format!("split/cap/{name}"));
    let mut picked = index::sample(&mut rng, items.len(), cap).into_vec();
    picked.sort_unstable();
    let overflow = items.len() - cap;
    (picked.into_iter().map(|i| items[i]).collect(), overflow)
}

/// Turns directed categories into the final split.
///
/// Order: cap train (if a train cap is set), cap valid and test, drop
/// valid/test edges already present in train, drop valid/test edges with an
/// endpoint that no train edge touches, then build the train graph.
pub fn finalize_split(g: &Graph, categorized: &Categorized, spec: &SplitSpec) -> Result<DatasetSplit> {
    spec.validate()?;
    let n_edges = categorized.edges.len();
    if categorized.scores.len() != n_edges || categorized.categories.len() != n_edges {
        return Err(Error::InvalidParameter("categorized arrays differ in length".into()));
    }

    let mut buckets: [Vec<usize>; 3] = Default::default();
    let mut dropped = DroppedCounts::default();
    for (i, c) in categorized.categories.iter().enumerate() {
        match c {
            Category::Train => buckets[0].push(i),
            Category::Valid => buckets[1].push(i),
            Category::Test => buckets[2].push(i),
            Category::Gap => dropped.gap += 1,
        }
    }
    let [train_idx, valid_idx, test_idx] = buckets;

    let train_idx = match spec.train_cap {
        Some(cap) => {
            let (kept, over) = cap_sample(train_idx, cap, spec.seed, "train");
            dropped.cap += over;
            kept
        }
        None => train_idx,
    };
    let (valid_idx, over) = cap_sample(valid_idx, spec.valid_cap, spec.seed, "valid");
    dropped.cap += over;
    let (test_idx, over) = cap_sample(test_idx, spec.test_cap, spec.seed, "test");
    dropped.cap += over;

    if train_idx.is_empty() {
        return Err(Error::EmptyTrainSplit);
    }
    let train_edges: Vec<Edge> = train_idx.iter().map(|&i| categorized.edges[i]).collect();
    let train_graph = Graph::from_edges(g.num_nodes(), &train_edges)?;

    let mut clean = |idx: Vec<usize>| -> Vec<usize> {
        idx.into_iter()
            .filter(|&i| {
                let e = categorized.edges[i];
                if train_graph.has_edge(e.u, e.v) {
                    dropped.duplicate += 1;
                    false
                } else if !train_graph.is_covered(e.u) || !train_graph.is_covered(e.v) {
                    dropped.uncovered += 1;
                    false
                } else {
                    true
                }
            })
            .collect()
    };
    let valid_idx = clean(valid_idx);
    let test_idx = clean(test_idx);

    let mut warnings = Vec::new();
    for (name, idx) in [("valid", &valid_idx), ("test", &test_idx)] {
        if idx.is_empty() {
            warnings.push(format!("{name} split is empty"));
        }
    }

    let pick = |idx: &[usize]| -> (Vec<Edge>, Histogram) {
        let edges = idx.iter().map(|&i| categorized.edges[i]).collect();
        let scores: Vec<f64> = idx.iter().map(|&i| categorized.scores[i]).collect();
        (edges, Histogram::from_scores(&scores, HISTOGRAM_BINS))
    };
    let (train_edges, train_hist) = pick(&train_idx);
    let (valid_edges, valid_hist) = pick(&valid_idx);
    let (test_edges, test_hist) = pick(&test_idx);

    let manifest = SplitManifest {
        label: spec.default_label(),
        spec: spec.clone(),
        label_triple: None,
        num_nodes: g.num_nodes(),
        input_edges: n_edges,
        counts: SplitCounts {
            train: train_edges.len(),
            valid: valid_edges.len(),
            test: test_edges.len(),
        },
        dropped,
        seed: spec.seed,
        input_sha256: None,
        histograms: SplitHistograms {
            train: train_hist,
            valid: valid_hist,
            test: test_hist,
        },
        gap_policy: "discard".into(),
        warnings,
    };
    Ok(DatasetSplit {
        train_edges,
        valid_edges,
        test_edges,
        train_graph,
        manifest,
    })
}

/// Categorize, apply direction, finalize.
pub fn split_graph(g: &Graph, spec: &SplitSpec) -> Result<DatasetSplit> {
    spec.validate()?;
    let mut categorized = categorize_edges(g, spec);
    apply_direction(&mut categorized.categories, spec.direction);
    finalize_split(g, &categorized, spec)
}
