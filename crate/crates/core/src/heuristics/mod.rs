//! Neighborhood heuristics used both to drive splits and as baseline
//! link predictors.

mod bfs;
mod intersect;

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Edge, Graph, NodeId};

pub use bfs::{single_source_distances, BidirectionalBfs, UNREACHED};
pub use intersect::{common_count, for_each_common};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum HeuristicKind {
    #[serde(rename = "cn")]
    CommonNeighbors,
    #[serde(rename = "pa")]
    PreferentialAttachment,
    #[serde(rename = "sp")]
    ShortestPathScore,
    #[serde(rename = "ra")]
    ResourceAllocation,
}

impl HeuristicKind {
    pub const ALL: [HeuristicKind; 4] = [
        HeuristicKind::CommonNeighbors,
        HeuristicKind::PreferentialAttachment,
        HeuristicKind::ShortestPathScore,
        HeuristicKind::ResourceAllocation,
    ];

    /// Lower-case short name used in files and on the command line.
    pub fn short_name(self) -> &'static str {
        match self {
            HeuristicKind::CommonNeighbors => "cn",
            HeuristicKind::PreferentialAttachment => "pa",
            HeuristicKind::ShortestPathScore => "sp",
            HeuristicKind::ResourceAllocation => "ra",
        }
    }

    /// Upper-case label used in report tables.
    pub fn label(self) -> &'static str {
        match self {
            HeuristicKind::CommonNeighbors => "CN",
            HeuristicKind::PreferentialAttachment => "PA",
            HeuristicKind::ShortestPathScore => "SP",
            HeuristicKind::ResourceAllocation => "RA",
        }
    }
}

impl fmt::Display for HeuristicKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

impl FromStr for HeuristicKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "cn" | "common_neighbors" | "common-neighbors" => Ok(HeuristicKind::CommonNeighbors),
            "pa" | "preferential_attachment" | "preferential-attachment" => {
                Ok(HeuristicKind::PreferentialAttachment)
            }
            "sp" | "shortest_path" | "shortest-path" => Ok(HeuristicKind::ShortestPathScore),
            "ra" | "resource_allocation" | "resource-allocation" => {
                Ok(HeuristicKind::ResourceAllocation)
            }
            other => Err(Error::InvalidParameter(format!("unknown heuristic {other:?}"))),
        }
    }
}

fn check_pair(g: &Graph, u: NodeId, v: NodeId) -> Result<()> {
    g.check_node(u)?;
    g.check_node(v)?;
    if u == v {
        return Err(Error::SelfPair(u));
    }
    Ok(())
}

/// `|N(u) ∩ N(v)|`.
pub fn common_neighbors(g: &Graph, u: NodeId, v: NodeId) -> Result<f64> {
    check_pair(g, u, v)?;
    Ok(common_count(g.neighbors(u), g.neighbors(v)) as f64)
}

/// `deg(u) * deg(v)`.
pub fn preferential_attachment(g: &Graph, u: NodeId, v: NodeId) -> Result<f64> {
    check_pair(g, u, v)?;
    Ok(pa_unchecked(g, u, v))
}

/// `Σ 1/deg(w)` over common neighbors `w`.
pub fn resource_allocation(g: &Graph, u: NodeId, v: NodeId) -> Result<f64> {
    check_pair(g, u, v)?;
    Ok(ra_unchecked(g, u, v))
}

/// `1/d` where `d` is the hop distance between `u` and `v` once the edge
/// `(u, v)`, if present, is taken out. Disconnected pairs score 0.
pub fn shortest_path_score(g: &Graph, u: NodeId, v: NodeId) -> Result<f64> {
    check_pair(g, u, v)?;
    let mut bfs = BidirectionalBfs::new(g.num_nodes());
    Ok(distance_to_score(bfs.distance(g, u, v, Some((u, v)))))
}

pub fn score_pair(g: &Graph, u: NodeId, v: NodeId, kind: HeuristicKind) -> Result<f64> {
    match kind {
        HeuristicKind::CommonNeighbors => common_neighbors(g, u, v),
        HeuristicKind::PreferentialAttachment => preferential_attachment(g, u, v),
        HeuristicKind::ShortestPathScore => shortest_path_score(g, u, v),
        HeuristicKind::ResourceAllocation => resource_allocation(g, u, v),
    }
}

#[inline]
pub fn distance_to_score(d: Option<u32>) -> f64 {
    match d {
        Some(d) if d > 0 => 1.0 / d as f64,
        _ => 0.0,
    }
}

#[inline]
fn pa_unchecked(g: &Graph, u: NodeId, v: NodeId) -> f64 {
    (g.degree(u) as f64) * (g.degree(v) as f64)
}

#[inline]
fn ra_unchecked(g: &Graph, u: NodeId, v: NodeId) -> f64 {
    let mut sum = 0.0;
    for_each_common(g.neighbors(u), g.neighbors(v), |w| {
        sum += 1.0 / g.degree(w) as f64;
    });
    sum
}

/// Reusable scorer holding BFS scratch space; one per worker.
pub struct PairScorer<'g> {
    g: &'g Graph,
    kind: HeuristicKind,
    bfs: Option<BidirectionalBfs>,
}

impl<'g> PairScorer<'g> {
    pub fn new(g: &'g Graph, kind: HeuristicKind) -> Self {
        let bfs = (kind == HeuristicKind::ShortestPathScore)
            .then(|| BidirectionalBfs::new(g.num_nodes()));
        PairScorer { g, kind, bfs }
    }

    /// Scores a pair already known to be valid (in range, distinct).
    pub fn score(&mut self, u: NodeId, v: NodeId) -> f64 {
        let g = self.g;
        match self.kind {
            HeuristicKind::CommonNeighbors => common_count(g.neighbors(u), g.neighbors(v)) as f64,
            HeuristicKind::PreferentialAttachment => pa_unchecked(g, u, v),
            HeuristicKind::ResourceAllocation => ra_unchecked(g, u, v),
            HeuristicKind::ShortestPathScore => {
                let bfs = self.bfs.as_mut().expect("bfs scratch for sp");
                distance_to_score(bfs.distance(g, u, v, Some((u, v))))
            }
        }
    }
}

/// One score per canonical edge of `g`, in [`Graph::edges`] order.
pub fn score_all_edges(g: &Graph, kind: HeuristicKind) -> Vec<f64> {
    let edges = g.edge_vec();
    score_edges_unchecked(g, &edges, kind)
}

pub(crate) fn score_edges_unchecked(g: &Graph, edges: &[Edge], kind: HeuristicKind) -> Vec<f64> {
    edges
        .par_iter()
        .map_init(|| PairScorer::new(g, kind), |sc, e| sc.score(e.u, e.v))
        .collect()
}

/// Scores arbitrary node pairs; pairs need not be edges of `g`.
pub fn score_pairs(g: &Graph, pairs: &[(NodeId, NodeId)], kind: HeuristicKind) -> Result<Vec<f64>> {
    for &(u, v) in pairs {
        check_pair(g, u, v)?;
    }
    Ok(pairs
        .par_iter()
        .map_init(|| PairScorer::new(g, kind), |sc, &(u, v)| sc.score(u, v))
        .collect())
}

/// Writes `u<TAB>v<TAB>score` lines; scores use the shortest round-trip
/// decimal form.
pub fn write_scores<W: Write>(edges: &[Edge], scores: &[f64], mut out: W) -> Result<()> {
    for (e, s) in edges.iter().zip(scores) {
        writeln!(out, "{}\t{}\t{}", e.u, e.v, s)?;
    }
    out.flush()?;
    Ok(())
}
