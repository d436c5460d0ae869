//! Immutable undirected graph in compressed sparse row form.
//!
//! Neighbor lists are strictly ascending, which lets the heuristics
//! intersect neighborhoods with a linear merge.

mod ingest;

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use ingest::{ingest_edge_list, read_edge_list_file, Ingested, IngestSummary, NodeLabels};

/// Dense node index in `0..num_nodes`.
pub type NodeId = u32;

/// Undirected edge, stored canonically with `u < v`.
///
/// Weights are not represented: every edge has weight 1 once a graph is built.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Edge {
    pub u: NodeId,
    pub v: NodeId,
}

impl Edge {
    /// Canonical edge between `a` and `b`; rejects self-loops.
    pub fn new(a: NodeId, b: NodeId) -> Result<Self> {
        match a.cmp(&b) {
            std::cmp::Ordering::Less => Ok(Edge { u: a, v: b }),
            std::cmp::Ordering::Greater => Ok(Edge { u: b, v: a }),
            std::cmp::Ordering::Equal => Err(Error::SelfPair(a)),
        }
    }

    pub fn endpoints(self) -> (NodeId, NodeId) {
        (self.u, self.v)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    offsets: Vec<usize>,
    targets: Vec<NodeId>,
}

impl Graph {
    /// Graph with `num_nodes` isolated nodes.
    pub fn empty(num_nodes: usize) -> Self {
        Graph {
            offsets: vec![0; num_nodes + 1],
            targets: Vec::new(),
        }
    }

    /// Builds the undirected graph over `edges`.
    ///
    /// Edge orientation is ignored and duplicates collapse to one edge.
    /// Self-loops and ids `>= num_nodes` are errors.
    pub fn from_edges(num_nodes: usize, edges: &[Edge]) -> Result<Self> {
        let mut canonical = Vec::with_capacity(edges.len());
        for e in edges {
            for node in [e.u, e.v] {
                if node as usize >= num_nodes {
                    return Err(Error::NodeOutOfRange {
                        node: node as u64,
                        num_nodes,
                    });
                }
            }
            canonical.push(Edge::new(e.u, e.v)?);
        }
        canonical.sort_unstable();
        canonical.dedup();

        let mut degree = vec![0usize; num_nodes];
        for e in &canonical {
            degree[e.u as usize] += 1;
            degree[e.v as usize] += 1;
        }
        let mut offsets = Vec::with_capacity(num_nodes + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut cursor = offsets[..num_nodes].to_vec();
        let mut targets = vec![0 as NodeId; offsets[num_nodes]];
        // Edges are sorted by (u, v): pushing v into u's list and u into v's
        // list in this order yields ascending lists without a second sort.
        for e in &canonical {
            targets[cursor[e.v as usize]] = e.u;
            cursor[e.v as usize] += 1;
        }
        for e in &canonical {
            targets[cursor[e.u as usize]] = e.v;
            cursor[e.u as usize] += 1;
        }
        Ok(Graph { offsets, targets })
    }

    pub fn num_nodes(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn num_edges(&self) -> usize {
        self.targets.len() / 2
    }

    /// Neighbors of `u` in ascending order. Panics if `u` is out of range.
    #[inline]
    pub fn neighbors(&self, u: NodeId) -> &[NodeId] {
        let u = u as usize;
        &self.targets[self.offsets[u]..self.offsets[u + 1]]
    }

    #[inline]
    pub fn degree(&self, u: NodeId) -> usize {
        let u = u as usize;
        self.offsets[u + 1] - self.offsets[u]
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.offsets.windows(2).map(|w| w[1] - w[0]).collect()
    }

    pub fn check_node(&self, u: NodeId) -> Result<()> {
        if (u as usize) < self.num_nodes() {
            Ok(())
        } else {
            Err(Error::NodeOutOfRange {
                node: u as u64,
                num_nodes: self.num_nodes(),
            })
        }
    }

    pub fn checked_neighbors(&self, u: NodeId) -> Result<&[NodeId]> {
        self.check_node(u)?;
        Ok(self.neighbors(u))
    }

    pub fn has_edge(&self, a: NodeId, b: NodeId) -> bool {
        let (small, other) = if self.degree(a) <= self.degree(b) {
            (a, b)
        } else {
            (b, a)
        };
        self.neighbors(small).binary_search(&other).is_ok()
    }

    /// Canonical edges in ascending `(u, v)` order.
    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        (0..self.num_nodes() as NodeId).flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .filter(move |&&v| v > u)
                .map(move |&v| Edge { u, v })
        })
    }

    pub fn edge_vec(&self) -> Vec<Edge> {
        let mut out = Vec::with_capacity(self.num_edges());
        out.extend(self.edges());
        out
    }

    /// Nodes with at least one incident edge.
    pub fn is_covered(&self, u: NodeId) -> bool {
        self.degree(u) > 0
    }

    /// Writes one `u<TAB>v` line per canonical edge.
    pub fn write_edge_list<W: Write>(&self, mut out: W) -> Result<()> {
        for e in self.edges() {
            writeln!(out, "{}\t{}", e.u, e.v)?;
        }
        out.flush()?;
        Ok(())
    }
}
