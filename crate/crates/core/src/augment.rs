//! Structure-modifying augmentations of a training graph.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Edge, Graph, NodeId};
use crate::heuristics::HeuristicKind;
use crate::rng;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Augmentation {
    DropEdge { p: f64 },
    Eps { heuristic: HeuristicKind, k: usize },
}

impl Augmentation {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Augmentation::DropEdge { p } if !(0.0..=1.0).contains(&p) => {
                Err(Error::InvalidParameter(format!("drop probability {p} outside [0, 1]")))
            }
            _ => Ok(()),
        }
    }

    /// Short tag used for the `variant` column of reports.
    pub fn variant_label(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for Augmentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Augmentation::DropEdge { p } => write!(f, "dropedge(p={p})"),
            Augmentation::Eps { heuristic, k } => write!(f, "eps({heuristic},k={k})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AugmentationSpec {
    pub augmentation: Augmentation,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AugmentManifest {
    pub spec: AugmentationSpec,
    pub input_edges: usize,
    pub output_edges: usize,
    pub added: usize,
    pub removed: usize,
    pub candidate_pool: Option<usize>,
    pub warnings: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct Augmented {
    pub graph: Graph,
    pub manifest: AugmentManifest,
}

impl AugmentationSpec {
    pub fn apply(&self, g: &Graph) -> Result<Augmented> {
        self.augmentation.validate()?;
        let (graph, added, pool, warnings) = match self.augmentation {
            Augmentation::DropEdge { p } => (drop_edge(g, p, self.seed)?, 0, None, Vec::new()),
            Augmentation::Eps { heuristic, k } => {
                let out = eps_filter(g, heuristic, k, self.seed)?;
                let added = out.added.len();
                (out.graph, added, Some(out.pool_size), out.warnings)
            }
        };
        let removed = g.num_edges() + added - graph.num_edges();
        Ok(Augmented {
            manifest: AugmentManifest {
                spec: self.clone(),
                input_edges: g.num_edges(),
                output_edges: graph.num_edges(),
                added,
                removed,
                candidate_pool: pool,
                warnings,
            },
            graph,
        })
    }
}

/// Single DropEdge draw (draw index 0).
pub fn drop_edge(g: &Graph, p: f64, seed: u64) -> Result<Graph> {
    drop_edge_draw(g, p, seed, 0)
}

/// Removes each edge independently with probability `p`. The coin for edge
/// `(u, v)` depends only on `(seed, draw, u, v)`.
pub fn drop_edge_draw(g: &Graph, p: f64, seed: u64, draw: u64) -> Result<Graph> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!("drop probability {p} outside [0, 1]")));
    }
    let key = rng::derive_key(seed, &format!("augment/dropedge/{draw}"));
    let kept: Vec<Edge> = g
        .edges()
        .filter(|e| rng::unit_interval(rng::mix(key, e.u as u64, e.v as u64)) >= p)
        .collect();
    Graph::from_edges(g.num_nodes(), &kept)
}

#[derive(Clone, Debug)]
pub struct EpsOutcome {
    pub graph: Graph,
    /// Added edges, best first.
    pub added: Vec<Edge>,
    /// Number of non-adjacent pairs with at least one common neighbor.
    pub pool_size: usize,
    pub warnings: Vec<String>,
}

/// Candidate ordering: higher score first, then lower tie key, then ids.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EpsCandidate {
    pub score: f64,
    pub tie: u64,
    pub edge: Edge,
}

impl Eq for EpsCandidate {}

impl Ord for EpsCandidate {
    /// `a < b` means `a` ranks ahead of `b`.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .score
            .total_cmp(&self.score)
            .then(self.tie.cmp(&other.tie))
            .then(self.edge.cmp(&other.edge))
    }
}

impl PartialOrd for EpsCandidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

pub fn eps_tie_key(seed: u64, e: Edge) -> u64 {
    rng::mix(rng::derive_key(seed, "augment/eps/ties"), e.u as u64, e.v as u64)
}

struct TopK {
    k: usize,
    heap: BinaryHeap<EpsCandidate>,
    pool: usize,
}

impl TopK {
    fn new(k: usize) -> Self {
        TopK { k, heap: BinaryHeap::new(), pool: 0 }
    }

    fn offer(&mut self, c: EpsCandidate) {
        if self.heap.len() < self.k {
            self.heap.push(c);
        } else if let Some(worst) = self.heap.peek() {
            if c < *worst {
                self.heap.pop();
                self.heap.push(c);
            }
        }
    }

    fn merge(mut self, other: TopK) -> TopK {
        self.pool += other.pool;
        for c in other.heap {
            self.offer(c);
        }
        self
    }
}

/// Adds the `k` best-scoring non-adjacent 2-hop pairs of `g` as new edges.
pub fn eps_filter(g: &Graph, heuristic: HeuristicKind, k: usize, seed: u64) -> Result<EpsOutcome> {
    if k == 0 {
        return Ok(EpsOutcome {
            graph: g.clone(),
            added: Vec::new(),
            pool_size: count_pool(g),
            warnings: Vec::new(),
        });
    }
    let n = g.num_nodes();
    let top = (0..n as NodeId)
        .into_par_iter()
        .fold(
            || (vec![u32::MAX; n], vec![0.0f64; n], Vec::<NodeId>::new(), TopK::new(k)),
            |(mut stamp, mut acc, mut touched, mut top), u| {
                // stamp[w] == u marks a neighbor of u; acc collects CN or RA mass.
                for &x in g.neighbors(u) {
                    stamp[x as usize] = u;
                }
                for &x in g.neighbors(u) {
                    let inc = match heuristic {
                        HeuristicKind::ResourceAllocation => 1.0 / g.degree(x) as f64,
                        _ => 1.0,
                    };
                    for &w in g.neighbors(x) {
                        if w <= u || stamp[w as usize] == u {
                            continue;
                        }
                        if acc[w as usize] == 0.0 {
                            touched.push(w);
                        }
                        acc[w as usize] += inc;
                    }
                }
                for &w in &touched {
                    let score = match heuristic {
                        HeuristicKind::CommonNeighbors | HeuristicKind::ResourceAllocation => acc[w as usize],
                        HeuristicKind::PreferentialAttachment => g.degree(u) as f64 * g.degree(w) as f64,
                        HeuristicKind::ShortestPathScore => 0.5,
                    };
                    let edge = Edge { u, v: w };
                    top.pool += 1;
                    top.offer(EpsCandidate { score, tie: eps_tie_key(seed, edge), edge });
                    acc[w as usize] = 0.0;
                }
                touched.clear();
                (stamp, acc, touched, top)
            },
        )
        .map(|(_, _, _, top)| top)
        .reduce(|| TopK::new(k), TopK::merge);

    let pool_size = top.pool;
    let mut chosen = top.heap.into_vec();
    chosen.sort();
    let added: Vec<Edge> = chosen.into_iter().map(|c| c.edge).collect();
    let mut warnings = Vec::new();
    if k > pool_size {
        warnings.push(format!("k={k} exceeds candidate pool of {pool_size}; added all candidates"));
    }
    let mut edges = g.edge_vec();
    edges.extend(&added);
    Ok(EpsOutcome {
        graph: Graph::from_edges(n, &edges)?,
        added,
        pool_size,
        warnings,
    })
}

fn count_pool(g: &Graph) -> usize {
    (0..g.num_nodes() as NodeId)
        .into_par_iter()
        .map(|u| {
            let mut seen: Vec<NodeId> = g
                .neighbors(u)
                .iter()
                .flat_map(|&x| g.neighbors(x).iter().copied())
                .filter(|&w| w > u && !g.has_edge(u, w))
                .collect();
            seen.sort_unstable();
            seen.dedup();
            seen.len()
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(n: usize, pairs: &[(NodeId, NodeId)]) -> Graph {
        let edges: Vec<Edge> = pairs.iter().map(|&(u, v)| Edge::new(u, v).unwrap()).collect();
        Graph::from_edges(n, &edges).unwrap()
    }

    #[test]
    fn drop_edge_extremes() {
        let g = graph(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (0, 5)]);
        assert_eq!(drop_edge(&g, 0.0, 3).unwrap(), g);
        let empty = drop_edge(&g, 1.0, 3).unwrap();
        assert_eq!(empty.num_edges(), 0);
        assert_eq!(empty.num_nodes(), 6);
        assert!(drop_edge(&g, 1.5, 3).is_err());
        assert!(drop_edge(&g, f64::NAN, 3).is_err());
    }

    #[test]
    fn drop_edge_draws_differ_but_repeat() {
        let pairs: Vec<(NodeId, NodeId)> = (0..200).map(|i| (i, i + 1)).collect();
        let g = graph(201, &pairs);
        let a = drop_edge_draw(&g, 0.5, 1, 0).unwrap();
        assert_eq!(a, drop_edge_draw(&g, 0.5, 1, 0).unwrap());
        assert_ne!(a, drop_edge_draw(&g, 0.5, 1, 1).unwrap());
    }

    #[test]
    fn eps_examples() {
        let path = graph(3, &[(0, 1), (1, 2)]);
        let out = eps_filter(&path, HeuristicKind::CommonNeighbors, 0, 1).unwrap();
        assert_eq!(out.graph, path);
        let out = eps_filter(&path, HeuristicKind::CommonNeighbors, 1, 1).unwrap();
        assert_eq!(out.added, vec![Edge { u: 0, v: 2 }]);
        assert!(out.graph.has_edge(0, 2));
        assert!(out.warnings.is_empty());
        let out = eps_filter(&path, HeuristicKind::CommonNeighbors, 5, 1).unwrap();
        assert_eq!(out.added.len(), 1);
        assert_eq!(out.pool_size, 1);
        assert_eq!(out.warnings.len(), 1);
    }

    #[test]
    fn eps_prefers_higher_scores() {
        // (0,3) and (1,2) both share two neighbors, but the hub 3 dilutes
        // the resource reaching (1,2): RA 1 against 5/6.
        let g = graph(5, &[(0, 1), (0, 2), (1, 3), (2, 3), (3, 4)]);
        let out = eps_filter(&g, HeuristicKind::ResourceAllocation, 1, 42).unwrap();
        assert_eq!(out.added, vec![Edge { u: 0, v: 3 }]);
    }

    #[test]
    fn apply_reports_counts() {
        let g = graph(4, &[(0, 1), (1, 2), (2, 3)]);
        let spec = AugmentationSpec { augmentation: Augmentation::Eps { heuristic: HeuristicKind::CommonNeighbors, k: 2 }, seed: 0 };
        let out = spec.apply(&g).unwrap();
        assert_eq!(out.manifest.added, 2);
        assert_eq!(out.manifest.output_edges, 5);
        assert_eq!(out.manifest.candidate_pool, Some(2));
        let spec = AugmentationSpec { augmentation: Augmentation::DropEdge { p: 1.0 }, seed: 0 };
        let out = spec.apply(&g).unwrap();
        assert_eq!(out.manifest.removed, 3);
        assert_eq!(spec.augmentation.variant_label(), "dropedge(p=1)");
    }
}
