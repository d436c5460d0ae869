//! Seeded synthetic graphs for desk-scale experiments.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Edge, Graph, NodeId};
use crate::rng;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "lowercase")]
pub enum SynthModel {
    /// Barabasi-Albert growth: a clique on `attach` seed nodes, then every
    /// new node links to `attach` distinct existing nodes chosen with
    /// probability proportional to degree.
    Ba { attach: usize },
    /// Erdos-Renyi `G(n, p)`.
    Er { p: f64 },
}

pub fn synth(n: usize, model: SynthModel, seed: u64) -> Result<Graph> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("need at least 2 nodes, got {n}")));
    }
    if n > NodeId::MAX as usize {
        return Err(Error::InvalidParameter(format!("{n} nodes exceed the id space")));
    }
    let edges = match model {
        SynthModel::Ba { attach } => barabasi_albert(n, attach, seed)?,
        SynthModel::Er { p } => erdos_renyi(n, p, seed)?,
    };
    Graph::from_edges(n, &edges)
}

fn barabasi_albert(n: usize, attach: usize, seed: u64) -> Result<Vec<Edge>> {
    if attach == 0 || attach >= n {
        return Err(Error::InvalidParameter(format!(
            "attachment count must be in 1..{n}, got {attach}"
        )));
    }
    let mut rng = rng::stream(seed, "synth/ba");
    let mut edges = Vec::with_capacity(attach * (attach - 1) / 2 + (n - attach) * attach);
    // Each node appears once per incident edge.
    let mut endpoints: Vec<NodeId> = Vec::with_capacity(2 * edges.capacity());
    for a in 0..attach as NodeId {
        for b in a + 1..attach as NodeId {
            edges.push(Edge { u: a, v: b });
            endpoints.extend([a, b]);
        }
    }
    let mut targets: Vec<NodeId> = Vec::with_capacity(attach);
    for t in attach as NodeId..n as NodeId {
        targets.clear();
        while targets.len() < attach {
            let pick = if endpoints.is_empty() {
                rng.gen_range(0..t)
            } else {
                endpoints[rng.gen_range(0..endpoints.len())]
            };
            if !targets.contains(&pick) {
                targets.push(pick);
            }
        }
        for &s in &targets {
            edges.push(Edge { u: s, v: t });
            endpoints.extend([s, t]);
        }
    }
    Ok(edges)
}

fn erdos_renyi(n: usize, p: f64, seed: u64) -> Result<Vec<Edge>> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!("edge probability {p} outside [0, 1]")));
    }
    let mut rng = rng::stream(seed, "synth/er");
    let mut edges = Vec::new();
    for u in 0..n as NodeId {
        for v in u + 1..n as NodeId {
            if rng.gen::<f64>() < p {
                edges.push(Edge { u, v });
            }
        }
    }
    Ok(edges)
}
