//! Score distributions and the 1-D Earth Mover's Distance between the
//! train and test heuristic-score distributions of a split.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Edge, Graph, NodeId};
use crate::heuristics::{score_pairs, HeuristicKind};

const MASS_TOLERANCE: f64 = 1e-12;

/// Equal-width histogram of raw counts.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
}

impl Histogram {
    /// At most `max_bins` equal-width bins spanning `[min, max]`; the last bin
    /// is closed. A constant sample gets the single bin `[x, x + 1]`.
    pub fn from_scores(scores: &[f64], max_bins: usize) -> Self {
        if scores.is_empty() || max_bins == 0 {
            return Histogram::default();
        }
        let lo = scores.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if lo == hi {
            return Histogram {
                edges: vec![lo, lo + 1.0],
                counts: vec![scores.len() as u64],
            };
        }
        let bins = max_bins;
        let width = (hi - lo) / bins as f64;
        let mut edges: Vec<f64> = (0..bins).map(|i| lo + width * i as f64).collect();
        edges.push(hi);
        let mut counts = vec![0u64; bins];
        for &s in scores {
            let idx = (((s - lo) / width) as usize).min(bins - 1);
            counts[idx] += 1;
        }
        Histogram { edges, counts }
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn to_distribution(&self) -> Result<ScoreDistribution> {
        let total = self.total();
        if total == 0 {
            return Err(Error::Empty("histogram distribution"));
        }
        let mass = self.counts.iter().map(|&c| c as f64 / total as f64).collect();
        ScoreDistribution::from_histogram(self.edges.clone(), mass)
    }
}

/// A normalized score distribution.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum ScoreDistribution {
    /// Sorted samples, each carrying mass `1/n`.
    Samples(Vec<f64>),
    /// Bin edges and per-bin mass summing to 1.
    Histogram { edges: Vec<f64>, mass: Vec<f64> },
}

impl ScoreDistribution {
    pub fn from_samples(mut samples: Vec<f64>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::Empty("score distribution"));
        }
        if let Some(bad) = samples.iter().find(|s| !s.is_finite()) {
            return Err(Error::InvalidParameter(format!("non-finite score {bad}")));
        }
        samples.sort_by(f64::total_cmp);
        Ok(ScoreDistribution::Samples(samples))
    }

    pub fn from_histogram(edges: Vec<f64>, mass: Vec<f64>) -> Result<Self> {
        if mass.is_empty() || edges.len() != mass.len() + 1 {
            return Err(Error::InvalidParameter(format!(
                "histogram needs bins + 1 edges, got {} edges for {} bins",
                edges.len(),
                mass.len()
            )));
        }
        if !edges.windows(2).all(|w| w[0] < w[1]) || edges.iter().any(|e| !e.is_finite()) {
            return Err(Error::InvalidParameter(
                "histogram edges must be finite and strictly increasing".into(),
            ));
        }
        if mass.iter().any(|&m| !(m >= 0.0)) {
            return Err(Error::InvalidParameter("histogram mass must be non-negative".into()));
        }
        let total: f64 = mass.iter().sum();
        if (total - 1.0).abs() > MASS_TOLERANCE {
            return Err(Error::Unnormalized { mass: total });
        }
        Ok(ScoreDistribution::Histogram { edges, mass })
    }

    /// Number of samples, or bins for a histogram.
    pub fn len(&self) -> usize {
        match self {
            ScoreDistribution::Samples(s) => s.len(),
            ScoreDistribution::Histogram { mass, .. } => mass.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `(value, mass)` atoms in ascending value order. Histogram bins are
    /// represented by their midpoints.
    pub fn atoms(&self) -> Vec<(f64, f64)> {
        match self {
            ScoreDistribution::Samples(s) => {
                let w = 1.0 / s.len() as f64;
                let mut out: Vec<(f64, f64)> = Vec::new();
                for &x in s {
                    match out.last_mut() {
                        Some((v, m)) if *v == x => *m += w,
                        _ => out.push((x, w)),
                    }
                }
                out
            }
            ScoreDistribution::Histogram { edges, mass } => edges
                .windows(2)
                .zip(mass)
                .map(|(w, &m)| ((w[0] + w[1]) / 2.0, m))
                .collect(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EmdMethod {
    Exact1d,
    Histogram,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmdResult {
    pub value: f64,
    pub method: EmdMethod,
    pub counts: (usize, usize),
}

/// Exact 1-D EMD, the integral of `|CDF_p - CDF_q|`.
pub fn emd_1d(p: &ScoreDistribution, q: &ScoreDistribution) -> Result<EmdResult> {
    let counts = (p.len(), q.len());
    for d in [p, q] {
        if d.is_empty() {
            return Err(Error::Empty("emd input"));
        }
        if let ScoreDistribution::Histogram { mass, .. } = d {
            let total: f64 = mass.iter().sum();
            if (total - 1.0).abs() > MASS_TOLERANCE {
                return Err(Error::Unnormalized { mass: total });
            }
        }
    }
    let (value, method) = match (p, q) {
        (ScoreDistribution::Samples(a), ScoreDistribution::Samples(b)) => {
            (sorted_samples_emd(a, b), EmdMethod::Exact1d)
        }
        _ => (atoms_emd(&p.atoms(), &q.atoms()), EmdMethod::Histogram),
    };
    Ok(EmdResult {
        value,
        method,
        counts,
    })
}

/// Sweeps both sorted samples; CDF differences are kept as exact integers
/// `|i*m - j*n|` and divided by `n*m` once at the end.
fn sorted_samples_emd(a: &[f64], b: &[f64]) -> f64 {
    let (n, m) = (a.len() as i128, b.len() as i128);
    let (mut i, mut j) = (0usize, 0usize);
    let mut acc = 0.0f64;
    loop {
        let x = match (a.get(i), b.get(j)) {
            (Some(&x), Some(&y)) => x.min(y),
            (Some(&x), None) => x,
            (None, Some(&y)) => y,
            (None, None) => break,
        };
        while i < a.len() && a[i] == x {
            i += 1;
        }
        while j < b.len() && b[j] == x {
            j += 1;
        }
        let next = match (a.get(i), b.get(j)) {
            (Some(&x), Some(&y)) => x.min(y),
            (Some(&x), None) => x,
            (None, Some(&y)) => y,
            (None, None) => break,
        };
        let diff = (i as i128 * m - j as i128 * n).unsigned_abs();
        acc += diff as f64 * (next - x);
    }
    acc / (n as f64 * m as f64)
}

fn atoms_emd(a: &[(f64, f64)], b: &[(f64, f64)]) -> f64 {
    let mut points: Vec<f64> = a.iter().chain(b).map(|&(x, _)| x).collect();
    points.sort_by(f64::total_cmp);
    points.dedup();
    let (mut i, mut j) = (0, 0);
    let (mut fa, mut fb) = (0.0, 0.0);
    let mut acc = 0.0;
    for w in points.windows(2) {
        while i < a.len() && a[i].0 <= w[0] {
            fa += a[i].1;
            i += 1;
        }
        while j < b.len() && b[j].0 <= w[0] {
            fb += b[j].1;
            j += 1;
        }
        acc += (fa - fb).abs() * (w[1] - w[0]);
    }
    acc
}

/// Scores `edges` on `g` and returns the normalized distribution.
pub fn collect_distribution(g: &Graph, edges: &[Edge], kind: HeuristicKind) -> Result<ScoreDistribution> {
    if edges.is_empty() {
        return Err(Error::Empty("score distribution"));
    }
    let pairs: Vec<(NodeId, NodeId)> = edges.iter().map(|e| (e.u, e.v)).collect();
    ScoreDistribution::from_samples(score_pairs(g, &pairs, kind)?)
}

/// Which graph supplied the structure that train and test edges were
/// scored against.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScoreGraph {
    Train,
    Full,
}

impl ScoreGraph {
    pub fn as_str(self) -> &'static str {
        match self {
            ScoreGraph::Train => "train",
            ScoreGraph::Full => "full",
        }
    }
}

/// One split configuration to analyze.
pub struct EmdCase<'a> {
    pub split_label: String,
    /// `baseline`, `dropedge(p=...)`, `eps(cn,k=...)`, ...
    pub variant: String,
    pub graph: &'a Graph,
    pub train_edges: &'a [Edge],
    pub test_edges: &'a [Edge],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmdRow {
    pub split_label: String,
    pub heuristic: HeuristicKind,
    pub variant: String,
    pub emd_value: f64,
    pub score_graph: ScoreGraph,
}

pub fn emd_report(cases: &[EmdCase<'_>], kinds: &[HeuristicKind], score_graph: ScoreGraph) -> Result<Vec<EmdRow>> {
    let mut rows = Vec::with_capacity(cases.len() * kinds.len());
    for case in cases {
        if case.train_edges.is_empty() || case.test_edges.is_empty() {
            return Err(Error::MissingInput(format!(
                "split {} ({}) has no train or test edges",
                case.split_label, case.variant
            )));
        }
        for &kind in kinds {
            let train = collect_distribution(case.graph, case.train_edges, kind)?;
            let test = collect_distribution(case.graph, case.test_edges, kind)?;
            rows.push(EmdRow {
                split_label: case.split_label.clone(),
                heuristic: kind,
                variant: case.variant.clone(),
                emd_value: emd_1d(&train, &test)?.value,
                score_graph,
            });
        }
    }
    Ok(rows)
}

pub fn write_emd_csv<W: Write>(rows: &[EmdRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["split_label", "heuristic", "variant", "emd_value", "score_graph"])
        .map_err(csv_err)?;
    for r in rows {
        w.write_record([
            r.split_label.as_str(),
            r.heuristic.short_name(),
            r.variant.as_str(),
            &r.emd_value.to_string(),
            r.score_graph.as_str(),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub(crate) fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::InvalidParameter(format!("csv: {other:?}")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn samples(v: &[f64]) -> ScoreDistribution {
        ScoreDistribution::from_samples(v.to_vec()).unwrap()
    }

    fn emd(a: &[f64], b: &[f64]) -> f64 {
        emd_1d(&samples(a), &samples(b)).unwrap().value
    }

    #[test]
    fn emd_examples() {
        assert_eq!(emd(&[0.0, 1.0, 3.0], &[3.0, 0.0, 1.0]), 0.0);
        assert_eq!(emd(&[0.0], &[2.0]), 2.0);
        assert_eq!(emd(&[0.0, 1.0], &[1.0, 2.0]), 1.0);
    }

    #[test]
    fn unequal_sample_sizes() {
        // Mass 1/2 at 0 and 1/2 at 4 against a point mass at 1: 0.5*1 + 0.5*3.
        assert_eq!(emd(&[0.0, 4.0], &[1.0, 1.0, 1.0]), 2.0);
    }

    #[test]
    fn histogram_mode_uses_bin_midpoints() {
        let p = ScoreDistribution::from_histogram(vec![0.0, 2.0, 4.0], vec![1.0, 0.0]).unwrap();
        let q = ScoreDistribution::from_histogram(vec![0.0, 2.0, 4.0], vec![0.0, 1.0]).unwrap();
        let r = emd_1d(&p, &q).unwrap();
        assert_eq!(r.method, EmdMethod::Histogram);
        assert_eq!(r.value, 2.0);
        // Mixed inputs go through the histogram path.
        let r = emd_1d(&p, &samples(&[1.0])).unwrap();
        assert_eq!(r.value, 0.0);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(matches!(
            ScoreDistribution::from_histogram(vec![0.0, 1.0, 2.0], vec![0.5, 0.4]),
            Err(Error::Unnormalized { .. })
        ));
        assert!(ScoreDistribution::from_histogram(vec![0.0, 0.0], vec![1.0]).is_err());
        assert!(ScoreDistribution::from_samples(vec![]).is_err());
        assert!(ScoreDistribution::from_samples(vec![f64::NAN]).is_err());
        let bad = ScoreDistribution::Histogram {
            edges: vec![0.0, 1.0],
            mass: vec![2.0],
        };
        assert!(matches!(emd_1d(&bad, &samples(&[0.0])), Err(Error::Unnormalized { .. })));
    }

    #[test]
    fn histogram_from_scores() {
        let h = Histogram::from_scores(&[0.0, 0.0, 1.0, 2.0], 4);
        assert_eq!(h.edges, vec![0.0, 0.5, 1.0, 1.5, 2.0]);
        assert_eq!(h.counts, vec![2, 0, 1, 1]);
        let h = Histogram::from_scores(&[3.0; 5], 10);
        assert_eq!(h.edges, vec![3.0, 4.0]);
        assert_eq!(h.counts, vec![5]);
        assert_eq!(Histogram::from_scores(&[], 10), Histogram::default());
        let d = Histogram::from_scores(&[0.0, 1.0], 2).to_distribution().unwrap();
        assert_eq!(d.atoms(), vec![(0.25, 0.5), (0.75, 0.5)]);
    }

    #[test]
    fn collect_point_mass() {
        let g = Graph::from_edges(4, &[Edge { u: 0, v: 1 }, Edge { u: 2, v: 3 }]).unwrap();
        let d = collect_distribution(&g, &g.edge_vec(), HeuristicKind::CommonNeighbors).unwrap();
        assert_eq!(d, ScoreDistribution::Samples(vec![0.0, 0.0]));
        assert!(collect_distribution(&g, &[], HeuristicKind::CommonNeighbors).is_err());
    }
}
