//! Ranking evaluation of heuristic predictors against per-positive
//! negatives: MRR, Hits@k, and mean ordinal rank across splits.

use std::collections::BTreeMap;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::heuristics::{HeuristicKind, PairScorer};
use crate::negatives::NegativeTable;
use crate::shift::csv_err;

/// Ties count half: `rank = 1 + #greater + #equal / 2`.
pub const TIE_CONVENTION: &str = "average";
pub const DEFAULT_KS: [usize; 4] = [1, 10, 20, 50];

pub fn rank_sample(positive: f64, negatives: &[f64]) -> Result<f64> {
    if negatives.is_empty() {
        return Err(Error::Empty("rank_sample"));
    }
    let mut greater = 0usize;
    let mut equal = 0usize;
    for &s in negatives {
        if s > positive {
            greater += 1;
        } else if s == positive {
            equal += 1;
        }
    }
    Ok(1.0 + greater as f64 + equal as f64 / 2.0)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankingReport {
    pub method: String,
    pub split: String,
    pub m: usize,
    pub tie_convention: String,
    pub mrr: f64,
    pub hits: BTreeMap<usize, f64>,
    pub n: usize,
    /// Per-sample ranks; written to `ranks.tsv`, not to the JSON report.
    #[serde(skip)]
    pub ranks: Vec<f64>,
}

impl RankingReport {
    pub fn hits_at(&self, k: usize) -> Option<f64> {
        self.hits.get(&k).copied().or_else(|| {
            (!self.ranks.is_empty()).then(|| hits_fraction(&self.ranks, k))
        })
    }
}

fn hits_fraction(ranks: &[f64], k: usize) -> f64 {
    ranks.iter().filter(|&&r| r <= k as f64).count() as f64 / ranks.len() as f64
}

pub fn evaluate(method: &str, split: &str, m: usize, ranks: Vec<f64>, ks: &[usize]) -> Result<RankingReport> {
    if ranks.is_empty() {
        return Err(Error::Empty("evaluate"));
    }
    let mrr = ranks.iter().map(|r| 1.0 / r).sum::<f64>() / ranks.len() as f64;
    let hits = ks.iter().map(|&k| (k, hits_fraction(&ranks, k))).collect();
    Ok(RankingReport {
        method: method.to_string(),
        split: split.to_string(),
        m,
        tie_convention: TIE_CONVENTION.to_string(),
        mrr,
        hits,
        n: ranks.len(),
        ranks,
    })
}

/// Scores each positive and its negatives with `kind` on `train` and ranks
/// the positive among them.
pub fn rank_table(train: &Graph, table: &NegativeTable, kind: HeuristicKind) -> Result<Vec<f64>> {
    for row in &table.rows {
        for (a, b) in std::iter::once(row.positive.endpoints()).chain(row.negatives.iter().copied()) {
            train.check_node(a)?;
            train.check_node(b)?;
            if a == b {
                return Err(Error::SelfPair(a));
            }
        }
    }
    table
        .rows
        .par_iter()
        .map_init(
            || PairScorer::new(train, kind),
            |sc, row| {
                let pos = sc.score(row.positive.u, row.positive.v);
                let negs: Vec<f64> = row.negatives.iter().map(|&(a, b)| sc.score(a, b)).collect();
                rank_sample(pos, &negs)
            },
        )
        .collect()
}

pub fn evaluate_table(
    train: &Graph,
    table: &NegativeTable,
    kind: HeuristicKind,
    split: &str,
    ks: &[usize],
) -> Result<RankingReport> {
    let ranks = rank_table(train, table, kind)?;
    evaluate(kind.label(), split, table.m, ranks, ks)
}

/// Mean ordinal rank of each method across splits.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeanRankTable {
    pub k: usize,
    pub methods: Vec<String>,
    pub splits: Vec<String>,
    /// `ordinals[s][m]`: ordinal of method `m` on split `s`.
    pub ordinals: Vec<Vec<f64>>,
    pub mean: Vec<f64>,
}

/// 1-based ordinals for descending `values`; ties share the average.
pub fn average_ordinals(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
    let mut out = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &idx in &order[i..=j] {
            out[idx] = avg;
        }
        i = j + 1;
    }
    out
}

/// Orders methods by Hits@`k` within each split and averages the ordinals.
/// Methods and splits keep their order of first appearance.
pub fn mean_rank(reports: &[RankingReport], k: usize) -> Result<MeanRankTable> {
    let mut methods: Vec<String> = Vec::new();
    let mut splits: Vec<String> = Vec::new();
    let mut cell: BTreeMap<(String, String), f64> = BTreeMap::new();
    for r in reports {
        if !methods.contains(&r.method) {
            methods.push(r.method.clone());
        }
        if !splits.contains(&r.split) {
            splits.push(r.split.clone());
        }
        let hits = r.hits_at(k).ok_or_else(|| {
            Error::InvalidParameter(format!("report {}/{} lacks Hits@{k}", r.method, r.split))
        })?;
        if cell.insert((r.split.clone(), r.method.clone()), hits).is_some() {
            return Err(Error::InvalidParameter(format!(
                "duplicate report for {} on {}",
                r.method, r.split
            )));
        }
    }
    if methods.is_empty() {
        return Err(Error::Empty("mean_rank"));
    }
    let mut ordinals = Vec::with_capacity(splits.len());
    for split in &splits {
        let values = methods
            .iter()
            .map(|m| {
                cell.get(&(split.clone(), m.clone()))
                    .copied()
                    .ok_or_else(|| Error::MissingResult {
                        method: m.clone(),
                        split: split.clone(),
                    })
            })
            .collect::<Result<Vec<f64>>>()?;
        ordinals.push(average_ordinals(&values));
    }
    let mean = (0..methods.len())
        .map(|m| ordinals.iter().map(|o| o[m]).sum::<f64>() / splits.len() as f64)
        .collect();
    Ok(MeanRankTable {
        k,
        methods,
        splits,
        ordinals,
        mean,
    })
}

/// Table convention: value x 100 to two decimals.
pub fn percent(x: f64) -> String {
    format!("{:.2}", x * 100.0)
}

pub fn write_report_json<W: Write>(reports: &[RankingReport], mut out: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, reports)?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

pub fn write_ranks_tsv<W: Write>(reports: &[RankingReport], mut out: W) -> Result<()> {
    writeln!(out, "method\tsplit\tindex\trank")?;
    for r in reports {
        for (i, rank) in r.ranks.iter().enumerate() {
            writeln!(out, "{}\t{}\t{}\t{}", r.method, r.split, i, rank)?;
        }
    }
    out.flush()?;
    Ok(())
}

/// Wide table: one row per method, one MRR column per split.
pub fn write_results_csv<W: Write>(reports: &[RankingReport], out: W) -> Result<()> {
    let mut methods: Vec<&str> = Vec::new();
    let mut splits: Vec<&str> = Vec::new();
    for r in reports {
        if !methods.contains(&r.method.as_str()) {
            methods.push(&r.method);
        }
        if !splits.contains(&r.split.as_str()) {
            splits.push(&r.split);
        }
    }
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["method"];
    header.extend(&splits);
    w.write_record(&header).map_err(csv_err)?;
    for m in &methods {
        let mut row = vec![m.to_string()];
        for s in &splits {
            let cell = reports
                .iter()
                .find(|r| r.method == *m && r.split == *s)
                .map(|r| percent(r.mrr))
                .unwrap_or_default();
            row.push(cell);
        }
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_mean_rank_csv<W: Write>(table: &MeanRankTable, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["method".to_string()];
    header.extend(table.splits.iter().cloned());
    header.push(format!("mean_rank_hits@{}", table.k));
    w.write_record(&header).map_err(csv_err)?;
    for (mi, m) in table.methods.iter().enumerate() {
        let mut row = vec![m.clone()];
        row.extend(table.ordinals.iter().map(|o| o[mi].to_string()));
        row.push(format!("{:.2}", table.mean[mi]));
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Edge;
    use crate::negatives::NegativeRow;

    #[test]
    fn rank_examples() {
        assert_eq!(rank_sample(5.0, &[1.0, 2.0, 3.0]).unwrap(), 1.0);
        let negs: Vec<f64> = (1..=250).map(f64::from).collect();
        assert_eq!(rank_sample(0.0, &negs).unwrap(), 251.0);
        assert_eq!(rank_sample(1.0, &[1.0, 1.0]).unwrap(), 2.0);
        assert!(rank_sample(1.0, &[]).is_err());
    }

    #[test]
    fn evaluate_examples() {
        let r = evaluate("RA", "s", 250, vec![1.0; 7], &[20]).unwrap();
        assert_eq!(r.mrr, 1.0);
        assert_eq!(r.hits[&20], 1.0);
        let r = evaluate("RA", "s", 250, vec![1.0, 251.0], &[1, 20]).unwrap();
        assert_eq!(r.mrr, (1.0 + 1.0 / 251.0) / 2.0);
        assert_eq!(r.hits[&1], 0.5);
        assert!(evaluate("RA", "s", 250, vec![], &[20]).is_err());
    }

    fn report(method: &str, split: &str, hits20: f64) -> RankingReport {
        RankingReport {
            method: method.into(),
            split: split.into(),
            m: 1,
            tie_convention: TIE_CONVENTION.into(),
            mrr: hits20,
            hits: BTreeMap::from([(20, hits20)]),
            n: 1,
            ranks: vec![],
        }
    }

    #[test]
    fn ordinals_and_mean_rank() {
        assert_eq!(average_ordinals(&[0.9, 0.5, 0.1]), vec![1.0, 2.0, 3.0]);
        assert_eq!(average_ordinals(&[0.5, 0.5, 0.1]), vec![1.5, 1.5, 3.0]);
        let t = mean_rank(
            &[
                report("A", "s1", 0.9),
                report("B", "s1", 0.5),
                report("A", "s2", 0.2),
                report("B", "s2", 0.4),
            ],
            20,
        )
        .unwrap();
        assert_eq!(t.methods, vec!["A", "B"]);
        assert_eq!(t.mean, vec![1.5, 1.5]);
        assert!(matches!(
            mean_rank(&[report("A", "s1", 0.9), report("B", "s1", 0.5), report("A", "s2", 0.2)], 20),
            Err(Error::MissingResult { .. })
        ));
    }

    #[test]
    fn perfect_separation_prints_100() {
        // Triangle plus a pendant: RA of (0,1) is positive, negatives score 0.
        let g = Graph::from_edges(5, &[Edge { u: 0, v: 2 }, Edge { u: 1, v: 2 }, Edge { u: 3, v: 4 }]).unwrap();
        let table = NegativeTable {
            m: 2,
            heuristic: HeuristicKind::CommonNeighbors,
            seed: 0,
            rows: vec![NegativeRow { positive: Edge { u: 0, v: 1 }, negatives: vec![(0, 3), (4, 1)] }],
        };
        let r = evaluate_table(&g, &table, HeuristicKind::ResourceAllocation, "toy", &[20]).unwrap();
        assert_eq!(percent(r.mrr), "100.00");
    }

    #[test]
    fn csv_outputs() {
        let reports = vec![report("RA", "CN (0, 1, 2) forward", 0.3222), report("CN", "CN (0, 1, 2) forward", 0.1)];
        let mut buf = Vec::new();
        write_results_csv(&reports, &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "method,\"CN (0, 1, 2) forward\"\nRA,32.22\nCN,10.00\n"
        );
    }
}
