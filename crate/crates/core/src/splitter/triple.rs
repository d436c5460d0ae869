use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::heuristics::HeuristicKind;

/// One threshold as written by a user: a number (`0`, `2.5`, `5k`) or `inf`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ThresholdLabel {
    Finite(f64),
    Infinite,
}

impl FromStr for ThresholdLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase();
        if matches!(t.as_str(), "inf" | "infinity" | "∞") {
            return Ok(ThresholdLabel::Infinite);
        }
        let (digits, scale) = match t.strip_suffix('k') {
            Some(d) => (d, 1_000.0),
            None => (t.as_str(), 1.0),
        };
        match digits.parse::<f64>() {
            Ok(x) if x.is_finite() && x >= 0.0 => Ok(ThresholdLabel::Finite(x * scale)),
            _ => Err(Error::InvalidSpec(format!("bad threshold {s:?}"))),
        }
    }
}

impl fmt::Display for ThresholdLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ThresholdLabel::Finite(x) => write!(f, "{x}"),
            ThresholdLabel::Infinite => f.write_str("inf"),
        }
    }
}

/// A `(train, valid, test)` threshold triple in label space.
///
/// For the shortest-path heuristic the labels are path lengths, so
/// `(inf, 6, 4)` means: train on disconnected pairs, validate on pairs at
/// distance >= 6, test on pairs at distance <= 4.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LabelTriple(pub [ThresholdLabel; 3]);

impl FromStr for LabelTriple {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let inner = s.trim().trim_start_matches('(').trim_end_matches(')');
        let parts: Vec<&str> = inner.split(',').collect();
        if parts.len() != 3 {
            return Err(Error::InvalidSpec(format!("expected three thresholds, got {s:?}")));
        }
        Ok(LabelTriple([parts[0].parse()?, parts[1].parse()?, parts[2].parse()?]))
    }
}

impl fmt::Display for LabelTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c] = self.0;
        write!(f, "({a}, {b}, {c})")
    }
}

impl LabelTriple {
    /// Score-space bounds `[train_bound, valid_bound, test_min]`.
    pub fn to_score_bounds(&self, kind: HeuristicKind) -> Result<[f64; 3]> {
        let mut out = [0.0; 3];
        for (slot, label) in out.iter_mut().zip(self.0) {
            *slot = match (kind, label) {
                (HeuristicKind::ShortestPathScore, ThresholdLabel::Infinite) => 0.0,
                (HeuristicKind::ShortestPathScore, ThresholdLabel::Finite(len)) => {
                    if len < 1.0 {
                        return Err(Error::InvalidSpec(format!(
                            "shortest-path length must be >= 1, got {len}"
                        )));
                    }
                    1.0 / len
                }
                (_, ThresholdLabel::Finite(x)) => x,
                (_, ThresholdLabel::Infinite) => {
                    return Err(Error::InvalidSpec(format!(
                        "infinite threshold is only meaningful for sp, not {kind}"
                    )))
                }
            };
        }
        Ok(out)
    }
}
