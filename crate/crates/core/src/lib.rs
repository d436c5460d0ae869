//! Structural distribution-shift toolkit for link prediction.
//!
//! Scores edges with neighborhood heuristics, splits graphs into
//! threshold-separated train/valid/test sets, generates heuristic-ranked
//! negatives, evaluates heuristic predictors with ranking metrics, measures
//! train/test shift with the 1-D Earth Mover's Distance, and applies
//! structure-modifying augmentations.

pub mod augment;
pub mod error;
pub mod eval;
pub mod graph;
pub mod heuristics;
pub mod negatives;
pub mod pipeline;
pub mod rng;
pub mod shift;
pub mod splitter;
pub mod synth;

pub use error::{Error, Result};
pub use graph::{Edge, Graph, NodeId};
pub use heuristics::HeuristicKind;
