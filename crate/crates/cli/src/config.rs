use std::fmt;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Deserialize;

use lpshift::augment::Augmentation;

/// A usage or configuration mistake; maps to exit code 1.
#[derive(Debug)]
pub struct Usage(pub String);

impl fmt::Display for Usage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

/// Key-value defaults shared by all subcommands. Flags take precedence.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub input: Option<PathBuf>,
    pub heuristic: Option<String>,
    pub triple: Option<String>,
    pub direction: Option<String>,
    pub valid_cap: Option<usize>,
    pub test_cap: Option<usize>,
    pub train_cap: Option<usize>,
    pub m: Option<usize>,
    pub negative_heuristic: Option<String>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub split_dirs: Vec<PathBuf>,
    #[serde(default)]
    pub methods: Vec<String>,
    #[serde(default)]
    pub ks: Vec<usize>,
    #[serde(default)]
    pub augment: Vec<Augmentation>,
    pub score_graph: Option<String>,
    pub n: Option<usize>,
    pub model: Option<String>,
    pub attach: Option<usize>,
    pub p: Option<f64>,
}

impl FileConfig {
    /// `.json` files parse as JSON, anything else as TOML.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        let is_json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
        let parsed = if is_json {
            serde_json::from_str(&text).map_err(|e| e.to_string())
        } else {
            toml::from_str(&text).map_err(|e| e.to_string())
        };
        parsed.map_err(|e| Usage(format!("invalid config {}: {e}", path.display())).into())
    }
}
