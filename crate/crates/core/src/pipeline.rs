//! End-to-end commands over on-disk artifacts.
//!
//! Each command takes a typed config, writes its outputs under one directory
//! and returns a serializable summary. Outputs never embed filesystem paths,
//! so equal inputs and configs give byte-identical trees.

use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::augment::{AugmentManifest, Augmentation, AugmentationSpec};
use crate::error::{Error, Result};
use crate::eval::{self, RankingReport};
use crate::graph::{ingest_edge_list, Graph, IngestSummary, Ingested, NodeLabels};
use crate::heuristics::HeuristicKind;
use crate::negatives::{read_negatives, write_negatives, NegativeSampler, NegativeTable};
use crate::shift::{emd_report, write_emd_csv, EmdCase, EmdRow, ScoreGraph};
use crate::splitter::{read_split, split_graph, write_edge_tsv, write_split, Direction, LabelTriple, SplitManifest, SplitSpec};
use crate::synth::{synth, SynthModel};

pub const NODES_FILE: &str = "nodes.tsv";
pub const INGEST_FILE: &str = "ingest.json";
pub const VALID_NEG_FILE: &str = "valid_neg.tsv";
pub const TEST_NEG_FILE: &str = "test_neg.tsv";
pub const NEGATIVES_FILE: &str = "negatives.json";
pub const REPORT_FILE: &str = "report.json";
pub const RANKS_FILE: &str = "ranks.tsv";
pub const RESULTS_FILE: &str = "results.csv";
pub const MEAN_RANK_FILE: &str = "mean_rank.csv";
pub const EMD_FILE: &str = "emd.csv";
pub const AUGMENTED_FILE: &str = "train_augmented.tsv";
pub const AUGMENT_MANIFEST_FILE: &str = "augment.json";
pub const SYNTH_FILE: &str = "edges.tsv";

const NEGATIVE_PROCEDURE: &str = "per positive (u, v): corrupt each endpoint with every train-covered node w, \
drop pairs present in the full graph or among split positives, score on the train graph, \
keep the top ceil(m/2) (u, w) and floor(m/2) (w, v), backfill from the other side, break ties by seeded key";

pub fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

/// Reads and ingests an edge list, returning it with the input checksum.
pub fn load_input(path: &Path) -> Result<(Ingested, String)> {
    let bytes = fs::read(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => Error::MissingInput(format!("input {} not found", path.display())),
        _ => Error::Io(e),
    })?;
    let sha = sha256_hex(&bytes);
    Ok((ingest_edge_list(&bytes[..])?, sha))
}

fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

fn write_labels(path: &Path, labels: &NodeLabels) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    for (id, label) in labels.0.iter().enumerate() {
        writeln!(out, "{id}\t{label}")?;
    }
    out.flush()?;
    Ok(())
}

fn write_graph(path: &Path, g: &Graph) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    g.write_edge_list(&mut out)?;
    out.flush()?;
    Ok(())
}

#[derive(Clone, Debug)]
pub struct SynthConfig {
    pub n: usize,
    pub model: SynthModel,
    pub seed: u64,
    pub out_dir: PathBuf,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SynthSummary {
    pub n: usize,
    pub model: SynthModel,
    pub seed: u64,
    pub num_edges: usize,
}

/// Writes `edges.tsv` for a seeded synthetic graph.
pub fn cmd_synth(cfg: &SynthConfig) -> Result<SynthSummary> {
    let g = synth(cfg.n, cfg.model, cfg.seed)?;
    fs::create_dir_all(&cfg.out_dir)?;
    write_graph(&cfg.out_dir.join(SYNTH_FILE), &g)?;
    Ok(SynthSummary {
        n: cfg.n,
        model: cfg.model,
        seed: cfg.seed,
        num_edges: g.num_edges(),
    })
}

#[derive(Clone, Debug)]
pub struct SplitConfig {
    pub input: PathBuf,
    pub heuristic: HeuristicKind,
    pub triple: LabelTriple,
    pub direction: Direction,
    pub valid_cap: usize,
    pub test_cap: usize,
    pub train_cap: Option<usize>,
    pub seed: u64,
    pub out_dir: PathBuf,
}

impl SplitConfig {
    pub fn spec(&self) -> Result<SplitSpec> {
        let mut spec = SplitSpec::from_labels(self.heuristic, &self.triple, self.direction, self.seed)?;
        spec.valid_cap = self.valid_cap;
        spec.test_cap = self.test_cap;
        spec.train_cap = self.train_cap;
        spec.validate()?;
        Ok(spec)
    }

    /// Split name in label space, e.g. `CN (0, 1, 2) forward`.
    pub fn label(&self) -> String {
        format!("{} {} {}", self.heuristic.label(), self.triple, self.direction)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SplitSummary {
    pub label: String,
    pub bounds: [f64; 3],
    pub ingest: IngestSummary,
    pub num_nodes: usize,
    pub input_edges: usize,
    pub train: usize,
    pub valid: usize,
    pub test: usize,
    pub dropped: crate::splitter::DroppedCounts,
    pub warnings: Vec<String>,
}

/// Ingest, score, categorize, orient, finalize and write one split.
pub fn cmd_split(cfg: &SplitConfig) -> Result<SplitSummary> {
    let spec = cfg.spec()?;
    let (ingested, sha) = load_input(&cfg.input)?;
    let g = Graph::from_edges(ingested.num_nodes(), &ingested.edges)?;
    let mut ds = split_graph(&g, &spec)?;
    ds.manifest.label = cfg.label();
    ds.manifest.label_triple = Some(cfg.triple.to_string());
    ds.manifest.input_sha256 = Some(sha);
    write_split(&ds, &cfg.out_dir)?;
    write_labels(&cfg.out_dir.join(NODES_FILE), &ingested.labels)?;
    write_json(&cfg.out_dir.join(INGEST_FILE), &ingested.summary)?;
    let m = &ds.manifest;
    Ok(SplitSummary {
        label: m.label.clone(),
        bounds: [spec.train_bound, spec.valid_bound, spec.test_min],
        ingest: ingested.summary,
        num_nodes: m.num_nodes,
        input_edges: m.input_edges,
        train: m.counts.train,
        valid: m.counts.valid,
        test: m.counts.test,
        dropped: m.dropped.clone(),
        warnings: m.warnings.clone(),
    })
}

#[derive(Clone, Debug)]
pub struct NegativesConfig {
    pub input: PathBuf,
    pub split_dir: PathBuf,
    pub m: usize,
    pub heuristic: HeuristicKind,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TableSummary {
    pub positives: usize,
    pub short_rows: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NegativesSummary {
    pub m: usize,
    pub heuristic: HeuristicKind,
    pub seed: u64,
    pub procedure: String,
    pub valid: TableSummary,
    pub test: TableSummary,
    pub warnings: Vec<String>,
}

fn table_summary(name: &str, table: &NegativeTable, warnings: &mut Vec<String>) -> TableSummary {
    let short = table.short_rows();
    if short > 0 {
        warnings.push(format!(
            "{short} of {} {name} positives have fewer than m={} negatives: candidate pool exhausted, all available candidates kept",
            table.rows.len(),
            table.m
        ));
    }
    TableSummary {
        positives: table.rows.len(),
        short_rows: short,
    }
}

/// Writes `valid_neg.tsv`, `test_neg.tsv` and `negatives.json` into the split directory.
pub fn cmd_negatives(cfg: &NegativesConfig) -> Result<NegativesSummary> {
    let ds = read_split(&cfg.split_dir)?;
    let (ingested, sha) = load_input(&cfg.input)?;
    if let Some(expected) = &ds.manifest.input_sha256 {
        if *expected != sha {
            return Err(Error::InvalidParameter(format!(
                "input checksum {sha} does not match the split's input {expected}"
            )));
        }
    }
    let full = Graph::from_edges(ingested.num_nodes(), &ingested.edges)?;
    if full.num_nodes() != ds.manifest.num_nodes {
        return Err(Error::InvalidParameter(format!(
            "input has {} nodes, split expects {}",
            full.num_nodes(),
            ds.manifest.num_nodes
        )));
    }
    let sampler = NegativeSampler::new(&full, &ds, cfg.m, cfg.heuristic, cfg.seed)?;
    let valid = sampler.table(&ds.valid_edges)?;
    let test = sampler.table(&ds.test_edges)?;
    for (file, table) in [(VALID_NEG_FILE, &valid), (TEST_NEG_FILE, &test)] {
        let mut out = BufWriter::new(File::create(cfg.split_dir.join(file))?);
        write_negatives(table, &mut out)?;
    }
    let mut warnings = Vec::new();
    let summary = NegativesSummary {
        m: cfg.m,
        heuristic: cfg.heuristic,
        seed: cfg.seed,
        procedure: NEGATIVE_PROCEDURE.to_string(),
        valid: table_summary("valid", &valid, &mut warnings),
        test: table_summary("test", &test, &mut warnings),
        warnings,
    };
    write_json(&cfg.split_dir.join(NEGATIVES_FILE), &summary)?;
    Ok(summary)
}

#[derive(Clone, Debug)]
pub struct EvaluateConfig {
    pub split_dirs: Vec<PathBuf>,
    pub methods: Vec<HeuristicKind>,
    pub ks: Vec<usize>,
    pub out_dir: PathBuf,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EvaluateRow {
    pub method: String,
    pub split: String,
    /// MRR x 100, two decimals.
    pub mrr: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EvaluateSummary {
    pub rows: Vec<EvaluateRow>,
    pub mean_rank: Option<eval::MeanRankTable>,
}

fn read_test_negatives(split_dir: &Path) -> Result<NegativeTable> {
    let path = split_dir.join(TEST_NEG_FILE);
    if !path.exists() {
        return Err(Error::MissingInput(format!("no test negatives in {}", split_dir.display())));
    }
    read_negatives(BufReader::new(File::open(path)?))
}

/// Ranks every test positive against its negatives for each method and split.
pub fn evaluate_splits(cfg: &EvaluateConfig) -> Result<Vec<RankingReport>> {
    if cfg.split_dirs.is_empty() || cfg.methods.is_empty() {
        return Err(Error::InvalidParameter("evaluation needs at least one split and one method".into()));
    }
    let mut reports = Vec::new();
    for dir in &cfg.split_dirs {
        let ds = read_split(dir)?;
        let table = read_test_negatives(dir)?;
        for &kind in &cfg.methods {
            reports.push(eval::evaluate_table(&ds.train_graph, &table, kind, &ds.manifest.label, &cfg.ks)?);
        }
    }
    Ok(reports)
}

/// Writes `report.json`, `ranks.tsv`, `results.csv` and, for two or more
/// splits, `mean_rank.csv` ranked by Hits@20.
pub fn cmd_evaluate(cfg: &EvaluateConfig) -> Result<EvaluateSummary> {
    let reports = evaluate_splits(cfg)?;
    fs::create_dir_all(&cfg.out_dir)?;
    eval::write_report_json(&reports, BufWriter::new(File::create(cfg.out_dir.join(REPORT_FILE))?))?;
    eval::write_ranks_tsv(&reports, BufWriter::new(File::create(cfg.out_dir.join(RANKS_FILE))?))?;
    eval::write_results_csv(&reports, BufWriter::new(File::create(cfg.out_dir.join(RESULTS_FILE))?))?;
    let mean_rank = if cfg.split_dirs.len() >= 2 {
        let table = eval::mean_rank(&reports, 20)?;
        eval::write_mean_rank_csv(&table, BufWriter::new(File::create(cfg.out_dir.join(MEAN_RANK_FILE))?))?;
        Some(table)
    } else {
        None
    };
    let rows = reports
        .iter()
        .map(|r| EvaluateRow {
            method: r.method.clone(),
            split: r.split.clone(),
            mrr: eval::percent(r.mrr),
        })
        .collect();
    Ok(EvaluateSummary { rows, mean_rank })
}

#[derive(Clone, Debug)]
pub struct EmdConfig {
    pub split_dirs: Vec<PathBuf>,
    pub heuristics: Vec<HeuristicKind>,
    pub augmentations: Vec<Augmentation>,
    pub seed: u64,
    pub score_graph: ScoreGraph,
    /// Required when scoring on the full graph.
    pub input: Option<PathBuf>,
    pub out_dir: PathBuf,
}

/// Train-vs-test score EMD per split, heuristic and augmentation variant.
///
/// Augmentations modify the scoring graph: the train graph, or the full
/// graph under [`ScoreGraph::Full`].
pub fn cmd_emd(cfg: &EmdConfig) -> Result<Vec<EmdRow>> {
    if cfg.split_dirs.is_empty() || cfg.heuristics.is_empty() {
        return Err(Error::InvalidParameter("emd needs at least one split and one heuristic".into()));
    }
    for a in &cfg.augmentations {
        a.validate()?;
    }
    let full = match cfg.score_graph {
        ScoreGraph::Train => None,
        ScoreGraph::Full => {
            let path = cfg
                .input
                .as_ref()
                .ok_or_else(|| Error::MissingInput("full-graph scoring needs the input edge list".into()))?;
            let (ingested, _) = load_input(path)?;
            Some(Graph::from_edges(ingested.num_nodes(), &ingested.edges)?)
        }
    };
    let mut rows = Vec::new();
    for dir in &cfg.split_dirs {
        let ds = read_split(dir)?;
        let base = match &full {
            Some(g) => {
                if g.num_nodes() != ds.manifest.num_nodes {
                    return Err(Error::InvalidParameter("input does not match split node count".into()));
                }
                g
            }
            None => &ds.train_graph,
        };
        let mut variants = vec![("baseline".to_string(), None)];
        for a in &cfg.augmentations {
            let spec = AugmentationSpec {
                augmentation: a.clone(),
                seed: cfg.seed,
            };
            variants.push((a.variant_label(), Some(spec.apply(base)?.graph)));
        }
        let cases: Vec<EmdCase<'_>> = variants
            .iter()
            .map(|(variant, g)| EmdCase {
                split_label: ds.manifest.label.clone(),
                variant: variant.clone(),
                graph: g.as_ref().unwrap_or(base),
                train_edges: &ds.train_edges,
                test_edges: &ds.test_edges,
            })
            .collect();
        rows.extend(emd_report(&cases, &cfg.heuristics, cfg.score_graph)?);
    }
    fs::create_dir_all(&cfg.out_dir)?;
    write_emd_csv(&rows, BufWriter::new(File::create(cfg.out_dir.join(EMD_FILE))?))?;
    Ok(rows)
}

#[derive(Clone, Debug)]
pub struct AugmentConfig {
    pub split_dir: PathBuf,
    pub augmentation: Augmentation,
    pub seed: u64,
    pub out_dir: PathBuf,
}

/// Applies one augmentation to a split's train graph.
pub fn cmd_augment(cfg: &AugmentConfig) -> Result<AugmentManifest> {
    let ds = read_split(&cfg.split_dir)?;
    let spec = AugmentationSpec {
        augmentation: cfg.augmentation.clone(),
        seed: cfg.seed,
    };
    let out = spec.apply(&ds.train_graph)?;
    fs::create_dir_all(&cfg.out_dir)?;
    write_edge_tsv(&cfg.out_dir.join(AUGMENTED_FILE), &out.graph.edge_vec())?;
    write_json(&cfg.out_dir.join(AUGMENT_MANIFEST_FILE), &out.manifest)?;
    Ok(out.manifest)
}

/// Reads the manifest of a split directory.
pub fn split_manifest(dir: &Path) -> Result<SplitManifest> {
    Ok(read_split(dir)?.manifest)
}
