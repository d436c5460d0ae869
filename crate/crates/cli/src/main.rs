//! `lpshift` command-line front end.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 data error.

mod config;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use config::{FileConfig, Usage};
use lpshift::augment::Augmentation;
use lpshift::negatives::DEFAULT_M;
use lpshift::pipeline::{
    self, AugmentConfig, EmdConfig, EvaluateConfig, NegativesConfig, SplitConfig, SynthConfig,
};
use lpshift::shift::ScoreGraph;
use lpshift::splitter::{Direction, DEFAULT_EVAL_CAP};
use lpshift::synth::SynthModel;
use lpshift::HeuristicKind;

const WORKERS_ENV: &str = "LPSHIFT_WORKERS";

#[derive(Parser, Debug)]
#[command(name = "lpshift", version, about = "Heuristic-shift link prediction splits and evaluation")]
struct Cli {
    /// TOML or JSON file with default values for any flag.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a seeded synthetic graph.
    Synth(SynthArgs),
    /// Split an edge list by heuristic thresholds.
    Split(SplitArgs),
    /// Generate per-positive hard negatives for a split.
    Negatives(NegativesArgs),
    /// Rank positives against negatives with heuristic scorers.
    Evaluate(EvaluateArgs),
    /// Train-vs-test heuristic score EMD, with optional augmentations.
    Emd(EmdArgs),
    /// Apply one augmentation to a split's training graph.
    Augment(AugmentArgs),
}

#[derive(Args, Debug)]
struct SynthArgs {
    #[arg(long)]
    n: Option<usize>,
    /// `ba` or `er`.
    #[arg(long)]
    model: Option<String>,
    /// Edges per new node (ba).
    #[arg(long)]
    attach: Option<usize>,
    /// Edge probability (er).
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SplitArgs {
    #[arg(long)]
    input: Option<PathBuf>,
    /// cn, pa, sp or ra.
    #[arg(long)]
    heuristic: Option<String>,
    /// Thresholds as labels, e.g. `0,1,2` or `inf,6,4` for sp.
    #[arg(long)]
    triple: Option<String>,
    /// forward or inverse.
    #[arg(long)]
    direction: Option<String>,
    #[arg(long)]
    valid_cap: Option<usize>,
    #[arg(long)]
    test_cap: Option<usize>,
    #[arg(long)]
    train_cap: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct NegativesArgs {
    /// The edge list the split was made from.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    split_dir: Option<PathBuf>,
    #[arg(long)]
    m: Option<usize>,
    /// Heuristic that ranks candidate corruptions.
    #[arg(long)]
    negative_heuristic: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Debug)]
struct EvaluateArgs {
    #[arg(long = "split-dir", num_args = 1..)]
    split_dirs: Vec<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    methods: Vec<String>,
    #[arg(long, value_delimiter = ',')]
    ks: Vec<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct EmdArgs {
    #[arg(long = "split-dir", num_args = 1..)]
    split_dirs: Vec<PathBuf>,
    #[arg(long = "heuristics", value_delimiter = ',')]
    heuristics: Vec<String>,
    /// DropEdge probability; repeatable.
    #[arg(long = "dropedge")]
    dropedge: Vec<f64>,
    /// EPS filter as `heuristic:k`; repeatable.
    #[arg(long = "eps")]
    eps: Vec<String>,
    /// train or full.
    #[arg(long)]
    score_graph: Option<String>,
    /// Edge list, needed with `--score-graph full`.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct AugmentArgs {
    #[arg(long)]
    split_dir: Option<PathBuf>,
    #[arg(long, conflicts_with = "eps")]
    dropedge: Option<f64>,
    /// `heuristic:k`.
    #[arg(long)]
    eps: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<Usage>().is_some() {
        return 1;
    }
    match err.downcast_ref::<lpshift::Error>() {
        Some(lpshift::Error::InvalidSpec(_) | lpshift::Error::InvalidParameter(_)) => 1,
        _ => 2,
    }
}

fn configure_workers() -> Result<()> {
    let Ok(raw) = std::env::var(WORKERS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|_| Usage(format!("{WORKERS_ENV} must be a positive integer, got {raw:?}")))?;
    if n == 0 {
        return Err(Usage(format!("{WORKERS_ENV} must be positive")).into());
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .context("configuring worker pool")?;
    Ok(())
}

fn print_summary<T: Serialize>(value: &T) -> Result<()> {
    let mut out = std::io::stdout().lock();
    let written = serde_json::to_writer_pretty(&mut out, value)
        .map_err(std::io::Error::from)
        .and_then(|()| writeln!(out));
    match written {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn run(cli: Cli) -> Result<()> {
    configure_workers()?;
    let file = match &cli.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    match cli.command {
        Command::Synth(a) => print_summary(&pipeline::cmd_synth(&synth_config(a, &file)?)?),
        Command::Split(a) => print_summary(&pipeline::cmd_split(&split_config(a, &file)?)?),
        Command::Negatives(a) => print_summary(&pipeline::cmd_negatives(&negatives_config(a, &file)?)?),
        Command::Evaluate(a) => print_summary(&pipeline::cmd_evaluate(&evaluate_config(a, &file)?)?),
        Command::Emd(a) => print_summary(&pipeline::cmd_emd(&emd_config(a, &file)?)?),
        Command::Augment(a) => print_summary(&pipeline::cmd_augment(&augment_config(a, &file)?)?),
    }
}

fn required<T>(value: Option<T>, name: &str) -> Result<T> {
    value.ok_or_else(|| Usage(format!("missing required setting `{name}` (flag or config key)")).into())
}

fn parse<T>(raw: &str, what: &str) -> Result<T>
where
    T: std::str::FromStr,
    T::Err: std::fmt::Display,
{
    raw.parse().map_err(|e| Usage(format!("invalid {what} {raw:?}: {e}")).into())
}

fn parse_list<T>(raw: &[String], what: &str) -> Result<Vec<T>>
where
    T: std::str::FromStr,
    T::Err: std::fmt::Display,
{
    raw.iter().map(|s| parse(s, what)).collect()
}

fn parse_eps(raw: &str) -> Result<Augmentation> {
    let (h, k) = raw
        .split_once(':')
        .ok_or_else(|| Usage(format!("EPS takes `heuristic:k`, got {raw:?}")))?;
    Ok(Augmentation::Eps {
        heuristic: parse(h, "heuristic")?,
        k: parse(k, "EPS k")?,
    })
}

fn synth_config(a: SynthArgs, f: &FileConfig) -> Result<SynthConfig> {
    let model_name = required(a.model.or_else(|| f.model.clone()), "model")?;
    let model = match model_name.to_ascii_lowercase().as_str() {
        "ba" => SynthModel::Ba {
            attach: required(a.attach.or(f.attach), "attach")?,
        },
        "er" => SynthModel::Er {
            p: required(a.p.or(f.p), "p")?,
        },
        other => return Err(Usage(format!("unknown model {other:?}, expected ba or er")).into()),
    };
    Ok(SynthConfig {
        n: required(a.n.or(f.n), "n")?,
        model,
        seed: required(a.seed.or(f.seed), "seed")?,
        out_dir: required(a.out.or_else(|| f.out.clone()), "out")?,
    })
}

fn split_config(a: SplitArgs, f: &FileConfig) -> Result<SplitConfig> {
    let heuristic = required(a.heuristic.or_else(|| f.heuristic.clone()), "heuristic")?;
    let triple = required(a.triple.or_else(|| f.triple.clone()), "triple")?;
    let direction = a.direction.or_else(|| f.direction.clone());
    Ok(SplitConfig {
        input: required(a.input.or_else(|| f.input.clone()), "input")?,
        heuristic: parse(&heuristic, "heuristic")?,
        triple: parse(&triple, "triple")?,
        direction: match direction {
            Some(d) => parse(&d, "direction")?,
            None => Direction::Forward,
        },
        valid_cap: a.valid_cap.or(f.valid_cap).unwrap_or(DEFAULT_EVAL_CAP),
        test_cap: a.test_cap.or(f.test_cap).unwrap_or(DEFAULT_EVAL_CAP),
        train_cap: a.train_cap.or(f.train_cap),
        seed: required(a.seed.or(f.seed), "seed")?,
        out_dir: required(a.out.or_else(|| f.out.clone()), "out")?,
    })
}

fn negatives_config(a: NegativesArgs, f: &FileConfig) -> Result<NegativesConfig> {
    let heuristic = a
        .negative_heuristic
        .or_else(|| f.negative_heuristic.clone())
        .unwrap_or_else(|| "cn".to_string());
    Ok(NegativesConfig {
        input: required(a.input.or_else(|| f.input.clone()), "input")?,
        split_dir: required(a.split_dir.or_else(|| f.split_dirs.first().cloned()), "split_dir")?,
        m: a.m.or(f.m).unwrap_or(DEFAULT_M),
        heuristic: parse(&heuristic, "heuristic")?,
        seed: required(a.seed.or(f.seed), "seed")?,
    })
}

fn non_empty<T: Clone>(flag: Vec<T>, file: &[T]) -> Vec<T> {
    if flag.is_empty() {
        file.to_vec()
    } else {
        flag
    }
}

fn evaluate_config(a: EvaluateArgs, f: &FileConfig) -> Result<EvaluateConfig> {
    let split_dirs = non_empty(a.split_dirs, &f.split_dirs);
    if split_dirs.is_empty() {
        return Err(Usage("missing required setting `split_dirs` (flag or config key)".into()).into());
    }
    let methods = non_empty(a.methods, &f.methods);
    let methods = if methods.is_empty() {
        HeuristicKind::ALL.to_vec()
    } else {
        parse_list(&methods, "method")?
    };
    let ks = non_empty(a.ks, &f.ks);
    Ok(EvaluateConfig {
        split_dirs,
        methods,
        ks: if ks.is_empty() { lpshift::eval::DEFAULT_KS.to_vec() } else { ks },
        out_dir: required(a.out.or_else(|| f.out.clone()), "out")?,
    })
}

fn emd_config(a: EmdArgs, f: &FileConfig) -> Result<EmdConfig> {
    let split_dirs = non_empty(a.split_dirs, &f.split_dirs);
    if split_dirs.is_empty() {
        return Err(Usage("missing required setting `split_dirs` (flag or config key)".into()).into());
    }
    let heuristics = non_empty(a.heuristics, &f.methods);
    let heuristics = if heuristics.is_empty() {
        HeuristicKind::ALL.to_vec()
    } else {
        parse_list(&heuristics, "heuristic")?
    };
    let mut augmentations: Vec<Augmentation> = a.dropedge.iter().map(|&p| Augmentation::DropEdge { p }).collect();
    for raw in &a.eps {
        augmentations.push(parse_eps(raw)?);
    }
    if augmentations.is_empty() {
        augmentations = f.augment.clone();
    }
    let score_graph = match a.score_graph.or_else(|| f.score_graph.clone()).as_deref() {
        None | Some("train") => ScoreGraph::Train,
        Some("full") => ScoreGraph::Full,
        Some(other) => return Err(Usage(format!("score graph must be train or full, got {other:?}")).into()),
    };
    Ok(EmdConfig {
        split_dirs,
        heuristics,
        augmentations,
        seed: required(a.seed.or(f.seed), "seed")?,
        score_graph,
        input: a.input.or_else(|| f.input.clone()),
        out_dir: required(a.out.or_else(|| f.out.clone()), "out")?,
    })
}

fn augment_config(a: AugmentArgs, f: &FileConfig) -> Result<AugmentConfig> {
    let augmentation = match (a.dropedge, a.eps) {
        (Some(p), None) => Augmentation::DropEdge { p },
        (None, Some(raw)) => parse_eps(&raw)?,
        _ => match f.augment.as_slice() {
            [one] => one.clone(),
            _ => return Err(Usage("augment needs exactly one of --dropedge or --eps".into()).into()),
        },
    };
    augmentation.validate()?;
    Ok(AugmentConfig {
        split_dir: required(a.split_dir.or_else(|| f.split_dirs.first().cloned()), "split_dir")?,
        augmentation,
        seed: required(a.seed.or(f.seed), "seed")?,
        out_dir: required(a.out.or_else(|| f.out.clone()), "out")?,
    })
}
