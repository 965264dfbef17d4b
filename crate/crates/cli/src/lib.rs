//! Command-line front end: argument parsing, config resolution and the
//! five subcommands.

pub mod commands;
pub mod config;

use std::path::PathBuf;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use namerace_core::inference::{Imputation, Strategy};
use namerace_core::WeightScheme;

pub use commands::Outcome;
pub use config::{RunConfig, TableSource};

/// Exit status for a run with skipped input rows.
pub const EXIT_PARTIAL: i32 = 1;
/// Exit status for configuration, schema and I/O failures.
pub const EXIT_FATAL: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "namerace",
    version,
    about = "Name-based demographic inference and bias audits"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// TOML run config, or a JSON manifest from an earlier run.
    #[arg(long, global = true, env = "NAMERACE_CONFIG")]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, env = "NAMERACE_SEED")]
    pub seed: Option<u64>,
    #[arg(long, global = true, env = "NAMERACE_OUT_DIR")]
    pub out_dir: Option<PathBuf>,
    /// Worker threads (0: one per core).
    #[arg(long, global = true, env = "NAMERACE_THREADS")]
    pub threads: Option<usize>,
    /// Family-name reference file (census surname layout).
    #[arg(long, global = true, env = "NAMERACE_FAMILY")]
    pub family: Option<PathBuf>,
    /// Given-name reference file (mortgage given-name layout).
    #[arg(long, global = true, env = "NAMERACE_GIVEN")]
    pub given: Option<PathBuf>,
    /// Author corpus with author_id, first_name and last_name columns.
    #[arg(long, global = true, env = "NAMERACE_AUTHORS")]
    pub authors: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse reference files into canonical tables and ingest reports.
    Ingest,
    /// Per-author distributions, assignments and a corpus summary.
    Infer(InferArgs),
    /// Threshold sweep with representation ratios.
    Sweep(SweepArgs),
    /// Weight grid over simulated name distributions.
    Simulate(SimulateArgs),
    /// Model comparison at a single threshold.
    Snapshot(SnapshotArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum StrategyArg {
    FamilyOnly,
    GivenOnly,
    Combined,
    TwoStep,
}

impl From<StrategyArg> for Strategy {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::FamilyOnly => Strategy::FamilyOnly,
            StrategyArg::GivenOnly => Strategy::GivenOnly,
            StrategyArg::Combined => Strategy::Combined,
            StrategyArg::TwoStep => Strategy::TwoStep,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ImputationArg {
    None,
    DatasetAggregate,
    TableAggregate,
    OtherNames,
}

impl From<ImputationArg> for Imputation {
    fn from(i: ImputationArg) -> Self {
        match i {
            ImputationArg::None => Imputation::None,
            ImputationArg::DatasetAggregate => Imputation::DatasetAggregate,
            ImputationArg::TableAggregate => Imputation::TableAggregate,
            ImputationArg::OtherNames => Imputation::OtherNames,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SchemeArg {
    Stdev,
    Entropy,
    RawEntropy,
}

impl From<SchemeArg> for WeightScheme {
    fn from(s: SchemeArg) -> Self {
        match s {
            SchemeArg::Stdev => WeightScheme::Stdev,
            SchemeArg::Entropy => WeightScheme::Entropy,
            SchemeArg::RawEntropy => WeightScheme::RawEntropy,
        }
    }
}

#[derive(Debug, Default, Args)]
pub struct WeightArgs {
    #[arg(long, value_enum)]
    pub scheme: Option<SchemeArg>,
    #[arg(long)]
    pub exponent: Option<f64>,
}

#[derive(Debug, Default, Args)]
pub struct InferArgs {
    #[arg(long, value_enum)]
    pub strategy: Option<StrategyArg>,
    /// Assignment threshold in (0, 1].
    #[arg(long)]
    pub threshold: Option<f64>,
    /// Drop any configured threshold and report distributions only.
    #[arg(long, conflicts_with = "threshold")]
    pub fractional: bool,
    #[arg(long, value_enum)]
    pub imputation: Option<ImputationArg>,
    /// Use the given-name table expanded towards the family-name aggregate.
    #[arg(long)]
    pub given_normalized: Option<bool>,
    /// One unit per distinct normalized (given, family) pair.
    #[arg(long)]
    pub distinct_names: bool,
    #[command(flatten)]
    pub weight: WeightArgs,
}

#[derive(Debug, Default, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub start: Option<f64>,
    #[arg(long)]
    pub stop: Option<f64>,
    #[arg(long)]
    pub step: Option<f64>,
    #[arg(long)]
    pub distinct_names: bool,
    #[command(flatten)]
    pub weight: WeightArgs,
}

#[derive(Debug, Default, Args)]
pub struct SimulateArgs {
    /// Number of samples per name kind; the grid has k squared cells.
    #[arg(long)]
    pub k: Option<usize>,
    /// Symmetric Dirichlet concentration.
    #[arg(long)]
    pub alpha: Option<f64>,
    #[command(flatten)]
    pub weight: WeightArgs,
}

#[derive(Debug, Default, Args)]
pub struct SnapshotArgs {
    #[arg(long)]
    pub threshold: Option<f64>,
    #[arg(long)]
    pub distinct_names: bool,
    #[command(flatten)]
    pub weight: WeightArgs,
}

fn apply_weight(w: &WeightArgs, cfg: &mut namerace_core::WeightConfig) {
    if let Some(s) = w.scheme {
        cfg.scheme = s.into();
    }
    if let Some(e) = w.exponent {
        cfg.exponent = e;
    }
}

fn set_distinct(cfg: &mut RunConfig, on: bool) {
    if let (true, Some(a)) = (on, cfg.authors.as_mut()) {
        a.distinct_names = true;
    }
}

/// Effective configuration: the config file (if any), then flags.
pub fn resolve_config(cli: &Cli) -> anyhow::Result<RunConfig> {
    let g = &cli.global;
    let mut cfg = match &g.config {
        Some(p) => RunConfig::load(p)?,
        None => {
            let mut c = RunConfig::default();
            c.rebase(&std::env::current_dir().context("no working directory")?);
            c
        }
    };
    if let Some(s) = g.seed {
        cfg.seed = s;
    }
    if let Some(d) = &g.out_dir {
        cfg.out_dir = config::absolute(d);
    }
    if let Some(t) = g.threads {
        cfg.threads = t;
    }
    let path_override = |slot: &mut Option<TableSource>, p: &Option<PathBuf>| {
        if let Some(p) = p {
            match slot {
                Some(src) => src.path = config::absolute(p),
                None => *slot = Some(TableSource::new(config::absolute(p))),
            }
        }
    };
    path_override(&mut cfg.family, &g.family);
    path_override(&mut cfg.given, &g.given);
    if let Some(p) = &g.authors {
        match &mut cfg.authors {
            Some(a) => a.path = config::absolute(p),
            None => {
                cfg.authors = Some(config::AuthorSource {
                    path: config::absolute(p),
                    columns: Default::default(),
                    distinct_names: false,
                })
            }
        }
    }
    match &cli.command {
        Command::Ingest => {}
        Command::Infer(a) => {
            let inf = &mut cfg.inference;
            if let Some(s) = a.strategy {
                inf.strategy = s.into();
            }
            if let Some(t) = a.threshold {
                inf.threshold = Some(t);
            }
            if a.fractional {
                inf.threshold = None;
            }
            if let Some(i) = a.imputation {
                inf.imputation = i.into();
            }
            if let Some(n) = a.given_normalized {
                inf.given_normalized = n;
            }
            apply_weight(&a.weight, &mut inf.weight);
            set_distinct(&mut cfg, a.distinct_names);
        }
        Command::Sweep(a) => {
            let s = &mut cfg.sweep;
            if let Some(v) = a.start {
                s.start = v;
            }
            if let Some(v) = a.stop {
                s.stop = v;
            }
            if let Some(v) = a.step {
                s.step = v;
            }
            apply_weight(&a.weight, &mut s.weight);
            set_distinct(&mut cfg, a.distinct_names);
        }
        Command::Simulate(a) => {
            let s = &mut cfg.simulate;
            if let Some(k) = a.k {
                s.k = k;
            }
            if let Some(al) = a.alpha {
                s.alpha = config::Alpha::Symmetric(al);
            }
            apply_weight(&a.weight, &mut s.weight);
        }
        Command::Snapshot(a) => {
            if let Some(t) = a.threshold {
                cfg.snapshot.threshold = t;
            }
            apply_weight(&a.weight, &mut cfg.snapshot.weight);
            set_distinct(&mut cfg, a.distinct_names);
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

pub fn run_command(command: &Command, cfg: &RunConfig) -> anyhow::Result<Outcome> {
    let go = || match command {
        Command::Ingest => commands::ingest(cfg),
        Command::Infer(_) => commands::infer(cfg),
        Command::Sweep(_) => commands::sweep(cfg),
        Command::Simulate(_) => commands::simulate(cfg),
        Command::Snapshot(_) => commands::snapshot(cfg),
    };
    if cfg.threads == 0 {
        go()
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.threads)
            .build()
            .context("cannot start thread pool")?
            .install(go)
    }
}

/// Parse-free entry point used by `main`: returns the process exit code.
pub fn run(cli: &Cli) -> i32 {
    let result = resolve_config(cli).and_then(|cfg| run_command(&cli.command, &cfg));
    match result {
        Ok(o) if o.row_errors > 0 => {
            eprintln!(
                "warning: {} input rows were skipped; see the reports",
                o.row_errors
            );
            EXIT_PARTIAL
        }
        Ok(_) => 0,
        Err(e) => {
            eprintln!("error: {e:#}");
            EXIT_FATAL
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }

    #[test]
    fn flags_override_config() {
        let cli = Cli::parse_from([
            "namerace",
            "--seed",
            "5",
            "--family",
            "f.csv",
            "infer",
            "--strategy",
            "two-step",
            "--threshold",
            "0.8",
        ]);
        let cfg = resolve_config(&cli).unwrap();
        assert_eq!(cfg.seed, 5);
        assert!(cfg.family.unwrap().path.is_absolute());
        assert_eq!(cfg.inference.strategy, Strategy::TwoStep);
        assert_eq!(cfg.inference.threshold, Some(0.8));
    }

    #[test]
    fn bad_values_fail_resolution() {
        let cli = Cli::parse_from(["namerace", "simulate", "--alpha=-1"]);
        assert!(resolve_config(&cli).is_err());
        let cli = Cli::parse_from(["namerace", "infer", "--threshold", "0"]);
        assert!(resolve_config(&cli).is_err());
    }
}
