//! Command-line driver for the skillforge pipeline.
//!
//! Every subcommand reads earlier stages' artifacts from the output
//! directory, writes its own atomically under `<out>/<stage>/` and appends
//! a provenance record to `<out>/manifest.jsonl`.

pub mod artifacts;
pub mod config;
pub mod error;
pub mod stages;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::{Config, Settings};
use crate::error::{CliError, CliResult, EXIT_OK, EXIT_VALIDATION};
use crate::stages::{execute, Stage};

#[derive(Debug, Parser)]
#[command(name = "skillforge", version, about = "Skill taxonomy transfer and city skill analytics")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Opts,
}

#[derive(Debug, Clone, Copy, Subcommand)]
pub enum Command {
    /// Generate a synthetic world with planted structure into <out>/synth.
    Synth,
    /// Validate the input tables and write their canonical form.
    Ingest,
    /// Task-skill mutual information and naive Bayes skill transfer.
    Infer,
    /// Source occupation x skill revealed comparative advantage.
    Rca,
    /// Skill network, communities, poles and occupation scores.
    Skillspace,
    /// City skill profiles and socio-cognitive scores.
    Cityprofile,
    /// Radiation-model destination ranking and NDCG evaluation.
    Mobility,
    /// City-level OLS regressions.
    Regress,
    /// Summary of every stage in one JSON file.
    Report,
    /// Run ingest through report in order.
    All,
}

#[derive(Debug, Clone, Default, Args)]
pub struct Opts {
    /// Flat key = value config file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Directory holding the input tables under their conventional names.
    #[arg(long, global = true)]
    pub input_dir: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Naive Bayes smoothing.
    #[arg(long, global = true)]
    pub alpha: Option<f64>,
    /// Posterior binarization threshold.
    #[arg(long, global = true)]
    pub threshold: Option<f64>,
    /// Occupation score threshold for city socio-cognitive scores.
    #[arg(long, global = true)]
    pub cognitive_threshold: Option<f64>,
    /// Radiation model form: paper|classical.
    #[arg(long, global = true)]
    pub variant: Option<String>,
    /// Mass field: employment|skilled|degree|all.
    #[arg(long, global = true)]
    pub mass: Option<String>,
    /// Number of predicted destinations per origin.
    #[arg(long, global = true)]
    pub k: Option<usize>,
    /// Worker threads (0 or unset: all cores). Never changes outputs.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Any config key, as key=value. Repeatable.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub set: Vec<String>,
}

impl Opts {
    /// Config file values overridden by flags.
    pub fn settings(&self) -> CliResult<Settings> {
        let mut s = match &self.config {
            Some(p) => Settings::from_file(p)?,
            None => Settings::default(),
        };
        for kv in &self.set {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| CliError::Validation(format!("--set expects KEY=VALUE, got `{kv}`")))?;
            s.set(k.trim(), v.trim())?;
        }
        let path = |p: &PathBuf| p.display().to_string();
        let flags: [(&str, Option<String>); 10] = [
            ("out", self.out.as_ref().map(path)),
            ("input_dir", self.input_dir.as_ref().map(path)),
            ("seed", self.seed.map(|v| v.to_string())),
            ("alpha", self.alpha.map(|v| v.to_string())),
            ("threshold", self.threshold.map(|v| v.to_string())),
            ("cognitive_threshold", self.cognitive_threshold.map(|v| v.to_string())),
            ("variant", self.variant.clone()),
            ("mass", self.mass.clone()),
            ("k", self.k.map(|v| v.to_string())),
            ("threads", self.threads.map(|v| v.to_string())),
        ];
        for (k, v) in flags {
            if let Some(v) = v {
                s.set(k, v)?;
            }
        }
        Ok(s)
    }
}

fn stages_for(cmd: Command) -> Vec<Stage> {
    match cmd {
        Command::Synth => vec![Stage::Synth],
        Command::Ingest => vec![Stage::Ingest],
        Command::Infer => vec![Stage::Infer],
        Command::Rca => vec![Stage::Rca],
        Command::Skillspace => vec![Stage::Skillspace],
        Command::Cityprofile => vec![Stage::Cityprofile],
        Command::Mobility => vec![Stage::Mobility],
        Command::Regress => vec![Stage::Regress],
        Command::Report => vec![Stage::Report],
        Command::All => Stage::CHAIN.to_vec(),
    }
}

/// Runs a parsed command; logs one line per stage to stderr.
pub fn run(cli: &Cli) -> CliResult<()> {
    let cfg = Config::from_settings(&cli.opts.settings()?)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Internal(format!("thread pool: {e}")))?;
    pool.install(|| {
        for stage in stages_for(cli.command) {
            let n = execute(stage, &cfg)?;
            eprintln!("skillforge {}: wrote {n} artifacts under {}", stage.name(), cfg.out.join(stage.name()).display());
        }
        Ok(())
    })
}

/// Parses `args` (program name first), runs, and returns the exit code.
/// Errors go to stderr as one JSON line.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_VALIDATION } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("{}", e.to_json());
            e.exit_code()
        }
    }
}
