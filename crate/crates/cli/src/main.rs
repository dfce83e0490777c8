//! `aed`: the annotation error detection pipeline.
//!
//! Stages read and write files in one run directory (`--out`):
//! `ingest -> corrupt -> train -> calibrate -> detect -> evaluate -> report`.
//! `run` executes them in order. Exit status is 0 on success, 2 for
//! configuration errors and 3 for data errors.

mod config;
mod stages;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::RunConfig;

/// A problem with flags or configuration, detected before reading data.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

#[derive(Parser, Debug)]
#[command(name = "aed", version, about = "Annotation error detection pipeline")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Read a corpus into the run directory and assign folds.
    Ingest,
    /// Inject label noise into the ingested corpus.
    Corrupt,
    /// Train the baselines and store their predictions and embeddings.
    Train,
    /// Fit Platt calibrators per fold and store calibrated bundles.
    Calibrate,
    /// Run the configured detectors.
    Detect,
    /// Score detector outputs against the gold labels.
    Evaluate,
    /// Print a report; extra report.json files are merged into the summary.
    Report {
        /// Additional report.json files from other runs.
        reports: Vec<PathBuf>,
    },
    /// Run every stage in order.
    Run,
    /// Write a clean synthetic corpus to `--out`.
    Synth {
        /// Number of documents.
        #[arg(long, default_value_t = 200)]
        docs: usize,
    },
}

#[derive(Args, Debug, Default)]
struct Flags {
    /// text, token or span.
    #[arg(long, global = true)]
    task: Option<String>,
    /// Input corpus file.
    #[arg(long = "in", global = true, value_name = "FILE")]
    input: Option<String>,
    /// Run directory (or output file for `synth`).
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<String>,
    #[arg(long, global = true)]
    seed: Option<String>,
    /// Number of cross-validation folds.
    #[arg(long, global = true)]
    folds: Option<String>,
    /// Noise rate for `corrupt`.
    #[arg(long, global = true)]
    rate: Option<String>,
    /// Comma-separated method codes, e.g. CL,CU,RE.
    #[arg(long, global = true)]
    methods: Option<String>,
    /// Baseline feature family (bow, char, tfidf, window, suffix, tokchar).
    #[arg(long, global = true)]
    model: Option<String>,
    /// Train the baselines on the whole corpus instead of cross-validating.
    #[arg(long, global = true)]
    no_cv: bool,
    /// Calibrate the bundles read by CL, CU, DU and PM.
    #[arg(long, global = true)]
    calibrate: bool,
    /// Externally produced prediction bundles (comma-separated).
    #[arg(long, global = true, value_name = "FILES")]
    predictions: Option<String>,
    /// Externally produced embedding set.
    #[arg(long, global = true, value_name = "FILE")]
    embeddings: Option<String>,
    /// Borda count members (comma-separated scorer codes).
    #[arg(long, global = true)]
    borda: Option<String>,
    /// Dataset name used in reports.
    #[arg(long, global = true)]
    dataset: Option<String>,
    /// Key-value configuration file.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Rerun stages even if their outputs are up to date.
    #[arg(long, global = true)]
    force: bool,
}

impl Flags {
    fn settings(&self) -> Vec<(&'static str, String)> {
        let mut out = Vec::new();
        let mut push = |k: &'static str, v: &Option<String>| {
            if let Some(v) = v {
                out.push((k, v.clone()));
            }
        };
        push("task", &self.task);
        push("in", &self.input);
        push("out", &self.out);
        push("seed", &self.seed);
        push("folds", &self.folds);
        push("rate", &self.rate);
        push("methods", &self.methods);
        push("model", &self.model);
        push("predictions", &self.predictions);
        push("embeddings", &self.embeddings);
        push("borda", &self.borda);
        push("dataset", &self.dataset);
        if self.no_cv {
            out.push(("cv", "false".into()));
        }
        if self.calibrate {
            out.push(("calibrate", "true".into()));
        }
        out
    }

    /// Layers defaults, the run directory's saved config, `--config` and
    /// the flags.
    fn resolve(&self) -> anyhow::Result<RunConfig> {
        let cwd = std::path::Path::new("");
        let mut probe = RunConfig::default();
        if let Some(file) = &self.config {
            probe.load(file)?;
        }
        for (k, v) in self.settings() {
            probe.set(k, &v, cwd)?;
        }
        let mut cfg = RunConfig::default();
        if let Some(out) = &probe.out {
            let saved = out.join(config::SAVED_CONFIG);
            if saved.is_file() {
                cfg.load(&saved)?;
            }
        }
        if let Some(file) = &self.config {
            cfg.load(file)?;
        }
        for (k, v) in self.settings() {
            cfg.set(k, &v, cwd)?;
        }
        Ok(cfg)
    }
}

fn execute(cli: &Cli) -> anyhow::Result<()> {
    let cfg = cli.flags.resolve()?;
    let force = cli.flags.force;
    match &cli.command {
        Command::Synth { docs } => stages::synth(&cfg, *docs),
        Command::Ingest => stages::ingest(&cfg, force).map(drop),
        Command::Corrupt => stages::corrupt(&cfg, force).map(drop),
        Command::Train => stages::train(&cfg, force).map(drop),
        Command::Calibrate => stages::calibrate(&cfg, force).map(drop),
        Command::Detect => stages::detect(&cfg, force).map(drop),
        Command::Evaluate => stages::evaluate(&cfg, force).map(drop),
        Command::Report { reports } => {
            print!("{}", stages::report(&cfg, reports)?);
            Ok(())
        }
        Command::Run => {
            let text = stages::run(&cfg, force)?;
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<ConfigError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(3)
            }
        }
    }
}
