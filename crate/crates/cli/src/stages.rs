//! Pipeline stages over a run directory.
//!
//! ```text
//! <out>/run.cfg                 merged configuration of the last stage run
//! <out>/corpus.{jsonl,tsv}      ingested corpus
//! <out>/noisy.{jsonl,tsv}       corrupted corpus; later stages prefer it
//! <out>/folds.tsv
//! <out>/predictions/{single,repeated,epochs}.pred
//! <out>/embeddings.emb
//! <out>/calibrated/{single,repeated}.pred
//! <out>/detect/<METHOD>.det
//! <out>/report.{tsv,json}
//! <out>/.stamps/<stage>         content hash of the stage's inputs
//! ```
//!
//! A stage is skipped when its stamp matches the hash of its configuration
//! keys and input files and all of its outputs exist.

use std::collections::BTreeSet;
use std::fs;
use std::path::PathBuf;

use aed_core::calibrate::{bundle_ece, calibrate_bundle};
use aed_core::detect::Method;
use aed_core::eval::{assemble_report, eval_flagger, eval_scorer, ReportDocument};
use aed_core::io::{self, BundleKind, DetectorOutput, PredictionBundle};
use aed_core::runner::Runner;
use aed_core::synth::{self, SpanSynth, TextSynth, TokenSynth};
use aed_core::{Corpus, FoldAssignment, Task};
use anyhow::{bail, Context, Result};
use log::info;
use sha2::{Digest, Sha256};

use crate::config::{RunConfig, SAVED_CONFIG};
use crate::ConfigError;

const TRAIN_KEYS: &[&str] = &["task", "model", "folds", "seed", "cv"];

/// Stored bundle slots, by file stem.
const SINGLE: &str = "single";
const REPEATED: &str = "repeated";
const EPOCHS: &str = "epochs";

struct Layout {
    root: PathBuf,
    task: Task,
}

impl Layout {
    fn new(cfg: &RunConfig) -> Result<Self> {
        Ok(Layout {
            root: cfg.out()?.to_path_buf(),
            task: cfg.task()?,
        })
    }

    fn ext(&self) -> &'static str {
        match self.task {
            Task::TextClassification => "jsonl",
            _ => "tsv",
        }
    }

    fn corpus(&self) -> PathBuf {
        self.root.join(format!("corpus.{}", self.ext()))
    }

    fn noisy(&self) -> PathBuf {
        self.root.join(format!("noisy.{}", self.ext()))
    }

    /// The corrupted corpus if there is one, else the ingested one.
    fn current_corpus(&self) -> PathBuf {
        let noisy = self.noisy();
        if noisy.is_file() {
            noisy
        } else {
            self.corpus()
        }
    }

    fn folds(&self) -> PathBuf {
        self.root.join("folds.tsv")
    }

    fn prediction(&self, slot: &str) -> PathBuf {
        self.root.join("predictions").join(format!("{slot}.pred"))
    }

    fn embeddings(&self) -> PathBuf {
        self.root.join("embeddings.emb")
    }

    fn calibrated(&self, slot: &str) -> PathBuf {
        self.root.join("calibrated").join(format!("{slot}.pred"))
    }

    fn detection(&self, m: Method) -> PathBuf {
        self.root.join("detect").join(format!("{}.det", m.code()))
    }

    fn report_tsv(&self) -> PathBuf {
        self.root.join("report.tsv")
    }

    fn report_json(&self) -> PathBuf {
        self.root.join("report.json")
    }

    fn stamp(&self, stage: &str) -> PathBuf {
        self.root.join(".stamps").join(stage)
    }
}

fn slot_of(kind: BundleKind) -> &'static str {
    match kind {
        BundleKind::Single => SINGLE,
        BundleKind::Repeated(_) => REPEATED,
        BundleKind::PerEpoch(_) => EPOCHS,
    }
}

/// Hash of a stage's configuration keys and input file contents. A missing
/// input is an error naming the file.
fn stage_hash(stage: &str, cfg: &RunConfig, keys: &[&str], inputs: &[PathBuf]) -> Result<String> {
    let mut h = Sha256::new();
    h.update(stage.as_bytes());
    h.update([0]);
    h.update(cfg.fingerprint(keys).as_bytes());
    for path in inputs {
        let bytes = fs::read(path)
            .with_context(|| format!("stage `{stage}`: missing input {}", path.display()))?;
        h.update([0]);
        h.update(Sha256::digest(&bytes));
    }
    Ok(h.finalize().iter().map(|b| format!("{b:02x}")).collect())
}

fn up_to_date(layout: &Layout, stage: &str, hash: &str, outputs: &[PathBuf]) -> bool {
    fs::read_to_string(layout.stamp(stage)).is_ok_and(|s| s.trim() == hash)
        && outputs.iter().all(|p| p.is_file())
}

fn record(layout: &Layout, stage: &str, hash: &str) -> Result<()> {
    let path = layout.stamp(stage);
    fs::create_dir_all(path.parent().expect("stamp has a parent"))?;
    fs::write(&path, format!("{hash}\n")).with_context(|| format!("cannot write {}", path.display()))
}

fn save_config(cfg: &RunConfig) -> Result<()> {
    let out = cfg.out()?;
    fs::create_dir_all(out).with_context(|| format!("cannot create {}", out.display()))?;
    let path = out.join(SAVED_CONFIG);
    fs::write(&path, cfg.to_text()).with_context(|| format!("cannot write {}", path.display()))
}

/// Validates the configuration and saves it for later stages.
fn begin(cfg: &RunConfig) -> Result<Layout> {
    cfg.validate()?;
    let layout = Layout::new(cfg)?;
    save_config(cfg)?;
    Ok(layout)
}

fn load_corpus(layout: &Layout) -> Result<(Corpus, FoldAssignment)> {
    let path = layout.current_corpus();
    if !path.is_file() {
        bail!("missing corpus {} (run `aed ingest` first)", path.display());
    }
    let corpus = io::read_corpus(&path, layout.task)?;
    let folds_path = layout.folds();
    if !folds_path.is_file() {
        bail!("missing fold file {} (run `aed ingest` first)", folds_path.display());
    }
    let folds = io::read_folds(&folds_path, &corpus)?;
    Ok((corpus, folds))
}

pub fn synth(cfg: &RunConfig, docs: usize) -> Result<()> {
    let task = cfg.task()?;
    let out = cfg.out()?;
    let corpus = match task {
        Task::TextClassification => synth::text_corpus(&TextSynth { n_docs: docs, ..Default::default() }, cfg.seed),
        Task::TokenLabeling => synth::token_corpus(&TokenSynth { n_docs: docs, ..Default::default() }, cfg.seed),
        Task::SpanLabeling => synth::span_corpus(&SpanSynth { n_docs: docs, ..Default::default() }, cfg.seed),
    };
    io::write_corpus(&corpus, out)?;
    info!("synth: wrote {} units to {}", corpus.n_units(), out.display());
    Ok(())
}

/// Returns whether the stage ran.
pub fn ingest(cfg: &RunConfig, force: bool) -> Result<bool> {
    let layout = begin(cfg)?;
    let input = cfg
        .input
        .clone()
        .ok_or_else(|| ConfigError("no input corpus given (use --in)".into()))?;
    let hash = stage_hash("ingest", cfg, &["task", "folds", "seed"], &[input.clone()])?;
    let outputs = [layout.corpus(), layout.folds()];
    if !force && up_to_date(&layout, "ingest", &hash, &outputs) {
        info!("ingest: up to date");
        return Ok(false);
    }
    let corpus = io::read_corpus(&input, layout.task)?;
    let folds = aed_core::corpus::make_folds(&corpus, cfg.folds, cfg.seed)?;
    io::write_corpus(&corpus, layout.corpus())?;
    io::write_folds(&folds, &corpus, layout.folds())?;
    let noisy = layout.noisy();
    if noisy.is_file() {
        fs::remove_file(&noisy).with_context(|| format!("cannot remove stale {}", noisy.display()))?;
    }
    record(&layout, "ingest", &hash)?;
    info!(
        "ingest: {} documents, {} units, {} classes, {} folds",
        corpus.documents().len(),
        corpus.n_units(),
        corpus.n_classes(),
        folds.k()
    );
    Ok(true)
}

pub fn corrupt(cfg: &RunConfig, force: bool) -> Result<bool> {
    let layout = begin(cfg)?;
    let hash = stage_hash("corrupt", cfg, &["rate", "seed"], &[layout.corpus()])?;
    if !force && up_to_date(&layout, "corrupt", &hash, &[layout.noisy()]) {
        info!("corrupt: up to date");
        return Ok(false);
    }
    let corpus = io::read_corpus(layout.corpus(), layout.task)?;
    let noisy = corpus.inject_noise(cfg.rate, cfg.seed)?;
    io::write_corpus(&noisy, layout.noisy())?;
    record(&layout, "corrupt", &hash)?;
    let n_err = noisy.error_flags().map_or(0, |f| f.iter().filter(|&&e| e).count());
    info!("corrupt: {n_err} of {} labels flipped", noisy.n_units());
    Ok(true)
}

/// What the configured methods read from the train stage.
#[derive(Debug, Default, Clone, Copy)]
struct Needs {
    single: bool,
    repeated: bool,
    epochs: bool,
    embeddings: bool,
}

fn needs(cfg: &RunConfig, task: Task) -> Needs {
    if cfg.methods.is_empty() {
        return Needs {
            single: true,
            repeated: true,
            epochs: Method::DM.applies_to(task),
            embeddings: true,
        };
    }
    let mut methods: BTreeSet<Method> = cfg.methods.iter().copied().collect();
    if methods.contains(&Method::BC) {
        methods.extend(cfg.borda_members(task));
    }
    let mut n = Needs::default();
    for m in methods {
        match m {
            Method::RE | Method::CL | Method::CU | Method::PM => n.single = true,
            Method::DU | Method::LA => n.repeated = true,
            Method::DM => n.epochs = true,
            Method::MD | Method::KNN | Method::PE => n.embeddings = true,
            _ => {}
        }
    }
    n
}

/// Train outputs the configured methods read.
fn train_outputs(layout: &Layout, n: Needs) -> Vec<PathBuf> {
    let mut out = Vec::new();
    for (on, slot) in [(n.single, SINGLE), (n.repeated, REPEATED), (n.epochs, EPOCHS)] {
        if on {
            out.push(layout.prediction(slot));
        }
    }
    if n.embeddings {
        out.push(layout.embeddings());
    }
    out
}

fn train_hash(cfg: &RunConfig, layout: &Layout) -> Result<String> {
    stage_hash("train", cfg, TRAIN_KEYS, &[layout.current_corpus(), layout.folds()])
}

pub fn train(cfg: &RunConfig, force: bool) -> Result<bool> {
    let layout = begin(cfg)?;
    let hash = train_hash(cfg, &layout)?;
    let n = needs(cfg, layout.task);
    let outputs = train_outputs(&layout, n);
    if !force && up_to_date(&layout, "train", &hash, &outputs) {
        info!("train: up to date");
        return Ok(false);
    }
    let (corpus, folds) = load_corpus(&layout)?;
    let mut runner = Runner::new(&corpus, folds, cfg.run_options()?)?;
    if n.single {
        io::write_predictions(runner.single_bundle()?, layout.prediction(SINGLE))?;
        info!("train: single-prediction bundle written");
    }
    if n.repeated {
        io::write_predictions(runner.repeated_bundle()?, layout.prediction(REPEATED))?;
        info!("train: dropout bundle written");
    }
    if n.epochs {
        io::write_predictions(runner.epoch_bundle()?, layout.prediction(EPOCHS))?;
        info!("train: per-epoch bundle written");
    }
    if n.embeddings {
        io::write_embeddings(runner.embeddings()?, layout.embeddings())?;
        info!("train: embeddings written");
    }
    record(&layout, "train", &hash)?;
    Ok(true)
}

/// Stored train outputs, if the train stage is current for `cfg`.
fn fresh_train_outputs(cfg: &RunConfig, layout: &Layout) -> Result<Vec<PathBuf>> {
    let hash = train_hash(cfg, layout)?;
    let stamp = fs::read_to_string(layout.stamp("train")).unwrap_or_default();
    if stamp.trim() != hash {
        if layout.prediction(SINGLE).is_file() || layout.embeddings().is_file() {
            log::warn!("stored baseline outputs are stale; recomputing in memory (run `aed train`)");
        }
        return Ok(Vec::new());
    }
    let mut out: Vec<PathBuf> = [SINGLE, REPEATED, EPOCHS]
        .iter()
        .map(|s| layout.prediction(s))
        .collect();
    out.push(layout.embeddings());
    out.retain(|p| p.is_file());
    Ok(out)
}

fn external_inputs(cfg: &RunConfig) -> Vec<PathBuf> {
    cfg.predictions.iter().cloned().chain(cfg.embeddings.clone()).collect()
}

/// Installs the stored and external models into `runner`.
fn stock_runner(runner: &mut Runner<'_>, corpus: &Corpus, cfg: &RunConfig, stored: &[PathBuf]) -> Result<()> {
    for path in stored {
        if path.extension().is_some_and(|e| e == "emb") {
            runner.supply_embeddings(io::read_embeddings(path, corpus)?)?;
        } else {
            runner.preload_predictions(io::read_predictions(path, corpus)?)?;
        }
    }
    for path in &cfg.predictions {
        runner.supply_predictions(io::read_predictions(path, corpus)?)?;
    }
    if let Some(path) = &cfg.embeddings {
        runner.supply_embeddings(io::read_embeddings(path, corpus)?)?;
    }
    Ok(())
}

pub fn calibrate(cfg: &RunConfig, force: bool) -> Result<bool> {
    let layout = begin(cfg)?;
    let stored = fresh_train_outputs(cfg, &layout)?;
    let mut sources: Vec<PathBuf> = stored.iter().filter(|p| p.extension().is_some_and(|e| e == "pred")).cloned().collect();
    sources.extend(cfg.predictions.iter().cloned());
    let mut inputs = vec![layout.current_corpus(), layout.folds()];
    inputs.extend(sources.iter().cloned());
    let hash = stage_hash("calibrate", cfg, TRAIN_KEYS, &inputs)?;

    let (corpus, folds) = load_corpus(&layout)?;
    // External bundles replace stored ones of the same kind.
    let mut bundles: Vec<(&'static str, PredictionBundle)> = Vec::new();
    for path in &sources {
        let b = io::read_predictions(path, &corpus)?;
        let slot = slot_of(b.kind());
        if slot == EPOCHS {
            continue;
        }
        bundles.retain(|(s, _)| *s != slot);
        bundles.push((slot, b));
    }
    if bundles.is_empty() {
        bail!("calibrate: no single or dropout bundle in {} (run `aed train` first)", layout.root.display());
    }
    let outputs: Vec<PathBuf> = bundles.iter().map(|(s, _)| layout.calibrated(s)).collect();
    if !force && up_to_date(&layout, "calibrate", &hash, &outputs) {
        info!("calibrate: up to date");
        return Ok(false);
    }
    for (slot, b) in &bundles {
        let calibrated = calibrate_bundle(b, &corpus, &folds)?;
        let before = bundle_ece(b, &corpus)?;
        let after = bundle_ece(&calibrated, &corpus)?;
        io::write_predictions(&calibrated, layout.calibrated(slot))?;
        info!("calibrate: {slot} bundle ECE {before:.4} -> {after:.4}");
    }
    record(&layout, "calibrate", &hash)?;
    Ok(true)
}

/// Runs the detectors whose outputs are stale; returns how many ran.
pub fn detect(cfg: &RunConfig, force: bool) -> Result<usize> {
    let layout = begin(cfg)?;
    let methods = cfg.methods()?.to_vec();
    let stored = fresh_train_outputs(cfg, &layout)?;
    let mut inputs = vec![layout.current_corpus(), layout.folds()];
    inputs.extend(stored.iter().cloned());
    inputs.extend(external_inputs(cfg));
    let keys = ["task", "model", "folds", "seed", "cv", "calibrate", "borda"];
    let mut stale = Vec::new();
    for &m in &methods {
        let stage = format!("detect-{}", m.code());
        let hash = stage_hash(&stage, cfg, &keys, &inputs)?;
        if force || !up_to_date(&layout, &stage, &hash, &[layout.detection(m)]) {
            stale.push((m, stage, hash));
        }
    }
    if stale.is_empty() {
        info!("detect: up to date");
        return Ok(0);
    }
    let (corpus, folds) = load_corpus(&layout)?;
    let mut runner = Runner::new(&corpus, folds, cfg.run_options()?)?;
    stock_runner(&mut runner, &corpus, cfg, &stored)?;
    for (m, stage, hash) in &stale {
        let start = std::time::Instant::now();
        let out = runner.run(*m)?;
        io::write_detector_output(&out, layout.detection(*m))?;
        record(&layout, stage, hash)?;
        let what = match &out {
            DetectorOutput::Flags(f) => format!("{} flagged", f.flags.iter().filter(|&&x| x).count()),
            DetectorOutput::Scores(s) => format!("{} scored", s.scores.len()),
        };
        info!("detect: {} {what} in {:.2?}", m.code(), start.elapsed());
    }
    Ok(stale.len())
}

fn dataset_name(cfg: &RunConfig, layout: &Layout) -> String {
    cfg.dataset.clone().unwrap_or_else(|| {
        layout
            .root
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_else(|| "corpus".into())
    })
}

pub fn evaluate(cfg: &RunConfig, force: bool) -> Result<ReportDocument> {
    let layout = begin(cfg)?;
    let methods = cfg.methods()?.to_vec();
    let mut inputs = vec![layout.current_corpus()];
    inputs.extend(methods.iter().map(|&m| layout.detection(m)));
    let hash = stage_hash("evaluate", cfg, &["task", "methods", "dataset"], &inputs)?;
    let outputs = [layout.report_tsv(), layout.report_json()];
    if !force && up_to_date(&layout, "evaluate", &hash, &outputs) {
        info!("evaluate: up to date");
        let text = fs::read_to_string(layout.report_json())?;
        return Ok(ReportDocument::from_json(&text)?);
    }
    let corpus = io::read_corpus(layout.current_corpus(), layout.task)?;
    let dataset = dataset_name(cfg, &layout);
    let mut reports = Vec::new();
    for &m in &methods {
        let out = io::read_detector_output(layout.detection(m), &corpus)?;
        let report = match &out {
            DetectorOutput::Flags(f) => eval_flagger(f, &corpus)?,
            DetectorOutput::Scores(s) => eval_scorer(s, &corpus)?,
        };
        reports.push(report.with_dataset(dataset.clone()));
    }
    let doc = assemble_report(reports);
    fs::write(layout.report_tsv(), doc.to_tsv())?;
    fs::write(layout.report_json(), doc.to_json() + "\n")?;
    record(&layout, "evaluate", &hash)?;
    info!("evaluate: report written to {}", layout.report_tsv().display());
    Ok(doc)
}

/// The run directory's report merged with `extra` report files, as text.
pub fn report(cfg: &RunConfig, extra: &[PathBuf]) -> Result<String> {
    let mut files: Vec<PathBuf> = Vec::new();
    if let Some(out) = &cfg.out {
        files.push(out.join("report.json"));
    }
    files.extend(extra.iter().cloned());
    if files.is_empty() {
        return Err(ConfigError("no report given (use --out or list report.json files)".into()).into());
    }
    let mut reports = Vec::new();
    for path in &files {
        let text = fs::read_to_string(path)
            .with_context(|| format!("missing report {} (run `aed evaluate` first)", path.display()))?;
        let doc = ReportDocument::from_json(&text).with_context(|| path.display().to_string())?;
        reports.extend(doc.reports);
    }
    Ok(assemble_report(reports).summary_text())
}

/// Every stage in order. `ingest` runs when an input corpus is given,
/// `corrupt` when the rate is positive and `calibrate` when enabled.
pub fn run(cfg: &RunConfig, force: bool) -> Result<String> {
    cfg.validate()?;
    cfg.methods()?;
    let layout = Layout::new(cfg)?;
    if cfg.input.is_some() {
        ingest(cfg, force)?;
    } else if !layout.corpus().is_file() {
        return Err(ConfigError("no input corpus given (use --in)".into()).into());
    }
    if cfg.rate > 0.0 {
        corrupt(cfg, force)?;
    }
    train(cfg, force)?;
    if cfg.calibrate {
        calibrate(cfg, force)?;
    }
    detect(cfg, force)?;
    evaluate(cfg, force)?;
    report(cfg, &[])
}
