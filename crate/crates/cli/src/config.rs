//! Run configuration: a `key = value` text file mirrored by command-line
//! flags.
//!
//! Values are layered: built-in defaults, then the `run.cfg` saved in the
//! output directory by earlier stages, then a `--config` file, then flags.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use aed_core::detect::Method;
use aed_core::models::{BaselineSpec, Family};
use aed_core::runner::{check_methods, default_borda_members, RunOptions};
use aed_core::Task;
use anyhow::{Context, Result};

use crate::ConfigError;

pub const SAVED_CONFIG: &str = "run.cfg";

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub task: Option<Task>,
    pub input: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub methods: Vec<Method>,
    pub model: Option<Family>,
    pub folds: usize,
    pub seed: u64,
    pub rate: f64,
    pub calibrate: bool,
    pub cv: bool,
    pub predictions: Vec<PathBuf>,
    pub embeddings: Option<PathBuf>,
    pub borda: Option<Vec<Method>>,
    pub dataset: Option<String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            task: None,
            input: None,
            out: None,
            methods: Vec::new(),
            model: None,
            folds: 10,
            seed: 0,
            rate: 0.05,
            calibrate: false,
            cv: true,
            predictions: Vec::new(),
            embeddings: None,
            borda: None,
            dataset: None,
        }
    }
}

fn config_err(msg: impl Into<String>) -> anyhow::Error {
    ConfigError(msg.into()).into()
}

pub fn parse_task(s: &str) -> Result<Task> {
    s.parse().map_err(|e: aed_core::Error| config_err(e.to_string()))
}

pub fn parse_methods(s: &str) -> Result<Vec<Method>> {
    let mut out = Vec::new();
    for code in s.split(',').map(str::trim).filter(|c| !c.is_empty()) {
        let m: Method = code
            .parse()
            .map_err(|e: aed_core::Error| config_err(e.to_string()))?;
        if !out.contains(&m) {
            out.push(m);
        }
    }
    Ok(out)
}

fn parse_bool(key: &str, v: &str) -> Result<bool> {
    match v {
        "true" | "yes" | "on" | "1" => Ok(true),
        "false" | "no" | "off" | "0" => Ok(false),
        _ => Err(config_err(format!("`{key}` expects true or false, got `{v}`"))),
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse()
        .map_err(|_| config_err(format!("`{key}` expects a number, got `{v}`")))
}

fn absolute(base: &Path, p: &str) -> Result<PathBuf> {
    std::path::absolute(base.join(p)).map_err(|e| config_err(format!("bad path `{p}`: {e}")))
}

impl RunConfig {
    /// Applies one `key = value` setting. Relative paths are resolved
    /// against `base` and stored as absolute paths.
    pub fn set(&mut self, key: &str, value: &str, base: &Path) -> Result<()> {
        let v = value.trim();
        let path = |p: &str| -> Result<Option<PathBuf>> {
            if p.is_empty() {
                Ok(None)
            } else {
                absolute(base, p).map(Some)
            }
        };
        match key {
            "task" => self.task = Some(parse_task(v)?),
            "in" => self.input = path(v)?,
            "out" => self.out = path(v)?,
            "methods" => self.methods = parse_methods(v)?,
            "model" => {
                self.model = if v.is_empty() {
                    None
                } else {
                    Some(v.parse().map_err(|e| config_err(format!("{e}")))?)
                }
            }
            "folds" => self.folds = parse_num(key, v)?,
            "seed" => self.seed = parse_num(key, v)?,
            "rate" => self.rate = parse_num(key, v)?,
            "calibrate" => self.calibrate = parse_bool(key, v)?,
            "cv" => self.cv = parse_bool(key, v)?,
            "predictions" => {
                self.predictions = v
                    .split(',')
                    .map(str::trim)
                    .filter(|p| !p.is_empty())
                    .map(|p| absolute(base, p))
                    .collect::<Result<_>>()?
            }
            "embeddings" => self.embeddings = path(v)?,
            "borda" => self.borda = if v.is_empty() { None } else { Some(parse_methods(v)?) },
            "dataset" => self.dataset = (!v.is_empty()).then(|| v.to_string()),
            other => return Err(config_err(format!("unknown configuration key `{other}`"))),
        }
        Ok(())
    }

    /// Applies a configuration file on top of `self`.
    pub fn load(&mut self, file: &Path) -> Result<()> {
        let text = fs::read_to_string(file)
            .with_context(|| format!("cannot read configuration file {}", file.display()))
            .map_err(|e| config_err(format!("{e:#}")))?;
        let base = file.parent().unwrap_or(Path::new(""));
        for (no, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                config_err(format!("{}:{}: expected `key = value`", file.display(), no + 1))
            })?;
            self.set(k.trim(), v, base)
                .map_err(|e| config_err(format!("{}:{}: {e}", file.display(), no + 1)))?;
        }
        Ok(())
    }

    /// Serializes every setting; `load` on the result reproduces `self`.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let p = |p: &Option<PathBuf>| p.as_ref().map(|p| p.display().to_string()).unwrap_or_default();
        let codes = |ms: &[Method]| ms.iter().map(|m| m.code()).collect::<Vec<_>>().join(",");
        writeln!(s, "task = {}", self.task.map(|t| t.short_name()).unwrap_or("")).unwrap();
        writeln!(s, "in = {}", p(&self.input)).unwrap();
        writeln!(s, "out = {}", p(&self.out)).unwrap();
        writeln!(s, "methods = {}", codes(&self.methods)).unwrap();
        writeln!(s, "model = {}", self.model.map(|m| m.to_string()).unwrap_or_default()).unwrap();
        writeln!(s, "folds = {}", self.folds).unwrap();
        writeln!(s, "seed = {}", self.seed).unwrap();
        writeln!(s, "rate = {}", self.rate).unwrap();
        writeln!(s, "calibrate = {}", self.calibrate).unwrap();
        writeln!(s, "cv = {}", self.cv).unwrap();
        let preds: Vec<String> = self.predictions.iter().map(|p| p.display().to_string()).collect();
        writeln!(s, "predictions = {}", preds.join(",")).unwrap();
        writeln!(s, "embeddings = {}", p(&self.embeddings)).unwrap();
        writeln!(s, "borda = {}", self.borda.as_deref().map(codes).unwrap_or_default()).unwrap();
        writeln!(s, "dataset = {}", self.dataset.clone().unwrap_or_default()).unwrap();
        s
    }

    pub fn task(&self) -> Result<Task> {
        self.task.ok_or_else(|| config_err("no task given (use --task text|token|span)"))
    }

    pub fn out(&self) -> Result<&Path> {
        self.out
            .as_deref()
            .ok_or_else(|| config_err("no output directory given (use --out)"))
    }

    pub fn methods(&self) -> Result<&[Method]> {
        if self.methods.is_empty() {
            return Err(config_err("no detection methods given (use --methods)"));
        }
        Ok(&self.methods)
    }

    pub fn borda_members(&self, task: Task) -> Vec<Method> {
        self.borda.clone().unwrap_or_else(|| default_borda_members(task))
    }

    /// Checks everything that can be checked without reading data.
    pub fn validate(&self) -> Result<()> {
        let task = self.task()?;
        if self.folds < 2 {
            return Err(config_err(format!("folds must be at least 2, got {}", self.folds)));
        }
        if !(0.0..=1.0).contains(&self.rate) {
            return Err(config_err(format!("rate must lie in [0, 1], got {}", self.rate)));
        }
        check_methods(&self.methods, task, &self.borda_members(task)).map_err(|e| config_err(e.to_string()))?;
        self.spec()?
            .validate(task)
            .map_err(|e| config_err(e.to_string()))?;
        Ok(())
    }

    pub fn spec(&self) -> Result<BaselineSpec> {
        let task = self.task()?;
        let mut spec = BaselineSpec::for_task(task, self.seed);
        if let Some(family) = self.model {
            spec.family = family;
        }
        Ok(spec)
    }

    pub fn run_options(&self) -> Result<RunOptions> {
        let task = self.task()?;
        let mut opts = RunOptions::new(task, self.seed);
        opts.spec = self.spec()?;
        opts.cv = self.cv;
        opts.calibrate = self.calibrate;
        opts.borda = self.borda_members(task);
        Ok(opts)
    }

    /// The settings a stage depends on, for content addressing.
    pub fn fingerprint(&self, keys: &[&str]) -> String {
        let all: BTreeMap<String, String> = self
            .to_text()
            .lines()
            .filter_map(|l| l.split_once(" = "))
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect();
        keys.iter()
            .map(|k| format!("{k}={}\n", all.get(*k).map(String::as_str).unwrap_or("")))
            .collect()
    }
}
