//! Matrix (Platt-style) probability calibration and expected calibration
//! error.
//!
//! A calibrator maps a probability row `p` to `softmax(W log(p + eps) + b)`.
//! Calibrated bundles are new bundles: detectors must be re-run on them.

use crate::corpus::{Corpus, FoldAssignment};
use crate::detect::argmax;
use crate::error::{Error, Result};
use crate::io::PredictionBundle;
use crate::models::logreg::softmax;

pub const EPSILON: f64 = 1e-12;
pub const DEFAULT_BINS: usize = 10;
const ITERATIONS: usize = 300;
const MAX_HALVINGS: usize = 40;

#[derive(Debug, Clone, PartialEq)]
pub struct CalibratorParams {
    /// `w[out][in]`.
    pub w: Vec<Vec<f64>>,
    pub b: Vec<f64>,
}

impl CalibratorParams {
    pub fn identity(n_classes: usize) -> Self {
        let w = (0..n_classes)
            .map(|i| (0..n_classes).map(|j| f64::from(u8::from(i == j))).collect())
            .collect();
        CalibratorParams {
            w,
            b: vec![0.0; n_classes],
        }
    }

    pub fn n_classes(&self) -> usize {
        self.b.len()
    }

    pub fn apply_row(&self, p: &[f64]) -> Vec<f64> {
        let z: Vec<f64> = p.iter().map(|x| (x + EPSILON).ln()).collect();
        let mut out: Vec<f64> = self
            .w
            .iter()
            .zip(&self.b)
            .map(|(row, b)| row.iter().zip(&z).map(|(w, z)| w * z).sum::<f64>() + b)
            .collect();
        softmax(&mut out);
        out
    }

    pub fn apply(&self, probs: &[Vec<f64>]) -> Vec<Vec<f64>> {
        probs.iter().map(|p| self.apply_row(p)).collect()
    }

    /// Mean negative log-likelihood of `labels` under the calibrated rows.
    pub fn nll(&self, probs: &[Vec<f64>], labels: &[usize]) -> f64 {
        probs
            .iter()
            .zip(labels)
            .map(|(p, &y)| -self.apply_row(p)[y].max(1e-300).ln())
            .sum::<f64>()
            / probs.len() as f64
    }
}

fn check_inputs(probs: &[Vec<f64>], labels: &[usize]) -> Result<usize> {
    if probs.is_empty() {
        return Err(Error::invalid("calibration needs at least one example"));
    }
    if probs.len() != labels.len() {
        return Err(Error::mismatch("probability rows and labels differ in count"));
    }
    let c = probs[0].len();
    if probs.iter().any(|r| r.len() != c) || labels.iter().any(|&y| y >= c) {
        return Err(Error::mismatch("probability rows and labels disagree on the classes"));
    }
    Ok(c)
}

/// Fits `W` and `b` by gradient descent on the mean NLL, starting from the
/// identity map. Steps that would increase the NLL are halved until they do
/// not, so the objective never increases.
pub fn fit_calibrator(probs: &[Vec<f64>], labels: &[usize]) -> Result<CalibratorParams> {
    let c = check_inputs(probs, labels)?;
    if labels.iter().all(|&y| y == labels[0]) {
        return Err(Error::invalid("calibration needs examples of at least two classes"));
    }
    let n = probs.len() as f64;
    let zs: Vec<Vec<f64>> = probs
        .iter()
        .map(|p| p.iter().map(|x| (x + EPSILON).ln()).collect())
        .collect();
    let mut params = CalibratorParams::identity(c);
    let mut loss = params.nll(probs, labels);
    let mut lr = 1.0;
    for _ in 0..ITERATIONS {
        let mut gw = vec![vec![0.0; c]; c];
        let mut gb = vec![0.0; c];
        for ((p, z), &y) in probs.iter().zip(&zs).zip(labels) {
            let mut q = params.apply_row(p);
            q[y] -= 1.0;
            for k in 0..c {
                gb[k] += q[k] / n;
                for j in 0..c {
                    gw[k][j] += q[k] * z[j] / n;
                }
            }
        }
        let mut accepted = false;
        for _ in 0..MAX_HALVINGS {
            let trial = CalibratorParams {
                w: params
                    .w
                    .iter()
                    .zip(&gw)
                    .map(|(row, g)| row.iter().zip(g).map(|(w, g)| w - lr * g).collect())
                    .collect(),
                b: params.b.iter().zip(&gb).map(|(b, g)| b - lr * g).collect(),
            };
            let trial_loss = trial.nll(probs, labels);
            if trial_loss <= loss {
                params = trial;
                loss = trial_loss;
                lr *= 1.5;
                accepted = true;
                break;
            }
            lr *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    Ok(params)
}

/// Binned gap between confidence (largest probability) and accuracy of the
/// argmax, weighted by bin size. Bins split [0, 1] evenly; confidence 1
/// falls in the last bin.
pub fn expected_calibration_error(probs: &[Vec<f64>], labels: &[usize], bins: usize) -> Result<f64> {
    check_inputs(probs, labels)?;
    if bins == 0 {
        return Err(Error::invalid("ECE needs at least one bin"));
    }
    let mut conf = vec![0.0; bins];
    let mut acc = vec![0.0; bins];
    let mut count = vec![0usize; bins];
    for (p, &y) in probs.iter().zip(labels) {
        let k = argmax(p);
        let c = p[k];
        let bin = ((c * bins as f64).floor() as usize).min(bins - 1);
        conf[bin] += c;
        acc[bin] += f64::from(u8::from(k == y));
        count[bin] += 1;
    }
    let n = probs.len() as f64;
    Ok((0..bins)
        .filter(|&b| count[b] > 0)
        .map(|b| (acc[b] - conf[b]).abs() / n)
        .sum())
}

/// ECE of a bundle against the corpus' annotated labels, over all rows.
pub fn bundle_ece(bundle: &PredictionBundle, corpus: &Corpus) -> Result<f64> {
    bundle.check_against(corpus)?;
    let (rows, labels) = flatten(bundle, corpus, 0..corpus.n_units());
    expected_calibration_error(&rows, &labels, DEFAULT_BINS)
}

fn flatten(
    bundle: &PredictionBundle,
    corpus: &Corpus,
    units: impl IntoIterator<Item = usize>,
) -> (Vec<Vec<f64>>, Vec<usize>) {
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for u in units {
        for r in bundle.unit_rows(u) {
            rows.push(r.clone());
            labels.push(corpus.units()[u].noisy_label);
        }
    }
    (rows, labels)
}

/// A new bundle whose rows are calibrated fold by fold: each fold's rows fit
/// a calibrator against the annotated labels, which is then applied to those
/// same rows. A fold whose units all carry one label is left unchanged.
pub fn calibrate_bundle(
    bundle: &PredictionBundle,
    corpus: &Corpus,
    folds: &FoldAssignment,
) -> Result<PredictionBundle> {
    bundle.check_against(corpus)?;
    let unit_fold = folds.unit_folds(corpus);
    let mut out: Vec<Vec<Vec<f64>>> = bundle.rows().to_vec();
    for f in 0..folds.k() {
        let units: Vec<usize> = (0..corpus.n_units()).filter(|&u| unit_fold[u] == f).collect();
        if units.is_empty() {
            continue;
        }
        let (rows, labels) = flatten(bundle, corpus, units.iter().copied());
        let params = match fit_calibrator(&rows, &labels) {
            Ok(p) => p,
            Err(e) => {
                log::warn!("fold {f} left uncalibrated: {e}");
                continue;
            }
        };
        for &u in &units {
            out[u] = params.apply(bundle.unit_rows(u));
        }
    }
    PredictionBundle::for_corpus(
        format!("{}-calibrated", bundle.model_name()),
        corpus,
        bundle.kind(),
        out,
    )
}
