//! Two-parameter logistic item response model fit by MAP gradient ascent.

use rand_distr::{Distribution, Normal};

use crate::corpus::Corpus;
use crate::detect::argmax;
use crate::error::{Error, Result};
use crate::io::{BundleKind, PredictionBundle};
use crate::rng;

const ITERATIONS: usize = 2000;
const LEARNING_RATE: f64 = 0.05;
const ITEM_ITERATIONS: usize = 1000;

/// `P(subject s answers item i) = sigmoid(a_i (theta_s - b_i))`.
#[derive(Debug, Clone, PartialEq)]
pub struct IrtFit {
    pub theta: Vec<f64>,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

impl IrtFit {
    /// Log posterior under priors theta, b ~ N(0, 1) and a ~ N(1, 1), up to
    /// a constant.
    pub fn log_posterior(&self, responses: &[Vec<bool>]) -> f64 {
        let mut lp = 0.0;
        for (s, row) in responses.iter().enumerate() {
            for (i, &r) in row.iter().enumerate() {
                let p = sigmoid(self.a[i] * (self.theta[s] - self.b[i])).clamp(1e-300, 1.0 - 1e-16);
                lp += if r { p.ln() } else { (1.0 - p).ln() };
            }
        }
        lp -= 0.5 * self.theta.iter().map(|t| t * t).sum::<f64>();
        lp -= 0.5 * self.b.iter().map(|b| b * b).sum::<f64>();
        lp -= 0.5 * self.a.iter().map(|a| (a - 1.0).powi(2)).sum::<f64>();
        lp
    }
}

/// `R[s][i]`: whether subject (model) `s` predicts the annotated label of
/// unit `i`.
pub fn response_matrix(bundles: &[PredictionBundle], corpus: &Corpus) -> Result<Vec<Vec<bool>>> {
    bundles
        .iter()
        .map(|b| {
            b.check_against(corpus)?;
            b.require_kind(|k| k == BundleKind::Single, "single")?;
            Ok(corpus
                .units()
                .iter()
                .enumerate()
                .map(|(i, u)| argmax(b.row(i)) == u.noisy_label)
                .collect())
        })
        .collect()
}

/// Log posterior of one item's parameters with abilities held fixed.
fn item_log_posterior(y: &[bool], theta: &[f64], a: f64, b: f64) -> f64 {
    let mut lp = -0.5 * (a - 1.0).powi(2) - 0.5 * b * b;
    for (t, &r) in theta.iter().zip(y) {
        let p = sigmoid(a * (t - b)).clamp(1e-300, 1.0 - 1e-16);
        lp += if r { p.ln() } else { (1.0 - p).ln() };
    }
    lp
}

/// Gradient ascent on one item's parameters from `a = a0, b = 0`.
fn ascend_item(y: &[bool], theta: &[f64], a0: f64) -> (f64, f64) {
    let (mut a, mut b) = (a0, 0.0);
    let lr = 0.5 / theta.len() as f64;
    for _ in 0..ITEM_ITERATIONS {
        let (mut ga, mut gb) = (-(a - 1.0), -b);
        for (t, &r) in theta.iter().zip(y) {
            let diff = t - b;
            let resid = f64::from(u8::from(r)) - sigmoid(a * diff);
            ga += resid * diff;
            gb -= resid * a;
        }
        a += lr * ga;
        b += lr * gb;
    }
    (a, b)
}

/// Full-batch gradient ascent on the log posterior. Each parameter's step is
/// its gradient divided by the number of responses it touches, which leaves
/// the optimum unchanged. The sign ambiguity between `(theta, a, b)` and
/// their negation is resolved by requiring `mean(a) >= 0`.
///
/// An item's posterior can have one mode with positive and one with negative
/// discrimination. After the joint ascent every item is therefore re-fit
/// with the abilities held fixed, starting from `a = 1` and from `a = -1`,
/// and the parameters with the highest item posterior are kept.
pub fn fit_irt_2pl(responses: &[Vec<bool>], seed: u64) -> Result<IrtFit> {
    let n_subjects = responses.len();
    let n_items = responses.first().map_or(0, Vec::len);
    if n_subjects < 2 || n_items < 2 {
        return Err(Error::invalid(format!(
            "IRT needs at least 2 subjects and 2 items, got {n_subjects} x {n_items}"
        )));
    }
    if responses.iter().any(|r| r.len() != n_items) {
        return Err(Error::mismatch("response rows differ in length"));
    }
    let ones: usize = responses.iter().map(|r| r.iter().filter(|&&x| x).count()).sum();
    if ones == 0 || ones == n_subjects * n_items {
        log::warn!("IRT response matrix is constant; the fit stays near the prior");
    }

    let mut r = rng::rng(seed, "irt", 0);
    let init = Normal::new(0.0, 0.1).expect("finite std dev");
    let mut fit = IrtFit {
        theta: (0..n_subjects).map(|_| init.sample(&mut r)).collect(),
        a: vec![1.0; n_items],
        b: vec![0.0; n_items],
    };
    let mut g_theta = vec![0.0; n_subjects];
    let mut g_a = vec![0.0; n_items];
    let mut g_b = vec![0.0; n_items];
    for _ in 0..ITERATIONS {
        g_theta.iter_mut().zip(&fit.theta).for_each(|(g, t)| *g = -t);
        g_a.iter_mut().zip(&fit.a).for_each(|(g, a)| *g = -(a - 1.0));
        g_b.iter_mut().zip(&fit.b).for_each(|(g, b)| *g = -b);
        for (s, row) in responses.iter().enumerate() {
            for (i, &resp) in row.iter().enumerate() {
                let diff = fit.theta[s] - fit.b[i];
                let resid = f64::from(u8::from(resp)) - sigmoid(fit.a[i] * diff);
                g_theta[s] += resid * fit.a[i];
                g_a[i] += resid * diff;
                g_b[i] -= resid * fit.a[i];
            }
        }
        let (ns, ni) = (n_subjects as f64, n_items as f64);
        fit.theta.iter_mut().zip(&g_theta).for_each(|(t, g)| *t += LEARNING_RATE * g / ni);
        fit.a.iter_mut().zip(&g_a).for_each(|(a, g)| *a += LEARNING_RATE * g / ns);
        fit.b.iter_mut().zip(&g_b).for_each(|(b, g)| *b += LEARNING_RATE * g / ns);
    }
    for i in 0..n_items {
        let responses_i: Vec<bool> = responses.iter().map(|row| row[i]).collect();
        let current = (fit.a[i], fit.b[i]);
        let best = [current, ascend_item(&responses_i, &fit.theta, 1.0), ascend_item(&responses_i, &fit.theta, -1.0)]
            .into_iter()
            .map(|(a, b)| (item_log_posterior(&responses_i, &fit.theta, a, b), a, b))
            .fold((f64::NEG_INFINITY, current.0, current.1), |acc, x| if x.0 > acc.0 { x } else { acc });
        fit.a[i] = best.1;
        fit.b[i] = best.2;
    }
    if fit.a.iter().sum::<f64>() < 0.0 {
        for v in fit.theta.iter_mut().chain(fit.a.iter_mut()).chain(fit.b.iter_mut()) {
            *v = -*v;
        }
    }
    if fit.theta.iter().chain(&fit.a).chain(&fit.b).any(|v| !v.is_finite()) {
        return Err(Error::invalid("IRT fit diverged"));
    }
    Ok(fit)
}
