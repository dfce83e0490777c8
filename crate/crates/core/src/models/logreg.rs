//! Multinomial logistic regression on sparse inputs, trained by SGD.

use rand::seq::SliceRandom;
use rand::Rng;

use super::features::SparseVec;

pub fn softmax(logits: &mut [f64]) {
    let m = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut z = 0.0;
    for l in logits.iter_mut() {
        *l = (*l - m).exp();
        z += *l;
    }
    logits.iter_mut().for_each(|l| *l /= z);
}

#[derive(Debug, Clone, PartialEq)]
pub struct LogReg {
    n_features: usize,
    n_classes: usize,
    /// Row-major `[feature][class]`.
    weights: Vec<f64>,
}

impl LogReg {
    pub fn new(n_features: usize, n_classes: usize) -> Self {
        LogReg {
            n_features,
            n_classes,
            weights: vec![0.0; n_features * n_classes],
        }
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    fn logits_where(&self, x: &SparseVec, keep: impl Fn(usize) -> bool) -> Vec<f64> {
        let mut out = vec![0.0; self.n_classes];
        for (j, &(f, v)) in x.iter().enumerate() {
            if !keep(j) {
                continue;
            }
            let row = &self.weights[f as usize * self.n_classes..][..self.n_classes];
            for (o, w) in out.iter_mut().zip(row) {
                *o += v * w;
            }
        }
        out
    }

    pub fn predict(&self, x: &SparseVec) -> Vec<f64> {
        let mut l = self.logits_where(x, |_| true);
        softmax(&mut l);
        l
    }

    /// Prediction with each active feature independently zeroed with
    /// probability `rate`.
    pub fn predict_dropout(&self, x: &SparseVec, rate: f64, rng: &mut impl Rng) -> Vec<f64> {
        let keep: Vec<bool> = x.iter().map(|_| !rng.random_bool(rate)).collect();
        let mut l = self.logits_where(x, |j| keep[j]);
        softmax(&mut l);
        l
    }

    /// One SGD step on the cross-entropy loss with L2 applied to the touched
    /// weights.
    pub fn step(&mut self, x: &SparseVec, y: usize, lr: f64, l2: f64) {
        let mut g = self.predict(x);
        g[y] -= 1.0;
        for &(f, v) in x {
            let row = &mut self.weights[f as usize * self.n_classes..][..self.n_classes];
            for (w, gk) in row.iter_mut().zip(&g) {
                *w -= lr * (v * gk + l2 * *w);
            }
        }
    }

    /// One pass over `examples` in a shuffled order.
    pub fn epoch(
        &mut self,
        xs: &[SparseVec],
        ys: &[usize],
        examples: &[usize],
        lr: f64,
        l2: f64,
        rng: &mut impl Rng,
    ) {
        let mut order = examples.to_vec();
        order.shuffle(rng);
        for i in order {
            self.step(&xs[i], ys[i], lr, l2);
        }
    }
}
