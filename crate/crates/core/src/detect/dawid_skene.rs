//! Dawid-Skene label adjudication by expectation maximization.

use crate::error::{Error, Result};

const MAX_ITERATIONS: usize = 100;
const TOLERANCE: f64 = 1e-6;
/// Additive smoothing on the class prior and confusion counts.
const SMOOTHING: f64 = 0.01;

#[derive(Debug, Clone, PartialEq)]
pub struct DawidSkeneResult {
    /// Adjudicated label per item; posterior ties go to the lowest class.
    pub labels: Vec<usize>,
    /// Posterior over true classes per item.
    pub posteriors: Vec<Vec<f64>>,
    /// `confusion[annotator][true][given]`.
    pub confusion: Vec<Vec<Vec<f64>>>,
    pub log_likelihood: f64,
    pub iterations: usize,
}

/// Runs EM on `votes[item][annotator]`, initialized from vote fractions.
/// Every item must be labeled by the same annotators.
pub fn dawid_skene(votes: &[Vec<usize>], n_classes: usize) -> Result<DawidSkeneResult> {
    let n_annotators = votes.first().map(Vec::len).unwrap_or(0);
    if votes.is_empty() || n_annotators == 0 || n_classes == 0 {
        return Err(Error::invalid("Dawid-Skene needs at least one item and one annotator"));
    }
    for (i, v) in votes.iter().enumerate() {
        if v.len() != n_annotators {
            return Err(Error::mismatch(format!(
                "item {i} has {} votes, expected {n_annotators}",
                v.len()
            )));
        }
        if let Some(&bad) = v.iter().find(|&&c| c >= n_classes) {
            return Err(Error::invalid(format!("vote {bad} out of range for {n_classes} classes")));
        }
    }

    let mut post: Vec<Vec<f64>> = votes
        .iter()
        .map(|v| {
            let mut r = vec![0.0; n_classes];
            for &c in v {
                r[c] += 1.0 / n_annotators as f64;
            }
            r
        })
        .collect();

    let mut confusion = vec![vec![vec![0.0; n_classes]; n_classes]; n_annotators];
    let mut prior = vec![0.0; n_classes];
    let mut ll = f64::NEG_INFINITY;
    let mut iterations = 0;
    for it in 1..=MAX_ITERATIONS {
        iterations = it;
        // M-step
        for (k, p) in prior.iter_mut().enumerate() {
            let mass: f64 = post.iter().map(|r| r[k]).sum();
            *p = (mass + SMOOTHING) / (votes.len() as f64 + SMOOTHING * n_classes as f64);
        }
        for (j, conf) in confusion.iter_mut().enumerate() {
            for row in conf.iter_mut() {
                row.fill(SMOOTHING);
            }
            for (v, r) in votes.iter().zip(&post) {
                for k in 0..n_classes {
                    conf[k][v[j]] += r[k];
                }
            }
            for row in conf.iter_mut() {
                let s: f64 = row.iter().sum();
                row.iter_mut().for_each(|x| *x /= s);
            }
        }
        // E-step
        let mut new_ll = 0.0;
        for (v, r) in votes.iter().zip(post.iter_mut()) {
            for k in 0..n_classes {
                r[k] = prior[k].ln() + v.iter().enumerate().map(|(j, &c)| confusion[j][k][c].ln()).sum::<f64>();
            }
            let m = r.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let z: f64 = r.iter().map(|x| (x - m).exp()).sum();
            new_ll += m + z.ln();
            r.iter_mut().for_each(|x| *x = (*x - m).exp() / z);
        }
        let converged = (new_ll - ll).abs() < TOLERANCE;
        ll = new_ll;
        if converged {
            break;
        }
    }

    let labels = post.iter().map(|r| super::argmax(r)).collect();
    Ok(DawidSkeneResult {
        labels,
        posteriors: post,
        confusion,
        log_likelihood: ll,
        iterations,
    })
}
