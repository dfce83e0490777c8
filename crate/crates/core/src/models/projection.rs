//! Logistic regressions on random Gaussian projections of embeddings.

use rand_distr::{Distribution, Normal};

use super::{doc_folds, BaselineSpec, LogReg, SparseVec};
use crate::corpus::{Corpus, FoldAssignment};
use crate::error::{Error, Result};
use crate::io::{EmbeddingSet, PredictionBundle};
use crate::rng;

pub const DEFAULT_PROJECTIONS: usize = 17;

/// `members` bundles, each from a cross-validated logistic regression on the
/// embeddings multiplied by a seeded `d x d_proj` matrix with entries drawn
/// from N(0, 1/d_proj). Only the learning rate, L2, epochs and seed of `spec`
/// are used.
pub fn gaussian_projection_ensemble(
    corpus: &Corpus,
    embeddings: &EmbeddingSet,
    members: usize,
    d_proj: usize,
    folds: &FoldAssignment,
    spec: &BaselineSpec,
) -> Result<Vec<PredictionBundle>> {
    embeddings.check_against(corpus)?;
    let d = embeddings.dim();
    if d_proj == 0 || d_proj > d {
        return Err(Error::invalid(format!(
            "projection dimension {d_proj} must lie in [1, {d}]"
        )));
    }
    if members == 0 {
        return Err(Error::invalid("the projection ensemble needs at least one member"));
    }
    let doc_fold = doc_folds(corpus, folds)?;
    let unit_fold: Vec<usize> = corpus.units().iter().map(|u| doc_fold[u.doc_index]).collect();
    let labels = corpus.noisy_labels();
    let normal = Normal::new(0.0, (1.0 / d_proj as f64).sqrt()).expect("finite std dev");

    let mut out = Vec::with_capacity(members);
    for j in 0..members {
        let mut r = rng::rng(spec.seed, "projection", j as u64);
        // row-major d x d_proj
        let matrix: Vec<f64> = (0..d * d_proj).map(|_| normal.sample(&mut r)).collect();
        let xs: Vec<SparseVec> = embeddings
            .vectors()
            .iter()
            .map(|v| {
                let mut z = vec![0.0; d_proj];
                for (x, row) in v.iter().zip(matrix.chunks_exact(d_proj)) {
                    for (zk, m) in z.iter_mut().zip(row) {
                        *zk += x * m;
                    }
                }
                let mut sparse: SparseVec = z.into_iter().enumerate().map(|(k, v)| (k as u32, v)).collect();
                sparse.push((d_proj as u32, 1.0));
                sparse
            })
            .collect();

        let mut rows: Vec<Vec<f64>> = vec![Vec::new(); corpus.n_units()];
        for f in 0..folds.k() {
            let test: Vec<usize> = (0..xs.len()).filter(|&u| unit_fold[u] == f).collect();
            if test.is_empty() {
                continue;
            }
            let train: Vec<usize> = (0..xs.len()).filter(|&u| unit_fold[u] != f).collect();
            let mut model = LogReg::new(d_proj + 1, corpus.n_classes());
            let mut tr = rng::rng(spec.seed, &format!("projection-train-{j}"), f as u64);
            for _ in 0..spec.epochs {
                model.epoch(&xs, &labels, &train, spec.learning_rate, spec.l2, &mut tr);
            }
            for u in test {
                rows[u] = model.predict(&xs[u]);
            }
        }
        out.push(PredictionBundle::single(format!("proj-{j:02}"), corpus, rows)?);
    }
    Ok(out)
}
