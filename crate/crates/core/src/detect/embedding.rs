//! Vector-proximity scorers.

use super::{entropy, Polarity, ScoreVector};
use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::io::EmbeddingSet;

pub const DEFAULT_KNN_K: usize = 10;

fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Distance of each unit to the centroid of its annotated class.
pub fn mean_distance(embeddings: &EmbeddingSet, corpus: &Corpus) -> Result<ScoreVector> {
    embeddings.check_against(corpus)?;
    let dim = embeddings.dim();
    let mut centroids = vec![vec![0.0; dim]; corpus.n_classes()];
    let mut counts = vec![0usize; corpus.n_classes()];
    for (u, v) in corpus.units().iter().zip(embeddings.vectors()) {
        counts[u.noisy_label] += 1;
        for (c, x) in centroids[u.noisy_label].iter_mut().zip(v) {
            *c += x;
        }
    }
    for (c, &n) in centroids.iter_mut().zip(&counts) {
        if n > 0 {
            c.iter_mut().for_each(|x| *x /= n as f64);
        }
    }
    let scores = corpus
        .units()
        .iter()
        .zip(embeddings.vectors())
        .map(|(u, v)| euclidean(v, &centroids[u.noisy_label]))
        .collect();
    ScoreVector::new("MD", corpus, scores, Polarity::HighIsSuspicious)
}

/// Entropy of the softmax(-distance) weighted label distribution over the
/// `k` nearest other units. Distance ties are broken by unit order.
pub fn knn_entropy(embeddings: &EmbeddingSet, corpus: &Corpus, k: usize) -> Result<ScoreVector> {
    embeddings.check_against(corpus)?;
    if k == 0 {
        return Err(Error::invalid("k must be positive"));
    }
    let vectors = embeddings.vectors();
    let labels = corpus.noisy_labels();
    let n = vectors.len();
    let mut scores = Vec::with_capacity(n);
    let mut dists: Vec<(f64, usize)> = Vec::with_capacity(n);
    for i in 0..n {
        dists.clear();
        dists.extend((0..n).filter(|&j| j != i).map(|j| (euclidean(&vectors[i], &vectors[j]), j)));
        let k_eff = k.min(dists.len());
        if k_eff == 0 {
            scores.push(0.0);
            continue;
        }
        dists.select_nth_unstable_by(k_eff - 1, |a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let near = &dists[..k_eff];
        let d_min = near.iter().map(|d| d.0).fold(f64::INFINITY, f64::min);
        let mut q = vec![0.0; corpus.n_classes()];
        let mut z = 0.0;
        for &(d, j) in near {
            let w = (d_min - d).exp();
            q[labels[j]] += w;
            z += w;
        }
        q.iter_mut().for_each(|x| *x /= z);
        scores.push(entropy(&q));
    }
    ScoreVector::new("KNN", corpus, scores, Polarity::HighIsSuspicious)
}
