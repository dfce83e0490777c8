use super::{argmax, entropy, FlagVector, Polarity, ScoreVector};
use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::io::{BundleKind, PredictionBundle};

fn single(bundle: &PredictionBundle, corpus: &Corpus) -> Result<()> {
    bundle.check_against(corpus)?;
    bundle.require_kind(|k| k == BundleKind::Single, "single")
}

/// Flags units whose predicted label differs from the annotated one.
pub fn retag(bundle: &PredictionBundle, corpus: &Corpus) -> Result<FlagVector> {
    single(bundle, corpus)?;
    let flags = corpus
        .units()
        .iter()
        .enumerate()
        .map(|(i, u)| argmax(bundle.row(i)) != u.noisy_label)
        .collect();
    FlagVector::new("RE", corpus, flags)
}

/// Confident learning with per-class self-confidence thresholds.
///
/// The threshold of class `j` is the mean predicted probability of `j` over
/// the units annotated `j`. A unit's estimated true label is the most probable
/// class among those whose probability reaches their threshold; the unit is
/// flagged when that label differs from the annotation. Units reaching no
/// threshold are left unflagged.
pub fn confident_learning(bundle: &PredictionBundle, corpus: &Corpus) -> Result<FlagVector> {
    single(bundle, corpus)?;
    let n_classes = corpus.n_classes();
    let mut sums = vec![0.0; n_classes];
    let mut counts = vec![0usize; n_classes];
    for (i, u) in corpus.units().iter().enumerate() {
        sums[u.noisy_label] += bundle.row(i)[u.noisy_label];
        counts[u.noisy_label] += 1;
    }
    // a class nobody is annotated with has no threshold and is never a candidate
    let thresholds: Vec<f64> = sums
        .iter()
        .zip(&counts)
        .map(|(&s, &c)| if c == 0 { f64::INFINITY } else { s / c as f64 })
        .collect();

    let flags = corpus
        .units()
        .iter()
        .enumerate()
        .map(|(i, u)| {
            let row = bundle.row(i);
            let mut best: Option<usize> = None;
            for k in 0..n_classes {
                if row[k] >= thresholds[k] && best.is_none_or(|b| row[k] > row[b]) {
                    best = Some(k);
                }
            }
            matches!(best, Some(k) if k != u.noisy_label)
        })
        .collect();
    FlagVector::new("CL", corpus, flags)
}

/// `1 - p(annotated label)`.
pub fn classification_uncertainty(bundle: &PredictionBundle, corpus: &Corpus) -> Result<ScoreVector> {
    single(bundle, corpus)?;
    let scores = corpus
        .units()
        .iter()
        .enumerate()
        .map(|(i, u)| 1.0 - bundle.row(i)[u.noisy_label])
        .collect();
    ScoreVector::new("CU", corpus, scores, Polarity::HighIsSuspicious)
}

/// Gap between the two most probable classes; small gaps are suspicious.
pub fn prediction_margin(bundle: &PredictionBundle, corpus: &Corpus) -> Result<ScoreVector> {
    single(bundle, corpus)?;
    let scores = (0..bundle.len())
        .map(|i| {
            let row = bundle.row(i);
            if row.len() < 2 {
                return 1.0;
            }
            let (mut first, mut second) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
            for &p in row {
                if p > first {
                    second = first;
                    first = p;
                } else if p > second {
                    second = p;
                }
            }
            first - second
        })
        .collect();
    ScoreVector::new("PM", corpus, scores, Polarity::LowIsSuspicious)
}

/// Mean entropy over the stochastic passes of a repeated bundle.
pub fn dropout_uncertainty(bundle: &PredictionBundle, corpus: &Corpus) -> Result<ScoreVector> {
    bundle.check_against(corpus)?;
    let BundleKind::Repeated(t) = bundle.kind() else {
        return Err(Error::mismatch(format!(
            "dropout uncertainty needs a repeated bundle, got {}",
            bundle.kind()
        )));
    };
    let scores = bundle
        .rows()
        .iter()
        .map(|passes| passes.iter().map(|r| entropy(r)).sum::<f64>() / t as f64)
        .collect();
    ScoreVector::new("DU", corpus, scores, Polarity::HighIsSuspicious)
}
