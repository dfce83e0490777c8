//! Training-dynamics scorers.

use super::{Polarity, ScoreVector};
use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::io::{BundleKind, PredictionBundle};

fn check_traces<T>(what: &str, traces: &[Vec<T>], corpus: &Corpus) -> Result<()> {
    if traces.len() != corpus.n_units() {
        return Err(Error::mismatch(format!(
            "{} {what} traces for {} units",
            traces.len(),
            corpus.n_units()
        )));
    }
    if let Some(i) = traces.iter().position(Vec::is_empty) {
        return Err(Error::mismatch(format!(
            "empty {what} trace for `{}`",
            corpus.units()[i].uid
        )));
    }
    Ok(())
}

/// Mean probability of the annotated label across epochs.
pub fn datamap_confidence(bundle: &PredictionBundle, corpus: &Corpus) -> Result<ScoreVector> {
    bundle.check_against(corpus)?;
    let BundleKind::PerEpoch(e) = bundle.kind() else {
        return Err(Error::mismatch(format!(
            "data map confidence needs a per-epoch bundle, got {}",
            bundle.kind()
        )));
    };
    let scores = corpus
        .units()
        .iter()
        .zip(bundle.rows())
        .map(|(u, epochs)| epochs.iter().map(|r| r[u.noisy_label]).sum::<f64>() / e as f64)
        .collect();
    ScoreVector::new("DM", corpus, scores, Polarity::LowIsSuspicious)
}

/// Mean cross-entropy loss per unit over the epochs after it entered the
/// curriculum. `losses[unit]` holds only those epochs.
pub fn curriculum_spotter(losses: &[Vec<f64>], corpus: &Corpus) -> Result<ScoreVector> {
    check_traces("loss", losses, corpus)?;
    let scores = losses
        .iter()
        .map(|l| l.iter().sum::<f64>() / l.len() as f64)
        .collect();
    ScoreVector::new("CS", corpus, scores, Polarity::HighIsSuspicious)
}

/// Fraction of epochs each unit spent in the first Leitner deck.
pub fn leitner_spotter(decks: &[Vec<u8>], corpus: &Corpus) -> Result<ScoreVector> {
    check_traces("deck", decks, corpus)?;
    let scores = decks
        .iter()
        .map(|d| d.iter().filter(|&&q| q == 0).count() as f64 / d.len() as f64)
        .collect();
    ScoreVector::new("LS", corpus, scores, Polarity::HighIsSuspicious)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Document, Task};
    use approx::assert_abs_diff_eq;

    fn corpus(n: usize) -> Corpus {
        let docs = (0..n).map(|i| Document::text(format!("u{i}"), "x", 0)).collect();
        Corpus::new(Task::TextClassification, vec!["a".into(), "b".into()], docs, "t").unwrap()
    }

    #[test]
    fn datamap_means_label_probability() {
        let c = corpus(2);
        let rows = vec![
            vec![vec![0.2, 0.8], vec![0.4, 0.6], vec![0.6, 0.4]],
            vec![vec![1.0, 0.0]; 3],
        ];
        let b = PredictionBundle::for_corpus("m", &c, BundleKind::PerEpoch(3), rows).unwrap();
        let s = datamap_confidence(&b, &c).unwrap();
        assert_abs_diff_eq!(s.scores[0], 0.4, epsilon = 1e-12);
        assert_abs_diff_eq!(s.scores[1], 1.0, epsilon = 1e-12);
        assert_eq!(s.ranking(), vec![0, 1]);
    }

    #[test]
    fn datamap_single_epoch_is_probability() {
        let c = corpus(1);
        let b = PredictionBundle::for_corpus("m", &c, BundleKind::PerEpoch(1), vec![vec![vec![0.3, 0.7]]]).unwrap();
        assert_abs_diff_eq!(datamap_confidence(&b, &c).unwrap().scores[0], 0.3, epsilon = 1e-12);
    }

    #[test]
    fn curriculum_mean_loss() {
        let c = corpus(5);
        let ln2 = std::f64::consts::LN_2;
        let losses = vec![
            vec![ln2; 4],
            vec![0.01, 0.0],
            vec![2.0, 1.0, 0.0],
            vec![0.5],
            vec![3.0, 3.0],
        ];
        let s = curriculum_spotter(&losses, &c).unwrap();
        assert_abs_diff_eq!(s.scores[0], ln2, epsilon = 1e-12);
        assert_abs_diff_eq!(s.scores[2], 1.0, epsilon = 1e-12);
        assert_eq!(s.ranking(), vec![4, 2, 0, 3, 1]);
    }

    #[test]
    fn leitner_deck_zero_fraction() {
        let c = corpus(3);
        let decks = vec![vec![0, 1, 0, 0], vec![0; 4], vec![0, 1, 2, 3]];
        let s = leitner_spotter(&decks, &c).unwrap();
        assert_eq!(s.scores, vec![0.75, 1.0, 0.25]);
    }

    #[test]
    fn trace_shape_errors() {
        let c = corpus(2);
        assert!(leitner_spotter(&[vec![0]], &c).is_err());
        assert!(curriculum_spotter(&[vec![0.1], vec![]], &c).is_err());
    }
}
