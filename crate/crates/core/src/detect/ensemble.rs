use super::dawid_skene::dawid_skene;
use super::{argmax, FlagVector};
use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::io::{BundleKind, PredictionBundle};
use crate::models::IrtFit;

/// Unique most frequent vote, `None` on a tie.
fn plurality(votes: impl IntoIterator<Item = usize>, n_classes: usize) -> Option<usize> {
    let mut counts = vec![0usize; n_classes];
    for v in votes {
        counts[v] += 1;
    }
    let best = *counts.iter().max()?;
    let mut winners = counts.iter().enumerate().filter(|(_, &c)| c == best);
    let (label, _) = winners.next()?;
    winners.next().is_none().then_some(label)
}

fn member_vote(method: &str, bundles: &[PredictionBundle], corpus: &Corpus) -> Result<FlagVector> {
    if bundles.len() < 2 {
        return Err(Error::invalid(format!(
            "{method} needs at least 2 ensemble members, got {}",
            bundles.len()
        )));
    }
    for b in bundles {
        b.check_against(corpus)?;
        b.require_kind(|k| k == BundleKind::Single, "single")?;
    }
    let flags = corpus
        .units()
        .iter()
        .enumerate()
        .map(|(i, u)| {
            let votes = bundles.iter().map(|b| argmax(b.row(i)));
            matches!(plurality(votes, corpus.n_classes()), Some(l) if l != u.noisy_label)
        })
        .collect();
    FlagVector::new(method, corpus, flags)
}

/// Flags units whose plurality label over the members differs from the
/// annotation. Plurality ties never flag.
pub fn diverse_ensemble(bundles: &[PredictionBundle], corpus: &Corpus) -> Result<FlagVector> {
    member_vote("DE", bundles, corpus)
}

/// Majority vote over models trained on random projections; same tie rule as
/// [`diverse_ensemble`].
pub fn projection_ensemble(bundles: &[PredictionBundle], corpus: &Corpus) -> Result<FlagVector> {
    member_vote("PE", bundles, corpus)
}

/// Treats each stochastic pass as an annotator and adjudicates with
/// Dawid-Skene.
pub fn label_aggregation(bundle: &PredictionBundle, corpus: &Corpus) -> Result<FlagVector> {
    bundle.check_against(corpus)?;
    let t = match bundle.kind() {
        BundleKind::Repeated(t) => t,
        other => {
            return Err(Error::mismatch(format!(
                "label aggregation needs a repeated bundle, got {other}"
            )))
        }
    };
    if t < 2 {
        return Err(Error::invalid("label aggregation needs at least 2 passes"));
    }
    let votes: Vec<Vec<usize>> = bundle
        .rows()
        .iter()
        .map(|passes| passes.iter().map(|r| argmax(r)).collect())
        .collect();
    let ds = dawid_skene(&votes, corpus.n_classes())?;
    let flags = corpus
        .units()
        .iter()
        .zip(&ds.labels)
        .map(|(u, &l)| l != u.noisy_label)
        .collect();
    FlagVector::new("LA", corpus, flags)
}

/// Flags items with negative discrimination.
pub fn irt_flag(fit: &IrtFit, corpus: &Corpus) -> Result<FlagVector> {
    if fit.a.len() != corpus.n_units() {
        return Err(Error::mismatch(format!(
            "IRT fit has {} items for {} units",
            fit.a.len(),
            corpus.n_units()
        )));
    }
    FlagVector::new("IRT", corpus, fit.a.iter().map(|&a| a < 0.0).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Document, Task};
    use rand::{Rng, SeedableRng};

    fn corpus(labels: &[usize], n_classes: usize) -> Corpus {
        let classes = (0..n_classes).map(|c| format!("c{c}")).collect();
        let docs = labels
            .iter()
            .enumerate()
            .map(|(i, &l)| Document::text(format!("u{i:03}"), "x", l))
            .collect();
        Corpus::new(Task::TextClassification, classes, docs, "t").unwrap()
    }

    fn one_hot(c: &Corpus, preds: &[usize]) -> PredictionBundle {
        let rows = preds
            .iter()
            .map(|&p| {
                let mut r = vec![0.0; c.n_classes()];
                r[p] = 1.0;
                r
            })
            .collect();
        PredictionBundle::single("m", c, rows).unwrap()
    }

    #[test]
    fn plurality_disagreement_flags() {
        let c = corpus(&[0], 2);
        let members = [one_hot(&c, &[1]), one_hot(&c, &[1]), one_hot(&c, &[0])];
        assert!(diverse_ensemble(&members, &c).unwrap().flags[0]);
    }

    #[test]
    fn plurality_tie_does_not_flag() {
        let c = corpus(&[0], 2);
        let members = [one_hot(&c, &[0]), one_hot(&c, &[1])];
        assert!(!diverse_ensemble(&members, &c).unwrap().flags[0]);
        let c1 = corpus(&[2], 3);
        let members = [one_hot(&c1, &[0]), one_hot(&c1, &[1])];
        assert!(!projection_ensemble(&members, &c1).unwrap().flags[0]);
    }

    #[test]
    fn agreeing_members_never_flag() {
        let labels = [0, 1, 2, 0];
        let c = corpus(&labels, 3);
        let members = vec![one_hot(&c, &labels); 3];
        assert_eq!(diverse_ensemble(&members, &c).unwrap().n_flagged(), 0);
    }

    #[test]
    fn too_few_members_is_an_error() {
        let c = corpus(&[0], 2);
        assert!(diverse_ensemble(&[one_hot(&c, &[0])], &c).is_err());
        assert!(projection_ensemble(&[], &c).is_err());
    }

    #[test]
    fn seventeen_member_vote_matches_direct_count() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        let labels: Vec<usize> = (0..40).map(|_| rng.random_range(0..3)).collect();
        let c = corpus(&labels, 3);
        let preds: Vec<Vec<usize>> = (0..17)
            .map(|_| (0..40).map(|_| rng.random_range(0..3)).collect())
            .collect();
        let members: Vec<_> = preds.iter().map(|p| one_hot(&c, p)).collect();
        let flags = projection_ensemble(&members, &c).unwrap().flags;
        for (i, &l) in labels.iter().enumerate() {
            let mut counts = [0; 3];
            for p in &preds {
                counts[p[i]] += 1;
            }
            let max = *counts.iter().max().unwrap();
            let winners: Vec<usize> = (0..3).filter(|&k| counts[k] == max).collect();
            let expect = winners.len() == 1 && winners[0] != l;
            assert_eq!(flags[i], expect, "unit {i} counts {counts:?}");
        }
    }

    #[test]
    fn unanimous_passes_against_label_flag() {
        let c = corpus(&[0, 1], 2);
        let rows = vec![vec![vec![0.1, 0.9]; 4], vec![vec![0.1, 0.9]; 4]];
        let b = PredictionBundle::for_corpus("m", &c, BundleKind::Repeated(4), rows).unwrap();
        assert_eq!(label_aggregation(&b, &c).unwrap().flags, vec![true, false]);
    }

    #[test]
    fn passes_matching_labels_flag_nothing() {
        let labels = [0, 1, 1, 0, 2];
        let c = corpus(&labels, 3);
        let rows = labels
            .iter()
            .map(|&l| {
                let mut r = vec![0.0; 3];
                r[l] = 1.0;
                vec![r; 3]
            })
            .collect();
        let b = PredictionBundle::for_corpus("m", &c, BundleKind::Repeated(3), rows).unwrap();
        assert_eq!(label_aggregation(&b, &c).unwrap().n_flagged(), 0);
    }

    #[test]
    fn irt_flags_strictly_negative_discrimination() {
        let c = corpus(&[0, 0, 0], 2);
        let fit = IrtFit {
            theta: vec![0.0, 1.0],
            a: vec![-0.5, 0.0, 1.2],
            b: vec![0.0; 3],
        };
        assert_eq!(irt_flag(&fit, &c).unwrap().flags, vec![true, false, false]);
    }
}
