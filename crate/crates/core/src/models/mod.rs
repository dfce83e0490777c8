//! Shallow probabilistic baselines and the drivers that turn them into
//! prediction bundles.
//!
//! Text classification uses a multinomial logistic regression over one of
//! three hashed feature families. Token labeling uses the same learner per
//! token. Span labeling trains a per-token tagger over the BIO tagset and
//! reads span distributions off the tokens of each annotated span.

mod dynamics;
mod embed;
pub mod features;
mod irt;
pub mod logreg;
mod projection;

use crate::corpus::{Corpus, FoldAssignment, Position, Task};
use crate::error::{Error, Result};
use crate::io::{BundleKind, PredictionBundle};
use crate::rng;
use crate::span_align::{Aggregation, BioTagset, SpanProjector};

pub use dynamics::{record_epoch_probs, EpochRecord, Schedule};
pub use embed::{builtin_embed, BUILTIN_EMBED_DIM};
pub use features::{Family, Featurizer, SparseVec};
pub use irt::{fit_irt_2pl, response_matrix, IrtFit};
pub use logreg::LogReg;
pub use projection::{gaussian_projection_ensemble, DEFAULT_PROJECTIONS};

pub const DEFAULT_DROPOUT_PASSES: usize = 10;
pub const DEFAULT_DROPOUT_RATE: f64 = 0.1;

#[derive(Debug, Clone, PartialEq)]
pub struct BaselineSpec {
    pub family: Family,
    pub epochs: usize,
    pub learning_rate: f64,
    pub l2: f64,
    pub seed: u64,
    pub hash_bits: u32,
    /// How token rows are combined into a span row.
    pub aggregation: Aggregation,
}

impl BaselineSpec {
    pub fn new(family: Family, seed: u64) -> Self {
        BaselineSpec {
            family,
            epochs: 10,
            learning_rate: 0.5,
            l2: 1e-5,
            seed,
            hash_bits: 16,
            aggregation: Aggregation::Mean,
        }
    }

    /// The first family of the task with default hyper-parameters.
    pub fn for_task(task: Task, seed: u64) -> Self {
        Self::new(Self::families(task)[0], seed)
    }

    /// The feature families usable for a task.
    pub fn families(task: Task) -> [Family; 3] {
        match task {
            Task::TextClassification => Family::TEXT,
            _ => Family::TOKEN,
        }
    }

    pub fn model_name(&self) -> String {
        format!("lr-{}", self.family)
    }

    pub fn validate(&self, task: Task) -> Result<()> {
        if self.epochs == 0 {
            return Err(Error::invalid("epochs must be at least 1"));
        }
        if !(12..=24).contains(&self.hash_bits) {
            return Err(Error::invalid(format!(
                "hash bits must lie in [12, 24], got {}",
                self.hash_bits
            )));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) || !(self.l2 >= 0.0) {
            return Err(Error::invalid("learning rate must be positive and L2 non-negative"));
        }
        if self.family.is_text() != (task == Task::TextClassification) {
            return Err(Error::invalid(format!(
                "feature family `{}` does not fit a {task} corpus",
                self.family
            )));
        }
        Ok(())
    }
}

/// Training examples derived from a corpus, and how unit rows are read off
/// example predictions.
#[derive(Debug, Clone)]
pub(crate) struct Design {
    pub xs: Vec<SparseVec>,
    pub ys: Vec<usize>,
    pub example_doc: Vec<usize>,
    pub n_features: usize,
    pub outputs: Vec<String>,
    unit_examples: Vec<Vec<usize>>,
    projector: Option<SpanProjector>,
    aggregation: Aggregation,
}

impl Design {
    pub fn build(corpus: &Corpus, spec: &BaselineSpec) -> Result<Design> {
        spec.validate(corpus.task())?;
        check_class_coverage(corpus)?;
        let feat = Featurizer::new(spec.family, spec.hash_bits, corpus);
        let mut d = Design {
            xs: Vec::new(),
            ys: Vec::new(),
            example_doc: Vec::new(),
            n_features: feat.dim(),
            outputs: corpus.classes().to_vec(),
            unit_examples: Vec::with_capacity(corpus.n_units()),
            projector: None,
            aggregation: spec.aggregation,
        };
        match corpus.task() {
            Task::TextClassification => {
                for u in corpus.units() {
                    d.unit_examples.push(vec![d.xs.len()]);
                    d.xs.push(feat.text(&corpus.documents()[u.doc_index]));
                    d.ys.push(u.noisy_label);
                    d.example_doc.push(u.doc_index);
                }
            }
            Task::TokenLabeling => {
                // units are ordered by document then token, as are the examples
                for u in corpus.units() {
                    let Position::Token(t) = u.position else {
                        unreachable!("token corpora hold token units")
                    };
                    d.unit_examples.push(vec![d.xs.len()]);
                    d.xs.push(feat.token(&corpus.documents()[u.doc_index], t));
                    d.ys.push(u.noisy_label);
                    d.example_doc.push(u.doc_index);
                }
            }
            Task::SpanLabeling => {
                let tagset = BioTagset::new(corpus.classes());
                let mut base = Vec::with_capacity(corpus.documents().len());
                for (di, doc) in corpus.documents().iter().enumerate() {
                    base.push(d.xs.len());
                    let spans: Vec<(usize, usize, usize)> = doc
                        .annotations
                        .iter()
                        .filter_map(|a| match a.position {
                            Position::Span { begin, end } => Some((begin, end, a.label)),
                            _ => None,
                        })
                        .collect();
                    let tags = tagset.encode_indices(&spans, doc.tokens.len());
                    for (t, tag) in tags.into_iter().enumerate() {
                        d.xs.push(feat.token(doc, t));
                        d.ys.push(tag);
                        d.example_doc.push(di);
                    }
                }
                for u in corpus.units() {
                    let range = u.position.token_range().expect("span units cover tokens");
                    d.unit_examples.push(range.map(|t| base[u.doc_index] + t).collect());
                }
                d.projector = Some(SpanProjector::new(tagset.tags(), corpus.classes())?);
                d.outputs = tagset.tags().to_vec();
            }
        }
        Ok(d)
    }

    pub fn n_outputs(&self) -> usize {
        self.outputs.len()
    }

    /// Class distribution of a unit given a predictor of example rows.
    pub fn unit_row(&self, unit: usize, mut example_row: impl FnMut(usize) -> Vec<f64>) -> Result<Vec<f64>> {
        let examples = &self.unit_examples[unit];
        match &self.projector {
            None => Ok(example_row(examples[0])),
            Some(p) => {
                let rows: Vec<Vec<f64>> = examples.iter().map(|&e| example_row(e)).collect();
                let mut dist = p.distribution(&rows, self.aggregation)?;
                dist.pop();
                Ok(renormalize(dist))
            }
        }
    }

    pub fn fit(&self, spec: &BaselineSpec, train: &[usize], stream: u64) -> LogReg {
        let mut model = LogReg::new(self.n_features, self.n_outputs());
        let mut r = rng::rng(spec.seed, "train", stream);
        for _ in 0..spec.epochs {
            model.epoch(&self.xs, &self.ys, train, spec.learning_rate, spec.l2, &mut r);
        }
        model
    }
}

/// Scales a non-negative row to sum 1; an all-zero row becomes uniform.
pub(crate) fn renormalize(mut row: Vec<f64>) -> Vec<f64> {
    let s: f64 = row.iter().sum();
    if s > 0.0 && s.is_finite() {
        row.iter_mut().for_each(|p| *p /= s);
    } else {
        let n = row.len() as f64;
        row.iter_mut().for_each(|p| *p = 1.0 / n);
    }
    row
}

fn check_class_coverage(corpus: &Corpus) -> Result<()> {
    let mut seen = vec![false; corpus.n_classes()];
    for u in corpus.units() {
        seen[u.noisy_label] = true;
    }
    if let Some(c) = seen.iter().position(|s| !s) {
        return Err(Error::invalid(format!(
            "class `{}` has no annotated units, so no training fold contains it",
            corpus.classes()[c]
        )));
    }
    Ok(())
}

/// Fold of every document, by document index.
pub(crate) fn doc_folds(corpus: &Corpus, folds: &FoldAssignment) -> Result<Vec<usize>> {
    corpus
        .documents()
        .iter()
        .map(|d| {
            folds
                .fold_of(&d.id)
                .ok_or_else(|| Error::mismatch(format!("document `{}` has no fold", d.id)))
        })
        .collect()
}

/// Per fold: the training examples (documents outside the fold) and the
/// units to predict (inside it).
pub(crate) fn fold_plan(design: &Design, corpus: &Corpus, folds: &FoldAssignment) -> Result<Vec<(Vec<usize>, Vec<usize>)>> {
    let doc_fold = doc_folds(corpus, folds)?;
    let mut plan = Vec::with_capacity(folds.k());
    for f in 0..folds.k() {
        let train: Vec<usize> = (0..design.xs.len())
            .filter(|&e| doc_fold[design.example_doc[e]] != f)
            .collect();
        let test: Vec<usize> = corpus
            .units()
            .iter()
            .enumerate()
            .filter(|(_, u)| doc_fold[u.doc_index] == f)
            .map(|(i, _)| i)
            .collect();
        if train.is_empty() && !test.is_empty() {
            return Err(Error::invalid(format!("fold {f} leaves no training data")));
        }
        plan.push((train, test));
    }
    Ok(plan)
}

/// A model fit on the whole corpus.
#[derive(Debug, Clone)]
pub struct TrainedModel {
    pub spec: BaselineSpec,
    pub model: LogReg,
    /// Output labels: corpus classes, or BIO tags for span labeling.
    pub classes: Vec<String>,
}

pub fn train_full(corpus: &Corpus, spec: &BaselineSpec) -> Result<TrainedModel> {
    let design = Design::build(corpus, spec)?;
    let all: Vec<usize> = (0..design.xs.len()).collect();
    Ok(TrainedModel {
        spec: spec.clone(),
        model: design.fit(spec, &all, u64::MAX),
        classes: design.outputs.clone(),
    })
}

/// Cross-validated predictions: each fold's units are predicted by a model
/// trained on the other folds' documents.
pub fn train_and_predict_cv(corpus: &Corpus, spec: &BaselineSpec, folds: &FoldAssignment) -> Result<PredictionBundle> {
    let design = Design::build(corpus, spec)?;
    let mut rows: Vec<Option<Vec<f64>>> = vec![None; corpus.n_units()];
    for (f, (train, test)) in fold_plan(&design, corpus, folds)?.into_iter().enumerate() {
        if test.is_empty() {
            continue;
        }
        let model = design.fit(spec, &train, f as u64);
        for u in test {
            rows[u] = Some(design.unit_row(u, |e| model.predict(&design.xs[e]))?);
        }
    }
    let rows = rows.into_iter().map(|r| r.expect("every unit lies in one fold")).collect();
    PredictionBundle::single(spec.model_name(), corpus, rows)
}

/// One model trained and evaluated on the full corpus.
pub fn train_and_predict_insample(corpus: &Corpus, spec: &BaselineSpec) -> Result<PredictionBundle> {
    let design = Design::build(corpus, spec)?;
    let all: Vec<usize> = (0..design.xs.len()).collect();
    let model = design.fit(spec, &all, u64::MAX);
    let rows = (0..corpus.n_units())
        .map(|u| design.unit_row(u, |e| model.predict(&design.xs[e])))
        .collect::<Result<_>>()?;
    PredictionBundle::single(format!("{}-insample", spec.model_name()), corpus, rows)
}

/// `passes` stochastic predictions per unit from the cross-validated models,
/// dropping each active input feature with probability `rate`.
pub fn predict_mc_dropout(
    corpus: &Corpus,
    spec: &BaselineSpec,
    folds: &FoldAssignment,
    passes: usize,
    rate: f64,
) -> Result<PredictionBundle> {
    if passes < 2 {
        return Err(Error::invalid("dropout needs at least 2 passes"));
    }
    if !(rate > 0.0 && rate < 1.0) {
        return Err(Error::invalid(format!("dropout rate must lie in (0, 1), got {rate}")));
    }
    let design = Design::build(corpus, spec)?;
    let mut rows: Vec<Vec<Vec<f64>>> = vec![Vec::new(); corpus.n_units()];
    for (f, (train, test)) in fold_plan(&design, corpus, folds)?.into_iter().enumerate() {
        if test.is_empty() {
            continue;
        }
        let model = design.fit(spec, &train, f as u64);
        let mut r = rng::rng(spec.seed, "dropout", f as u64);
        for u in test {
            for _ in 0..passes {
                let row = design.unit_row(u, |e| model.predict_dropout(&design.xs[e], rate, &mut r))?;
                rows[u].push(row);
            }
        }
    }
    PredictionBundle::for_corpus(
        format!("{}-dropout", spec.model_name()),
        corpus,
        BundleKind::Repeated(passes),
        rows,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::make_folds;
    use crate::synth;

    #[test]
    fn cv_bundle_covers_every_unit_and_is_deterministic() {
        let c = synth::text_corpus(&synth::TextSynth { n_docs: 120, ..Default::default() }, 3);
        let folds = make_folds(&c, 10, 1).unwrap();
        let spec = BaselineSpec::for_task(c.task(), 5);
        let a = train_and_predict_cv(&c, &spec, &folds).unwrap();
        assert_eq!(a.len(), 120);
        assert_eq!(a, train_and_predict_cv(&c, &spec, &folds).unwrap());
        for i in 0..a.len() {
            assert!((a.row(i).iter().sum::<f64>() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn separable_holdout_accuracy() {
        let c = synth::text_corpus(&synth::TextSynth { n_docs: 200, ..Default::default() }, 9);
        let folds = make_folds(&c, 10, 2).unwrap();
        for fam in Family::TEXT {
            let spec = BaselineSpec::new(fam, 1);
            let b = train_and_predict_cv(&c, &spec, &folds).unwrap();
            let correct = c
                .units()
                .iter()
                .enumerate()
                .filter(|(i, u)| crate::detect::argmax(b.row(*i)) == u.noisy_label)
                .count();
            assert!(correct as f64 / 200.0 >= 0.95, "{fam}: {correct}/200");
        }
    }

    #[test]
    fn insample_overfits() {
        let c = synth::text_corpus(&synth::TextSynth { n_docs: 200, ..Default::default() }, 4)
            .inject_noise(0.1, 3)
            .unwrap();
        let b = train_and_predict_insample(&c, &BaselineSpec::for_task(c.task(), 0)).unwrap();
        let agree = c
            .units()
            .iter()
            .enumerate()
            .filter(|(i, u)| crate::detect::argmax(b.row(*i)) == u.noisy_label)
            .count();
        assert!(agree as f64 / 200.0 >= 0.99, "{agree}/200");
    }

    #[test]
    fn dropout_shape_and_limit() {
        let c = synth::text_corpus(&synth::TextSynth { n_docs: 60, ..Default::default() }, 3);
        let folds = make_folds(&c, 5, 1).unwrap();
        let spec = BaselineSpec::for_task(c.task(), 5);
        let b = predict_mc_dropout(&c, &spec, &folds, 10, 0.1).unwrap();
        assert_eq!(b.kind(), BundleKind::Repeated(10));
        assert!(b.rows().iter().all(|r| r.len() == 10));
        let varied = b.rows().iter().any(|r| r.iter().any(|p| p != &r[0]));
        assert!(varied);

        let tiny = predict_mc_dropout(&c, &spec, &folds, 3, 1e-12).unwrap();
        let det = train_and_predict_cv(&c, &spec, &folds).unwrap();
        for i in 0..c.n_units() {
            for pass in tiny.unit_rows(i) {
                assert_eq!(pass.as_slice(), det.row(i));
            }
        }
        assert!(predict_mc_dropout(&c, &spec, &folds, 1, 0.1).is_err());
        assert!(predict_mc_dropout(&c, &spec, &folds, 3, 1.0).is_err());
    }

    #[test]
    fn empty_document_predicts_uniform_before_training() {
        let d = Design::build(
            &synth::text_corpus(&synth::TextSynth { n_docs: 10, ..Default::default() }, 1),
            &BaselineSpec::new(Family::TextBow, 0),
        )
        .unwrap();
        let m = LogReg::new(d.n_features, d.n_outputs());
        let p = m.predict(&vec![]);
        assert!(p.iter().all(|&x| (x - p[0]).abs() < 1e-15));
    }

    #[test]
    fn span_bundle_uses_span_classes() {
        let c = synth::span_corpus(&synth::SpanSynth { n_docs: 40, ..Default::default() }, 2);
        let folds = make_folds(&c, 4, 1).unwrap();
        let spec = BaselineSpec::for_task(c.task(), 1);
        let b = train_and_predict_cv(&c, &spec, &folds).unwrap();
        assert_eq!(b.classes(), c.classes());
        assert_eq!(b.len(), c.n_units());
    }

    #[test]
    fn spec_validation() {
        let mut s = BaselineSpec::new(Family::TextBow, 0);
        assert!(s.validate(Task::TextClassification).is_ok());
        assert!(s.validate(Task::TokenLabeling).is_err());
        s.hash_bits = 30;
        assert!(s.validate(Task::TextClassification).is_err());
        s.hash_bits = 16;
        s.epochs = 0;
        assert!(s.validate(Task::TextClassification).is_err());
    }
}
