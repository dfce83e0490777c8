//! Runs detectors by method, building the model outputs each one needs.
//!
//! A [`Runner`] owns one corpus plus the configuration of the built-in
//! baselines. Bundles and embeddings are computed on first use and cached;
//! externally produced ones can be supplied instead. Detector outputs are
//! cached too, so Borda count reuses the scorers it combines.

use std::collections::BTreeMap;

use crate::calibrate::calibrate_bundle;
use crate::corpus::{Corpus, FoldAssignment, Task};
use crate::detect::{self, Method, ScoreVector};
use crate::error::{Error, Result};
use crate::io::{BundleKind, DetectorOutput, EmbeddingSet, PredictionBundle};
use crate::models::{self, BaselineSpec, Schedule};

pub const DEFAULT_PROJECTION_DIM: usize = 64;

/// Default Borda members per task: the three scorers with the highest
/// average precision on the bundled synthetic corpora.
pub fn default_borda_members(task: Task) -> Vec<Method> {
    match task {
        Task::TextClassification => vec![Method::CU, Method::CS, Method::DM],
        Task::TokenLabeling => vec![Method::CU, Method::LE, Method::WD],
        Task::SpanLabeling => vec![Method::CU, Method::MD, Method::WD],
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOptions {
    pub spec: BaselineSpec,
    /// Train the single-model baselines under cross-validation. When off,
    /// RE, CL, CU, PM, DE and IRT read models trained and evaluated on the
    /// whole corpus; DU, LA and PE stay cross-validated.
    pub cv: bool,
    /// Calibrate the bundles read by CL, CU, DU and PM.
    pub calibrate: bool,
    pub dropout_passes: usize,
    pub dropout_rate: f64,
    pub projections: usize,
    pub projection_dim: usize,
    pub knn_k: usize,
    pub borda: Vec<Method>,
}

impl RunOptions {
    pub fn new(task: Task, seed: u64) -> Self {
        RunOptions {
            spec: BaselineSpec::for_task(task, seed),
            cv: true,
            calibrate: false,
            dropout_passes: models::DEFAULT_DROPOUT_PASSES,
            dropout_rate: models::DEFAULT_DROPOUT_RATE,
            projections: models::DEFAULT_PROJECTIONS,
            projection_dim: DEFAULT_PROJECTION_DIM,
            knn_k: detect::DEFAULT_KNN_K,
            borda: default_borda_members(task),
        }
    }
}

/// Rejects methods that do not apply to the task, before any computation.
pub fn check_methods(methods: &[Method], task: Task, borda: &[Method]) -> Result<()> {
    for m in methods {
        m.check_task(task)?;
    }
    if methods.contains(&Method::BC) {
        if borda.is_empty() {
            return Err(Error::invalid("Borda count needs at least one member scorer"));
        }
        for m in borda {
            if m.is_flagger() || *m == Method::BC {
                return Err(Error::invalid(format!(
                    "Borda count combines scorers; {} is not one",
                    m.code()
                )));
            }
            m.check_task(task)?;
        }
    }
    Ok(())
}

pub struct Runner<'a> {
    corpus: &'a Corpus,
    folds: FoldAssignment,
    opts: RunOptions,
    single: Option<PredictionBundle>,
    single_supplied: bool,
    repeated: Option<PredictionBundle>,
    epochs: Option<PredictionBundle>,
    calibrated_single: Option<PredictionBundle>,
    calibrated_repeated: Option<PredictionBundle>,
    members: Option<Vec<PredictionBundle>>,
    projections: Option<Vec<PredictionBundle>>,
    embeddings: Option<EmbeddingSet>,
    outputs: BTreeMap<Method, DetectorOutput>,
}

impl<'a> Runner<'a> {
    pub fn new(corpus: &'a Corpus, folds: FoldAssignment, opts: RunOptions) -> Result<Self> {
        opts.spec.validate(corpus.task())?;
        if folds.unit_folds(corpus).len() != corpus.n_units() {
            return Err(Error::mismatch("fold assignment does not cover the corpus"));
        }
        Ok(Runner {
            corpus,
            folds,
            opts,
            single: None,
            single_supplied: false,
            repeated: None,
            epochs: None,
            calibrated_single: None,
            calibrated_repeated: None,
            members: None,
            projections: None,
            embeddings: None,
            outputs: BTreeMap::new(),
        })
    }

    pub fn options(&self) -> &RunOptions {
        &self.opts
    }

    pub fn folds(&self) -> &FoldAssignment {
        &self.folds
    }

    /// Uses an externally produced bundle for the methods reading its kind.
    pub fn supply_predictions(&mut self, bundle: PredictionBundle) -> Result<()> {
        bundle.check_against(self.corpus)?;
        self.single_supplied |= bundle.kind() == BundleKind::Single;
        let slot = match bundle.kind() {
            BundleKind::Single => &mut self.single,
            BundleKind::Repeated(_) => &mut self.repeated,
            BundleKind::PerEpoch(_) => &mut self.epochs,
        };
        *slot = Some(bundle);
        self.calibrated_single = None;
        self.calibrated_repeated = None;
        self.outputs.clear();
        Ok(())
    }

    /// Installs a bundle the built-in baselines produced earlier with the
    /// same options, e.g. one cached on disk. Unlike
    /// [`Runner::supply_predictions`] it does not count as an extra model.
    pub fn preload_predictions(&mut self, bundle: PredictionBundle) -> Result<()> {
        let supplied = self.single_supplied;
        self.supply_predictions(bundle)?;
        self.single_supplied = supplied;
        Ok(())
    }

    pub fn supply_embeddings(&mut self, embeddings: EmbeddingSet) -> Result<()> {
        embeddings.check_against(self.corpus)?;
        self.embeddings = Some(embeddings);
        self.projections = None;
        self.outputs.clear();
        Ok(())
    }

    /// The single-prediction bundle: supplied, or the first baseline family.
    pub fn single_bundle(&mut self) -> Result<&PredictionBundle> {
        if self.single.is_none() {
            let b = if self.opts.cv {
                models::train_and_predict_cv(self.corpus, &self.opts.spec, &self.folds)?
            } else {
                models::train_and_predict_insample(self.corpus, &self.opts.spec)?
            };
            self.single = Some(b);
        }
        Ok(self.single.as_ref().expect("just set"))
    }

    /// Stochastic passes from feature dropout on the cross-validated models.
    pub fn repeated_bundle(&mut self) -> Result<&PredictionBundle> {
        if self.repeated.is_none() {
            self.repeated = Some(models::predict_mc_dropout(
                self.corpus,
                &self.opts.spec,
                &self.folds,
                self.opts.dropout_passes,
                self.opts.dropout_rate,
            )?);
        }
        Ok(self.repeated.as_ref().expect("just set"))
    }

    /// Per-epoch predictions of a model trained on the whole corpus.
    pub fn epoch_bundle(&mut self) -> Result<&PredictionBundle> {
        if self.epochs.is_none() {
            let rec = models::record_epoch_probs(self.corpus, &self.opts.spec, Schedule::Plain, None)?;
            self.epochs = Some(rec.bundle);
        }
        Ok(self.epochs.as_ref().expect("just set"))
    }

    /// Supplied embeddings, or the built-in ones.
    pub fn embeddings(&mut self) -> Result<&EmbeddingSet> {
        if self.embeddings.is_none() {
            self.embeddings = Some(models::builtin_embed(self.corpus)?);
        }
        Ok(self.embeddings.as_ref().expect("just set"))
    }

    fn calibrated_single(&mut self) -> Result<PredictionBundle> {
        if self.calibrated_single.is_none() {
            let b = calibrate_bundle(&self.single_bundle()?.clone(), self.corpus, &self.folds)?;
            self.calibrated_single = Some(b);
        }
        Ok(self.calibrated_single.clone().expect("just set"))
    }

    fn calibrated_repeated(&mut self) -> Result<PredictionBundle> {
        if self.calibrated_repeated.is_none() {
            let b = calibrate_bundle(&self.repeated_bundle()?.clone(), self.corpus, &self.folds)?;
            self.calibrated_repeated = Some(b);
        }
        Ok(self.calibrated_repeated.clone().expect("just set"))
    }

    /// The bundle CL, CU and PM read, calibrated if so configured.
    fn scoring_single(&mut self) -> Result<PredictionBundle> {
        if self.opts.calibrate {
            self.calibrated_single()
        } else {
            self.single_bundle().cloned()
        }
    }

    /// One bundle per feature family of the task.
    pub fn member_bundles(&mut self) -> Result<&[PredictionBundle]> {
        if self.members.is_none() {
            let members = BaselineSpec::families(self.corpus.task())
                .into_iter()
                .map(|family| {
                    let spec = BaselineSpec { family, ..self.opts.spec.clone() };
                    if self.opts.cv {
                        models::train_and_predict_cv(self.corpus, &spec, &self.folds)
                    } else {
                        models::train_and_predict_insample(self.corpus, &spec)
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            self.members = Some(members);
        }
        Ok(self.members.as_deref().expect("just set"))
    }

    pub fn projection_bundles(&mut self) -> Result<&[PredictionBundle]> {
        if self.projections.is_none() {
            let emb = self.embeddings()?.clone();
            let d_proj = self.opts.projection_dim.min(emb.dim());
            let b = models::gaussian_projection_ensemble(
                self.corpus,
                &emb,
                self.opts.projections,
                d_proj,
                &self.folds,
                &self.opts.spec,
            )?;
            self.projections = Some(b);
        }
        Ok(self.projections.as_deref().expect("just set"))
    }

    /// The models IRT treats as subjects: one per feature family, plus an
    /// externally supplied single-prediction model.
    fn irt_subjects(&mut self) -> Result<Vec<PredictionBundle>> {
        let mut subjects = self.member_bundles()?.to_vec();
        if self.single_supplied {
            subjects.extend(self.single.clone());
        }
        Ok(subjects)
    }

    #[cfg(test)]
    fn subject_count(&mut self) -> usize {
        self.irt_subjects().unwrap().len()
    }

    /// Runs one detector (cached).
    pub fn run(&mut self, method: Method) -> Result<DetectorOutput> {
        if let Some(out) = self.outputs.get(&method) {
            return Ok(out.clone());
        }
        method.check_task(self.corpus.task())?;
        let c = self.corpus;
        let out: DetectorOutput = match method {
            Method::RE => detect::retag(self.single_bundle()?, c)?.into(),
            Method::CL => detect::confident_learning(&self.scoring_single()?, c)?.into(),
            Method::CU => detect::classification_uncertainty(&self.scoring_single()?, c)?.into(),
            Method::PM => detect::prediction_margin(&self.scoring_single()?, c)?.into(),
            Method::DU => {
                let b = if self.opts.calibrate {
                    self.calibrated_repeated()?
                } else {
                    self.repeated_bundle()?.clone()
                };
                detect::dropout_uncertainty(&b, c)?.into()
            }
            Method::LA => detect::label_aggregation(self.repeated_bundle()?, c)?.into(),
            Method::DM => detect::datamap_confidence(self.epoch_bundle()?, c)?.into(),
            Method::CS => {
                let rec = models::record_epoch_probs(c, &self.opts.spec, Schedule::Curriculum, None)?;
                detect::curriculum_spotter(rec.losses.as_deref().expect("curriculum records losses"), c)?.into()
            }
            Method::LS => {
                let rec = models::record_epoch_probs(c, &self.opts.spec, Schedule::Leitner, None)?;
                detect::leitner_spotter(rec.decks.as_deref().expect("leitner records decks"), c)?.into()
            }
            Method::MD => detect::mean_distance(self.embeddings()?, c)?.into(),
            Method::KNN => {
                let k = self.opts.knn_k;
                detect::knn_entropy(self.embeddings()?, c, k)?.into()
            }
            Method::DE => detect::diverse_ensemble(self.member_bundles()?, c)?.into(),
            Method::PE => detect::projection_ensemble(self.projection_bundles()?, c)?.into(),
            Method::IRT => {
                let subjects = self.irt_subjects()?;
                let responses = models::response_matrix(&subjects, c)?;
                let fit = models::fit_irt_2pl(&responses, self.opts.spec.seed)?;
                detect::irt_flag(&fit, c)?.into()
            }
            Method::VN => detect::variation_ngrams(c)?.into(),
            Method::LE => detect::label_entropy(c)?.into(),
            Method::WD => detect::weighted_discrepancy(c)?.into(),
            Method::BC => {
                let members = self.opts.borda.clone();
                check_methods(&[Method::BC], c.task(), &members)?;
                let scores: Vec<ScoreVector> = members
                    .iter()
                    .map(|&m| match self.run(m)? {
                        DetectorOutput::Scores(s) => Ok(s),
                        DetectorOutput::Flags(_) => unreachable!("members are checked to be scorers"),
                    })
                    .collect::<Result<_>>()?;
                detect::borda_count(&scores, scores.len())?.into()
            }
        };
        self.outputs.insert(method, out.clone());
        Ok(out)
    }
}
