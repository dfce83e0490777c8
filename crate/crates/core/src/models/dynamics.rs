//! Per-epoch recording of training behaviour under three schedules.

use std::fmt;
use std::str::FromStr;

use super::{fold_plan, BaselineSpec, Design};
use crate::corpus::{Corpus, FoldAssignment, Task};
use crate::detect::argmax;
use crate::error::{Error, Result};
use crate::io::{BundleKind, PredictionBundle};
use crate::rng;

pub const LEITNER_DECKS: u8 = 5;
const DECILES: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Schedule {
    /// Every unit in every epoch.
    Plain,
    /// Easiest deciles first, by the loss of a preliminary one-epoch model.
    Curriculum,
    /// Deck `q` is presented every `2^q` epochs; a correct prediction
    /// promotes, a wrong one sends the unit back to deck 0.
    Leitner,
}

impl fmt::Display for Schedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Schedule::Plain => "plain",
            Schedule::Curriculum => "curriculum",
            Schedule::Leitner => "leitner",
        })
    }
}

impl FromStr for Schedule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plain" => Ok(Schedule::Plain),
            "curriculum" => Ok(Schedule::Curriculum),
            "leitner" => Ok(Schedule::Leitner),
            other => Err(Error::invalid(format!("unknown schedule `{other}`"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct EpochRecord {
    /// Full class distribution of every unit after every epoch.
    pub bundle: PredictionBundle,
    /// Curriculum only: loss per epoch from the unit's inclusion onward.
    pub losses: Option<Vec<Vec<f64>>>,
    /// Leitner only: the unit's deck at the start of each epoch.
    pub decks: Option<Vec<Vec<u8>>>,
}

fn loss(row: &[f64], label: usize) -> f64 {
    -row[label].max(1e-300).ln()
}

/// Number of easiest deciles in training during epoch `e` of `epochs`.
fn active_deciles(e: usize, epochs: usize) -> usize {
    ((e + 1) * DECILES / epochs).clamp(1, DECILES)
}

/// Trains under `schedule` and records predictions after each epoch.
///
/// `Plain` trains on the whole corpus, or, given folds, records each fold's
/// units from a model trained on the other folds. The curriculum and Leitner
/// schedules train and record on the whole corpus and need independently
/// schedulable instances, so they are limited to text classification.
pub fn record_epoch_probs(
    corpus: &Corpus,
    spec: &BaselineSpec,
    schedule: Schedule,
    folds: Option<&FoldAssignment>,
) -> Result<EpochRecord> {
    if schedule != Schedule::Plain {
        if corpus.task() != Task::TextClassification {
            return Err(Error::invalid(format!(
                "the {schedule} schedule applies to text classification only"
            )));
        }
        if folds.is_some() {
            return Err(Error::invalid(format!(
                "the {schedule} schedule trains and records on the whole corpus; drop the folds"
            )));
        }
    }
    let design = Design::build(corpus, spec)?;
    let n = corpus.n_units();
    let epochs = spec.epochs;
    let mut rows: Vec<Vec<Vec<f64>>> = vec![Vec::with_capacity(epochs); n];
    let mut losses = None;
    let mut decks = None;
    let labels = corpus.noisy_labels();

    match schedule {
        Schedule::Plain => {
            let plan = match folds {
                Some(f) => fold_plan(&design, corpus, f)?,
                None => vec![((0..design.xs.len()).collect(), (0..n).collect())],
            };
            for (f, (train, test)) in plan.into_iter().enumerate() {
                if test.is_empty() {
                    continue;
                }
                let mut model = super::LogReg::new(design.n_features, design.n_outputs());
                let mut r = rng::rng(spec.seed, "epochs", f as u64);
                for _ in 0..epochs {
                    model.epoch(&design.xs, &design.ys, &train, spec.learning_rate, spec.l2, &mut r);
                    for &u in &test {
                        rows[u].push(design.unit_row(u, |e| model.predict(&design.xs[e]))?);
                    }
                }
            }
        }
        Schedule::Curriculum => {
            let all: Vec<usize> = (0..n).collect();
            let mut pre = super::LogReg::new(design.n_features, design.n_outputs());
            let mut r = rng::rng(spec.seed, "curriculum-preliminary", 0);
            pre.epoch(&design.xs, &design.ys, &all, spec.learning_rate, spec.l2, &mut r);
            let pre_loss: Vec<f64> = (0..n).map(|u| loss(&pre.predict(&design.xs[u]), labels[u])).collect();
            let mut order = all.clone();
            order.sort_by(|&a, &b| pre_loss[a].total_cmp(&pre_loss[b]).then(a.cmp(&b)));
            let mut decile = vec![0; n];
            for (rank, &u) in order.iter().enumerate() {
                decile[u] = rank * DECILES / n;
            }

            let mut trace = vec![Vec::new(); n];
            let mut model = super::LogReg::new(design.n_features, design.n_outputs());
            let mut r = rng::rng(spec.seed, "curriculum", 0);
            for e in 0..epochs {
                let active = active_deciles(e, epochs);
                let train: Vec<usize> = all.iter().copied().filter(|&u| decile[u] < active).collect();
                model.epoch(&design.xs, &design.ys, &train, spec.learning_rate, spec.l2, &mut r);
                for u in 0..n {
                    let row = model.predict(&design.xs[u]);
                    if decile[u] < active {
                        trace[u].push(loss(&row, labels[u]));
                    }
                    rows[u].push(row);
                }
            }
            losses = Some(trace);
        }
        Schedule::Leitner => {
            let mut deck = vec![0u8; n];
            let mut trace = vec![Vec::with_capacity(epochs); n];
            let mut model = super::LogReg::new(design.n_features, design.n_outputs());
            let mut r = rng::rng(spec.seed, "leitner", 0);
            for e in 0..epochs {
                for u in 0..n {
                    trace[u].push(deck[u]);
                }
                let presented: Vec<usize> = (0..n).filter(|&u| e % (1usize << deck[u]) == 0).collect();
                model.epoch(&design.xs, &design.ys, &presented, spec.learning_rate, spec.l2, &mut r);
                for &u in &presented {
                    deck[u] = if argmax(&model.predict(&design.xs[u])) == labels[u] {
                        (deck[u] + 1).min(LEITNER_DECKS - 1)
                    } else {
                        0
                    };
                }
                for (u, row) in rows.iter_mut().enumerate() {
                    row.push(model.predict(&design.xs[u]));
                }
            }
            decks = Some(trace);
        }
    }

    let bundle = PredictionBundle::for_corpus(
        format!("{}-{schedule}", spec.model_name()),
        corpus,
        BundleKind::PerEpoch(epochs),
        rows,
    )?;
    Ok(EpochRecord { bundle, losses, decks })
}
