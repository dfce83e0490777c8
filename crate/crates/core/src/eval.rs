//! Evaluation of detectors against known errors, and report assembly.
//!
//! Flaggers get precision, recall, F1 and the share of units flagged.
//! Scorers get average precision and precision/recall at the top 10% of
//! the suspicion ranking. Rankings break ties by uid ascending. ROC AUC is
//! intentionally not offered: it overstates performance on the heavily
//! imbalanced error/non-error split.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::corpus::Corpus;
use crate::detect::{FlagVector, ScoreVector};
use crate::error::{Error, Result};

pub const TOP_FRACTION: f64 = 0.10;
pub const REPORT_MAGIC: &str = "#aed-report v1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Metrics {
    Flagger {
        precision: f64,
        recall: f64,
        f1: f64,
        pct_flagged: f64,
    },
    Scorer {
        /// Absent when the corpus has no errors.
        average_precision: Option<f64>,
        precision_at_10pct: f64,
        recall_at_10pct: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub method: String,
    pub task: String,
    pub dataset: String,
    pub n_units: usize,
    pub n_errors: usize,
    #[serde(flatten)]
    pub metrics: Metrics,
    /// Why a metric is absent, if one is.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl EvalReport {
    /// F1 for flaggers, AP for scorers (0 when absent).
    pub fn headline(&self) -> f64 {
        match &self.metrics {
            Metrics::Flagger { f1, .. } => *f1,
            Metrics::Scorer { average_precision, .. } => average_precision.unwrap_or(0.0),
        }
    }

    pub fn with_dataset(mut self, dataset: impl Into<String>) -> Self {
        self.dataset = dataset.into();
        self
    }
}

fn ratio(a: usize, b: usize) -> f64 {
    if b == 0 {
        0.0
    } else {
        a as f64 / b as f64
    }
}

fn gold(corpus: &Corpus, uids: &[String]) -> Result<Vec<bool>> {
    let errors = corpus
        .error_flags()
        .ok_or_else(|| Error::invalid("the corpus has no gold error information"))?;
    if uids.len() != corpus.n_units() || uids.iter().zip(corpus.units()).any(|(a, u)| a != &u.uid) {
        return Err(Error::mismatch("detector output does not cover the corpus units"));
    }
    Ok(errors)
}

/// Flags against gold errors; 0/0 counts as 0.
pub fn flag_metrics(flags: &[bool], errors: &[bool]) -> Metrics {
    let tp = flags.iter().zip(errors).filter(|(&f, &e)| f && e).count();
    let flagged = flags.iter().filter(|&&f| f).count();
    let n_err = errors.iter().filter(|&&e| e).count();
    let precision = ratio(tp, flagged);
    let recall = ratio(tp, n_err);
    let f1 = if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    };
    Metrics::Flagger {
        precision,
        recall,
        f1,
        pct_flagged: ratio(flagged, flags.len()),
    }
}

pub fn eval_flagger(flags: &FlagVector, corpus: &Corpus) -> Result<EvalReport> {
    let errors = gold(corpus, &flags.uids)?;
    Ok(EvalReport {
        method: flags.method.clone(),
        task: corpus.task().short_name().to_string(),
        dataset: String::new(),
        n_units: flags.flags.len(),
        n_errors: errors.iter().filter(|&&e| e).count(),
        metrics: flag_metrics(&flags.flags, &errors),
        note: None,
    })
}

/// `ceil(fraction * n)`, guarded against floating error just above an
/// integer.
pub fn top_count(n: usize, fraction: f64) -> usize {
    ((fraction * n as f64 - 1e-9).ceil().max(0.0) as usize).min(n)
}

/// Mean over error ranks `r` of (errors in the top `r`) / `r`.
pub fn average_precision(ranked_errors: &[bool]) -> Option<f64> {
    let total = ranked_errors.iter().filter(|&&e| e).count();
    if total == 0 {
        return None;
    }
    let mut hits = 0;
    let mut sum = 0.0;
    for (r, &e) in ranked_errors.iter().enumerate() {
        if e {
            hits += 1;
            sum += hits as f64 / (r + 1) as f64;
        }
    }
    Some(sum / total as f64)
}

pub fn eval_scorer(scores: &ScoreVector, corpus: &Corpus) -> Result<EvalReport> {
    let errors = gold(corpus, &scores.uids)?;
    let ranked: Vec<bool> = scores.ranking().into_iter().map(|i| errors[i]).collect();
    let n_errors = errors.iter().filter(|&&e| e).count();
    let m = top_count(ranked.len(), TOP_FRACTION);
    let top_hits = ranked[..m].iter().filter(|&&e| e).count();
    let ap = average_precision(&ranked);
    Ok(EvalReport {
        method: scores.method.clone(),
        task: corpus.task().short_name().to_string(),
        dataset: String::new(),
        n_units: ranked.len(),
        n_errors,
        metrics: Metrics::Scorer {
            average_precision: ap,
            precision_at_10pct: ratio(top_hits, m),
            recall_at_10pct: ratio(top_hits, n_errors),
        },
        note: ap.is_none().then(|| "average precision undefined: the corpus has no errors".into()),
    })
}

/// Flags the `ceil(fraction * n)` most suspicious units.
pub fn scorer_to_flags(scores: &ScoreVector, fraction: f64) -> Result<FlagVector> {
    if !(0.0..=1.0).contains(&fraction) {
        return Err(Error::invalid(format!("fraction {fraction} outside [0, 1]")));
    }
    let mut flags = vec![false; scores.scores.len()];
    for i in scores.ranking().into_iter().take(top_count(flags.len(), fraction)) {
        flags[i] = true;
    }
    Ok(FlagVector {
        method: scores.method.clone(),
        uids: scores.uids.clone(),
        flags,
    })
}

/// Harmonic mean; 0 when empty or when any value is 0.
pub fn harmonic_mean_summary(values: &[f64]) -> f64 {
    if values.is_empty() || values.iter().any(|&v| v <= 0.0) {
        return 0.0;
    }
    values.len() as f64 / values.iter().map(|v| 1.0 / v).sum::<f64>()
}

pub const REPORT_COLUMNS: [&str; 13] = [
    "method",
    "task",
    "dataset",
    "kind",
    "n_units",
    "n_errors",
    "precision",
    "recall",
    "f1",
    "pct_flagged",
    "average_precision",
    "precision_at_10pct",
    "recall_at_10pct",
];

/// All evaluation rows of a run plus per-method harmonic means.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub schema: String,
    pub reports: Vec<EvalReport>,
    /// Harmonic mean of each method's headline metric across datasets.
    pub summary: BTreeMap<String, f64>,
}

pub fn assemble_report(reports: Vec<EvalReport>) -> ReportDocument {
    let mut by_method: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for r in &reports {
        by_method.entry(r.method.clone()).or_default().push(r.headline());
    }
    ReportDocument {
        schema: REPORT_MAGIC.trim_start_matches('#').to_string(),
        summary: by_method
            .into_iter()
            .map(|(m, v)| (m, harmonic_mean_summary(&v)))
            .collect(),
        reports,
    }
}

fn cell(v: Option<f64>) -> String {
    v.map_or_else(|| "NA".to_string(), |x| format!("{x:.6}"))
}

impl ReportDocument {
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        writeln!(out, "{REPORT_MAGIC}").unwrap();
        writeln!(out, "{}", REPORT_COLUMNS.join("\t")).unwrap();
        for r in &self.reports {
            let (kind, vals) = match &r.metrics {
                Metrics::Flagger {
                    precision,
                    recall,
                    f1,
                    pct_flagged,
                } => (
                    "flagger",
                    [Some(*precision), Some(*recall), Some(*f1), Some(*pct_flagged), None, None, None],
                ),
                Metrics::Scorer {
                    average_precision,
                    precision_at_10pct,
                    recall_at_10pct,
                } => (
                    "scorer",
                    [None, None, None, None, *average_precision, Some(*precision_at_10pct), Some(*recall_at_10pct)],
                ),
            };
            let cells: Vec<String> = vals.iter().map(|v| cell(*v)).collect();
            writeln!(
                out,
                "{}\t{}\t{}\t{kind}\t{}\t{}\t{}",
                r.method,
                r.task,
                r.dataset,
                r.n_units,
                r.n_errors,
                cells.join("\t")
            )
            .unwrap();
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let doc: ReportDocument =
            serde_json::from_str(s).map_err(|e| Error::invalid(format!("malformed report: {e}")))?;
        if doc.schema != REPORT_MAGIC.trim_start_matches('#') {
            return Err(Error::invalid(format!("unsupported report schema `{}`", doc.schema)));
        }
        Ok(doc)
    }

    /// Human-readable table with the harmonic-mean summary.
    pub fn summary_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "{:<6} {:<6} {:<16} {:>8} {:>8} {:>8} {:>8}", "method", "task", "dataset", "P/AP", "R/P@10", "F1/R@10", "%flag").unwrap();
        for r in &self.reports {
            let row = match &r.metrics {
                Metrics::Flagger {
                    precision,
                    recall,
                    f1,
                    pct_flagged,
                } => [Some(*precision), Some(*recall), Some(*f1), Some(*pct_flagged)],
                Metrics::Scorer {
                    average_precision,
                    precision_at_10pct,
                    recall_at_10pct,
                } => [*average_precision, Some(*precision_at_10pct), Some(*recall_at_10pct), None],
            };
            let c: Vec<String> = row.iter().map(|v| v.map_or("-".into(), |x| format!("{x:.3}"))).collect();
            writeln!(out, "{:<6} {:<6} {:<16} {:>8} {:>8} {:>8} {:>8}", r.method, r.task, r.dataset, c[0], c[1], c[2], c[3]).unwrap();
        }
        writeln!(out, "\nharmonic mean of F1 (flaggers) / AP (scorers) across datasets:").unwrap();
        for (m, h) in &self.summary {
            writeln!(out, "  {m:<6} {h:.3}").unwrap();
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Document, Task};
    use crate::detect::Polarity;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn corpus(errors: &[bool]) -> Corpus {
        let docs = errors
            .iter()
            .enumerate()
            .map(|(i, &e)| {
                let mut d = Document::text(format!("u{i:04}"), "x", 0);
                d.annotations[0].gold = Some(usize::from(e));
                d
            })
            .collect();
        Corpus::new(Task::TextClassification, vec!["a".into(), "b".into()], docs, "t").unwrap()
    }

    fn flagger(m: &Metrics) -> (f64, f64, f64, f64) {
        match m {
            Metrics::Flagger {
                precision,
                recall,
                f1,
                pct_flagged,
            } => (*precision, *recall, *f1, *pct_flagged),
            _ => panic!("not a flagger"),
        }
    }

    fn scorer(m: &Metrics) -> (Option<f64>, f64, f64) {
        match m {
            Metrics::Scorer {
                average_precision,
                precision_at_10pct,
                recall_at_10pct,
            } => (*average_precision, *precision_at_10pct, *recall_at_10pct),
            _ => panic!("not a scorer"),
        }
    }

    #[test]
    fn flagger_hand_confusion() {
        let c = corpus(&[false, false, true, true]);
        let f = FlagVector::new("X", &c, vec![true, false, true, false]).unwrap();
        let (p, r, f1, pct) = flagger(&eval_flagger(&f, &c).unwrap().metrics);
        assert_eq!((p, r, f1, pct), (0.5, 0.5, 0.5, 0.5));

        let none = FlagVector::new("X", &c, vec![false; 4]).unwrap();
        assert_eq!(flagger(&eval_flagger(&none, &c).unwrap().metrics), (0.0, 0.0, 0.0, 0.0));
        let exact = FlagVector::new("X", &c, vec![false, false, true, true]).unwrap();
        let (p, r, f1, _) = flagger(&eval_flagger(&exact, &c).unwrap().metrics);
        assert_eq!((p, r, f1), (1.0, 1.0, 1.0));
    }

    #[test]
    fn ap_hand_case() {
        assert_abs_diff_eq!(average_precision(&[true, false, true]).unwrap(), (1.0 + 2.0 / 3.0) / 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(average_precision(&[true, false, true]).unwrap(), 0.8333, epsilon = 1e-4);
        assert_eq!(average_precision(&[false, false]), None);
    }

    #[test]
    fn precision_recall_at_top() {
        let mut errors = vec![false; 20];
        for i in [0, 1, 5, 9] {
            errors[i] = true;
        }
        let c = corpus(&errors);
        let scores: Vec<f64> = (0..20).map(|i| 20.0 - i as f64).collect();
        let s = ScoreVector::new("S", &c, scores, Polarity::HighIsSuspicious).unwrap();
        let (_, p10, r10) = scorer(&eval_scorer(&s, &c).unwrap().metrics);
        assert_eq!((p10, r10), (1.0, 0.5));
    }

    #[test]
    fn zero_errors_ap_absent_with_reason() {
        let c = corpus(&[false; 5]);
        let s = ScoreVector::new("S", &c, vec![1.0; 5], Polarity::HighIsSuspicious).unwrap();
        let r = eval_scorer(&s, &c).unwrap();
        assert_eq!(scorer(&r.metrics).0, None);
        assert!(r.note.is_some());
    }

    #[test]
    fn cutoff_counts_and_ties() {
        assert_eq!(top_count(10, 0.1), 1);
        assert_eq!(top_count(20, 0.1), 2);
        assert_eq!(top_count(21, 0.1), 3);
        assert_eq!(top_count(0, 0.1), 0);
        let c = corpus(&[false; 10]);
        let s = ScoreVector::new("S", &c, vec![0.0, 5.0, 5.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0], Polarity::HighIsSuspicious)
            .unwrap();
        let f = scorer_to_flags(&s, 0.1).unwrap();
        assert_eq!(f.flagged_uids(), ["u0001#0"]);
    }

    #[test]
    fn harmonic_means() {
        assert_abs_diff_eq!(harmonic_mean_summary(&[0.5, 0.5]), 0.5);
        assert_eq!(harmonic_mean_summary(&[0.5, 0.0, 0.9]), 0.0);
        let v = [0.83, 0.33, 0.35];
        let expect = 3.0 / (1.0 / 0.83 + 1.0 / 0.33 + 1.0 / 0.35);
        assert_abs_diff_eq!(harmonic_mean_summary(&v), expect, epsilon = 1e-15);
        assert_abs_diff_eq!(expect, 0.4230, epsilon = 1e-4);
    }

    #[test]
    fn report_round_trip_and_schema() {
        let c = corpus(&[false, true, false, true]);
        let f = FlagVector::new("RE", &c, vec![false, true, true, false]).unwrap();
        let s = ScoreVector::new("CU", &c, vec![0.1, 0.9, 0.2, 0.3], Polarity::HighIsSuspicious).unwrap();
        let reports = vec![
            eval_flagger(&f, &c).unwrap().with_dataset("toy"),
            eval_scorer(&s, &c).unwrap().with_dataset("toy"),
        ];
        let doc = assemble_report(reports.clone());
        assert_eq!(ReportDocument::from_json(&doc.to_json()).unwrap(), doc);
        let tsv = doc.to_tsv();
        let mut lines = tsv.lines();
        assert_eq!(lines.next(), Some(REPORT_MAGIC));
        let header: Vec<&str> = lines.next().unwrap().split('\t').collect();
        assert_eq!(header, REPORT_COLUMNS);
        for line in lines {
            assert_eq!(line.split('\t').count(), REPORT_COLUMNS.len());
        }
        // spot value equals the evaluation output
        assert_abs_diff_eq!(doc.summary["CU"], reports[1].headline());
        let lower = format!("{}{}{}", tsv, doc.to_json(), doc.summary_text()).to_lowercase();
        assert!(!lower.contains("auc") && !lower.contains("roc"));
    }

    fn brute_ap(ranked: &[bool]) -> f64 {
        let error_ranks: Vec<usize> = (0..ranked.len()).filter(|&i| ranked[i]).collect();
        error_ranks
            .iter()
            .map(|&r| ranked[..=r].iter().filter(|&&e| e).count() as f64 / (r + 1) as f64)
            .sum::<f64>()
            / error_ranks.len() as f64
    }

    proptest! {
        #[test]
        fn ap_matches_definition(ranked in prop::collection::vec(any::<bool>(), 1..200)) {
            prop_assume!(ranked.iter().any(|&e| e));
            let ap = average_precision(&ranked).unwrap();
            prop_assert!((ap - brute_ap(&ranked)).abs() < 1e-12);
        }

        #[test]
        fn precision_at_m_counts_hits(errs in prop::collection::vec(any::<bool>(), 1..100), seed in 0u64..100) {
            let c = corpus(&errs);
            let scores: Vec<f64> = (0..errs.len()).map(|i| ((i as u64 * 31 + seed) % 17) as f64).collect();
            let s = ScoreVector::new("S", &c, scores, Polarity::LowIsSuspicious).unwrap();
            let (_, p, _) = scorer(&eval_scorer(&s, &c).unwrap().metrics);
            let m = top_count(errs.len(), TOP_FRACTION);
            let hits = s.ranking().into_iter().take(m).filter(|&i| errs[i]).count();
            prop_assert!((p * m as f64 - hits as f64).abs() < 1e-9);
        }

        #[test]
        fn monotone_transform_invariance(errs in prop::collection::vec(any::<bool>(), 2..80), seed in 0u64..100) {
            let c = corpus(&errs);
            let scores: Vec<f64> = (0..errs.len()).map(|i| ((i as u64 * 13 + seed) % 11) as f64 - 5.0).collect();
            let s = ScoreVector::new("S", &c, scores, Polarity::HighIsSuspicious).unwrap();
            let t = s.map(|x| x * x * x + x).unwrap();
            prop_assert_eq!(eval_scorer(&s, &c).unwrap(), eval_scorer(&t, &c).unwrap());
        }
    }
}
