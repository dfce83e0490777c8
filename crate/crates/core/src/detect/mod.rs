//! Annotation error detectors.
//!
//! Flaggers return a [`FlagVector`] (binary judgement per unit), scorers a
//! [`ScoreVector`] whose [`Polarity`] says whether high or low values are
//! suspicious. Both are aligned with the corpus unit order.

mod borda;
mod dawid_skene;
mod dynamics;
mod embedding;
mod ensemble;
mod model_based;
mod suffix;
mod surface;

use std::fmt;
use std::str::FromStr;

use crate::corpus::{Corpus, Task};
use crate::error::{Error, Result};

pub use borda::borda_count;
pub use dawid_skene::{dawid_skene, DawidSkeneResult};
pub use dynamics::{curriculum_spotter, datamap_confidence, leitner_spotter};
pub use embedding::{knn_entropy, mean_distance, DEFAULT_KNN_K};
pub use ensemble::{diverse_ensemble, irt_flag, label_aggregation, projection_ensemble};
pub use model_based::{
    classification_uncertainty, confident_learning, dropout_uncertainty, prediction_margin, retag,
};
pub use suffix::{RepeatClass, SuffixIndex};
pub use surface::{label_entropy, variation_ngrams, weighted_discrepancy};

/// Whether high or low scores indicate likely errors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Polarity {
    HighIsSuspicious,
    LowIsSuspicious,
}

impl fmt::Display for Polarity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Polarity::HighIsSuspicious => "high",
            Polarity::LowIsSuspicious => "low",
        })
    }
}

impl FromStr for Polarity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "high" => Ok(Polarity::HighIsSuspicious),
            "low" => Ok(Polarity::LowIsSuspicious),
            other => Err(Error::invalid(format!("unknown polarity `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlagVector {
    pub method: String,
    pub uids: Vec<String>,
    pub flags: Vec<bool>,
}

impl FlagVector {
    pub fn new(method: impl Into<String>, corpus: &Corpus, flags: Vec<bool>) -> Result<Self> {
        if flags.len() != corpus.n_units() {
            return Err(Error::mismatch(format!(
                "{} flags for {} units",
                flags.len(),
                corpus.n_units()
            )));
        }
        Ok(FlagVector {
            method: method.into(),
            uids: corpus.units().iter().map(|u| u.uid.clone()).collect(),
            flags,
        })
    }

    pub fn n_flagged(&self) -> usize {
        self.flags.iter().filter(|&&f| f).count()
    }

    pub fn flagged_uids(&self) -> Vec<&str> {
        self.uids
            .iter()
            .zip(&self.flags)
            .filter(|(_, &f)| f)
            .map(|(u, _)| u.as_str())
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoreVector {
    pub method: String,
    pub uids: Vec<String>,
    pub scores: Vec<f64>,
    pub polarity: Polarity,
}

impl ScoreVector {
    pub fn new(
        method: impl Into<String>,
        corpus: &Corpus,
        scores: Vec<f64>,
        polarity: Polarity,
    ) -> Result<Self> {
        let uids = corpus.units().iter().map(|u| u.uid.clone()).collect();
        Self::from_parts(method, uids, scores, polarity)
    }

    pub fn from_parts(
        method: impl Into<String>,
        uids: Vec<String>,
        scores: Vec<f64>,
        polarity: Polarity,
    ) -> Result<Self> {
        let method = method.into();
        if uids.len() != scores.len() {
            return Err(Error::mismatch(format!(
                "{} scores for {} units",
                scores.len(),
                uids.len()
            )));
        }
        if let Some(i) = scores.iter().position(|s| !s.is_finite()) {
            return Err(Error::mismatch(format!(
                "{method}: non-finite score for `{}`",
                uids[i]
            )));
        }
        Ok(ScoreVector {
            method,
            uids,
            scores,
            polarity,
        })
    }

    /// Score oriented so that larger means more suspicious.
    pub fn suspicion(&self, i: usize) -> f64 {
        match self.polarity {
            Polarity::HighIsSuspicious => self.scores[i],
            Polarity::LowIsSuspicious => -self.scores[i],
        }
    }

    /// Unit indices from most to least suspicious; ties by uid ascending.
    pub fn ranking(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.scores.len()).collect();
        order.sort_by(|&a, &b| {
            self.suspicion(b)
                .total_cmp(&self.suspicion(a))
                .then_with(|| self.uids[a].cmp(&self.uids[b]))
        });
        order
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::from_parts(
            self.method.clone(),
            self.uids.clone(),
            self.scores.iter().map(|&s| f(s)).collect(),
            self.polarity,
        )
    }
}

/// The detection methods, by their usual abbreviations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    /// Confident learning
    CL,
    /// Curriculum spotter
    CS,
    /// Diverse ensemble
    DE,
    /// Item response theory
    IRT,
    /// Label aggregation
    LA,
    /// Leitner spotter
    LS,
    /// Projection ensemble
    PE,
    /// Retag
    RE,
    /// Variation n-grams
    VN,
    /// Borda count
    BC,
    /// Classification uncertainty
    CU,
    /// Data map confidence
    DM,
    /// Dropout uncertainty
    DU,
    /// k-nearest-neighbor entropy
    KNN,
    /// Label entropy
    LE,
    /// Mean distance
    MD,
    /// Prediction margin
    PM,
    /// Weighted discrepancy
    WD,
}

impl Method {
    pub const ALL: [Method; 18] = [
        Method::CL,
        Method::CS,
        Method::DE,
        Method::IRT,
        Method::LA,
        Method::LS,
        Method::PE,
        Method::RE,
        Method::VN,
        Method::BC,
        Method::CU,
        Method::DM,
        Method::DU,
        Method::KNN,
        Method::LE,
        Method::MD,
        Method::PM,
        Method::WD,
    ];

    pub fn code(self) -> &'static str {
        match self {
            Method::CL => "CL",
            Method::CS => "CS",
            Method::DE => "DE",
            Method::IRT => "IRT",
            Method::LA => "LA",
            Method::LS => "LS",
            Method::PE => "PE",
            Method::RE => "RE",
            Method::VN => "VN",
            Method::BC => "BC",
            Method::CU => "CU",
            Method::DM => "DM",
            Method::DU => "DU",
            Method::KNN => "KNN",
            Method::LE => "LE",
            Method::MD => "MD",
            Method::PM => "PM",
            Method::WD => "WD",
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Method::CL => "Confident Learning",
            Method::CS => "Curriculum Spotter",
            Method::DE => "Diverse Ensemble",
            Method::IRT => "Item Response Theory",
            Method::LA => "Label Aggregation",
            Method::LS => "Leitner Spotter",
            Method::PE => "Projection Ensemble",
            Method::RE => "Retag",
            Method::VN => "Variation N-Grams",
            Method::BC => "Borda Count",
            Method::CU => "Classification Uncertainty",
            Method::DM => "Data Map Confidence",
            Method::DU => "Dropout Uncertainty",
            Method::KNN => "k-Nearest Neighbor Entropy",
            Method::LE => "Label Entropy",
            Method::MD => "Mean Distance",
            Method::PM => "Prediction Margin",
            Method::WD => "Weighted Discrepancy",
        }
    }

    /// Curriculum and Leitner spotters produce rankings and are evaluated
    /// as scorers.
    pub fn is_flagger(self) -> bool {
        matches!(
            self,
            Method::CL
                | Method::DE
                | Method::IRT
                | Method::LA
                | Method::PE
                | Method::RE
                | Method::VN
        )
    }

    pub fn polarity(self) -> Option<Polarity> {
        match self {
            Method::DM | Method::PM => Some(Polarity::LowIsSuspicious),
            m if m.is_flagger() => None,
            _ => Some(Polarity::HighIsSuspicious),
        }
    }

    /// Task applicability: surface-form methods need repeated tokens, the
    /// training-dynamics methods need independently schedulable instances.
    pub fn applies_to(self, task: Task) -> bool {
        match self {
            Method::VN | Method::LE | Method::WD => task != Task::TextClassification,
            Method::CS | Method::LS | Method::DM => task == Task::TextClassification,
            _ => true,
        }
    }

    /// Checks applicability and explains a refusal.
    pub fn check_task(self, task: Task) -> Result<()> {
        if self.applies_to(task) {
            return Ok(());
        }
        let why = match self {
            Method::VN | Method::LE | Method::WD => {
                "it relies on repeated surface forms and is defined for token and span labeling only"
            }
            _ => "it schedules instances independently during training and is defined for text classification only",
        };
        Err(Error::invalid(format!(
            "method {} ({}) cannot run on a {task} corpus: {why} (method/task applicability table)",
            self.code(),
            self.name()
        )))
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let upper = s.trim().to_ascii_uppercase();
        Method::ALL
            .iter()
            .copied()
            .find(|m| m.code() == upper)
            .ok_or_else(|| Error::invalid(format!("unknown method `{s}`")))
    }
}

/// Index of the largest entry; ties go to the lowest index.
pub fn argmax(row: &[f64]) -> usize {
    let mut best = 0;
    for (i, &p) in row.iter().enumerate() {
        if p > row[best] {
            best = i;
        }
    }
    best
}

/// Natural-log entropy of a probability row; `0 ln 0 = 0`.
pub fn entropy(row: &[f64]) -> f64 {
    -row.iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| p * p.ln())
        .sum::<f64>()
}
