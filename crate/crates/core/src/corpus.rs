//! In-memory corpus model for text classification, token labeling and span
//! labeling, together with detection-unit extraction, fold partitioning and
//! synthetic label-noise injection.
//!
//! A [`Corpus`] is validated once on construction and is immutable
//! afterwards. Detection units are derived at construction time and are
//! ordered by `(doc_id, position)`; their uids (`doc_id#offset`) are the keys
//! used by every interchange file.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use rand::seq::index::sample;
use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    TextClassification,
    TokenLabeling,
    SpanLabeling,
}

impl Task {
    pub fn short_name(self) -> &'static str {
        match self {
            Task::TextClassification => "text",
            Task::TokenLabeling => "token",
            Task::SpanLabeling => "span",
        }
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

impl std::str::FromStr for Task {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "text" | "text_classification" => Ok(Task::TextClassification),
            "token" | "token_labeling" => Ok(Task::TokenLabeling),
            "span" | "span_labeling" => Ok(Task::SpanLabeling),
            other => Err(Error::invalid(format!(
                "unknown task `{other}` (expected text, token or span)"
            ))),
        }
    }
}

/// Where an annotation sits inside its document.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Position {
    Text,
    Token(usize),
    /// Token offsets, `begin` inclusive and `end` exclusive.
    Span { begin: usize, end: usize },
}

impl Position {
    pub fn kind(self) -> UnitKind {
        match self {
            Position::Text => UnitKind::Text,
            Position::Token(_) => UnitKind::Token,
            Position::Span { .. } => UnitKind::Span,
        }
    }

    /// The offset used in the unit id.
    pub fn offset(self) -> usize {
        match self {
            Position::Text => 0,
            Position::Token(i) => i,
            Position::Span { begin, .. } => begin,
        }
    }

    /// Token range covered by this position, if any.
    pub fn token_range(self) -> Option<std::ops::Range<usize>> {
        match self {
            Position::Text => None,
            Position::Token(i) => Some(i..i + 1),
            Position::Span { begin, end } => Some(begin..end),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UnitKind {
    Text,
    Token,
    Span,
}

/// A labeled span with explicit offsets, used for gold spans that have no
/// counterpart among the annotated (noisy) spans.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LabeledSpan {
    pub begin: usize,
    pub end: usize,
    pub label: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Annotation {
    pub position: Position,
    /// The label as annotated (possibly wrong); index into the corpus classes.
    pub label: usize,
    pub gold: Option<usize>,
    /// Explicit error flag. When absent it is derived from `gold`.
    pub is_error: Option<bool>,
}

impl Annotation {
    pub fn new(position: Position, label: usize) -> Self {
        Annotation {
            position,
            label,
            gold: None,
            is_error: None,
        }
    }

    pub fn with_gold(mut self, gold: usize) -> Self {
        self.gold = Some(gold);
        self
    }

    pub fn resolved_error(&self) -> Option<bool> {
        self.is_error.or_else(|| self.gold.map(|g| g != self.label))
    }
}

/// One sentence (token/span tasks) or one text (text classification).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub id: String,
    /// Tokens of the sentence; for text classification a single element
    /// holding the raw text.
    pub tokens: Vec<String>,
    pub annotations: Vec<Annotation>,
    /// Gold spans left unmatched by the annotated spans (span task only).
    pub missing: Vec<LabeledSpan>,
}

impl Document {
    pub fn text(id: impl Into<String>, text: impl Into<String>, label: usize) -> Self {
        Document {
            id: id.into(),
            tokens: vec![text.into()],
            annotations: vec![Annotation::new(Position::Text, label)],
            missing: Vec::new(),
        }
    }

    pub fn tagged(id: impl Into<String>, tokens: Vec<String>, labels: &[usize]) -> Self {
        let annotations = labels
            .iter()
            .enumerate()
            .map(|(i, &l)| Annotation::new(Position::Token(i), l))
            .collect();
        Document {
            id: id.into(),
            tokens,
            annotations,
            missing: Vec::new(),
        }
    }

    pub fn spans(id: impl Into<String>, tokens: Vec<String>, spans: &[LabeledSpan]) -> Self {
        let annotations = spans
            .iter()
            .map(|s| {
                Annotation::new(
                    Position::Span {
                        begin: s.begin,
                        end: s.end,
                    },
                    s.label,
                )
            })
            .collect();
        Document {
            id: id.into(),
            tokens,
            annotations,
            missing: Vec::new(),
        }
    }

    pub fn raw_text(&self) -> &str {
        self.tokens.first().map(String::as_str).unwrap_or("")
    }
}

/// A detection unit: the thing a detector flags or scores.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Unit {
    pub uid: String,
    pub doc_id: String,
    pub doc_index: usize,
    pub position: Position,
    pub noisy_label: usize,
    pub gold_label: Option<usize>,
    pub is_error: Option<bool>,
}

impl Unit {
    pub fn kind(&self) -> UnitKind {
        self.position.kind()
    }
}

pub fn make_uid(doc_id: &str, position: Position) -> String {
    format!("{doc_id}#{}", position.offset())
}

#[derive(Debug, Clone)]
pub struct Corpus {
    task: Task,
    classes: Vec<String>,
    documents: Vec<Document>,
    provenance: String,
    units: Vec<Unit>,
    uid_index: HashMap<String, usize>,
}

// provenance is descriptive and excluded from equality
impl PartialEq for Corpus {
    fn eq(&self, other: &Self) -> bool {
        self.task == other.task
            && self.classes == other.classes
            && self.documents == other.documents
    }
}

impl Corpus {
    /// Validates and builds a corpus. Documents are stored sorted by id.
    pub fn new(
        task: Task,
        classes: Vec<String>,
        mut documents: Vec<Document>,
        provenance: impl Into<String>,
    ) -> Result<Self> {
        if classes.is_empty() {
            return Err(Error::invalid("corpus has no classes"));
        }
        let mut seen_classes = HashSet::new();
        for c in &classes {
            if !seen_classes.insert(c.as_str()) {
                return Err(Error::invalid(format!("duplicate class `{c}`")));
            }
        }
        let mut seen = HashSet::new();
        for doc in &documents {
            if doc.id.is_empty() {
                return Err(Error::validation("", "empty document id"));
            }
            if !seen.insert(doc.id.as_str()) {
                return Err(Error::validation(&doc.id, "duplicate document id"));
            }
            validate_document(task, classes.len(), doc)?;
        }
        documents.sort_by(|a, b| a.id.cmp(&b.id));
        for doc in &mut documents {
            doc.annotations.sort_by_key(|a| a.position);
            doc.missing.sort();
        }

        let units = build_units(&documents);
        let uid_index = units
            .iter()
            .enumerate()
            .map(|(i, u)| (u.uid.clone(), i))
            .collect();
        Ok(Corpus {
            task,
            classes,
            documents,
            provenance: provenance.into(),
            units,
            uid_index,
        })
    }

    pub fn task(&self) -> Task {
        self.task
    }

    pub fn classes(&self) -> &[String] {
        &self.classes
    }

    pub fn n_classes(&self) -> usize {
        self.classes.len()
    }

    pub fn class_index(&self, name: &str) -> Option<usize> {
        self.classes.iter().position(|c| c == name)
    }

    pub fn documents(&self) -> &[Document] {
        &self.documents
    }

    pub fn document(&self, id: &str) -> Option<&Document> {
        self.documents
            .binary_search_by(|d| d.id.as_str().cmp(id))
            .ok()
            .map(|i| &self.documents[i])
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    /// Detection units in canonical `(doc_id, position)` order.
    pub fn units(&self) -> &[Unit] {
        &self.units
    }

    pub fn n_units(&self) -> usize {
        self.units.len()
    }

    pub fn unit_index(&self, uid: &str) -> Option<usize> {
        self.uid_index.get(uid).copied()
    }

    pub fn noisy_labels(&self) -> Vec<usize> {
        self.units.iter().map(|u| u.noisy_label).collect()
    }

    /// Per-unit error flags; `None` if any unit lacks gold information.
    pub fn error_flags(&self) -> Option<Vec<bool>> {
        self.units.iter().map(|u| u.is_error).collect()
    }

    pub fn with_provenance(mut self, provenance: impl Into<String>) -> Self {
        self.provenance = provenance.into();
        self
    }

    /// Replaces every document, keeping task and classes. Used by
    /// transformations that rewrite annotations.
    pub fn with_documents(&self, documents: Vec<Document>) -> Result<Self> {
        Corpus::new(
            self.task,
            self.classes.clone(),
            documents,
            self.provenance.clone(),
        )
    }

    /// Flips the labels of exactly `round(rate * n_units)` units, chosen
    /// without replacement. Each chosen unit receives a label drawn uniformly
    /// from the other classes; the label before corruption becomes the gold
    /// label of every unit. Span offsets are never touched.
    pub fn inject_noise(&self, rate: f64, seed: u64) -> Result<Corpus> {
        if !(0.0..=1.0).contains(&rate) || rate.is_nan() {
            return Err(Error::invalid(format!("noise rate {rate} outside [0, 1]")));
        }
        let n = self.units.len();
        let n_flip = (rate * n as f64).round() as usize;
        if n_flip > 0 && self.classes.len() < 2 {
            return Err(Error::invalid(
                "cannot flip labels in a corpus with fewer than 2 classes",
            ));
        }

        let mut rng = rng::rng(seed, "inject_noise", 0);
        let mut chosen: Vec<usize> = sample(&mut rng, n, n_flip).into_vec();
        chosen.sort_unstable();
        let n_classes = self.classes.len();
        let mut new_labels: HashMap<usize, usize> = HashMap::with_capacity(n_flip);
        for idx in chosen {
            let original = self.units[idx].noisy_label;
            let mut draw = rng.random_range(0..n_classes - 1);
            if draw >= original {
                draw += 1;
            }
            new_labels.insert(idx, draw);
        }

        // units are ordered by (document, annotation), so a running counter
        // recovers each annotation's unit index
        let mut documents = self.documents.clone();
        let mut unit_idx = 0;
        for doc in &mut documents {
            for ann in &mut doc.annotations {
                let original = ann.label;
                ann.gold = Some(original);
                ann.is_error = None;
                if let Some(&flipped) = new_labels.get(&unit_idx) {
                    ann.label = flipped;
                }
                unit_idx += 1;
            }
        }
        Corpus::new(
            self.task,
            self.classes.clone(),
            documents,
            format!("{} | noise rate={rate} seed={seed}", self.provenance),
        )
    }
}

fn validate_document(task: Task, n_classes: usize, doc: &Document) -> Result<()> {
    let id = doc.id.as_str();
    for ann in &doc.annotations {
        if ann.label >= n_classes {
            return Err(Error::validation(
                id,
                format!("label index {} outside class list", ann.label),
            ));
        }
        if let Some(g) = ann.gold {
            if g >= n_classes {
                return Err(Error::validation(
                    id,
                    format!("gold label index {g} outside class list"),
                ));
            }
        }
    }
    match task {
        Task::TextClassification => {
            if doc.tokens.len() != 1 {
                return Err(Error::validation(
                    id,
                    "text documents carry exactly one text field",
                ));
            }
            if doc.annotations.len() != 1 || doc.annotations[0].position != Position::Text {
                return Err(Error::validation(
                    id,
                    "text documents carry exactly one document-level label",
                ));
            }
            if !doc.missing.is_empty() {
                return Err(Error::validation(id, "missing spans on a text document"));
            }
        }
        Task::TokenLabeling => {
            if doc.tokens.is_empty() {
                return Err(Error::validation(id, "document has no tokens"));
            }
            if doc.annotations.len() != doc.tokens.len() {
                return Err(Error::validation(
                    id,
                    format!(
                        "{} tokens but {} token labels",
                        doc.tokens.len(),
                        doc.annotations.len()
                    ),
                ));
            }
            let mut positions: Vec<usize> = Vec::with_capacity(doc.annotations.len());
            for ann in &doc.annotations {
                match ann.position {
                    Position::Token(i) => positions.push(i),
                    _ => {
                        return Err(Error::validation(
                            id,
                            "token documents may only carry token annotations",
                        ))
                    }
                }
            }
            positions.sort_unstable();
            if positions.iter().enumerate().any(|(i, &p)| i != p) {
                return Err(Error::validation(id, "token annotations must cover every token once"));
            }
            if !doc.missing.is_empty() {
                return Err(Error::validation(id, "missing spans on a token document"));
            }
        }
        Task::SpanLabeling => {
            if doc.tokens.is_empty() {
                return Err(Error::validation(id, "document has no tokens"));
            }
            let mut ranges = Vec::with_capacity(doc.annotations.len());
            for ann in &doc.annotations {
                match ann.position {
                    Position::Span { begin, end } => {
                        check_span(id, begin, end, doc.tokens.len())?;
                        ranges.push((begin, end));
                    }
                    _ => {
                        return Err(Error::validation(
                            id,
                            "span documents may only carry span annotations",
                        ))
                    }
                }
            }
            ranges.sort_unstable();
            for w in ranges.windows(2) {
                if w[1].0 < w[0].1 {
                    return Err(Error::validation(
                        id,
                        format!(
                            "overlapping spans ({}, {}) and ({}, {})",
                            w[0].0, w[0].1, w[1].0, w[1].1
                        ),
                    ));
                }
            }
            for m in &doc.missing {
                check_span(id, m.begin, m.end, doc.tokens.len())?;
                if m.label >= n_classes {
                    return Err(Error::validation(id, "missing span label outside class list"));
                }
            }
        }
    }
    Ok(())
}

fn check_span(doc_id: &str, begin: usize, end: usize, n_tokens: usize) -> Result<()> {
    if begin >= end || end > n_tokens {
        return Err(Error::validation(
            doc_id,
            format!("malformed span offsets ({begin}, {end}) for {n_tokens} tokens"),
        ));
    }
    Ok(())
}

fn build_units(documents: &[Document]) -> Vec<Unit> {
    let mut units = Vec::new();
    for (doc_index, doc) in documents.iter().enumerate() {
        for ann in &doc.annotations {
            units.push(Unit {
                uid: make_uid(&doc.id, ann.position),
                doc_id: doc.id.clone(),
                doc_index,
                position: ann.position,
                noisy_label: ann.label,
                gold_label: ann.gold,
                is_error: ann.resolved_error(),
            });
        }
    }
    units
}

/// Document-level partition into `k` folds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldAssignment {
    k: usize,
    fold_of_doc: BTreeMap<String, usize>,
}

impl FoldAssignment {
    /// Seeded shuffle of the document ids followed by round-robin assignment,
    /// so fold sizes differ by at most one.
    pub fn new(corpus: &Corpus, k: usize, seed: u64) -> Result<Self> {
        let n_docs = corpus.documents().len();
        if k < 2 {
            return Err(Error::invalid(format!("fold count must be at least 2, got {k}")));
        }
        if k > n_docs {
            return Err(Error::invalid(format!(
                "cannot split {n_docs} documents into {k} folds"
            )));
        }
        let mut ids: Vec<&str> = corpus.documents().iter().map(|d| d.id.as_str()).collect();
        let mut rng = rng::rng(seed, "folds", 0);
        ids.shuffle(&mut rng);
        let fold_of_doc = ids
            .into_iter()
            .enumerate()
            .map(|(i, id)| (id.to_string(), i % k))
            .collect();
        Ok(FoldAssignment { k, fold_of_doc })
    }

    /// Builds an assignment from an explicit mapping (e.g. a fold file).
    pub fn from_map(corpus: &Corpus, k: usize, fold_of_doc: BTreeMap<String, usize>) -> Result<Self> {
        if k < 2 {
            return Err(Error::invalid(format!("fold count must be at least 2, got {k}")));
        }
        for doc in corpus.documents() {
            match fold_of_doc.get(&doc.id) {
                Some(&f) if f < k => {}
                Some(&f) => {
                    return Err(Error::mismatch(format!(
                        "document `{}` assigned to fold {f} but k = {k}",
                        doc.id
                    )))
                }
                None => {
                    return Err(Error::mismatch(format!(
                        "document `{}` has no fold assignment",
                        doc.id
                    )))
                }
            }
        }
        if fold_of_doc.len() != corpus.documents().len() {
            return Err(Error::mismatch(
                "fold assignment mentions documents that are not in the corpus",
            ));
        }
        Ok(FoldAssignment { k, fold_of_doc })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn fold_of(&self, doc_id: &str) -> Option<usize> {
        self.fold_of_doc.get(doc_id).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, usize)> {
        self.fold_of_doc.iter().map(|(d, &f)| (d.as_str(), f))
    }

    pub fn docs_in(&self, fold: usize) -> Vec<&str> {
        self.fold_of_doc
            .iter()
            .filter(|(_, &f)| f == fold)
            .map(|(d, _)| d.as_str())
            .collect()
    }

    /// Fold of every unit, in corpus unit order.
    pub fn unit_folds(&self, corpus: &Corpus) -> Vec<usize> {
        corpus
            .units()
            .iter()
            .map(|u| self.fold_of_doc[&u.doc_id])
            .collect()
    }
}

/// Convenience wrapper over [`FoldAssignment::new`].
pub fn make_folds(corpus: &Corpus, k: usize, seed: u64) -> Result<FoldAssignment> {
    FoldAssignment::new(corpus, k, seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn text_corpus(n: usize, n_classes: usize) -> Corpus {
        let classes = (0..n_classes).map(|c| format!("c{c}")).collect();
        let docs = (0..n)
            .map(|i| Document::text(format!("d{i:05}"), format!("text {i}"), i % n_classes))
            .collect();
        Corpus::new(Task::TextClassification, classes, docs, "test").unwrap()
    }

    fn toks(s: &str) -> Vec<String> {
        s.split_whitespace().map(String::from).collect()
    }

    #[test]
    fn text_units_one_per_document() {
        let c = text_corpus(3, 2);
        assert_eq!(c.units().len(), 3);
        assert!(c.units().iter().all(|u| u.kind() == UnitKind::Text));
        assert_eq!(c.units()[0].uid, "d00000#0");
    }

    #[test]
    fn token_units_one_per_token() {
        let docs = vec![
            Document::tagged("s1", toks("a b c d"), &[0, 1, 0, 1]),
            Document::tagged("s2", toks("a b c d e"), &[0, 0, 0, 1, 1]),
        ];
        let c = Corpus::new(Task::TokenLabeling, vec!["X".into(), "Y".into()], docs, "t").unwrap();
        assert_eq!(c.units().len(), 9);
        assert_eq!(c.units()[4].uid, "s2#0");
        assert_eq!(c.units()[8].position, Position::Token(4));
    }

    #[test]
    fn span_units_and_bad_offsets() {
        let spans = [
            LabeledSpan { begin: 0, end: 2, label: 0 },
            LabeledSpan { begin: 3, end: 4, label: 1 },
        ];
        let doc = Document::spans("d", toks("John Smith in Paris"), &spans);
        let c = Corpus::new(Task::SpanLabeling, vec!["PER".into(), "LOC".into()], vec![doc], "t")
            .unwrap();
        assert_eq!(c.units().len(), 2);
        assert_eq!(c.units()[1].uid, "d#3");

        let bad = Document::spans("broken", toks("a b"), &[LabeledSpan { begin: 1, end: 5, label: 0 }]);
        let err = Corpus::new(Task::SpanLabeling, vec!["PER".into()], vec![bad], "t").unwrap_err();
        match err {
            Error::Validation { doc_id, .. } => assert_eq!(doc_id, "broken"),
            other => panic!("unexpected error {other:?}"),
        }
        let empty = Document::spans("e", toks("a b"), &[LabeledSpan { begin: 1, end: 1, label: 0 }]);
        assert!(Corpus::new(Task::SpanLabeling, vec!["PER".into()], vec![empty], "t").is_err());
    }

    #[test]
    fn duplicate_or_empty_ids_rejected() {
        let docs = vec![Document::text("a", "x", 0), Document::text("a", "y", 0)];
        assert!(Corpus::new(Task::TextClassification, vec!["c".into()], docs, "t").is_err());
        let docs = vec![Document::text("", "x", 0)];
        assert!(Corpus::new(Task::TextClassification, vec!["c".into()], docs, "t").is_err());
    }

    #[test]
    fn labels_must_be_known_classes() {
        let docs = vec![Document::text("a", "x", 3)];
        assert!(Corpus::new(Task::TextClassification, vec!["c".into()], docs, "t").is_err());
    }

    #[test]
    fn gold_label_derives_error_flag() {
        let mut doc = Document::text("a", "x", 0);
        doc.annotations[0].gold = Some(1);
        let c = Corpus::new(Task::TextClassification, vec!["p".into(), "q".into()], vec![doc], "t")
            .unwrap();
        assert_eq!(c.units()[0].is_error, Some(true));
    }

    #[test]
    fn noise_exact_count() {
        let c = text_corpus(1000, 3);
        let noisy = c.inject_noise(0.05, 11).unwrap();
        let errors: Vec<_> = noisy.units().iter().filter(|u| u.is_error == Some(true)).collect();
        assert_eq!(errors.len(), 50);
        for u in &errors {
            assert_ne!(Some(u.noisy_label), u.gold_label);
        }
        assert_eq!(noisy, c.inject_noise(0.05, 11).unwrap());
        assert_ne!(noisy, c.inject_noise(0.05, 12).unwrap());
    }

    #[test]
    fn noise_rate_zero_is_identity_on_labels() {
        let c = text_corpus(50, 2);
        let same = c.inject_noise(0.0, 1).unwrap();
        assert_eq!(same.noisy_labels(), c.noisy_labels());
        assert!(same.units().iter().all(|u| u.is_error == Some(false)));
    }

    #[test]
    fn noise_count_on_atis_sized_corpus() {
        let c = text_corpus(4978, 5);
        let noisy = c.inject_noise(0.05, 3).unwrap();
        let n_err = noisy.units().iter().filter(|u| u.is_error == Some(true)).count();
        assert_eq!(n_err, 249);
    }

    #[test]
    fn noise_needs_two_classes() {
        let c = text_corpus(10, 1);
        assert!(c.inject_noise(0.5, 0).is_err());
        assert!(c.inject_noise(1.5, 0).is_err());
    }

    #[test]
    fn span_noise_keeps_boundaries() {
        let spans = [
            LabeledSpan { begin: 0, end: 2, label: 0 },
            LabeledSpan { begin: 3, end: 4, label: 1 },
        ];
        let doc = Document::spans("d", toks("John Smith in Paris"), &spans);
        let c = Corpus::new(Task::SpanLabeling, vec!["PER".into(), "LOC".into()], vec![doc], "t")
            .unwrap();
        let noisy = c.inject_noise(1.0, 5).unwrap();
        let pos: Vec<_> = noisy.units().iter().map(|u| u.position).collect();
        let before: Vec<_> = c.units().iter().map(|u| u.position).collect();
        assert_eq!(pos, before);
        assert!(noisy.units().iter().all(|u| u.is_error == Some(true)));
    }

    #[test]
    fn folds_balanced_and_deterministic() {
        let c = text_corpus(100, 2);
        let f = make_folds(&c, 10, 3).unwrap();
        for i in 0..10 {
            assert_eq!(f.docs_in(i).len(), 10);
        }
        assert_eq!(f, make_folds(&c, 10, 3).unwrap());

        let c = text_corpus(101, 2);
        let f = make_folds(&c, 10, 3).unwrap();
        let mut sizes: Vec<_> = (0..10).map(|i| f.docs_in(i).len()).collect();
        sizes.sort_unstable();
        assert_eq!(sizes, [10, 10, 10, 10, 10, 10, 10, 10, 10, 11]);
    }

    #[test]
    fn folds_reject_bad_k() {
        let c = text_corpus(5, 2);
        assert!(make_folds(&c, 6, 0).is_err());
        assert!(make_folds(&c, 1, 0).is_err());
    }
}
