//! Surface-form consistency detectors for token and span labeling.

use std::collections::{BTreeMap, HashMap};

use super::suffix::SuffixIndex;
use super::{entropy, FlagVector, Polarity, ScoreVector};
use crate::corpus::{Corpus, Position, Task};
use crate::error::{Error, Result};

fn require_sequence_task(method: &str, corpus: &Corpus) -> Result<()> {
    if corpus.task() == Task::TextClassification {
        return Err(Error::invalid(format!(
            "{method} is defined for token and span labeling only"
        )));
    }
    Ok(())
}

/// Unique most frequent label, `None` on a tie.
fn unique_mode(counts: &BTreeMap<usize, usize>) -> Option<usize> {
    let max = *counts.values().max()?;
    let mut it = counts.iter().filter(|(_, &c)| c == max);
    let (&label, _) = it.next()?;
    it.next().is_none().then_some(label)
}

/// Lowercased surface form of each unit.
fn surface_forms(corpus: &Corpus) -> Vec<String> {
    corpus
        .units()
        .iter()
        .map(|u| {
            let doc = &corpus.documents()[u.doc_index];
            let range = u.position.token_range().unwrap_or(0..0);
            doc.tokens[range].join(" ").to_lowercase()
        })
        .collect()
}

fn label_counts(corpus: &Corpus) -> (Vec<String>, HashMap<String, BTreeMap<usize, usize>>) {
    let forms = surface_forms(corpus);
    let mut counts: HashMap<String, BTreeMap<usize, usize>> = HashMap::new();
    for (form, u) in forms.iter().zip(corpus.units()) {
        *counts.entry(form.clone()).or_default().entry(u.noisy_label).or_default() += 1;
    }
    (forms, counts)
}

fn per_form_score(
    method: &str,
    corpus: &Corpus,
    score: impl Fn(&BTreeMap<usize, usize>) -> f64,
) -> Result<ScoreVector> {
    require_sequence_task(method, corpus)?;
    let (forms, counts) = label_counts(corpus);
    let scores = forms
        .iter()
        .zip(corpus.units())
        .map(|(form, u)| {
            let c = &counts[form];
            if unique_mode(c) == Some(u.noisy_label) {
                0.0
            } else {
                score(c)
            }
        })
        .collect();
    ScoreVector::new(method, corpus, scores, Polarity::HighIsSuspicious)
}

/// Entropy of the label distribution of each surface form. Units carrying the
/// form's unique modal label score 0.
pub fn label_entropy(corpus: &Corpus) -> Result<ScoreVector> {
    per_form_score("LE", corpus, |c| {
        let total: usize = c.values().sum();
        let p: Vec<f64> = c.values().map(|&n| n as f64 / total as f64).collect();
        entropy(&p)
    })
}

/// `(c_max - c_min) / c_total` over the labels seen with a surface form, 0
/// when it has a single label. Units carrying the unique modal label score 0.
pub fn weighted_discrepancy(corpus: &Corpus) -> Result<ScoreVector> {
    per_form_score("WD", corpus, |c| {
        if c.len() < 2 {
            return 0.0;
        }
        let total: usize = c.values().sum();
        let max = *c.values().max().unwrap();
        let min = *c.values().min().unwrap();
        (max - min) as f64 / total as f64
    })
}

/// Per-unit decision from its longest varying context: `(context length,
/// flag)`. Among equally long contexts a unit is flagged only if every one
/// of them flags it.
type Decision = Option<(usize, bool)>;

fn decide(slot: &mut Decision, len: usize, flag: bool) {
    match slot {
        Some((l, f)) if *l == len => *f &= flag,
        Some((l, _)) if *l > len => {}
        _ => *slot = Some((len, flag)),
    }
}

/// Variation n-grams.
///
/// Token labeling: every maximal repeat of at least two lowercased tokens is
/// a context; at each non-fringe position where the occurrences disagree,
/// occurrences not carrying the unique modal label are flagged. Each unit is
/// judged by the longest context in which its position varies.
///
/// Span labeling: the context of a span is its lowercased tokens plus one
/// token on each side; spans with a minority label for their context are
/// flagged.
pub fn variation_ngrams(corpus: &Corpus) -> Result<FlagVector> {
    require_sequence_task("VN", corpus)?;
    let flags = match corpus.task() {
        Task::SpanLabeling => span_variation(corpus),
        _ => token_variation(corpus),
    };
    FlagVector::new("VN", corpus, flags)
}

fn token_variation(corpus: &Corpus) -> Vec<bool> {
    let mut vocab: HashMap<String, u32> = HashMap::new();
    let sequences: Vec<Vec<u32>> = corpus
        .documents()
        .iter()
        .map(|d| {
            d.tokens
                .iter()
                .map(|t| {
                    let next = vocab.len() as u32;
                    *vocab.entry(t.to_lowercase()).or_insert(next)
                })
                .collect()
        })
        .collect();
    // unit index of every (document, token)
    let mut unit_at: HashMap<(usize, usize), usize> = HashMap::new();
    for (i, u) in corpus.units().iter().enumerate() {
        if let Position::Token(t) = u.position {
            unit_at.insert((u.doc_index, t), i);
        }
    }

    let mut decisions: Vec<Decision> = vec![None; corpus.n_units()];
    for repeat in SuffixIndex::new(&sequences).maximal_repeats(2) {
        for offset in 1..repeat.len.saturating_sub(1) {
            let members: Vec<usize> = repeat
                .occurrences
                .iter()
                .filter_map(|&(d, s)| unit_at.get(&(d, s + offset)).copied())
                .collect();
            let mut counts = BTreeMap::new();
            for &m in &members {
                *counts.entry(corpus.units()[m].noisy_label).or_insert(0usize) += 1;
            }
            if counts.len() < 2 {
                continue;
            }
            let mode = unique_mode(&counts);
            for &m in &members {
                let flag = mode.is_some_and(|l| l != corpus.units()[m].noisy_label);
                decide(&mut decisions[m], repeat.len, flag);
            }
        }
    }
    decisions.iter().map(|d| d.is_some_and(|(_, f)| f)).collect()
}

fn span_variation(corpus: &Corpus) -> Vec<bool> {
    let mut groups: HashMap<(String, String, String), Vec<usize>> = HashMap::new();
    for (i, u) in corpus.units().iter().enumerate() {
        let Position::Span { begin, end } = u.position else {
            continue;
        };
        let tokens = &corpus.documents()[u.doc_index].tokens;
        let left = if begin > 0 { tokens[begin - 1].to_lowercase() } else { "<s>".into() };
        let right = tokens.get(end).map_or_else(|| "</s>".into(), |t| t.to_lowercase());
        let body = tokens[begin..end].join(" ").to_lowercase();
        groups.entry((left, body, right)).or_default().push(i);
    }
    let mut flags = vec![false; corpus.n_units()];
    for members in groups.values() {
        let mut counts = BTreeMap::new();
        for &m in members {
            *counts.entry(corpus.units()[m].noisy_label).or_insert(0usize) += 1;
        }
        if let Some(mode) = unique_mode(&counts) {
            for &m in members {
                flags[m] = corpus.units()[m].noisy_label != mode;
            }
        }
    }
    flags
}
