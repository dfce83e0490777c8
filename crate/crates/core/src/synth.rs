//! Seeded synthetic corpora for tests, demos and the acceptance suite.
//!
//! All generators are clean (gold = annotated label); corrupt them with
//! [`Corpus::inject_noise`].

use rand::seq::IndexedRandom;
use rand::Rng;

use crate::corpus::{Corpus, Document, LabeledSpan, Task};
use crate::rng;

fn finish(task: Task, classes: Vec<String>, mut docs: Vec<Document>, provenance: String) -> Corpus {
    for ann in docs.iter_mut().flat_map(|d| d.annotations.iter_mut()) {
        ann.gold = Some(ann.label);
    }
    Corpus::new(task, classes, docs, provenance).expect("generated corpus is valid")
}

/// Text classification where each class owns a vocabulary. Every document
/// also carries a few words unique to it, which lets an in-sample model
/// memorize individual labels.
#[derive(Debug, Clone)]
pub struct TextSynth {
    pub n_docs: usize,
    pub n_classes: usize,
    pub class_vocab: usize,
    pub shared_vocab: usize,
    pub class_words: usize,
    pub shared_words: usize,
    pub unique_words: usize,
}

impl Default for TextSynth {
    fn default() -> Self {
        TextSynth {
            n_docs: 1000,
            n_classes: 2,
            class_vocab: 40,
            shared_vocab: 200,
            class_words: 4,
            shared_words: 6,
            unique_words: 3,
        }
    }
}

pub fn text_corpus(cfg: &TextSynth, seed: u64) -> Corpus {
    let mut r = rng::rng(seed, "synth-text", 0);
    let classes: Vec<String> = (0..cfg.n_classes).map(|c| format!("class{c}")).collect();
    let docs: Vec<Document> = (0..cfg.n_docs)
        .map(|i| {
            let label = i % cfg.n_classes;
            let mut words: Vec<String> = Vec::new();
            for _ in 0..cfg.class_words {
                words.push(format!("c{label}w{}", r.random_range(0..cfg.class_vocab)));
            }
            for _ in 0..cfg.shared_words {
                words.push(format!("s{}", r.random_range(0..cfg.shared_vocab)));
            }
            for k in 0..cfg.unique_words {
                words.push(format!("u{i}x{k}"));
            }
            // shuffle word order
            for k in (1..words.len()).rev() {
                words.swap(k, r.random_range(0..=k));
            }
            Document::text(format!("doc{i:05}"), words.join(" "), label)
        })
        .collect();
    finish(Task::TextClassification, classes, docs, format!("synth-text seed={seed}"))
}

/// Token labeling where every word has one tag, sentences mix recurring
/// phrases with random words.
#[derive(Debug, Clone)]
pub struct TokenSynth {
    pub n_docs: usize,
    pub n_tags: usize,
    pub vocab: usize,
    pub sentence_len: usize,
    pub n_phrases: usize,
    pub phrase_len: usize,
}

impl Default for TokenSynth {
    fn default() -> Self {
        TokenSynth {
            n_docs: 200,
            n_tags: 5,
            vocab: 150,
            sentence_len: 8,
            n_phrases: 15,
            phrase_len: 4,
        }
    }
}

pub fn token_corpus(cfg: &TokenSynth, seed: u64) -> Corpus {
    let mut r = rng::rng(seed, "synth-token", 0);
    let tags: Vec<String> = (0..cfg.n_tags).map(|t| format!("T{t}")).collect();
    let phrases: Vec<Vec<usize>> = (0..cfg.n_phrases)
        .map(|_| (0..cfg.phrase_len).map(|_| r.random_range(0..cfg.vocab)).collect())
        .collect();
    let docs: Vec<Document> = (0..cfg.n_docs)
        .map(|i| {
            let mut words: Vec<usize> = phrases.choose(&mut r).cloned().unwrap_or_default();
            let at = r.random_range(0..=cfg.sentence_len.saturating_sub(words.len()));
            let mut sentence: Vec<usize> = (0..cfg.sentence_len.saturating_sub(words.len()))
                .map(|_| r.random_range(0..cfg.vocab))
                .collect();
            let tail = sentence.split_off(at);
            sentence.append(&mut words);
            sentence.extend(tail);
            let tokens = sentence.iter().map(|w| format!("w{w}")).collect();
            let labels: Vec<usize> = sentence.iter().map(|w| w % cfg.n_tags).collect();
            Document::tagged(format!("s{i:05}"), tokens, &labels)
        })
        .collect();
    finish(Task::TokenLabeling, tags, docs, format!("synth-token seed={seed}"))
}

/// Span labeling: filler sentences with 1-3 token entities. Entity words
/// mostly belong to one entity type; some are drawn from an ambiguous
/// vocabulary that also occurs outside entities and in every type.
#[derive(Debug, Clone)]
pub struct SpanSynth {
    pub n_docs: usize,
    pub n_types: usize,
    pub entity_vocab: usize,
    pub filler_vocab: usize,
    pub sentence_len: usize,
    pub max_spans: usize,
    pub max_span_len: usize,
    pub ambiguous_vocab: usize,
    /// Chance that an entity or filler word comes from the ambiguous vocabulary.
    pub ambiguous_rate: f64,
}

impl Default for SpanSynth {
    fn default() -> Self {
        SpanSynth {
            n_docs: 300,
            n_types: 3,
            entity_vocab: 25,
            filler_vocab: 80,
            sentence_len: 10,
            max_spans: 2,
            max_span_len: 3,
            ambiguous_vocab: 30,
            ambiguous_rate: 0.3,
        }
    }
}

pub const SPAN_TYPES: [&str; 6] = ["ORG", "PER", "LOC", "MISC", "DATE", "EVENT"];

pub fn span_corpus(cfg: &SpanSynth, seed: u64) -> Corpus {
    assert!(cfg.n_types <= SPAN_TYPES.len(), "at most {} span types", SPAN_TYPES.len());
    let mut r = rng::rng(seed, "synth-span", 0);
    let classes: Vec<String> = SPAN_TYPES[..cfg.n_types].iter().map(|s| s.to_string()).collect();
    let ambiguous = |r: &mut rng::Rng| cfg.ambiguous_vocab > 0 && r.random_bool(cfg.ambiguous_rate);
    let filler = |r: &mut rng::Rng| {
        if ambiguous(r) {
            format!("a{}", r.random_range(0..cfg.ambiguous_vocab))
        } else {
            format!("f{}", r.random_range(0..cfg.filler_vocab))
        }
    };
    let docs: Vec<Document> = (0..cfg.n_docs)
        .map(|i| {
            let mut tokens: Vec<String> = Vec::new();
            let mut spans = Vec::new();
            let n_spans = r.random_range(1..=cfg.max_spans.max(1));
            let slot = cfg.sentence_len / n_spans;
            for _ in 0..n_spans {
                let ty = r.random_range(0..cfg.n_types);
                let len = r.random_range(1..=cfg.max_span_len);
                let lead = r.random_range(1..=slot.saturating_sub(len).max(1));
                for _ in 0..lead {
                    tokens.push(filler(&mut r));
                }
                let begin = tokens.len();
                for _ in 0..len {
                    tokens.push(if ambiguous(&mut r) {
                        format!("a{}", r.random_range(0..cfg.ambiguous_vocab))
                    } else {
                        format!("{}{}", classes[ty].to_lowercase(), r.random_range(0..cfg.entity_vocab))
                    });
                }
                spans.push(LabeledSpan { begin, end: tokens.len(), label: ty });
            }
            tokens.push(filler(&mut r));
            Document::spans(format!("n{i:05}"), tokens, &spans)
        })
        .collect();
    finish(Task::SpanLabeling, classes, docs, format!("synth-span seed={seed}"))
}
