//! Hashed sparse features for the baseline models.

use std::collections::{BTreeMap, HashMap, HashSet};

use crate::corpus::{Corpus, Document};
use crate::rng::hash_str;

/// Sorted `(index, value)` pairs with distinct indices.
pub type SparseVec = Vec<(u32, f64)>;

/// Feature family of a baseline; the text families apply to text
/// classification, the token families to token and span labeling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    TextBow,
    TextCharNgram,
    TextTfidf,
    TokenWindow,
    TokenSuffix,
    TokenChar,
}

impl Family {
    pub const TEXT: [Family; 3] = [Family::TextBow, Family::TextCharNgram, Family::TextTfidf];
    pub const TOKEN: [Family; 3] = [Family::TokenWindow, Family::TokenSuffix, Family::TokenChar];

    pub fn is_text(self) -> bool {
        Family::TEXT.contains(&self)
    }

    pub fn code(self) -> &'static str {
        match self {
            Family::TextBow => "bow",
            Family::TextCharNgram => "char",
            Family::TextTfidf => "tfidf",
            Family::TokenWindow => "window",
            Family::TokenSuffix => "suffix",
            Family::TokenChar => "tokchar",
        }
    }
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.code())
    }
}

impl std::str::FromStr for Family {
    type Err = crate::error::Error;

    fn from_str(s: &str) -> crate::error::Result<Self> {
        Family::TEXT
            .iter()
            .chain(&Family::TOKEN)
            .copied()
            .find(|f| f.code() == s)
            .ok_or_else(|| crate::error::Error::invalid(format!("unknown feature family `{s}`")))
    }
}

/// Lowercased word tokens of a raw text.
pub fn words(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric() && c != '\'')
        .filter(|w| !w.is_empty())
        .map(str::to_lowercase)
        .collect()
}

fn char_ngrams(s: &str, n: usize) -> Vec<String> {
    let padded: Vec<char> = format!(" {} ", s.to_lowercase()).chars().collect();
    if padded.len() < n {
        return vec![padded.iter().collect()];
    }
    padded.windows(n).map(|w| w.iter().collect()).collect()
}

fn shape(token: &str) -> String {
    let mut out = String::new();
    for c in token.chars() {
        let s = if c.is_uppercase() {
            'X'
        } else if c.is_lowercase() {
            'x'
        } else if c.is_numeric() {
            'd'
        } else {
            c
        };
        if !out.ends_with(s) {
            out.push(s);
        }
    }
    out
}

fn affix(token: &str, n: usize, suffix: bool) -> String {
    let chars: Vec<char> = token.to_lowercase().chars().collect();
    let k = n.min(chars.len());
    if suffix {
        chars[chars.len() - k..].iter().collect()
    } else {
        chars[..k].iter().collect()
    }
}

/// Maps feature strings into a hashed space of `2^bits` slots plus a bias.
#[derive(Debug, Clone)]
pub struct Featurizer {
    family: Family,
    bits: u32,
    idf: HashMap<String, f64>,
}

impl Featurizer {
    /// Word document frequencies for TF-IDF are taken from the whole corpus;
    /// they use no labels.
    pub fn new(family: Family, bits: u32, corpus: &Corpus) -> Self {
        let mut idf = HashMap::new();
        if family == Family::TextTfidf {
            let n = corpus.documents().len() as f64;
            let mut df: HashMap<String, usize> = HashMap::new();
            for doc in corpus.documents() {
                let distinct: HashSet<String> = words(doc.raw_text()).into_iter().collect();
                for w in distinct {
                    *df.entry(w).or_default() += 1;
                }
            }
            idf = df
                .into_iter()
                .map(|(w, d)| (w, ((1.0 + n) / (1.0 + d as f64)).ln() + 1.0))
                .collect();
        }
        Featurizer { family, bits, idf }
    }

    pub fn family(&self) -> Family {
        self.family
    }

    /// Number of weights per class, including the bias slot.
    pub fn dim(&self) -> usize {
        (1usize << self.bits) + 1
    }

    fn bias(&self) -> u32 {
        (1u32 << self.bits) as u32
    }

    fn finish(&self, raw: BTreeMap<String, f64>) -> SparseVec {
        let mask = (1u64 << self.bits) - 1;
        let mut slots: BTreeMap<u32, f64> = BTreeMap::new();
        for (name, v) in raw {
            *slots.entry((hash_str(&name) & mask) as u32).or_default() += v;
        }
        let norm = slots.values().map(|v| v * v).sum::<f64>().sqrt();
        let mut out: SparseVec = slots
            .into_iter()
            .filter(|(_, v)| *v != 0.0)
            .map(|(k, v)| (k, v / norm))
            .collect();
        out.push((self.bias(), 1.0));
        out
    }

    /// Features of a whole document (text classification).
    pub fn text(&self, doc: &Document) -> SparseVec {
        let text = doc.raw_text();
        let mut raw: BTreeMap<String, f64> = BTreeMap::new();
        match self.family {
            Family::TextCharNgram => {
                for g in char_ngrams(text, 3) {
                    *raw.entry(format!("c:{g}")).or_default() += 1.0;
                }
            }
            Family::TextTfidf => {
                for w in words(text) {
                    let idf = self.idf.get(&w).copied().unwrap_or(1.0);
                    *raw.entry(format!("t:{w}")).or_default() += idf;
                }
            }
            _ => {
                for w in words(text) {
                    *raw.entry(format!("w:{w}")).or_default() += 1.0;
                }
            }
        }
        self.finish(raw)
    }

    /// Features of token `i` of a document (token and span labeling).
    pub fn token(&self, doc: &Document, i: usize) -> SparseVec {
        let toks = &doc.tokens;
        let at = |j: isize| -> String {
            if j < 0 {
                "<s>".into()
            } else {
                toks.get(j as usize).map_or_else(|| "</s>".into(), |t| t.to_lowercase())
            }
        };
        let i = i as isize;
        let word = &toks[i as usize];
        let mut raw: BTreeMap<String, f64> = BTreeMap::new();
        let mut add = |name: String| *raw.entry(name).or_default() += 1.0;
        add(format!("w0:{}", at(i)));
        match self.family {
            Family::TokenSuffix => {
                add(format!("p3:{}", affix(word, 3, false)));
                add(format!("s2:{}", affix(word, 2, true)));
                add(format!("s3:{}", affix(word, 3, true)));
                add(format!("sh:{}", shape(word)));
                add(format!("w-1:{}", at(i - 1)));
                add(format!("w+1:{}", at(i + 1)));
            }
            Family::TokenChar => {
                for g in char_ngrams(word, 3) {
                    add(format!("c:{g}"));
                }
                add(format!("sh:{}", shape(word)));
            }
            _ => {
                add(format!("p3:{}", affix(word, 3, false)));
                add(format!("s3:{}", affix(word, 3, true)));
                for d in [-2isize, -1, 1, 2] {
                    add(format!("w{d:+}:{}", at(i + d)));
                }
            }
        }
        self.finish(raw)
    }
}
