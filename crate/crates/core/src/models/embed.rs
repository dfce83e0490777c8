//! Deterministic built-in embeddings: TF-IDF reduced by a fixed Gaussian
//! projection.

use std::collections::{BTreeMap, HashMap};

use rand::SeedableRng;
use rand_distr::{Distribution, Normal};

use super::features::words;
use crate::corpus::{Corpus, Position};
use crate::error::Result;
use crate::io::EmbeddingSet;
use crate::rng::{hash_str, Rng};

pub const BUILTIN_EMBED_DIM: usize = 256;

/// Feature bag of one unit: the text's words; a token with its two
/// neighbours on each side; or a span's tokens with one token of context.
fn unit_terms(corpus: &Corpus, unit: usize) -> Vec<String> {
    let u = &corpus.units()[unit];
    let doc = &corpus.documents()[u.doc_index];
    let at = |j: isize| -> String {
        if j < 0 {
            "<s>".into()
        } else {
            doc.tokens.get(j as usize).map_or_else(|| "</s>".into(), |t| t.to_lowercase())
        }
    };
    let mut terms = Vec::new();
    match u.position {
        Position::Text => terms.extend(words(doc.raw_text()).into_iter().map(|w| format!("w:{w}"))),
        Position::Token(t) => {
            let t = t as isize;
            terms.push(format!("w:{}", at(t)));
            for d in [-2isize, -1, 1, 2] {
                terms.push(format!("c{d:+}:{}", at(t + d)));
            }
        }
        Position::Span { begin, end } => {
            for t in begin..end {
                terms.push(format!("w:{}", at(t as isize)));
            }
            terms.push(format!("c-1:{}", at(begin as isize - 1)));
            terms.push(format!("c+1:{}", at(end as isize)));
        }
    }
    if terms.is_empty() {
        terms.push("<empty>".into());
    }
    terms
}

fn normalize(v: &mut [f64]) {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if n > 0.0 {
        v.iter_mut().for_each(|x| *x /= n);
    }
}

pub fn builtin_embed(corpus: &Corpus) -> Result<EmbeddingSet> {
    let bags: Vec<BTreeMap<String, f64>> = (0..corpus.n_units())
        .map(|u| {
            let mut bag = BTreeMap::new();
            for t in unit_terms(corpus, u) {
                *bag.entry(t).or_insert(0.0) += 1.0;
            }
            bag
        })
        .collect();
    let n = bags.len() as f64;
    let mut df: HashMap<&str, usize> = HashMap::new();
    for bag in &bags {
        for t in bag.keys() {
            *df.entry(t).or_default() += 1;
        }
    }
    let normal = Normal::new(0.0, (1.0 / BUILTIN_EMBED_DIM as f64).sqrt()).expect("finite std dev");
    let mut directions: HashMap<&str, Vec<f64>> = HashMap::new();
    let mut vectors = Vec::with_capacity(bags.len());
    for bag in &bags {
        let mut tfidf: Vec<(&str, f64)> = bag
            .iter()
            .map(|(t, &c)| (t.as_str(), c * (((1.0 + n) / (1.0 + df[t.as_str()] as f64)).ln() + 1.0)))
            .collect();
        let norm = tfidf.iter().map(|(_, v)| v * v).sum::<f64>().sqrt();
        tfidf.iter_mut().for_each(|(_, v)| *v /= norm);
        let mut z = vec![0.0; BUILTIN_EMBED_DIM];
        for (t, v) in tfidf {
            let dir = directions.entry(t).or_insert_with(|| {
                let mut r = Rng::seed_from_u64(hash_str(t));
                (0..BUILTIN_EMBED_DIM).map(|_| normal.sample(&mut r)).collect()
            });
            for (zk, g) in z.iter_mut().zip(dir.iter()) {
                *zk += v * g;
            }
        }
        normalize(&mut z);
        vectors.push(z);
    }
    EmbeddingSet::for_corpus("builtin-tfidf", corpus, vectors)
}
