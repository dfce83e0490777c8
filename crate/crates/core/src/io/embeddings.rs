//! Embedding sets: one dense vector per unit.
//!
//! ```text
//! #aed-emb v1 name=<n> dim=<d>
//! uid<TAB>x1<TAB>..<TAB>xd
//! ```

use std::io::Write;
use std::path::Path;

use super::{create, display, finish, header_field, header_safe, open_lines, parse_f64, parse_header};
use crate::corpus::Corpus;
use crate::error::{Error, Result};

/// Vectors in corpus unit order.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingSet {
    name: String,
    dim: usize,
    uids: Vec<String>,
    vectors: Vec<Vec<f64>>,
}

impl EmbeddingSet {
    pub fn new(name: impl Into<String>, dim: usize, uids: Vec<String>, vectors: Vec<Vec<f64>>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("embedding dimension must be positive"));
        }
        if uids.len() != vectors.len() {
            return Err(Error::mismatch("uid count differs from vector count"));
        }
        for (uid, v) in uids.iter().zip(&vectors) {
            if v.len() != dim {
                return Err(Error::mismatch(format!(
                    "vector for `{uid}` has length {}, expected {dim}",
                    v.len()
                )));
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(Error::mismatch(format!("vector for `{uid}` is not finite")));
            }
        }
        Ok(EmbeddingSet {
            name: name.into(),
            dim,
            uids,
            vectors,
        })
    }

    pub fn for_corpus(name: impl Into<String>, corpus: &Corpus, vectors: Vec<Vec<f64>>) -> Result<Self> {
        let dim = vectors.first().map(Vec::len).unwrap_or(1);
        let uids = corpus.units().iter().map(|u| u.uid.clone()).collect();
        Self::new(name, dim, uids, vectors)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn uids(&self) -> &[String] {
        &self.uids
    }

    pub fn vectors(&self) -> &[Vec<f64>] {
        &self.vectors
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn check_against(&self, corpus: &Corpus) -> Result<()> {
        if self.uids.len() != corpus.n_units()
            || self.uids.iter().zip(corpus.units()).any(|(a, u)| a != &u.uid)
        {
            return Err(Error::mismatch(format!(
                "embedding set `{}` does not cover the corpus units",
                self.name
            )));
        }
        Ok(())
    }
}

pub fn read_embeddings(path: impl AsRef<Path>, corpus: &Corpus) -> Result<EmbeddingSet> {
    let path = path.as_ref();
    let mut lines = open_lines(path)?;
    let (_, header) = lines
        .next()
        .transpose()?
        .ok_or_else(|| Error::parse(display(path), 1, "empty embedding file"))?;
    let fields = parse_header(&header, "#aed-emb", path)?;
    let name = header_field(&fields, "name", path)?.to_string();
    let dim: usize = header_field(&fields, "dim", path)?
        .parse()
        .ok()
        .filter(|&d| d > 0)
        .ok_or_else(|| Error::parse(display(path), 1, "dim must be a positive integer"))?;

    let mut vectors: Vec<Option<Vec<f64>>> = vec![None; corpus.n_units()];
    for line in lines {
        let (no, line) = line?;
        if line.trim().is_empty() {
            continue;
        }
        let mut cols = line.split('\t');
        let uid = cols.next().unwrap_or_default();
        let unit = corpus.unit_index(uid).ok_or_else(|| {
            Error::parse(display(path), no, format!("uid `{uid}` is not a corpus unit"))
        })?;
        let v: Vec<f64> = cols.map(|c| parse_f64(c, path, no)).collect::<Result<_>>()?;
        if v.len() != dim {
            return Err(Error::parse(
                display(path),
                no,
                format!("dimension mismatch: {} values, header says {dim}", v.len()),
            ));
        }
        if vectors[unit].replace(v).is_some() {
            return Err(Error::parse(display(path), no, format!("duplicate vector for `{uid}`")));
        }
    }
    let mut complete = Vec::with_capacity(vectors.len());
    for (v, unit) in vectors.into_iter().zip(corpus.units()) {
        complete.push(v.ok_or_else(|| {
            Error::mismatch(format!("{}: missing embedding for `{}`", display(path), unit.uid))
        })?);
    }
    let uids = corpus.units().iter().map(|u| u.uid.clone()).collect();
    EmbeddingSet::new(name, dim, uids, complete)
}

pub fn write_embeddings(set: &EmbeddingSet, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut w = create(path)?;
    let io_err = |e| Error::io(path, e);
    writeln!(w, "#aed-emb v1 name={} dim={}", header_safe(&set.name), set.dim).map_err(io_err)?;
    let mut line = String::new();
    for (uid, v) in set.uids.iter().zip(&set.vectors) {
        line.clear();
        line.push_str(uid);
        for x in v {
            line.push('\t');
            line.push_str(&format!("{x:?}"));
        }
        writeln!(w, "{line}").map_err(io_err)?;
    }
    finish(w, path)
}
