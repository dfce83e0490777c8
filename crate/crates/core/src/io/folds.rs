//! Fold files: the document partition shared by every trainer, including
//! external ones.
//!
//! ```text
//! #aed-folds v1 k=<k> corpus=<sha256 of document ids and tokens>
//! doc_id<TAB>fold
//! ```

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use sha2::{Digest, Sha256};

use super::{create, display, finish, header_field, open_lines, parse_header};
use crate::corpus::{Corpus, FoldAssignment};
use crate::error::{Error, Result};

/// Digest over document ids and tokens. Labels are excluded so that a fold
/// file stays valid after noise injection.
pub fn corpus_digest(corpus: &Corpus) -> String {
    let mut h = Sha256::new();
    h.update(corpus.task().short_name().as_bytes());
    for doc in corpus.documents() {
        h.update([0x1e]);
        h.update(doc.id.as_bytes());
        for t in &doc.tokens {
            h.update([0x1f]);
            h.update(t.as_bytes());
        }
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

pub fn write_folds(folds: &FoldAssignment, corpus: &Corpus, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut w = create(path)?;
    let io_err = |e| Error::io(path, e);
    writeln!(w, "#aed-folds v1 k={} corpus={}", folds.k(), corpus_digest(corpus)).map_err(io_err)?;
    for (doc, fold) in folds.iter() {
        writeln!(w, "{doc}\t{fold}").map_err(io_err)?;
    }
    finish(w, path)
}

pub fn read_folds(path: impl AsRef<Path>, corpus: &Corpus) -> Result<FoldAssignment> {
    let path = path.as_ref();
    let mut lines = open_lines(path)?;
    let (_, header) = lines
        .next()
        .transpose()?
        .ok_or_else(|| Error::parse(display(path), 1, "empty fold file"))?;
    let fields = parse_header(&header, "#aed-folds", path)?;
    let k: usize = header_field(&fields, "k", path)?
        .parse()
        .map_err(|_| Error::parse(display(path), 1, "k must be an integer"))?;
    let digest = header_field(&fields, "corpus", path)?;
    if digest != corpus_digest(corpus) {
        return Err(Error::mismatch(format!(
            "{}: fold file was made for a different corpus",
            display(path)
        )));
    }
    let mut map = BTreeMap::new();
    for line in lines {
        let (no, line) = line?;
        if line.trim().is_empty() {
            continue;
        }
        let (doc, fold) = line
            .split_once('\t')
            .ok_or_else(|| Error::parse(display(path), no, "expected doc_id<TAB>fold"))?;
        let fold: usize = fold
            .parse()
            .map_err(|_| Error::parse(display(path), no, format!("bad fold `{fold}`")))?;
        if map.insert(doc.to_string(), fold).is_some() {
            return Err(Error::parse(display(path), no, format!("duplicate document `{doc}`")));
        }
    }
    FoldAssignment::from_map(corpus, k, map)
}
