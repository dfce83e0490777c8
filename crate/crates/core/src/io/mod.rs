//! File formats: corpora (JSON lines for texts, tab-separated columns for
//! token and span labeling), prediction bundles, embedding sets, detector
//! outputs and fold assignments.
//!
//! Every interchange file is plain UTF-8 text with a versioned one-line
//! header of `key=value` fields.

mod column;
mod embeddings;
mod folds;
mod outputs;
mod predictions;
mod text;

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::corpus::{Corpus, Task};
use crate::error::{Error, Result};

pub use column::{read_column_corpus, write_column_corpus};
pub use embeddings::{read_embeddings, write_embeddings, EmbeddingSet};
pub use folds::{corpus_digest, read_folds, write_folds};
pub use outputs::{read_detector_output, write_detector_output, DetectorOutput};
pub use predictions::{
    read_predictions, write_predictions, BundleKind, PredictionBundle, ROW_SUM_TOLERANCE,
};
pub use text::{read_text_corpus, write_text_corpus};

/// Reads a corpus in the format matching `task`.
pub fn read_corpus(path: impl AsRef<Path>, task: Task) -> Result<Corpus> {
    match task {
        Task::TextClassification => read_text_corpus(path),
        Task::TokenLabeling | Task::SpanLabeling => read_column_corpus(path, task),
    }
}

/// Writes a corpus in the format matching its task.
pub fn write_corpus(corpus: &Corpus, path: impl AsRef<Path>) -> Result<()> {
    match corpus.task() {
        Task::TextClassification => write_text_corpus(corpus, path),
        Task::TokenLabeling | Task::SpanLabeling => write_column_corpus(corpus, path),
    }
}

pub(crate) fn open_lines(path: &Path) -> Result<impl Iterator<Item = Result<(usize, String)>>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let owned = path.to_path_buf();
    Ok(BufReader::new(file)
        .lines()
        .enumerate()
        .map(move |(i, l)| l.map(|l| (i + 1, l)).map_err(|e| Error::io(&owned, e))))
}

pub(crate) fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
    }
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::io(path, e))
}

pub(crate) fn finish(mut w: BufWriter<File>, path: &Path) -> Result<()> {
    w.flush().map_err(|e| Error::io(path, e))
}

pub(crate) fn display(path: &Path) -> String {
    path.display().to_string()
}

/// Parses `#<magic> v1 key=value ...` into its fields.
pub(crate) fn parse_header(
    line: &str,
    magic: &str,
    path: &Path,
) -> Result<HashMap<String, String>> {
    let mut parts = line.split_whitespace();
    if parts.next() != Some(magic) {
        return Err(Error::parse(
            display(path),
            1,
            format!("expected header starting with `{magic}`"),
        ));
    }
    match parts.next() {
        Some("v1") => {}
        Some(v) => {
            return Err(Error::parse(
                display(path),
                1,
                format!("unsupported format version `{v}`"),
            ))
        }
        None => return Err(Error::parse(display(path), 1, "header lacks a version")),
    }
    let mut fields = HashMap::new();
    for p in parts {
        let (k, v) = p.split_once('=').ok_or_else(|| {
            Error::parse(display(path), 1, format!("header field `{p}` is not key=value"))
        })?;
        fields.insert(k.to_string(), v.to_string());
    }
    Ok(fields)
}

pub(crate) fn header_field<'a>(
    fields: &'a HashMap<String, String>,
    key: &str,
    path: &Path,
) -> Result<&'a str> {
    fields
        .get(key)
        .map(String::as_str)
        .ok_or_else(|| Error::parse(display(path), 1, format!("header lacks `{key}=`")))
}

pub(crate) fn parse_f64(s: &str, path: &Path, line: usize) -> Result<f64> {
    let v: f64 = s
        .parse()
        .map_err(|_| Error::parse(display(path), line, format!("`{s}` is not a number")))?;
    if !v.is_finite() {
        return Err(Error::parse(display(path), line, format!("non-finite value `{s}`")));
    }
    Ok(v)
}

/// Header values may not contain whitespace; names are sanitized on write.
pub(crate) fn header_safe(s: &str) -> String {
    s.chars()
        .map(|c| if c.is_whitespace() || c == '=' { '_' } else { c })
        .collect()
}
