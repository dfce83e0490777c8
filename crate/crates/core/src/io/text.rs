//! Text-classification corpora as JSON lines.
//!
//! One record per line: `{"id": .., "text": .., "label": .., "gold_label": ..,
//! "is_error": ..}` with the last two optional. A leading
//! `{"#aed-corpus": "v1", "classes": [..]}` record pins the class order;
//! without it classes are the sorted distinct labels.

use std::collections::{BTreeSet, HashSet};
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{create, display, finish, open_lines};
use crate::corpus::{Annotation, Corpus, Document, Position, Task};
use crate::error::{Error, Result};

#[derive(Debug, Serialize, Deserialize)]
struct Record {
    id: String,
    text: String,
    label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    gold_label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    is_error: Option<bool>,
}

#[derive(Debug, Serialize, Deserialize)]
struct Meta {
    #[serde(rename = "#aed-corpus")]
    version: String,
    classes: Vec<String>,
}

pub fn read_text_corpus(path: impl AsRef<Path>) -> Result<Corpus> {
    let path = path.as_ref();
    let mut records = Vec::new();
    let mut classes: Option<Vec<String>> = None;
    for line in open_lines(path)? {
        let (no, line) = line?;
        if line.trim().is_empty() {
            continue;
        }
        if records.is_empty() && classes.is_none() && line.contains("\"#aed-corpus\"") {
            let meta: Meta = serde_json::from_str(&line)
                .map_err(|e| Error::parse(display(path), no, e.to_string()))?;
            if meta.version != "v1" {
                return Err(Error::parse(
                    display(path),
                    no,
                    format!("unsupported corpus version `{}`", meta.version),
                ));
            }
            classes = Some(meta.classes);
            continue;
        }
        let rec: Record = serde_json::from_str(&line)
            .map_err(|e| Error::parse(display(path), no, e.to_string()))?;
        records.push((no, rec));
    }
    if records.is_empty() {
        return Err(Error::parse(display(path), 0, "no records"));
    }

    let classes = match classes {
        Some(c) => c,
        None => {
            let set: BTreeSet<&str> = records
                .iter()
                .flat_map(|(_, r)| std::iter::once(r.label.as_str()).chain(r.gold_label.as_deref()))
                .collect();
            set.into_iter().map(String::from).collect()
        }
    };
    let lookup = |name: &str, no: usize| -> Result<usize> {
        classes
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| Error::parse(display(path), no, format!("label `{name}` not in class list")))
    };

    let mut seen = HashSet::new();
    let mut docs = Vec::with_capacity(records.len());
    for (no, rec) in records {
        if !seen.insert(rec.id.clone()) {
            return Err(Error::parse(
                display(path),
                no,
                format!("duplicate id `{}`", rec.id),
            ));
        }
        let mut ann = Annotation::new(Position::Text, lookup(&rec.label, no)?);
        if let Some(g) = &rec.gold_label {
            ann.gold = Some(lookup(g, no)?);
        }
        ann.is_error = rec.is_error;
        docs.push(Document {
            id: rec.id,
            tokens: vec![rec.text],
            annotations: vec![ann],
            missing: Vec::new(),
        });
    }
    Corpus::new(Task::TextClassification, classes, docs, display(path))
}

pub fn write_text_corpus(corpus: &Corpus, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    if corpus.task() != Task::TextClassification {
        return Err(Error::invalid("JSON-lines output holds text-classification corpora only"));
    }
    let mut w = create(path)?;
    let meta = Meta {
        version: "v1".into(),
        classes: corpus.classes().to_vec(),
    };
    let io_err = |e| Error::io(path, e);
    writeln!(w, "{}", serde_json::to_string(&meta).expect("serializable")).map_err(io_err)?;
    for doc in corpus.documents() {
        let ann = &doc.annotations[0];
        let rec = Record {
            id: doc.id.clone(),
            text: doc.raw_text().to_string(),
            label: corpus.classes()[ann.label].clone(),
            gold_label: ann.gold.map(|g| corpus.classes()[g].clone()),
            is_error: ann.is_error,
        };
        writeln!(w, "{}", serde_json::to_string(&rec).expect("serializable")).map_err(io_err)?;
    }
    finish(w, path)
}
