//! Column corpora: `token<TAB>tag[<TAB>gold_tag]`, one token per line, blank
//! lines between sentences.
//!
//! Span corpora carry BIO tags and are decoded into span annotations. When a
//! gold column is present, gold spans are aligned against the annotated spans
//! to derive per-span gold labels; annotated spans without a gold counterpart
//! are errors and gold spans without an annotated counterpart are kept as
//! missing spans.
//!
//! Optional extras: a first line `#aed-corpus v1 task=<t> classes=<a,b>`
//! pinning the class order, and `# id = <doc id>` comment lines naming the
//! following sentence. `-DOCSTART-` lines are skipped.

use std::collections::{BTreeSet, HashSet};
use std::io::Write;
use std::path::Path;

use super::{create, display, finish, header_field, open_lines, parse_header};
use crate::corpus::{Annotation, Corpus, Document, LabeledSpan, Position, Task};
use crate::error::{Error, Result};
use crate::span_align::{self, bio, Matched, TypedSpan};

struct RawSentence {
    id: Option<String>,
    first_line: usize,
    tokens: Vec<String>,
    tags: Vec<String>,
    gold: Vec<String>,
}

pub fn read_column_corpus(path: impl AsRef<Path>, task: Task) -> Result<Corpus> {
    let path = path.as_ref();
    if task == Task::TextClassification {
        return Err(Error::invalid("column corpora hold token or span labeling tasks"));
    }
    let mut pinned_classes: Option<Vec<String>> = None;
    let mut sentences: Vec<RawSentence> = Vec::new();
    let mut current: Option<RawSentence> = None;
    let mut pending_id: Option<String> = None;
    let mut n_columns: Option<usize> = None;

    for line in open_lines(path)? {
        let (no, line) = line?;
        let line = line.trim_end_matches('\r');
        if no == 1 && line.starts_with("#aed-corpus") {
            let fields = parse_header(line, "#aed-corpus", path)?;
            let declared: Task = header_field(&fields, "task", path)?.parse()?;
            if declared != task {
                return Err(Error::parse(
                    display(path),
                    1,
                    format!("file declares task `{declared}` but `{task}` was requested"),
                ));
            }
            let classes = header_field(&fields, "classes", path)?;
            pinned_classes = Some(classes.split(',').map(String::from).collect());
            continue;
        }
        if line.trim().is_empty() {
            if let Some(s) = current.take() {
                sentences.push(s);
            }
            continue;
        }
        if line.starts_with('#') && !line.contains('\t') {
            if let Some(rest) = line.strip_prefix('#') {
                if let Some((k, v)) = rest.split_once('=') {
                    if k.trim() == "id" {
                        pending_id = Some(v.trim().to_string());
                    }
                }
            }
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols[0] == "-DOCSTART-" {
            continue;
        }
        if !(2..=3).contains(&cols.len()) {
            return Err(Error::parse(
                display(path),
                no,
                format!("expected 2 or 3 tab-separated columns, found {}", cols.len()),
            ));
        }
        match n_columns {
            None => n_columns = Some(cols.len()),
            Some(n) if n != cols.len() => {
                return Err(Error::parse(
                    display(path),
                    no,
                    format!("ragged columns: {} here, {n} earlier", cols.len()),
                ))
            }
            _ => {}
        }
        let s = current.get_or_insert_with(|| RawSentence {
            id: pending_id.take(),
            first_line: no,
            tokens: Vec::new(),
            tags: Vec::new(),
            gold: Vec::new(),
        });
        s.tokens.push(cols[0].to_string());
        s.tags.push(cols[1].to_string());
        if let Some(g) = cols.get(2) {
            s.gold.push(g.to_string());
        }
    }
    if let Some(s) = current.take() {
        sentences.push(s);
    }
    if sentences.is_empty() {
        return Err(Error::parse(display(path), 0, "no sentences"));
    }

    // assign ids up front so duplicates are reported with a line number
    let mut seen = HashSet::new();
    let ids: Vec<String> = sentences
        .iter()
        .enumerate()
        .map(|(i, s)| s.id.clone().unwrap_or_else(|| format!("s{:06}", i + 1)))
        .collect();
    for (id, s) in ids.iter().zip(&sentences) {
        if !seen.insert(id.as_str()) {
            return Err(Error::parse(
                display(path),
                s.first_line,
                format!("duplicate sentence id `{id}`"),
            ));
        }
    }

    match task {
        Task::TokenLabeling => build_token_corpus(path, sentences, ids, pinned_classes),
        Task::SpanLabeling => build_span_corpus(path, sentences, ids, pinned_classes),
        Task::TextClassification => unreachable!(),
    }
}

fn class_lookup<'a>(
    classes: &'a [String],
    path: &'a Path,
) -> impl Fn(&str, usize) -> Result<usize> + 'a {
    move |name, line| {
        classes
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| Error::parse(display(path), line, format!("label `{name}` not in class list")))
    }
}

fn build_token_corpus(
    path: &Path,
    sentences: Vec<RawSentence>,
    ids: Vec<String>,
    pinned: Option<Vec<String>>,
) -> Result<Corpus> {
    let classes = pinned.unwrap_or_else(|| {
        let set: BTreeSet<&str> = sentences
            .iter()
            .flat_map(|s| s.tags.iter().chain(&s.gold).map(String::as_str))
            .collect();
        set.into_iter().map(String::from).collect()
    });
    let lookup = class_lookup(&classes, path);
    let mut docs = Vec::with_capacity(sentences.len());
    for (s, id) in sentences.iter().zip(ids) {
        let mut annotations = Vec::with_capacity(s.tokens.len());
        for (i, tag) in s.tags.iter().enumerate() {
            let line = s.first_line + i;
            let mut ann = Annotation::new(Position::Token(i), lookup(tag, line)?);
            if let Some(g) = s.gold.get(i) {
                ann.gold = Some(lookup(g, line)?);
            }
            annotations.push(ann);
        }
        docs.push(Document {
            id,
            tokens: s.tokens.clone(),
            annotations,
            missing: Vec::new(),
        });
    }
    drop(lookup);
    Corpus::new(Task::TokenLabeling, classes, docs, display(path))
}

fn decode_at(path: &Path, s: &RawSentence, tags: &[String]) -> Result<Vec<TypedSpan>> {
    bio::decode(tags).map_err(|e| Error::parse(display(path), s.first_line, e.to_string()))
}

fn build_span_corpus(
    path: &Path,
    sentences: Vec<RawSentence>,
    ids: Vec<String>,
    pinned: Option<Vec<String>>,
) -> Result<Corpus> {
    let mut decoded = Vec::with_capacity(sentences.len());
    for s in &sentences {
        let noisy = decode_at(path, s, &s.tags)?;
        let gold = if s.gold.is_empty() {
            None
        } else {
            Some(decode_at(path, s, &s.gold)?)
        };
        decoded.push((noisy, gold));
    }
    let classes = pinned.unwrap_or_else(|| {
        let set: BTreeSet<&str> = decoded
            .iter()
            .flat_map(|(n, g)| n.iter().chain(g.iter().flatten()).map(|s| s.label.as_str()))
            .collect();
        set.into_iter().map(String::from).collect()
    });
    if classes.is_empty() {
        return Err(Error::parse(display(path), 0, "no spans in corpus"));
    }
    let lookup = class_lookup(&classes, path);
    let to_labeled = |spans: &[TypedSpan], line: usize| -> Result<Vec<LabeledSpan>> {
        spans
            .iter()
            .map(|s| {
                Ok(LabeledSpan {
                    begin: s.begin,
                    end: s.end,
                    label: lookup(&s.label, line)?,
                })
            })
            .collect()
    };

    let mut docs = Vec::with_capacity(sentences.len());
    for ((s, id), (noisy, gold)) in sentences.iter().zip(ids).zip(decoded) {
        let noisy = to_labeled(&noisy, s.first_line)?;
        let mut doc = Document::spans(id, s.tokens.clone(), &noisy);
        if let Some(gold) = gold {
            let gold = to_labeled(&gold, s.first_line)?;
            let alignment = span_align::align_spans(&gold, &noisy);
            for ann in &mut doc.annotations {
                let Position::Span { begin, end } = ann.position else {
                    unreachable!()
                };
                let reference = alignment.pairs.iter().find(|p| {
                    matches!(p.matched, Matched::Span(c) if c.begin == begin && c.end == end)
                });
                match reference {
                    Some(p) => ann.gold = Some(p.reference.label),
                    None => ann.is_error = Some(true),
                }
            }
            doc.missing = alignment
                .pairs
                .iter()
                .filter(|p| p.matched == Matched::Missing)
                .map(|p| p.reference)
                .collect();
        }
        docs.push(doc);
    }
    drop(lookup);
    Corpus::new(Task::SpanLabeling, classes, docs, display(path))
}

pub fn write_column_corpus(corpus: &Corpus, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let task = corpus.task();
    if task == Task::TextClassification {
        return Err(Error::invalid("column output holds token or span labeling corpora"));
    }
    for c in corpus.classes() {
        if c.is_empty() || c.contains(',') || c.contains(char::is_whitespace) {
            return Err(Error::invalid(format!("class name `{c}` cannot be written to a column file")));
        }
    }
    let units = corpus.units();
    let any_gold = units.iter().any(|u| u.gold_label.is_some() || u.is_error.is_some())
        || corpus.documents().iter().any(|d| !d.missing.is_empty());
    if any_gold {
        let complete = corpus.documents().iter().flat_map(|d| &d.annotations).all(|a| {
            a.gold.is_some() || (task == Task::SpanLabeling && a.is_error == Some(true))
        });
        if !complete {
            return Err(Error::invalid(
                "column files need gold information for every unit or for none",
            ));
        }
    }

    let mut w = create(path)?;
    let io_err = |e| Error::io(path, e);
    writeln!(
        w,
        "#aed-corpus v1 task={} classes={}",
        task.short_name(),
        corpus.classes().join(",")
    )
    .map_err(io_err)?;
    for doc in corpus.documents() {
        for t in &doc.tokens {
            if t.is_empty() || t.contains(['\t', '\n', '\r']) {
                return Err(Error::validation(
                    &doc.id,
                    format!("token {t:?} cannot be written to a column file"),
                ));
            }
        }
        let (tags, gold) = match task {
            Task::TokenLabeling => token_columns(corpus, doc),
            Task::SpanLabeling => span_columns(corpus, doc)?,
            Task::TextClassification => unreachable!(),
        };
        writeln!(w, "# id = {}", doc.id).map_err(io_err)?;
        for (i, tok) in doc.tokens.iter().enumerate() {
            if any_gold {
                writeln!(w, "{tok}\t{}\t{}", tags[i], gold[i]).map_err(io_err)?;
            } else {
                writeln!(w, "{tok}\t{}", tags[i]).map_err(io_err)?;
            }
        }
        writeln!(w).map_err(io_err)?;
    }
    finish(w, path)
}

fn token_columns(corpus: &Corpus, doc: &Document) -> (Vec<String>, Vec<String>) {
    let classes = corpus.classes();
    let tags = doc.annotations.iter().map(|a| classes[a.label].clone()).collect();
    let gold = doc
        .annotations
        .iter()
        .map(|a| classes[a.gold.unwrap_or(a.label)].clone())
        .collect();
    (tags, gold)
}

fn span_columns(corpus: &Corpus, doc: &Document) -> Result<(Vec<String>, Vec<String>)> {
    let classes = corpus.classes();
    let n = doc.tokens.len();
    let mut noisy = Vec::new();
    let mut gold = Vec::new();
    for a in &doc.annotations {
        let Position::Span { begin, end } = a.position else {
            unreachable!()
        };
        noisy.push(TypedSpan::new(begin, end, classes[a.label].clone()));
        if let Some(g) = a.gold {
            gold.push(TypedSpan::new(begin, end, classes[g].clone()));
        }
    }
    for m in &doc.missing {
        let clashes = gold.iter().any(|g| g.begin < m.end && m.begin < g.end);
        if clashes {
            log::warn!(
                "document `{}`: missing span ({}, {}) overlaps a gold span and is not written",
                doc.id,
                m.begin,
                m.end
            );
            continue;
        }
        gold.push(TypedSpan::new(m.begin, m.end, classes[m.label].clone()));
    }
    let tags = bio::encode(&noisy, n).map_err(|e| Error::validation(&doc.id, e.to_string()))?;
    let gold = bio::encode(&gold, n).map_err(|e| Error::validation(&doc.id, e.to_string()))?;
    Ok((tags, gold))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::fs;

    fn write(content: &str) -> (tempfile::TempDir, std::path::PathBuf) {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.tsv");
        fs::write(&p, content).unwrap();
        (dir, p)
    }

    #[test]
    fn token_corpus_with_gold() {
        let (_d, p) = write("The\tDET\tDET\nclub\tVERB\tNOUN\n\nRun\tVERB\tVERB\n");
        let c = read_column_corpus(&p, Task::TokenLabeling).unwrap();
        assert_eq!(c.classes(), ["DET", "NOUN", "VERB"]);
        assert_eq!(c.n_units(), 3);
        assert_eq!(c.units()[1].is_error, Some(true));
        assert_eq!(c.documents()[0].id, "s000001");
    }

    #[test]
    fn span_corpus_decodes_bio() {
        let (_d, p) = write("John\tB-PER\nSmith\tI-PER\nin\tO\nParis\tB-LOC\n\nok\tO\n");
        let c = read_column_corpus(&p, Task::SpanLabeling).unwrap();
        assert_eq!(c.classes(), ["LOC", "PER"]);
        let pos: Vec<_> = c.units().iter().map(|u| (u.position, u.noisy_label)).collect();
        assert_eq!(
            pos,
            vec![
                (Position::Span { begin: 0, end: 2 }, 1),
                (Position::Span { begin: 3, end: 4 }, 0)
            ]
        );
    }

    #[test]
    fn dangling_inside_is_repaired() {
        let (_d, p) = write("a\tO\nb\tI-LOC\n");
        let c = read_column_corpus(&p, Task::SpanLabeling).unwrap();
        assert_eq!(c.units()[0].position, Position::Span { begin: 1, end: 2 });
    }

    #[test]
    fn ragged_columns_rejected() {
        let (_d, p) = write("a\tO\tO\nb\tO\n");
        let err = read_column_corpus(&p, Task::TokenLabeling).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
    }

    #[test]
    fn gold_alignment_yields_errors_and_missing_spans() {
        // noisy: PER(0,2) LOC(4,5) ; gold: ORG(0,2) LOC(2,3)
        let (_d, p) = write(
            "a\tB-PER\tB-ORG\nb\tI-PER\tI-ORG\nc\tO\tB-LOC\nd\tO\tO\ne\tB-LOC\tO\n",
        );
        let c = read_column_corpus(&p, Task::SpanLabeling).unwrap();
        let u = c.units();
        assert_eq!(u.len(), 2);
        assert_eq!(u[0].is_error, Some(true));
        assert_eq!(u[0].gold_label, c.class_index("ORG"));
        assert_eq!(u[1].is_error, Some(true));
        assert_eq!(u[1].gold_label, None);
        let missing = &c.documents()[0].missing;
        assert_eq!(missing.len(), 1);
        assert_eq!((missing[0].begin, missing[0].end), (2, 3));
    }

    #[test]
    fn round_trips() {
        let (_d, p) = write(
            "-DOCSTART-\tO\tO\n\n# id = first\nJohn\tB-PER\tB-PER\nlives\tO\tO\nin\tO\tB-LOC\nNew\tB-ORG\tB-LOC\nYork\tI-ORG\tI-LOC\n\nx\tB-MISC\tO\n",
        );
        let c = read_column_corpus(&p, Task::SpanLabeling).unwrap();
        assert_eq!(c.documents()[0].id, "first");
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("o.tsv");
        write_column_corpus(&c, &out).unwrap();
        let back = read_column_corpus(&out, Task::SpanLabeling).unwrap();
        assert_eq!(back, c);
        let flags: Vec<_> = back.units().iter().map(|u| u.is_error).collect();
        assert_eq!(flags, c.units().iter().map(|u| u.is_error).collect::<Vec<_>>());

        let (_d2, p2) = write("a\tX\tY\nb\tY\tY\n\nc\tX\tX\n");
        let c = read_column_corpus(&p2, Task::TokenLabeling).unwrap();
        write_column_corpus(&c, &out).unwrap();
        assert_eq!(read_column_corpus(&out, Task::TokenLabeling).unwrap(), c);
    }

    #[test]
    fn partial_gold_cannot_be_written() {
        let mut docs = vec![Document::tagged("a", vec!["x".into(), "y".into()], &[0, 1])];
        docs[0].annotations[0].gold = Some(1);
        let c = Corpus::new(Task::TokenLabeling, vec!["A".into(), "B".into()], docs, "t").unwrap();
        let dir = tempfile::tempdir().unwrap();
        assert!(write_column_corpus(&c, dir.path().join("o.tsv")).is_err());
    }
}
