//! BIO tag decoding and encoding.

use crate::error::{Error, Result};

/// A decoded span with its entity type as written in the tag.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TypedSpan {
    pub begin: usize,
    pub end: usize,
    pub label: String,
}

impl TypedSpan {
    pub fn new(begin: usize, end: usize, label: impl Into<String>) -> Self {
        TypedSpan {
            begin,
            end,
            label: label.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BioTag<'a> {
    Outside,
    Begin(&'a str),
    Inside(&'a str),
}

pub fn parse_tag(tag: &str) -> Result<BioTag<'_>> {
    if tag == "O" {
        return Ok(BioTag::Outside);
    }
    match tag.split_once('-') {
        Some(("B", ty)) if !ty.is_empty() => Ok(BioTag::Begin(ty)),
        Some(("I", ty)) if !ty.is_empty() => Ok(BioTag::Inside(ty)),
        _ => Err(Error::invalid(format!("`{tag}` is not a BIO tag"))),
    }
}

/// Decodes a BIO sequence into spans.
///
/// An `I-X` that does not continue a span of type `X` opens a new span, as if
/// it were `B-X`.
pub fn decode<S: AsRef<str>>(tags: &[S]) -> Result<Vec<TypedSpan>> {
    let mut spans = Vec::new();
    let mut open: Option<(usize, &str)> = None;
    for (i, tag) in tags.iter().enumerate() {
        let parsed = parse_tag(tag.as_ref())?;
        match parsed {
            BioTag::Outside => {
                if let Some((b, ty)) = open.take() {
                    spans.push(TypedSpan::new(b, i, ty));
                }
            }
            BioTag::Begin(ty) => {
                if let Some((b, prev)) = open.take() {
                    spans.push(TypedSpan::new(b, i, prev));
                }
                open = Some((i, ty));
            }
            BioTag::Inside(ty) => match open {
                Some((_, prev)) if prev == ty => {}
                _ => {
                    log::warn!("dangling `I-{ty}` at position {i} treated as `B-{ty}`");
                    if let Some((b, prev)) = open.take() {
                        spans.push(TypedSpan::new(b, i, prev));
                    }
                    open = Some((i, ty));
                }
            },
        }
    }
    if let Some((b, ty)) = open {
        spans.push(TypedSpan::new(b, tags.len(), ty));
    }
    Ok(spans)
}

/// Encodes non-overlapping spans as a BIO sequence of length `len`.
pub fn encode(spans: &[TypedSpan], len: usize) -> Result<Vec<String>> {
    let mut tags = vec!["O".to_string(); len];
    let mut sorted: Vec<&TypedSpan> = spans.iter().collect();
    sorted.sort();
    let mut last_end = 0;
    for s in sorted {
        if s.begin >= s.end || s.end > len {
            return Err(Error::invalid(format!(
                "span ({}, {}) invalid for {len} tokens",
                s.begin, s.end
            )));
        }
        if s.begin < last_end {
            return Err(Error::invalid(format!(
                "span ({}, {}) overlaps a previous span",
                s.begin, s.end
            )));
        }
        tags[s.begin] = format!("B-{}", s.label);
        for t in &mut tags[s.begin + 1..s.end] {
            *t = format!("I-{}", s.label);
        }
        last_end = s.end;
    }
    Ok(tags)
}

/// A BIO tagset built from entity classes: `O` first, then `B-X`, `I-X` for
/// each class in order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BioTagset {
    classes: Vec<String>,
    tags: Vec<String>,
}

impl BioTagset {
    pub fn new(classes: &[String]) -> Self {
        let mut tags = vec!["O".to_string()];
        for c in classes {
            tags.push(format!("B-{c}"));
            tags.push(format!("I-{c}"));
        }
        BioTagset {
            classes: classes.to_vec(),
            tags,
        }
    }

    /// Interprets an arbitrary tag list, e.g. the class list of an external
    /// prediction bundle. Fails if any tag is not `O`, `B-X` or `I-X`.
    pub fn from_tags(tags: &[String]) -> Result<(Self, Vec<Option<usize>>)> {
        let mut classes: Vec<String> = Vec::new();
        let mut mapping = Vec::with_capacity(tags.len());
        for t in tags {
            match parse_tag(t)? {
                BioTag::Outside => mapping.push(None),
                BioTag::Begin(ty) | BioTag::Inside(ty) => {
                    let idx = match classes.iter().position(|c| c == ty) {
                        Some(i) => i,
                        None => {
                            classes.push(ty.to_string());
                            classes.len() - 1
                        }
                    };
                    mapping.push(Some(idx));
                }
            }
        }
        Ok((BioTagset::new(&classes), mapping))
    }

    pub fn tags(&self) -> &[String] {
        &self.tags
    }

    pub fn len(&self) -> usize {
        self.tags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tags.is_empty()
    }

    pub fn classes(&self) -> &[String] {
        &self.classes
    }

    pub fn outside(&self) -> usize {
        0
    }

    pub fn begin(&self, class: usize) -> usize {
        1 + 2 * class
    }

    pub fn inside(&self, class: usize) -> usize {
        2 + 2 * class
    }

    /// Entity class of a tag index, `None` for `O`.
    pub fn class_of(&self, tag: usize) -> Option<usize> {
        if tag == 0 {
            None
        } else {
            Some((tag - 1) / 2)
        }
    }

    pub fn index(&self, tag: &str) -> Option<usize> {
        self.tags.iter().position(|t| t == tag)
    }

    /// Tag indices for a document given its spans `(begin, end, class)`.
    pub fn encode_indices(&self, spans: &[(usize, usize, usize)], len: usize) -> Vec<usize> {
        let mut out = vec![0; len];
        for &(b, e, c) in spans {
            out[b] = self.begin(c);
            for t in &mut out[b + 1..e] {
                *t = self.inside(c);
            }
        }
        out
    }
}
