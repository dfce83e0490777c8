//! Span handling for span-labeling corpora: BIO decoding, optimal alignment
//! of reference spans against candidate spans, and aggregation of token-level
//! probabilities to span level.
//!
//! Alignment maximizes total token overlap with an exact assignment solver.
//! Pairs without overlap are never formed. Reference spans left unmatched are
//! reported as [`Matched::Missing`]; unmatched candidates are `dropped`.
//! Among several optimal matchings the one preferring, reference by reference
//! in `(begin, end)` order, the earliest candidate is returned.

pub mod bio;
pub mod lsap;

use std::str::FromStr;

use crate::corpus::LabeledSpan;
use crate::error::{Error, Result};

pub use bio::{BioTagset, TypedSpan};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Matched {
    Span(LabeledSpan),
    /// The reference span has no counterpart; carries the reference offsets.
    Missing,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AlignedPair {
    pub reference: LabeledSpan,
    pub matched: Matched,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Alignment {
    pub pairs: Vec<AlignedPair>,
    pub dropped: Vec<LabeledSpan>,
}

impl Alignment {
    pub fn total_overlap(&self) -> usize {
        self.pairs
            .iter()
            .map(|p| match p.matched {
                Matched::Span(c) => overlap(&p.reference, &c),
                Matched::Missing => 0,
            })
            .sum()
    }

    pub fn matched_of(&self, reference: &LabeledSpan) -> Option<Matched> {
        self.pairs
            .iter()
            .find(|p| &p.reference == reference)
            .map(|p| p.matched)
    }
}

pub fn overlap(a: &LabeledSpan, b: &LabeledSpan) -> usize {
    let lo = a.begin.max(b.begin);
    let hi = a.end.min(b.end);
    hi.saturating_sub(lo)
}

fn span_key(s: &LabeledSpan) -> (usize, usize, usize) {
    (s.begin, s.end, s.label)
}

/// Maximum total overlap achievable between `refs` and `cands` (indices into
/// the overlap matrix).
fn best_total(ov: &[Vec<usize>], refs: &[usize], cands: &[usize]) -> usize {
    if refs.is_empty() || cands.is_empty() {
        return 0;
    }
    let costs: Vec<Vec<i64>> = refs
        .iter()
        .map(|&i| cands.iter().map(|&j| -(ov[i][j] as i64)).collect())
        .collect();
    let assignment = lsap::linear_sum_assignment(&costs);
    assignment
        .iter()
        .enumerate()
        .filter_map(|(r, c)| c.map(|c| ov[refs[r]][cands[c]]))
        .sum()
}

/// Optimal overlap-maximizing alignment of `reference` spans against
/// `candidates` within one document.
pub fn align_spans(reference: &[LabeledSpan], candidates: &[LabeledSpan]) -> Alignment {
    let mut refs = reference.to_vec();
    let mut cands = candidates.to_vec();
    refs.sort_by_key(span_key);
    cands.sort_by_key(span_key);

    let ov: Vec<Vec<usize>> = refs
        .iter()
        .map(|r| cands.iter().map(|c| overlap(r, c)).collect())
        .collect();

    // connected components of the overlap graph are independent subproblems
    let n_r = refs.len();
    let n_c = cands.len();
    let mut parent: Vec<usize> = (0..n_r + n_c).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for i in 0..n_r {
        for j in 0..n_c {
            if ov[i][j] > 0 {
                let a = find(&mut parent, i);
                let b = find(&mut parent, n_r + j);
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut comp_refs: std::collections::BTreeMap<usize, (Vec<usize>, Vec<usize>)> =
        Default::default();
    for i in 0..n_r {
        let root = find(&mut parent, i);
        comp_refs.entry(root).or_default().0.push(i);
    }
    for j in 0..n_c {
        let root = find(&mut parent, n_r + j);
        comp_refs.entry(root).or_default().1.push(j);
    }

    let mut match_of_ref: Vec<Option<usize>> = vec![None; n_r];
    let mut cand_used = vec![false; n_c];
    for (_, (crefs, ccands)) in comp_refs {
        if crefs.is_empty() || ccands.is_empty() {
            continue;
        }
        let target = best_total(&ov, &crefs, &ccands);
        let mut fixed = 0usize;
        let mut available: Vec<usize> = ccands.clone();
        for (k, &i) in crefs.iter().enumerate() {
            let rest_refs = &crefs[k + 1..];
            let mut chosen = None;
            for (pos, &j) in available.iter().enumerate() {
                if ov[i][j] == 0 {
                    continue;
                }
                let mut rest_cands = available.clone();
                rest_cands.remove(pos);
                if fixed + ov[i][j] + best_total(&ov, rest_refs, &rest_cands) == target {
                    chosen = Some(pos);
                    break;
                }
            }
            if let Some(pos) = chosen {
                let j = available.remove(pos);
                fixed += ov[i][j];
                match_of_ref[i] = Some(j);
                cand_used[j] = true;
            }
            // otherwise leaving `i` unmatched is optimal
        }
        debug_assert_eq!(fixed, target);
    }

    let pairs = refs
        .iter()
        .enumerate()
        .map(|(i, r)| AlignedPair {
            reference: *r,
            matched: match match_of_ref[i] {
                Some(j) => Matched::Span(cands[j]),
                None => Matched::Missing,
            },
        })
        .collect();
    let dropped = cands
        .iter()
        .enumerate()
        .filter(|(j, _)| !cand_used[*j])
        .map(|(_, c)| *c)
        .collect();
    Alignment { pairs, dropped }
}

/// Elementwise reduction applied to the token rows of a span.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Aggregation {
    Min,
    Max,
    #[default]
    Mean,
    Median,
}

impl FromStr for Aggregation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "min" => Ok(Aggregation::Min),
            "max" => Ok(Aggregation::Max),
            "mean" => Ok(Aggregation::Mean),
            "median" => Ok(Aggregation::Median),
            other => Err(Error::invalid(format!("unknown aggregation `{other}`"))),
        }
    }
}

/// Reduces several probability rows to one and renormalizes it to sum 1.
pub fn aggregate_span_probs<R: AsRef<[f64]>>(rows: &[R], mode: Aggregation) -> Result<Vec<f64>> {
    let first = rows
        .first()
        .ok_or_else(|| Error::invalid("cannot aggregate an empty list of rows"))?;
    let width = first.as_ref().len();
    if rows.iter().any(|r| r.as_ref().len() != width) {
        return Err(Error::mismatch("rows to aggregate differ in width"));
    }
    let n = rows.len() as f64;
    let mut out = vec![0.0; width];
    let mut column = Vec::with_capacity(rows.len());
    for (k, slot) in out.iter_mut().enumerate() {
        column.clear();
        column.extend(rows.iter().map(|r| r.as_ref()[k]));
        *slot = match mode {
            Aggregation::Min => column.iter().copied().fold(f64::INFINITY, f64::min),
            Aggregation::Max => column.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            Aggregation::Mean => column.iter().sum::<f64>() / n,
            Aggregation::Median => {
                column.sort_by(f64::total_cmp);
                let m = column.len();
                if m % 2 == 1 {
                    column[m / 2]
                } else {
                    0.5 * (column[m / 2 - 1] + column[m / 2])
                }
            }
        };
    }
    let total: f64 = out.iter().sum();
    if total > 0.0 && total.is_finite() {
        out.iter_mut().for_each(|p| *p /= total);
    } else {
        out.iter_mut().for_each(|p| *p = 1.0 / width as f64);
    }
    Ok(out)
}

/// Maps rows over a BIO tagset onto rows over span classes plus a trailing
/// "no entity" entry that collects the `O` mass.
#[derive(Debug, Clone)]
pub struct SpanProjector {
    tag_class: Vec<Option<usize>>,
    n_classes: usize,
}

impl SpanProjector {
    pub fn new(tags: &[String], classes: &[String]) -> Result<Self> {
        let mut tag_class = Vec::with_capacity(tags.len());
        for t in tags {
            match bio::parse_tag(t)? {
                bio::BioTag::Outside => tag_class.push(None),
                bio::BioTag::Begin(ty) | bio::BioTag::Inside(ty) => {
                    let c = classes.iter().position(|c| c == ty).ok_or_else(|| {
                        Error::mismatch(format!("tag `{t}` names unknown span class `{ty}`"))
                    })?;
                    tag_class.push(Some(c));
                }
            }
        }
        Ok(SpanProjector {
            tag_class,
            n_classes: classes.len(),
        })
    }

    pub fn n_tags(&self) -> usize {
        self.tag_class.len()
    }

    /// Sums `B-X` and `I-X` mass per token.
    pub fn token_row(&self, tag_row: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n_classes + 1];
        for (p, cls) in tag_row.iter().zip(&self.tag_class) {
            match cls {
                Some(c) => out[*c] += p,
                None => out[self.n_classes] += p,
            }
        }
        out
    }

    pub fn distribution<R: AsRef<[f64]>>(&self, tag_rows: &[R], mode: Aggregation) -> Result<Vec<f64>> {
        if tag_rows.iter().any(|r| r.as_ref().len() != self.tag_class.len()) {
            return Err(Error::mismatch("token row width differs from the tagset size"));
        }
        let rows: Vec<Vec<f64>> = tag_rows.iter().map(|r| self.token_row(r.as_ref())).collect();
        aggregate_span_probs(&rows, mode)
    }
}

/// Span-class distribution (classes then "no entity") from the BIO rows of
/// the span's tokens.
pub fn span_label_distribution<R: AsRef<[f64]>>(
    tag_rows: &[R],
    tags: &[String],
    classes: &[String],
    mode: Aggregation,
) -> Result<Vec<f64>> {
    SpanProjector::new(tags, classes)?.distribution(tag_rows, mode)
}
