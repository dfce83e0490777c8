//! Prediction bundles: per-unit class probabilities from one model, either a
//! single row, `T` stochastic passes, or one row per training epoch.
//!
//! ```text
//! #aed-pred v1 model=<name> kind=<single|repeated:T|epochs:E> classes=<c1,c2,..>
//! uid<TAB>p1<TAB>..<TAB>pC                    (single)
//! uid<TAB>pass_idx<TAB>p1<TAB>..<TAB>pC       (repeated / epochs)
//! ```

use std::fmt;
use std::io::Write;
use std::path::Path;

use super::{create, display, finish, header_field, header_safe, open_lines, parse_f64, parse_header};
use crate::corpus::Corpus;
use crate::error::{Error, Result};

/// Rows must sum to one within this tolerance to be accepted.
pub const ROW_SUM_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BundleKind {
    Single,
    Repeated(usize),
    PerEpoch(usize),
}

impl BundleKind {
    pub fn rows_per_unit(self) -> usize {
        match self {
            BundleKind::Single => 1,
            BundleKind::Repeated(t) => t,
            BundleKind::PerEpoch(e) => e,
        }
    }
}

impl fmt::Display for BundleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BundleKind::Single => f.write_str("single"),
            BundleKind::Repeated(t) => write!(f, "repeated:{t}"),
            BundleKind::PerEpoch(e) => write!(f, "epochs:{e}"),
        }
    }
}

impl std::str::FromStr for BundleKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let count = |v: &str| -> Result<usize> {
            v.parse::<usize>()
                .ok()
                .filter(|&n| n >= 1)
                .ok_or_else(|| Error::invalid(format!("bad row count in kind `{s}`")))
        };
        match s.split_once(':') {
            None if s == "single" => Ok(BundleKind::Single),
            Some(("repeated", n)) => Ok(BundleKind::Repeated(count(n)?)),
            Some(("epochs", n)) => Ok(BundleKind::PerEpoch(count(n)?)),
            _ => Err(Error::invalid(format!("unknown bundle kind `{s}`"))),
        }
    }
}

/// Class probabilities for every unit of a corpus, in corpus unit order.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictionBundle {
    model_name: String,
    classes: Vec<String>,
    kind: BundleKind,
    uids: Vec<String>,
    /// `rows[unit][pass][class]`
    rows: Vec<Vec<Vec<f64>>>,
}

fn check_row(row: &[f64], n_classes: usize, uid: &str) -> Result<()> {
    if row.len() != n_classes {
        return Err(Error::mismatch(format!(
            "unit `{uid}`: row has {} entries, expected {n_classes}",
            row.len()
        )));
    }
    if row.iter().any(|p| !p.is_finite() || *p < 0.0) {
        return Err(Error::mismatch(format!(
            "unit `{uid}`: probabilities must be finite and non-negative"
        )));
    }
    let sum: f64 = row.iter().sum();
    if (sum - 1.0).abs() > ROW_SUM_TOLERANCE {
        return Err(Error::mismatch(format!(
            "unit `{uid}`: row sums to {sum}, not 1 within {ROW_SUM_TOLERANCE}"
        )));
    }
    Ok(())
}

fn renormalize(row: &mut [f64]) {
    let sum: f64 = row.iter().sum();
    row.iter_mut().for_each(|p| *p /= sum);
}

impl PredictionBundle {
    /// Validates shapes and stochasticity and renormalizes every row.
    pub fn new(
        model_name: impl Into<String>,
        classes: Vec<String>,
        kind: BundleKind,
        uids: Vec<String>,
        mut rows: Vec<Vec<Vec<f64>>>,
    ) -> Result<Self> {
        if uids.len() != rows.len() {
            return Err(Error::mismatch("uid count differs from row count"));
        }
        let per_unit = kind.rows_per_unit();
        for (uid, unit_rows) in uids.iter().zip(rows.iter_mut()) {
            if unit_rows.len() != per_unit {
                return Err(Error::mismatch(format!(
                    "unit `{uid}` has {} rows, expected {per_unit} for kind {kind}",
                    unit_rows.len()
                )));
            }
            for row in unit_rows.iter_mut() {
                check_row(row, classes.len(), uid)?;
                renormalize(row);
            }
        }
        Ok(PredictionBundle {
            model_name: model_name.into(),
            classes,
            kind,
            uids,
            rows,
        })
    }

    /// Builds a single-row bundle keyed by the corpus units.
    pub fn single(model_name: impl Into<String>, corpus: &Corpus, rows: Vec<Vec<f64>>) -> Result<Self> {
        Self::for_corpus(
            model_name,
            corpus,
            BundleKind::Single,
            rows.into_iter().map(|r| vec![r]).collect(),
        )
    }

    pub fn for_corpus(
        model_name: impl Into<String>,
        corpus: &Corpus,
        kind: BundleKind,
        rows: Vec<Vec<Vec<f64>>>,
    ) -> Result<Self> {
        let uids = corpus.units().iter().map(|u| u.uid.clone()).collect();
        Self::new(model_name, corpus.classes().to_vec(), kind, uids, rows)
    }

    pub fn model_name(&self) -> &str {
        &self.model_name
    }

    pub fn classes(&self) -> &[String] {
        &self.classes
    }

    pub fn n_classes(&self) -> usize {
        self.classes.len()
    }

    pub fn kind(&self) -> BundleKind {
        self.kind
    }

    pub fn uids(&self) -> &[String] {
        &self.uids
    }

    pub fn len(&self) -> usize {
        self.uids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.uids.is_empty()
    }

    /// All rows of unit `i`.
    pub fn unit_rows(&self, i: usize) -> &[Vec<f64>] {
        &self.rows[i]
    }

    /// First row of unit `i`; the prediction itself for single bundles.
    pub fn row(&self, i: usize) -> &[f64] {
        &self.rows[i][0]
    }

    pub fn rows(&self) -> &[Vec<Vec<f64>>] {
        &self.rows
    }

    pub fn with_model_name(mut self, name: impl Into<String>) -> Self {
        self.model_name = name.into();
        self
    }

    /// Checks that the bundle covers exactly the corpus units, in order, with
    /// the corpus class list.
    pub fn check_against(&self, corpus: &Corpus) -> Result<()> {
        if self.classes != corpus.classes() {
            return Err(Error::mismatch(format!(
                "bundle `{}` classes [{}] differ from corpus classes [{}]",
                self.model_name,
                self.classes.join(","),
                corpus.classes().join(",")
            )));
        }
        if self.uids.len() != corpus.n_units()
            || self.uids.iter().zip(corpus.units()).any(|(a, u)| a != &u.uid)
        {
            return Err(Error::mismatch(format!(
                "bundle `{}` does not cover the corpus units",
                self.model_name
            )));
        }
        Ok(())
    }

    pub fn require_kind(&self, want: fn(BundleKind) -> bool, what: &str) -> Result<()> {
        if want(self.kind) {
            Ok(())
        } else {
            Err(Error::mismatch(format!(
                "bundle `{}` has kind {}, expected {what}",
                self.model_name, self.kind
            )))
        }
    }
}

pub fn read_predictions(path: impl AsRef<Path>, corpus: &Corpus) -> Result<PredictionBundle> {
    let path = path.as_ref();
    let mut lines = open_lines(path)?;
    let (_, header) = lines
        .next()
        .transpose()?
        .ok_or_else(|| Error::parse(display(path), 1, "empty prediction file"))?;
    let fields = parse_header(&header, "#aed-pred", path)?;
    let model_name = header_field(&fields, "model", path)?.to_string();
    let kind: BundleKind = header_field(&fields, "kind", path)?
        .parse()
        .map_err(|e: Error| Error::parse(display(path), 1, e.to_string()))?;
    let classes: Vec<String> = header_field(&fields, "classes", path)?
        .split(',')
        .map(String::from)
        .collect();
    if classes != corpus.classes() {
        return Err(Error::mismatch(format!(
            "{}: classes [{}] differ from corpus classes [{}]",
            display(path),
            classes.join(","),
            corpus.classes().join(",")
        )));
    }
    let n_classes = classes.len();
    let per_unit = kind.rows_per_unit();
    let indexed = kind != BundleKind::Single;

    let mut rows: Vec<Vec<Option<Vec<f64>>>> = vec![vec![None; per_unit]; corpus.n_units()];
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
        let pass = if indexed {
            let raw = cols
                .next()
                .ok_or_else(|| Error::parse(display(path), no, "missing pass index"))?;
            let pass: usize = raw.parse().map_err(|_| {
                Error::parse(display(path), no, format!("bad pass index `{raw}`"))
            })?;
            if pass >= per_unit {
                return Err(Error::parse(
                    display(path),
                    no,
                    format!("pass index {pass} out of range for kind {kind}"),
                ));
            }
            pass
        } else {
            0
        };
        let row: Vec<f64> = cols
            .map(|c| parse_f64(c, path, no))
            .collect::<Result<_>>()?;
        check_row(&row, n_classes, uid)
            .map_err(|e| Error::parse(display(path), no, e.to_string()))?;
        let slot = &mut rows[unit][pass];
        if slot.is_some() {
            return Err(Error::parse(
                display(path),
                no,
                format!("duplicate row for `{uid}` pass {pass}"),
            ));
        }
        *slot = Some(row);
    }

    let mut complete = Vec::with_capacity(rows.len());
    for (unit_rows, unit) in rows.into_iter().zip(corpus.units()) {
        let unit_rows: Option<Vec<Vec<f64>>> = unit_rows.into_iter().collect();
        complete.push(unit_rows.ok_or_else(|| {
            Error::mismatch(format!("{}: no complete prediction for `{}`", display(path), unit.uid))
        })?);
    }
    PredictionBundle::for_corpus(model_name, corpus, kind, complete)
}

pub fn write_predictions(bundle: &PredictionBundle, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    for c in &bundle.classes {
        if c.is_empty() || c.contains(',') || c.contains(char::is_whitespace) {
            return Err(Error::invalid(format!("class name `{c}` cannot appear in a header")));
        }
    }
    let mut w = create(path)?;
    let io_err = |e| Error::io(path, e);
    writeln!(
        w,
        "#aed-pred v1 model={} kind={} classes={}",
        header_safe(&bundle.model_name),
        bundle.kind,
        bundle.classes.join(",")
    )
    .map_err(io_err)?;
    let mut line = String::new();
    for (uid, unit_rows) in bundle.uids.iter().zip(&bundle.rows) {
        for (pass, row) in unit_rows.iter().enumerate() {
            line.clear();
            line.push_str(uid);
            if bundle.kind != BundleKind::Single {
                line.push('\t');
                line.push_str(&pass.to_string());
            }
            for p in row {
                // shortest representation that round-trips exactly
                line.push('\t');
                line.push_str(&format!("{p:?}"));
            }
            writeln!(w, "{line}").map_err(io_err)?;
        }
    }
    finish(w, path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Document, Task};
    use proptest::prelude::*;
    use std::fs;

    fn corpus() -> Corpus {
        let docs = vec![Document::text("d1", "x", 0), Document::text("d2", "y", 1)];
        Corpus::new(Task::TextClassification, vec!["A".into(), "B".into()], docs, "t").unwrap()
    }

    fn read_str(content: &str) -> Result<PredictionBundle> {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("p.tsv");
        fs::write(&p, content).unwrap();
        read_predictions(&p, &corpus())
    }

    #[test]
    fn reads_single_rows() {
        let b = read_str("#aed-pred v1 model=m kind=single classes=A,B\nd1#0\t0.9\t0.1\nd2#0\t0.3\t0.7\n")
            .unwrap();
        assert_eq!(b.row(0), [0.9, 0.1]);
        assert_eq!(b.model_name(), "m");
    }

    #[test]
    fn rejects_rows_off_by_more_than_tolerance() {
        let err = read_str("#aed-pred v1 model=m kind=single classes=A,B\nd1#0\t0.9\t0.0994\nd2#0\t0.3\t0.7\n")
            .unwrap_err();
        assert!(err.to_string().contains("sums to"), "{err}");
        // within tolerance: accepted and renormalized
        let b = read_str("#aed-pred v1 model=m kind=single classes=A,B\nd1#0\t0.9\t0.1000005\nd2#0\t0.3\t0.7\n")
            .unwrap();
        assert!((b.row(0).iter().sum::<f64>() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_unknown_uid_class_mismatch_and_nan() {
        assert!(read_str("#aed-pred v1 model=m kind=single classes=A,B\nzz#0\t0.5\t0.5\n").is_err());
        assert!(read_str("#aed-pred v1 model=m kind=single classes=B,A\n").is_err());
        assert!(read_str("#aed-pred v1 model=m kind=single classes=A,B\nd1#0\tNaN\t0.5\n").is_err());
        // incomplete cover
        let err = read_str("#aed-pred v1 model=m kind=single classes=A,B\nd1#0\t0.5\t0.5\n").unwrap_err();
        assert!(err.to_string().contains("d2#0"));
    }

    #[test]
    fn repeated_shape() {
        let mut s = String::from("#aed-pred v1 model=m kind=repeated:10 classes=A,B\n");
        for uid in ["d1#0", "d2#0"] {
            for t in 0..10 {
                s.push_str(&format!("{uid}\t{t}\t0.25\t0.75\n"));
            }
        }
        let b = read_str(&s).unwrap();
        assert_eq!(b.kind(), BundleKind::Repeated(10));
        assert!(b.rows().iter().all(|r| r.len() == 10));
        // a missing pass is an error
        let cut: String = s.lines().take(10).collect::<Vec<_>>().join("\n");
        assert!(read_str(&cut).is_err());
    }

    proptest! {
        #[test]
        fn write_read_identity(raw in prop::collection::vec(prop::collection::vec(0.001f64..1.0, 3), 2)) {
            let rows: Vec<Vec<Vec<f64>>> = raw
                .iter()
                .map(|r| {
                    let s: f64 = r.iter().sum();
                    vec![r.iter().map(|x| x / s).collect(), vec![0.2, 0.3, 0.5]]
                })
                .collect();
            let docs = vec![Document::text("d1", "x", 0), Document::text("d2", "y", 2)];
            let c = Corpus::new(
                Task::TextClassification,
                vec!["A".into(), "B".into(), "C".into()],
                docs,
                "t",
            )
            .unwrap();
            let b = PredictionBundle::for_corpus("m x", &c, BundleKind::PerEpoch(2), rows).unwrap();
            let dir = tempfile::tempdir().unwrap();
            let p = dir.path().join("b.tsv");
            write_predictions(&b, &p).unwrap();
            let back = read_predictions(&p, &c).unwrap();
            prop_assert_eq!(back.model_name(), "m_x");
            for (x, y) in back.rows().iter().flatten().flatten().zip(b.rows().iter().flatten().flatten()) {
                prop_assert!((x - y).abs() <= 1e-9);
            }
        }
    }
}
