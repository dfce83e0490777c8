//! Detector outputs.
//!
//! ```text
//! #aed-det v1 method=<m> type=flags
//! uid<TAB>0|1
//!
//! #aed-det v1 method=<m> type=scores polarity=<high|low>
//! uid<TAB>score
//! ```

use std::io::Write;
use std::path::Path;

use super::{create, display, finish, header_field, header_safe, open_lines, parse_f64, parse_header};
use crate::corpus::Corpus;
use crate::detect::{FlagVector, Polarity, ScoreVector};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum DetectorOutput {
    Flags(FlagVector),
    Scores(ScoreVector),
}

impl DetectorOutput {
    pub fn method(&self) -> &str {
        match self {
            DetectorOutput::Flags(f) => &f.method,
            DetectorOutput::Scores(s) => &s.method,
        }
    }
}

impl From<FlagVector> for DetectorOutput {
    fn from(f: FlagVector) -> Self {
        DetectorOutput::Flags(f)
    }
}

impl From<ScoreVector> for DetectorOutput {
    fn from(s: ScoreVector) -> Self {
        DetectorOutput::Scores(s)
    }
}

pub fn write_detector_output(output: &DetectorOutput, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut w = create(path)?;
    let io_err = |e| Error::io(path, e);
    match output {
        DetectorOutput::Flags(f) => {
            writeln!(w, "#aed-det v1 method={} type=flags", header_safe(&f.method)).map_err(io_err)?;
            for (uid, flag) in f.uids.iter().zip(&f.flags) {
                writeln!(w, "{uid}\t{}", u8::from(*flag)).map_err(io_err)?;
            }
        }
        DetectorOutput::Scores(s) => {
            writeln!(
                w,
                "#aed-det v1 method={} type=scores polarity={}",
                header_safe(&s.method),
                s.polarity
            )
            .map_err(io_err)?;
            for (uid, score) in s.uids.iter().zip(&s.scores) {
                writeln!(w, "{uid}\t{score:?}").map_err(io_err)?;
            }
        }
    }
    finish(w, path)
}

pub fn read_detector_output(path: impl AsRef<Path>, corpus: &Corpus) -> Result<DetectorOutput> {
    let path = path.as_ref();
    let mut lines = open_lines(path)?;
    let (_, header) = lines
        .next()
        .transpose()?
        .ok_or_else(|| Error::parse(display(path), 1, "empty detector output"))?;
    let fields = parse_header(&header, "#aed-det", path)?;
    let method = header_field(&fields, "method", path)?.to_string();
    let kind = header_field(&fields, "type", path)?;
    let polarity = match kind {
        "flags" => None,
        "scores" => Some(
            header_field(&fields, "polarity", path)?
                .parse::<Polarity>()
                .map_err(|e| Error::parse(display(path), 1, e.to_string()))?,
        ),
        other => {
            return Err(Error::parse(display(path), 1, format!("unknown output type `{other}`")))
        }
    };

    let mut values: Vec<Option<f64>> = vec![None; corpus.n_units()];
    for line in lines {
        let (no, line) = line?;
        if line.trim().is_empty() {
            continue;
        }
        let (uid, value) = line
            .split_once('\t')
            .ok_or_else(|| Error::parse(display(path), no, "expected uid<TAB>value"))?;
        let unit = corpus.unit_index(uid).ok_or_else(|| {
            Error::parse(display(path), no, format!("uid `{uid}` is not a corpus unit"))
        })?;
        let v = match polarity {
            None => match value {
                "0" => 0.0,
                "1" => 1.0,
                other => {
                    return Err(Error::parse(display(path), no, format!("flag `{other}` is not 0 or 1")))
                }
            },
            Some(_) => parse_f64(value, path, no)?,
        };
        if values[unit].replace(v).is_some() {
            return Err(Error::parse(display(path), no, format!("duplicate entry for `{uid}`")));
        }
    }
    let mut complete = Vec::with_capacity(values.len());
    for (v, u) in values.into_iter().zip(corpus.units()) {
        complete.push(v.ok_or_else(|| {
            Error::mismatch(format!("{}: no entry for `{}`", display(path), u.uid))
        })?);
    }
    Ok(match polarity {
        None => FlagVector::new(method, corpus, complete.into_iter().map(|v| v > 0.5).collect())?.into(),
        Some(p) => ScoreVector::new(method, corpus, complete, p)?.into(),
    })
}
