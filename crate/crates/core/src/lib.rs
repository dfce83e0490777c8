//! Annotation error detection for labeled NLP corpora.
//!
//! The crate covers the whole detection pipeline: corpus model and noise
//! injection ([`corpus`]), interchange formats ([`io`]), span alignment
//! ([`span_align`]), shallow baseline models with cross-validation
//! ([`models`]), probability calibration ([`calibrate`]), the detectors
//! themselves ([`detect`]) and their evaluation ([`eval`]).

pub mod calibrate;
pub mod corpus;
pub mod detect;
pub mod error;
pub mod eval;
pub mod io;
pub mod models;
pub mod rng;
pub mod runner;
pub mod span_align;
pub mod synth;

pub use corpus::{Corpus, Document, FoldAssignment, Position, Task, Unit};
pub use error::{Error, Result};
