//! phaselab: a finite-model workbench for graded algebraic phases.
//!
//! A phase is a finite carrier with total operation tables and a defect
//! grading that is monotone under every operation. On top of that data model
//! the crate computes the canonical filtration and its admissibility depths,
//! rigid cores, boundaries and stratum collapses, completions, morphism sets
//! (exhaustively, with an independently checkable brute-force route),
//! equivalence deciders and hom-count profiles, a preorder enrichment with
//! strict 2-category law checks, and a verifier that turns each structural
//! claim into a verdict with machine-checkable witnesses.
//!
//! The `phaselab` binary exposes all of it over the `.phase` text format;
//! every report is byte-deterministic.

// element indices double as keys into phases and maps throughout
#![allow(clippy::needless_range_loop)]

pub mod canon;
pub mod catalogue;
pub mod dsl;
pub mod equivalence;
pub mod error;
pub mod filtration;
pub mod fixtures;
pub mod morphism;
pub mod oracle;
pub mod phase;
pub mod quotient;
pub mod report;
pub mod span;
pub mod twocat;
pub mod verifier;

pub use error::PhaselabError;
pub use phase::{Phase, Signature};
