//! Decision procedures for the modal logics of density.
//!
//! * [`kde`]: the fixpoint procedure for unimodal KDe (validity over dense frames).
//! * [`kdeab`]: the window/continuation tableau for bimodal KDe_{a,b}
//!   (weakly dense frames), with witness-model extraction.
//! * [`oracle`]: explicit Kripke models, model checking and brute-force model
//!   search, plus a plain K tableau; used as independent ground truth.
//! * [`translate`]: the relativising translation from K validity to KDe validity.

pub mod ccs;
pub mod corpus;
pub mod formula;
pub mod kde;
pub mod kdeab;
pub mod oracle;
pub mod outcome;
pub mod translate;
pub mod windows;

pub use formula::{parse, Formula, FormulaSet, Modality, Mode};
pub use oracle::KripkeModel;
pub use outcome::{SatResult, Verdict};
