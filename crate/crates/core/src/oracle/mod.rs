//! Ground truth at desk scale. Nothing here shares code with the solvers.

mod check;
mod ktab;
mod model;
mod search;

use thiserror::Error;

pub use check::{model_check, satisfies_all};
pub use ktab::{k_sat, k_valid};
pub use model::{is_dense, is_weakly_dense, KripkeModel};
pub use search::{bounded_search, FrameClass};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("unknown world {0}")]
    UnknownWorld(usize),
    #[error("malformed model: {0}")]
    Malformed(String),
    #[error("search space 2^{bits} exceeds the limit 2^{limit} (worlds={worlds}, atoms={atoms})")]
    BoundTooLarge {
        bits: usize,
        limit: usize,
        worlds: usize,
        atoms: usize,
    },
    #[error("formula set mentions {found} atoms, more than the allowed {max}")]
    TooManyAtoms { found: usize, max: usize },
}
