use alloc::string::String;
use alloc::vec::Vec;

use crate::allocation::robot_labels;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Errors raised by the simulator, the primitive compilers and the planners.
///
/// Robot indices stored in variants are zero-based; messages print them as
/// `R1`, `R2`, ... to match the usual one-based notation.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("rotation system is rank deficient for robots {}", robot_labels(.robots))]
    RankDeficient { robots: Vec<usize> },

    #[error(
        "no primitive of order <= 3 moves exactly {}; nearest realizable supersets: {}",
        robot_labels(.subgroup),
        supersets_label(.supersets)
    )]
    NoPrimitive {
        subgroup: Vec<usize>,
        supersets: Vec<Vec<usize>>,
    },

    #[error("robots R{} and R{} share turning radius {radius}", .first + 1, .second + 1)]
    DuplicateRadius {
        first: usize,
        second: usize,
        radius: f64,
    },

    #[error("validation failed: {0}")]
    Validation(String),
}

fn supersets_label(sets: &[Vec<usize>]) -> String {
    if sets.is_empty() {
        return String::from("none");
    }
    let parts: Vec<String> = sets.iter().map(|s| robot_labels(s)).collect();
    parts.join("; ")
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
