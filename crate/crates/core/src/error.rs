use crate::sim::Qubit;

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum Error {
    #[error("qubit {0} is not live")]
    DeadQubit(Qubit),
    #[error("qubit {0} appears more than once in a target list")]
    DuplicateTarget(Qubit),
    #[error("gate {gate} expects {expected} targets, got {got}")]
    Arity {
        gate: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("size mismatch: expected {expected}, got {got}")]
    SizeMismatch { expected: usize, got: usize },
    #[error("gate {0} is not Clifford")]
    NotClifford(&'static str),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("forced outcome {bit} on qubit {qubit} has zero probability")]
    ImpossibleBranch { qubit: Qubit, bit: u8 },
    #[error("qubit {0} is not in |0> and cannot be released")]
    DirtyRelease(Qubit),
    #[error("resource state was already consumed")]
    AlreadyConsumed,
    #[error("transcript is incomplete: {0}")]
    IncompleteTranscript(String),
    #[error("{what} too large for dense representation: {got} > {max}")]
    TooLarge {
        what: &'static str,
        got: usize,
        max: usize,
    },
    #[error("hamiltonian shift too small; minimal valid shift is {min_shift}")]
    NotPositive { min_shift: f64 },
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
