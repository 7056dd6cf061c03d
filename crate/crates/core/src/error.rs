use thiserror::Error;

/// Contract violations surfaced by the library operations.
///
/// Infeasibility of an optimization run is *not* an error; see
/// [`crate::solver::Feasibility`].
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("application has no tasks")]
    EmptyApplication,

    #[error("task index {index} out of range 1..={max}")]
    TaskIndexRange { index: usize, max: usize },

    #[error("unknown packet id {id}")]
    UnknownPacket { id: u32 },

    #[error("last-use bound {j} out of range 1..={max} (n_tasks + 1 queries the final use)")]
    LastUseBound { j: usize, max: usize },

    #[error("invalid burst range {i}..{j} for {n} tasks")]
    BurstRange { i: usize, j: usize, n: usize },

    #[error("q_max must be positive and finite, got {0}")]
    InvalidQMax(f64),

    #[error("{n} tasks exceed the brute-force enumeration limit of {limit}")]
    BruteForceTooLarge { n: usize, limit: usize },

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("burst {burst} needs {energy} uJ but the energy buffer holds only {capacity} uJ")]
    BurstExceedsCapacity {
        burst: usize,
        energy: f64,
        capacity: f64,
    },

    #[error("invalid EMU configuration: {0}")]
    InvalidEmuConfig(String),

    #[error("power trace line {line}: {message}")]
    Trace { line: usize, message: String },

    #[error("invalid generator parameters: {0}")]
    InvalidBenchSpec(String),
}
