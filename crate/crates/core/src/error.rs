use thiserror::Error;

use crate::solver::ParamReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("vector must have at least one entry")]
    EmptyVector,

    #[error("non-finite entry at index {index}")]
    NonFinite { index: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid operator: {0}")]
    InvalidOperator(String),

    #[error("composition of an empty operator list")]
    EmptyComposition,

    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),

    #[error("schedule index {n} out of range for explicit schedule of length {len}")]
    ScheduleIndexOutOfRange { n: usize, len: usize },

    #[error("step size mu = {mu} outside the admissible window 0 < mu < 2*eta/k^2 = {bound}")]
    MuOutOfRange { mu: f64, bound: f64 },

    #[error("scheme parameters rejected: {}", .0.failures().join("; "))]
    InvalidParams(Box<ParamReport>),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{0} is not a projection; no independent oracle is available")]
    Unsupported(String),

    #[error("convex sets appear to have empty intersection (feasibility gap {gap:.3e} after {iterations} sweeps)")]
    EmptyIntersection { gap: f64, iterations: usize },

    #[error("{what} did not converge within {iterations} iterations (last change {last_change:.3e})")]
    NonConvergence {
        what: &'static str,
        iterations: usize,
        last_change: f64,
    },
}
