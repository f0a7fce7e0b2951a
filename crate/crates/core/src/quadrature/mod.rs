//! Parameter-space quadrature: Gauss-Legendre, Monte Carlo and randomly
//! shifted embedded rank-1 lattice rules.

mod estimator;
mod gauss;
mod korobov;
mod lattice;
mod mc;

use thiserror::Error;

pub use estimator::{estimate, relative_rmse, sample_means, EstimatorOutput};
pub use gauss::{gauss_legendre, legendre, GaussRule};
pub use korobov::{default_weights, korobov_search, korobov_vector, worst_case_error_sq};
pub use lattice::{
    bit_reverse, embedded_points, lattice_points, load_generating_vector, parse_generating_vector, LatticeRule,
    ShiftSet,
};
pub use mc::{mc_sample, mc_stream};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuadratureError {
    #[error("lattice size {0} is not a power of two")]
    NotPowerOfTwo(u64),
    #[error("generating vector is empty")]
    EmptyGeneratingVector,
    #[error("z_{coordinate} = {z} is not coprime to n = {n}")]
    GcdViolation { coordinate: usize, z: u64, n: u64 },
    #[error("level {level} exceeds the rule's maximum level {max}")]
    LevelTooHigh { level: u32, max: u32 },
    #[error("expected dimension {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("generating vector line {line}: {content:?} is not a positive integer")]
    Malformed { line: usize, content: String },
    #[error("{0}")]
    Io(String),
    #[error("Korobov search over n = {n}, s = {s} found no admissible candidate")]
    SearchExhausted { n: u64, s: usize },
    #[error("reference value {0} must be finite and nonzero")]
    BadReference(f64),
    #[error("no estimates to average")]
    NoEstimates,
    #[error("evaluation failed at point {index} of shift {shift}: {message}")]
    Evaluator { shift: usize, index: usize, message: String },
}
