//! Jump-stabilized Q1–P0 discretization of the pulled-back Navier-Stokes
//! problem on the unit square, with a Picard nonlinear solver.

mod assembly;
mod discretization;
mod mesh;
mod norms;
mod solver;

use thiserror::Error;

pub use assembly::{assemble, MixedSystem};
pub use discretization::{q1_local_gradients, q1_values, Discretization, DiscretizationOptions, QuadRule2D, StabScaling};
pub use mesh::{build_mesh, InteriorEdge, Mesh};
pub use norms::{h_error, l_error, norm_h, norm_l, pressure_integral};
pub use solver::{
    solve_linear, solve_ns, solve_system, unpack, MixedSolution, DEFAULT_MAX_ITER, DEFAULT_PICARD_TOL, RESIDUAL_TOL,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FemError {
    #[error("mesh needs at least 2 elements per side, got {0}")]
    MeshTooCoarse(usize),
    #[error("invalid discretization option: {0}")]
    BadOption(String),
    #[error("sparsity pattern construction failed: {0}")]
    Pattern(String),
    #[error("non-finite coefficient in element {element} at quadrature point {point}")]
    NonFinite { element: usize, point: usize },
    #[error("vector length {got} does not match the expected {expected}")]
    SizeMismatch { expected: usize, got: usize },
    #[error("sparse LU factorization failed: {0}")]
    Factorization(String),
    #[error("relative residual {residual:e} above tolerance on the m = {m} mesh")]
    Residual { m: usize, residual: f64 },
    #[error("Picard iteration did not converge after {iterations} solves; increments {increments:?}")]
    NoConvergence { iterations: usize, increments: Vec<f64> },
}
