//! Constant ledger for the parametric derivative bounds and the numerical
//! checks that compare them with finite-difference derivatives of the solver.

mod fd;
mod fit;
mod gevrey;
mod ledger;
mod verify;

use thiserror::Error;

use crate::fem::FemError;
use crate::geometry::GeometryError;

pub use fd::{fd_derivative, fd_derivative_vec, fd_stencil, FdOptions};
pub use fit::{default_y_samples, estimate_alpha, fit_transform, AlphaEstimate, TransformFit, UNCONSTRAINED_RADIUS};
pub use gevrey::{bound_det, bound_inverse, bound_product, factorial_power, falling_half_f64, r_power, GevreyBound};
pub use ledger::{
    default_beta, gamma_residual, ns_ledger, pullback_ledger, rhs_ledger, solve_gamma, NsConstantLedger, PullbackLedger,
    RhsLedger, WellPosedConstants,
};
pub use verify::{derivative_bound, verify_first_order, MarginRow, VerifyConfig, VerifyReport};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BoundsError {
    #[error("{name} must be positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },
    #[error("small-data condition violated: f/alpha + g/beta = {lhs} is not below alpha/m = {rhs}")]
    SmallData { lhs: f64, rhs: f64 },
    #[error("degenerate zero-data ledger: gamma = 0 and the sigma constants divide by it")]
    DegenerateZeroData,
    #[error("tau . 1 = {0} must be at least 1")]
    TauSum(f64),
    #[error("no radius for coordinate {coordinate}; only {available} given")]
    MissingRadius { coordinate: usize, available: usize },
    #[error("bounds with different radii or Gevrey index cannot be combined")]
    Incompatible,
    #[error("finite differences need derivative order 1..=3, got {0}")]
    StencilOrder(u64),
    #[error("stencil point y_{coordinate} = {value} leaves the parameter domain [{lo}, {hi}]")]
    StencilOutsideDomain { coordinate: usize, value: f64, lo: f64, hi: f64 },
    #[error("A is not positive definite at x = {x:?}, y = {y:?}: smallest eigenvalue {eigenvalue}")]
    NotPositiveDefinite { x: [f64; 2], y: Vec<f64>, eigenvalue: f64 },
    #[error("evaluation returned {got} values, expected {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("invalid verification setup: {0}")]
    BadConfig(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Fem(#[from] FemError),
}
