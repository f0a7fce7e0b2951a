//! Domain transformations and pulled-back coefficients on the reference square.
//!
//! The perturbed domain is {0 < x₁ < 1, 0 < x₂ < T(x₁, y)} and the map from
//! the unit square is T_y(x̂) = (x̂₁, x̂₂ T(x̂₁, y)).

mod family;
mod manufactured;
mod mat2;

use thiserror::Error;

pub use family::{ParamDomain, ParamVector, PerturbationFamily, MAX_Y_DERIVATIVE};
pub use manufactured::ManufacturedData;
pub use mat2::Mat2;

use crate::multiindex::MultiIndex;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("invalid perturbation family: {0}")]
    BadFamily(String),
    #[error("T is not positive at x1 = {x1}: T = {value}")]
    NonPositiveT { x1: f64, value: f64 },
    #[error("parameter {index} = {value} outside {domain:?}")]
    ParamOutOfRange { index: usize, value: f64, domain: ParamDomain },
    #[error("no closed-form y-derivative of order {order} for family {family}")]
    UnsupportedDerivative { family: &'static str, order: u64 },
    #[error("derivative along coordinate {coord} but the family has {dim} parameters")]
    InactiveCoordinate { coord: usize, dim: usize },
}

/// Value, differential and Jacobian determinant of T_y at one point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TransformPoint {
    pub x: [f64; 2],
    pub dt: Mat2,
    pub j: f64,
}

/// (T_y(x̂), dT_y(x̂), J_y(x̂)).
pub fn eval_transform(family: &PerturbationFamily, xhat: [f64; 2], y: &[f64]) -> TransformPoint {
    let (t, dt1) = family.eval_t(xhat[0], y);
    TransformPoint { x: [xhat[0], xhat[1] * t], dt: Mat2::new(1.0, 0.0, xhat[1] * dt1, t), j: t }
}

/// Pullback coefficients (A, B, M) with A = dT⁻¹dT⁻ᵀJ and B = M = dT⁻¹J.
///
/// Panics on a singular differential; callers validate the family first.
pub fn pullback_matrices(dt: &Mat2, j: f64) -> (Mat2, Mat2, Mat2) {
    let inv = dt.inverse().expect("differential of the domain map is invertible");
    let a = (inv * inv.transpose()).scale(j);
    let b = inv.scale(j);
    (a, b, b)
}

/// (f(T_y(x̂))·J, g·J) with the source mass term g ≡ 0.
pub fn transported_rhs(data: &ManufacturedData, family: &PerturbationFamily, xhat: [f64; 2], y: &[f64]) -> ([f64; 2], f64) {
    let tp = eval_transform(family, xhat, y);
    let f = data.f(tp.x);
    ([f[0] * tp.j, f[1] * tp.j], 0.0)
}

/// Everything the assembler needs at one reference point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FieldPoint {
    pub a: Mat2,
    pub b: Mat2,
    pub m: Mat2,
    pub j: f64,
    pub f_j: [f64; 2],
    pub g_j: f64,
}

/// Source term in the momentum equation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Forcing {
    Zero,
    /// Manufactured forcing evaluated at the physical point, times a scale.
    Manufactured { scale: f64 },
}

/// Pullback coefficient fields for one family and forcing.
#[derive(Clone, Debug, PartialEq)]
pub struct PullbackFields {
    pub family: PerturbationFamily,
    pub forcing: Forcing,
    /// When false the trilinear term is dropped (Stokes).
    pub convection: bool,
}

impl PullbackFields {
    pub fn new(family: PerturbationFamily, forcing: Forcing, convection: bool) -> Self {
        Self { family, forcing, convection }
    }

    pub fn at(&self, xhat: [f64; 2], y: &[f64]) -> FieldPoint {
        let tp = eval_transform(&self.family, xhat, y);
        let (a, b, m) = pullback_matrices(&tp.dt, tp.j);
        let f_j = match self.forcing {
            Forcing::Zero => [0.0, 0.0],
            Forcing::Manufactured { scale } => {
                let f = ManufacturedData.f(tp.x);
                [scale * f[0] * tp.j, scale * f[1] * tp.j]
            }
        };
        FieldPoint { a, b, m, j: tp.j, f_j, g_j: 0.0 }
    }
}

/// ∂^ν_y T via closed forms (see [`PerturbationFamily::y_derivative_t`]).
pub fn y_derivative_t(family: &PerturbationFamily, x1: f64, y: &[f64], nu: &MultiIndex) -> Result<f64, GeometryError> {
    family.y_derivative_t(x1, y, nu)
}
