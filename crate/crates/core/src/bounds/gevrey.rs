//! Gevrey-type derivative bound records and their propagation through matrix
//! products, inverses and determinants.

use num_traits::ToPrimitive;

use super::BoundsError;
use crate::multiindex::{falling_half, MultiIndex};

/// ‖∂^ν X‖ ≤ C ρ^{|ν|} [1/2]_{|ν|} (|ν|!)^{δ−1} / R^ν.
#[derive(Clone, Debug, PartialEq)]
pub struct GevreyBound {
    pub c: f64,
    /// R_j for coordinates j = 1, 2, …
    pub r: Vec<f64>,
    pub rho: f64,
    pub delta: f64,
}

/// [1/2]_n as a float.
pub fn falling_half_f64(n: u64) -> f64 {
    falling_half(n).to_f64().expect("finite falling factorial")
}

/// (n!)^{δ−1} in floating point.
pub fn factorial_power(n: u64, delta: f64) -> f64 {
    let lf: f64 = (2..=n).map(|k| (k as f64).ln()).sum();
    ((delta - 1.0) * lf).exp()
}

/// R^ν = Π_j R_j^{ν_j}; coordinates beyond `r` are an error.
pub fn r_power(r: &[f64], nu: &MultiIndex) -> Result<f64, BoundsError> {
    let mut acc = 1.0;
    for &(j, k) in nu.entries() {
        let rj = r.get(j - 1).ok_or(BoundsError::MissingRadius { coordinate: j, available: r.len() })?;
        acc *= rj.powi(k as i32);
    }
    Ok(acc)
}

impl GevreyBound {
    pub fn new(c: f64, r: Vec<f64>, rho: f64, delta: f64) -> Result<Self, BoundsError> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(BoundsError::NonPositive { name: "C", value: c });
        }
        if let Some(&bad) = r.iter().find(|&&v| !(v > 0.0 && v.is_finite())) {
            return Err(BoundsError::NonPositive { name: "R_j", value: bad });
        }
        if !(rho >= 1.0 && rho.is_finite()) {
            return Err(BoundsError::NonPositive { name: "rho - 1", value: rho - 1.0 });
        }
        if !(delta >= 1.0 && delta.is_finite()) {
            return Err(BoundsError::NonPositive { name: "delta - 1", value: delta - 1.0 });
        }
        Ok(Self { c, r, rho, delta })
    }

    /// The bound's value for one multi-index.
    pub fn eval(&self, nu: &MultiIndex) -> Result<f64, BoundsError> {
        let n = nu.order();
        Ok(self.c * self.rho.powi(n as i32) * falling_half_f64(n) * factorial_power(n, self.delta) / r_power(&self.r, nu)?)
    }

    fn compatible(&self, other: &Self) -> Result<(), BoundsError> {
        if self.r != other.r || self.delta != other.delta {
            return Err(BoundsError::Incompatible);
        }
        Ok(())
    }
}

/// Product rule: C = 4 C_a C_b, ρ = max(ρ_a, ρ_b).
pub fn bound_product(a: &GevreyBound, b: &GevreyBound) -> Result<GevreyBound, BoundsError> {
    a.compatible(b)?;
    GevreyBound::new(4.0 * a.c * b.c, a.r.clone(), a.rho.max(b.rho), a.delta)
}

/// Inverse: for ν ≠ 0 the bound is C_M³ (3C_M)^{|ν|−1} in units of the input
/// scale ρ_M/R. Stored conservatively as C = C_M³ and ρ = 3 C_M ρ_M, which
/// also covers ν = 0 since C_M ≥ 1 bounds ‖M⁻¹‖ by hypothesis.
pub fn bound_inverse(m: &GevreyBound) -> Result<GevreyBound, BoundsError> {
    if m.c < 1.0 {
        return Err(BoundsError::NonPositive { name: "C_M - 1", value: m.c - 1.0 });
    }
    GevreyBound::new(m.c.powi(3), m.r.clone(), 3.0 * m.c * m.rho, m.delta)
}

/// Determinant of a d×d matrix: C = d! (4 C_M)^d, ρ unchanged.
pub fn bound_det(m: &GevreyBound, d: u32) -> Result<GevreyBound, BoundsError> {
    let dfact: f64 = (1..=d).map(f64::from).product();
    GevreyBound::new(dfact * (4.0 * m.c).powi(d as i32), m.r.clone(), m.rho, m.delta)
}
