//! Perturbation families T(x̂₁, y) and their closed-form derivatives.

use std::f64::consts::{E, PI};

use serde::{Deserialize, Serialize};

use super::GeometryError;
use crate::multiindex::MultiIndex;

/// Largest parameter-derivative order with closed forms.
pub const MAX_Y_DERIVATIVE: u64 = 4;

/// Interval each parameter lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ParamDomain {
    /// [−1, 1]
    Gauss,
    /// [−1/2, 1/2]
    Lattice,
}

impl ParamDomain {
    pub fn bounds(self) -> (f64, f64) {
        match self {
            ParamDomain::Gauss => (-1.0, 1.0),
            ParamDomain::Lattice => (-0.5, 0.5),
        }
    }

    pub fn contains(self, v: f64) -> bool {
        let (lo, hi) = self.bounds();
        (lo..=hi).contains(&v)
    }
}

/// Parameter vector tagged with its domain.
#[derive(Clone, Debug, PartialEq)]
pub struct ParamVector {
    values: Vec<f64>,
    domain: ParamDomain,
}

impl ParamVector {
    pub fn new(values: Vec<f64>, domain: ParamDomain) -> Result<Self, GeometryError> {
        if let Some((j, &v)) = values.iter().enumerate().find(|(_, &v)| !domain.contains(v)) {
            return Err(GeometryError::ParamOutOfRange { index: j, value: v, domain });
        }
        Ok(Self { values, domain })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn domain(&self) -> ParamDomain {
        self.domain
    }
}

/// The domain perturbation families.
///
/// `Gl1`: 1 + a cos(ω x y). `Gl2`: 1 + a exp(−1/sin²(ω x y)).
/// `Qmc1`: exp(Σ_j c sin(j ω x) y_j / j^p).
/// `Qmc2`: 1 + Σ_j (c/j^p) sin((j + k₀) π x) (exp(−1/(y_j + 1/2)²) + 1).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum PerturbationFamily {
    Identity,
    Constant {
        c: f64,
    },
    Gl1 {
        #[serde(default = "default_gl1_amplitude")]
        amplitude: f64,
        #[serde(default = "default_frequency")]
        frequency: f64,
    },
    Gl2 {
        #[serde(default = "default_gl2_amplitude")]
        amplitude: f64,
        #[serde(default = "default_frequency")]
        frequency: f64,
    },
    Qmc1 {
        s: usize,
        #[serde(default = "default_frequency")]
        frequency: f64,
        #[serde(default = "default_qmc1_scale")]
        scale: f64,
        #[serde(default = "default_qmc1_decay")]
        decay: f64,
    },
    Qmc2 {
        s: usize,
        #[serde(default = "default_qmc2_scale")]
        scale: f64,
        #[serde(default = "default_qmc2_decay")]
        decay: f64,
        #[serde(default = "default_qmc2_offset")]
        offset: f64,
    },
}

fn default_gl1_amplitude() -> f64 {
    0.15
}
fn default_gl2_amplitude() -> f64 {
    0.35
}
fn default_frequency() -> f64 {
    5.0 * PI
}
fn default_qmc1_scale() -> f64 {
    0.25
}
fn default_qmc1_decay() -> f64 {
    3.0
}
fn default_qmc2_scale() -> f64 {
    E / 8.0
}
fn default_qmc2_decay() -> f64 {
    6.0
}
fn default_qmc2_offset() -> f64 {
    5.0
}

/// exp(−1/t²) continued by 0 at t = 0, together with its underflow cutoff.
fn flat_exp(t: f64) -> f64 {
    let inv2 = 1.0 / (t * t);
    if !inv2.is_finite() || inv2 > 700.0 {
        0.0
    } else {
        (-inv2).exp()
    }
}

/// k-th derivative of G(t) = exp(−1/(t + 1/2)²), zero for t ≤ −1/2.
///
/// G^{(k)} = G · P_k(v) with v = 1/(t + 1/2), P₀ = 1, P_{k+1} = 2v³P_k − v² dP_k/dv.
fn shifted_flat_exp_derivative(t: f64, k: u64) -> f64 {
    let base = t + 0.5;
    if base <= 0.0 {
        return 0.0;
    }
    let v = 1.0 / base;
    if v * v > 700.0 {
        return 0.0;
    }
    let g = (-v * v).exp();
    let (v2, v3) = (v * v, v * v * v);
    let p = match k {
        0 => 1.0,
        1 => 2.0 * v3,
        2 => 4.0 * v3 * v3 - 6.0 * v2 * v2,
        3 => 8.0 * v3 * v3 * v3 - 36.0 * v3 * v2 * v2 + 24.0 * v3 * v2,
        4 => {
            // P₄ = 2v³P₃ − v²P₃'
            let p3 = 8.0 * v.powi(9) - 36.0 * v.powi(7) + 24.0 * v.powi(5);
            let dp3 = 72.0 * v.powi(8) - 252.0 * v.powi(6) + 120.0 * v.powi(4);
            2.0 * v3 * p3 - v2 * dp3
        }
        _ => unreachable!("order checked by caller"),
    };
    g * p
}

/// cos^{(k)}(θ) = cos(θ + kπ/2), written out to avoid rounding in the shift.
fn cos_derivative(theta: f64, k: u64) -> f64 {
    match k % 4 {
        0 => theta.cos(),
        1 => -theta.sin(),
        2 => -theta.cos(),
        _ => theta.sin(),
    }
}

impl PerturbationFamily {
    pub fn gl1() -> Self {
        PerturbationFamily::Gl1 { amplitude: default_gl1_amplitude(), frequency: default_frequency() }
    }

    pub fn gl2() -> Self {
        PerturbationFamily::Gl2 { amplitude: default_gl2_amplitude(), frequency: default_frequency() }
    }

    pub fn qmc1(s: usize) -> Self {
        PerturbationFamily::Qmc1 {
            s,
            frequency: default_frequency(),
            scale: default_qmc1_scale(),
            decay: default_qmc1_decay(),
        }
    }

    pub fn qmc2(s: usize) -> Self {
        PerturbationFamily::Qmc2 {
            s,
            scale: default_qmc2_scale(),
            decay: default_qmc2_decay(),
            offset: default_qmc2_offset(),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            PerturbationFamily::Identity => "identity",
            PerturbationFamily::Constant { .. } => "constant",
            PerturbationFamily::Gl1 { .. } => "gl1",
            PerturbationFamily::Gl2 { .. } => "gl2",
            PerturbationFamily::Qmc1 { .. } => "qmc1",
            PerturbationFamily::Qmc2 { .. } => "qmc2",
        }
    }

    /// Number of parameters the family reads.
    pub fn param_dim(&self) -> usize {
        match self {
            PerturbationFamily::Qmc1 { s, .. } | PerturbationFamily::Qmc2 { s, .. } => *s,
            _ => 1,
        }
    }

    pub fn param_domain(&self) -> ParamDomain {
        match self {
            PerturbationFamily::Qmc1 { .. } | PerturbationFamily::Qmc2 { .. } => ParamDomain::Lattice,
            _ => ParamDomain::Gauss,
        }
    }

    /// True when T(x, y) = T(x, −y) bit for bit (even single-parameter families).
    pub fn is_even_in_y(&self) -> bool {
        matches!(
            self,
            PerturbationFamily::Identity
                | PerturbationFamily::Constant { .. }
                | PerturbationFamily::Gl1 { .. }
                | PerturbationFamily::Gl2 { .. }
        )
    }

    /// True when the solution does not depend on y at all.
    pub fn is_y_independent(&self) -> bool {
        matches!(self, PerturbationFamily::Identity | PerturbationFamily::Constant { .. })
    }

    /// Checks parameters and T > 0 on a grid of x̂₁ × (corners and grid of U).
    pub fn validate(&self) -> Result<(), GeometryError> {
        let bad = |msg: &str| Err(GeometryError::BadFamily(format!("{}: {msg}", self.name())));
        match self {
            PerturbationFamily::Identity => {}
            PerturbationFamily::Constant { c } if !(c.is_finite() && *c > 0.0) => return bad("c must be positive"),
            PerturbationFamily::Qmc1 { s: 0, .. } | PerturbationFamily::Qmc2 { s: 0, .. } => {
                return bad("s must be at least 1")
            }
            _ => {}
        }
        let (lo, hi) = self.param_domain().bounds();
        let s = self.param_dim();
        let steps = 64;
        for ix in 0..=256 {
            let x1 = f64::from(ix) / 256.0;
            for iy in 0..=steps {
                let t = lo + (hi - lo) * f64::from(iy) / f64::from(steps);
                // uniform y and alternating-sign y stress both coherent and cancelling sums
                let uniform = vec![t; s];
                let alternating: Vec<f64> = (0..s).map(|j| if j % 2 == 0 { t } else { lo + hi - t }).collect();
                for y in [uniform, alternating] {
                    let (tv, dt) = self.eval_t(x1, &y);
                    if !(tv.is_finite() && dt.is_finite() && tv > 0.0) {
                        return Err(GeometryError::NonPositiveT { x1, value: tv });
                    }
                }
            }
        }
        Ok(())
    }

    /// (T, ∂T/∂x̂₁) at (x̂₁, y).
    pub fn eval_t(&self, x1: f64, y: &[f64]) -> (f64, f64) {
        match *self {
            PerturbationFamily::Identity => (1.0, 0.0),
            PerturbationFamily::Constant { c } => (c, 0.0),
            PerturbationFamily::Gl1 { amplitude: a, frequency: w } => {
                let y = y[0];
                let th = w * x1 * y;
                (1.0 + a * th.cos(), -a * w * y * th.sin())
            }
            PerturbationFamily::Gl2 { amplitude: a, frequency: w } => {
                let y = y[0];
                let th = w * x1 * y;
                let s = th.sin();
                let e = flat_exp(s);
                let d = if e == 0.0 { 0.0 } else { a * e * 2.0 / (s * s * s) * th.cos() * w * y };
                (1.0 + a * e, d)
            }
            PerturbationFamily::Qmc1 { s, frequency: w, scale: c, decay: p } => {
                let (mut sum, mut dsum) = (0.0, 0.0);
                for (j, &yj) in y.iter().take(s).enumerate() {
                    let jf = (j + 1) as f64;
                    let cj = c / jf.powf(p);
                    sum += cj * (jf * w * x1).sin() * yj;
                    dsum += cj * jf * w * (jf * w * x1).cos() * yj;
                }
                let t = sum.exp();
                (t, t * dsum)
            }
            PerturbationFamily::Qmc2 { s, scale: c, decay: p, offset } => {
                let (mut t, mut dt) = (1.0, 0.0);
                for (j, &yj) in y.iter().take(s).enumerate() {
                    let jf = (j + 1) as f64;
                    let k = (jf + offset) * std::f64::consts::PI;
                    let g = shifted_flat_exp_derivative(yj, 0) + 1.0;
                    let cj = c / jf.powf(p);
                    t += cj * (k * x1).sin() * g;
                    dt += cj * k * (k * x1).cos() * g;
                }
                (t, dt)
            }
        }
    }

    /// ∂^ν_y T at (x̂₁, y) from closed forms.
    pub fn y_derivative_t(&self, x1: f64, y: &[f64], nu: &MultiIndex) -> Result<f64, GeometryError> {
        self.y_derivative(x1, y, nu, false)
    }

    /// ∂^ν_y ∂_{x̂₁} T at (x̂₁, y) from closed forms.
    pub fn y_derivative_dt1(&self, x1: f64, y: &[f64], nu: &MultiIndex) -> Result<f64, GeometryError> {
        self.y_derivative(x1, y, nu, true)
    }

    fn y_derivative(&self, x1: f64, y: &[f64], nu: &MultiIndex, dx: bool) -> Result<f64, GeometryError> {
        let order = nu.order();
        if order == 0 {
            let (t, d) = self.eval_t(x1, y);
            return Ok(if dx { d } else { t });
        }
        if order > MAX_Y_DERIVATIVE {
            return Err(GeometryError::UnsupportedDerivative { family: self.name(), order });
        }
        if nu.max_coord() > self.param_dim() {
            return Err(GeometryError::InactiveCoordinate { coord: nu.max_coord(), dim: self.param_dim() });
        }
        match *self {
            PerturbationFamily::Identity | PerturbationFamily::Constant { .. } => Ok(0.0),
            PerturbationFamily::Gl2 { .. } => {
                Err(GeometryError::UnsupportedDerivative { family: self.name(), order })
            }
            PerturbationFamily::Gl1 { amplitude: a, frequency: w } => {
                let (y, k) = (y[0], order);
                let th = w * x1 * y;
                let kf = k as f64;
                if dx {
                    // ∂_x [a (ωx)^k cos^{(k)}(ωxy)]
                    let first = a * kf * w.powi(k as i32) * x1.powi(k as i32 - 1) * cos_derivative(th, k);
                    let second = a * (w * x1).powi(k as i32) * w * y * cos_derivative(th, k + 1);
                    Ok(first + second)
                } else {
                    Ok(a * (w * x1).powi(k as i32) * cos_derivative(th, k))
                }
            }
            PerturbationFamily::Qmc1 { s, frequency: w, scale: c, decay: p } => {
                let b = |j: usize| {
                    let jf = j as f64;
                    c / jf.powf(p) * (jf * w * x1).sin()
                };
                let db = |j: usize| {
                    let jf = j as f64;
                    c / jf.powf(p) * jf * w * (jf * w * x1).cos()
                };
                let (t, dt) = self.eval_t(x1, y);
                let prod: f64 = nu.entries().iter().map(|&(j, v)| b(j).powi(v as i32)).product();
                if !dx {
                    return Ok(t * prod);
                }
                let _ = s;
                // ∂_x (T Π b_j^{ν_j}) = T' Π b^ν + T Σ_j ν_j b_j^{ν_j−1} b_j' Π_{i≠j} b_i^{ν_i}
                let mut inner = 0.0;
                for (idx, &(j, v)) in nu.entries().iter().enumerate() {
                    let mut term = f64::from(v) * b(j).powi(v as i32 - 1) * db(j);
                    for (jdx, &(i, u)) in nu.entries().iter().enumerate() {
                        if jdx != idx {
                            term *= b(i).powi(u as i32);
                        }
                    }
                    inner += term;
                }
                Ok(dt * prod + t * inner)
            }
            PerturbationFamily::Qmc2 { scale: c, decay: p, offset, .. } => {
                if nu.entries().len() != 1 {
                    return Ok(0.0);
                }
                let (j, k) = nu.entries()[0];
                let jf = j as f64;
                let kk = (jf + offset) * std::f64::consts::PI;
                let cj = c / jf.powf(p);
                let g = shifted_flat_exp_derivative(y[j - 1], u64::from(k));
                if dx {
                    Ok(cj * kk * (kk * x1).cos() * g)
                } else {
                    Ok(cj * (kk * x1).sin() * g)
                }
            }
        }
    }
}
