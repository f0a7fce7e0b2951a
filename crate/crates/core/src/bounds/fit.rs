//! Sampled estimates of the coercivity constant and of the transform constants
//! (C_T, R). These are empirical fits, not certified bounds.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::gevrey::{factorial_power, falling_half_f64};
use super::BoundsError;
use crate::geometry::{eval_transform, pullback_matrices, PerturbationFamily};
use crate::multiindex::MultiIndex;

/// Radius reported for a coordinate whose sampled derivatives all vanish.
pub const UNCONSTRAINED_RADIUS: f64 = 1e6;

/// Highest derivative order used in the radius fit.
const FIT_ORDER: u32 = 3;

/// Parameter samples: an even grid for one parameter, seeded uniform draws otherwise.
pub fn default_y_samples(family: &PerturbationFamily, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let (lo, hi) = family.param_domain().bounds();
    let s = family.param_dim();
    if s == 1 {
        let steps = count.max(2) - 1;
        return (0..=steps).map(|i| vec![lo + (hi - lo) * i as f64 / steps as f64]).collect();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| (0..s).map(|_| lo + (hi - lo) * ((rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64)).collect())
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlphaEstimate {
    pub alpha: f64,
    /// Grid nodes per side minus one: x̂ ranges over {i/k} × {j/k}.
    pub density: usize,
}

/// Minimum over the grid {i/k}² and the given parameter samples of the
/// smallest eigenvalue of A(x̂, y). Doubling k samples a superset, so the
/// estimate never increases under refinement.
pub fn estimate_alpha(family: &PerturbationFamily, ys: &[Vec<f64>], density: usize) -> Result<AlphaEstimate, BoundsError> {
    if density == 0 || ys.is_empty() {
        return Err(BoundsError::BadConfig("alpha estimate needs a positive density and at least one y".into()));
    }
    family.validate()?;
    let k = density as f64;
    let mut alpha = f64::INFINITY;
    for y in ys {
        for i in 0..=density {
            for j in 0..=density {
                let x = [i as f64 / k, j as f64 / k];
                let tp = eval_transform(family, x, y);
                let (a, _, _) = pullback_matrices(&tp.dt, tp.j);
                let ev = a.sym_eigenvalues()[0];
                if !(ev > 0.0) {
                    return Err(BoundsError::NotPositiveDefinite { x, y: y.clone(), eigenvalue: ev });
                }
                alpha = alpha.min(ev);
            }
        }
    }
    Ok(AlphaEstimate { alpha, density })
}

/// Fitted transform constants: C_T ≥ 1 bounds the sampled sup-norms of T_y,
/// T_y⁻¹, dT_y and dT_y⁻¹, and R_j is the largest radius for which the
/// sampled ∂^k_{y_j} of T_y and dT_y (k ≤ 3) stay below C_T [1/2]_k (k!)^{δ−1} / R_j^k.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransformFit {
    pub c_t: f64,
    pub r: Vec<f64>,
    pub delta: f64,
    /// Sampled sup over x̂, y of max(‖∂^k T_y‖, ‖∂^k dT_y‖_F), per coordinate and order.
    pub derivative_sups: Vec<Vec<f64>>,
    pub x_samples: usize,
    pub y_samples: usize,
}

pub fn fit_transform(
    family: &PerturbationFamily,
    ys: &[Vec<f64>],
    x_samples: usize,
    delta: f64,
) -> Result<TransformFit, BoundsError> {
    if x_samples < 2 || ys.is_empty() {
        return Err(BoundsError::BadConfig("transform fit needs at least 2 x samples and one y".into()));
    }
    if !(delta >= 1.0) {
        return Err(BoundsError::NonPositive { name: "delta - 1", value: delta - 1.0 });
    }
    family.validate()?;
    let xs: Vec<f64> = (0..x_samples).map(|i| i as f64 / (x_samples - 1) as f64).collect();

    // x̂₂ = 1 maximizes every norm below, since x̂₂ enters linearly and |T| ≥ |x̂₂ T|.
    let mut c_t = 1f64;
    for y in ys {
        for &x1 in &xs {
            let tp = eval_transform(family, [x1, 1.0], y);
            let inv = tp.dt.inverse().ok_or(BoundsError::NonPositive { name: "det dT", value: tp.j })?;
            let point = (x1 * x1 + tp.x[1] * tp.x[1]).sqrt();
            // T_y⁻¹ maps into the unit square
            c_t = c_t.max(point).max(2f64.sqrt()).max(tp.dt.frobenius()).max(inv.frobenius());
        }
    }

    let s = family.param_dim();
    let mut r = Vec::with_capacity(s);
    let mut derivative_sups = Vec::with_capacity(s);
    for j in 1..=s {
        let mut sups = Vec::with_capacity(FIT_ORDER as usize);
        let mut rj = UNCONSTRAINED_RADIUS;
        for k in 1..=FIT_ORDER {
            let nu = MultiIndex::from_sparse([(j, k)]).expect("nonzero entry");
            let mut sup = 0f64;
            for y in ys {
                for &x1 in &xs {
                    let t = family.y_derivative_t(x1, y, &nu)?;
                    let t1 = family.y_derivative_dt1(x1, y, &nu)?;
                    sup = sup.max(t.abs()).max((t1 * t1 + t * t).sqrt());
                }
            }
            sups.push(sup);
            if sup > 0.0 {
                let kk = u64::from(k);
                let cand = (c_t * falling_half_f64(kk) * factorial_power(kk, delta) / sup).powf(1.0 / f64::from(k));
                rj = rj.min(cand);
            }
        }
        r.push(rj);
        derivative_sups.push(sups);
    }
    Ok(TransformFit { c_t, r, delta, derivative_sups, x_samples, y_samples: ys.len() })
}
