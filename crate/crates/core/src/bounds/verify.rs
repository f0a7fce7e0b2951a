//! First-order check of the derivative bounds: the ledger built from fitted
//! transform constants against finite-difference derivatives of the discrete
//! solution.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::fd::{fd_derivative_vec, FdOptions};
use super::fit::{default_y_samples, estimate_alpha, fit_transform, TransformFit};
use super::gevrey::{factorial_power, falling_half_f64, r_power};
use super::ledger::{
    default_beta, ns_ledger, pullback_ledger, rhs_ledger, NsConstantLedger, PullbackLedger, RhsLedger,
    WellPosedConstants,
};
use super::BoundsError;
use crate::fem::{norm_h, norm_l, solve_ns, Discretization, DiscretizationOptions, DEFAULT_MAX_ITER};
use crate::geometry::{Forcing, ManufacturedData, PerturbationFamily, PullbackFields};
use crate::multiindex::MultiIndex;

/// Spatial dimension of the reference domain.
const DIM: u32 = 2;

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyConfig {
    pub family: PerturbationFamily,
    pub m: usize,
    pub discretization: DiscretizationOptions,
    /// Embedding constant of H¹₀ into L⁴; required, there is no default.
    pub c4: f64,
    /// Inf-sup constant; `None` takes the unperturbed-square value.
    pub beta: Option<f64>,
    /// Gevrey index of the family (1 for analytic families).
    pub delta: f64,
    /// Multiplier on the manufactured forcing; `None` picks half the largest
    /// value allowed by the small-data condition.
    pub force_scale: Option<f64>,
    pub nu: MultiIndex,
    pub points: Vec<Vec<f64>>,
    pub fd: FdOptions,
    pub picard_tol: f64,
    /// Parameter samples and x̂₁ samples for the (C_T, R) and α fits.
    pub fit_y_samples: usize,
    pub fit_x_samples: usize,
    pub alpha_density: usize,
}

impl VerifyConfig {
    /// gl1 defaults with the given embedding constant and check points.
    pub fn new(family: PerturbationFamily, c4: f64, points: Vec<Vec<f64>>) -> Self {
        let domain = family.param_domain().bounds();
        Self {
            family,
            m: 16,
            discretization: DiscretizationOptions::default(),
            c4,
            beta: None,
            delta: 1.0,
            force_scale: None,
            nu: MultiIndex::unit(1).expect("first coordinate"),
            points,
            fd: FdOptions { domain, ..FdOptions::default() },
            picard_tol: 1e-10,
            fit_y_samples: 65,
            fit_x_samples: 257,
            alpha_density: 64,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MarginRow {
    pub y: Vec<f64>,
    /// ‖∂^ν u‖_H and ‖∂^ν p‖_L from finite differences.
    pub du_h: f64,
    pub dp_l: f64,
    pub bound_u: f64,
    pub bound_p: f64,
    /// bound / estimate; infinite when the estimate vanishes.
    pub margin_u: f64,
    pub margin_p: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyReport {
    pub fit: TransformFit,
    pub alpha: f64,
    pub beta: f64,
    /// True when β is the unperturbed-square value but B ≠ I.
    pub beta_heuristic: bool,
    pub force_scale: f64,
    pub pullback: PullbackLedger,
    pub rhs: RhsLedger,
    pub constants: WellPosedConstants,
    pub ledger: NsConstantLedger,
    /// Radii of the solution bound: R_T,j / max(ρ_inv, ρ_RHS).
    pub r_ns: Vec<f64>,
    pub nu: MultiIndex,
    pub rows: Vec<MarginRow>,
}

impl VerifyReport {
    pub fn min_margin(&self) -> f64 {
        self.rows.iter().flat_map(|r| [r.margin_u, r.margin_p]).fold(f64::INFINITY, f64::min)
    }

    pub fn all_dominated(&self) -> bool {
        self.rows.iter().all(|r| r.margin_u >= 1.0 && r.margin_p >= 1.0)
    }
}

/// C ρ^{|ν|−1} [1/2]_{|ν|} (|ν|!)^{δ−1} / R^ν.
pub fn derivative_bound(c: f64, rho: f64, r: &[f64], delta: f64, nu: &MultiIndex) -> Result<f64, BoundsError> {
    let n = nu.order();
    Ok(c * rho.powi(n as i32 - 1) * falling_half_f64(n) * factorial_power(n, delta) / r_power(r, nu)?)
}

fn margin(bound: f64, estimate: f64) -> f64 {
    if estimate == 0.0 {
        f64::INFINITY
    } else {
        bound / estimate
    }
}

/// Builds the ledger from fitted constants and compares the first- or
/// second-order bound with finite differences at every configured point.
pub fn verify_first_order(cfg: &VerifyConfig) -> Result<VerifyReport, BoundsError> {
    let order = cfg.nu.order();
    if !(1..=2).contains(&order) {
        return Err(BoundsError::StencilOrder(order));
    }
    if cfg.points.is_empty() {
        return Err(BoundsError::BadConfig("no parameter points to check".into()));
    }
    let s = cfg.family.param_dim();
    if let Some(p) = cfg.points.iter().find(|p| p.len() != s) {
        return Err(BoundsError::LengthMismatch { expected: s, got: p.len() });
    }
    cfg.family.validate()?;

    let ys = default_y_samples(&cfg.family, cfg.fit_y_samples, 0);
    let fit = fit_transform(&cfg.family, &ys, cfg.fit_x_samples, cfg.delta)?;
    let alpha = estimate_alpha(&cfg.family, &ys, cfg.alpha_density)?.alpha;
    let beta = cfg.beta.unwrap_or_else(default_beta);
    let beta_heuristic = cfg.beta.is_none() && !cfg.family.is_y_independent();
    let pullback = pullback_ledger(fit.c_t, DIM, cfg.c4)?;

    // Each component of the manufactured forcing is a sum of trigonometric
    // terms with frequencies at most 2π per direction.
    let c_f = ManufacturedData.forcing_sup_bound();
    let tau_sum = 4.0 * std::f64::consts::PI;
    let unit_rhs = rhs_ledger(c_f, 0.0, fit.c_t, DIM, tau_sum)?;
    let force_scale = match cfg.force_scale {
        Some(v) if v > 0.0 && v.is_finite() => v,
        Some(v) => return Err(BoundsError::NonPositive { name: "force_scale", value: v }),
        None => 0.5 * alpha * alpha / (pullback.mbar * unit_rhs.fbar),
    };
    let rhs = RhsLedger { fbar: force_scale * unit_rhs.fbar, ..unit_rhs };
    let constants = WellPosedConstants::from_ledgers(alpha, beta, cfg.c4, &pullback, &rhs);
    let ledger = ns_ledger(&constants)?;

    let shrink = pullback.rho_inv.max(rhs.rho_rhs);
    let r_ns: Vec<f64> = fit.r.iter().map(|r| r / shrink).collect();
    let bound_u = derivative_bound(ledger.c_u, ledger.rho, &r_ns, cfg.delta, &cfg.nu)?;
    let bound_p = derivative_bound(ledger.c_p, ledger.rho, &r_ns, cfg.delta, &cfg.nu)?;

    let disc = Discretization::new(cfg.m, cfg.discretization)?;
    let fields = PullbackFields::new(cfg.family.clone(), Forcing::Manufactured { scale: force_scale }, true);
    let nu_len = 2 * disc.mesh.n_nodes();
    let solve = |y: &[f64]| -> Result<Vec<f64>, BoundsError> {
        let sol = solve_ns(&Arc::clone(&disc), &fields, y, cfg.picard_tol, DEFAULT_MAX_ITER)?;
        let mut v = sol.u;
        v.extend_from_slice(&sol.p);
        Ok(v)
    };

    let mut rows = Vec::with_capacity(cfg.points.len());
    for y in &cfg.points {
        let d = fd_derivative_vec(&solve, y, &cfg.nu, &cfg.fd)?;
        let du_h = norm_h(&disc.mesh, &d[..nu_len]);
        let dp_l = norm_l(&disc.mesh, &d[nu_len..]);
        log::info!("y = {y:?}: |d u|_H = {du_h:e}, |d p|_L = {dp_l:e}");
        rows.push(MarginRow {
            y: y.clone(),
            du_h,
            dp_l,
            bound_u,
            bound_p,
            margin_u: margin(bound_u, du_h),
            margin_p: margin(bound_p, dp_l),
        });
    }
    Ok(VerifyReport {
        fit,
        alpha,
        beta,
        beta_heuristic,
        force_scale,
        pullback,
        rhs,
        constants,
        ledger,
        r_ns,
        nu: cfg.nu.clone(),
        rows,
    })
}
