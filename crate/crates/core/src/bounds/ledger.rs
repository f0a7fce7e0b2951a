//! Well-posedness constants, the small-data radius γ and the derivative-bound
//! constants of the parametric Navier-Stokes solution.

use serde::{Deserialize, Serialize};

use super::BoundsError;

/// Inf-sup constant of the divergence on the unit square with B = I. Only a
/// heuristic once B is perturbed.
pub fn default_beta() -> f64 {
    (0.5 - std::f64::consts::FRAC_1_PI).sqrt()
}

/// Coercivity α, inf-sup β, coefficient bounds ā, b̄, m̄, data bounds f̄, ḡ and
/// the H¹₀ ↪ L⁴ embedding constant C₄.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WellPosedConstants {
    pub alpha: f64,
    pub beta: f64,
    pub abar: f64,
    pub bbar: f64,
    pub mbar: f64,
    pub fbar: f64,
    pub gbar: f64,
    pub c4: f64,
}

impl WellPosedConstants {
    /// Assembles the constants from the pullback and right-hand-side ledgers.
    pub fn from_ledgers(alpha: f64, beta: f64, c4: f64, p: &PullbackLedger, r: &RhsLedger) -> Self {
        Self { alpha, beta, abar: p.abar, bbar: p.bbar, mbar: p.mbar, fbar: r.fbar, gbar: r.gbar, c4 }
    }

    fn check(&self) -> Result<(), BoundsError> {
        for (name, v) in [
            ("alpha", self.alpha),
            ("beta", self.beta),
            ("abar", self.abar),
            ("bbar", self.bbar),
            ("mbar", self.mbar),
            ("C4", self.c4),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(BoundsError::NonPositive { name, value: v });
            }
        }
        for (name, v) in [("fbar", self.fbar), ("gbar", self.gbar)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(BoundsError::NonPositive { name, value: v });
            }
        }
        Ok(())
    }

    /// (f̄/α + ḡ/β, α/m̄): the small-data condition asks for lhs < rhs.
    pub fn small_data_sides(&self) -> (f64, f64) {
        (self.fbar / self.alpha + self.gbar / self.beta, self.alpha / self.mbar)
    }

    pub fn small_data_holds(&self) -> bool {
        let (l, r) = self.small_data_sides();
        l < r
    }
}

/// Root in [0, α/m̄) of m̄/(2α) γ² − γ + f̄/(2α) + ḡ/(2β) = 0, i.e.
/// γ = (α/m̄)(1 − √(1 − (m̄/α)(f̄/α + ḡ/β))), evaluated without cancellation.
pub fn solve_gamma(c: &WellPosedConstants) -> Result<f64, BoundsError> {
    c.check()?;
    let (lhs, rhs) = c.small_data_sides();
    if !(lhs < rhs) {
        return Err(BoundsError::SmallData { lhs, rhs });
    }
    let t = lhs / rhs;
    Ok(lhs / (1.0 + (1.0 - t).sqrt()))
}

/// |f̄/(2α) + ḡ/(2β) + m̄γ²/(2α) − γ|.
pub fn gamma_residual(c: &WellPosedConstants, gamma: f64) -> f64 {
    (c.fbar / (2.0 * c.alpha) + c.gbar / (2.0 * c.beta) + c.mbar * gamma * gamma / (2.0 * c.alpha) - gamma).abs()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NsConstantLedger {
    pub gamma: f64,
    pub alpha_tilde: f64,
    pub ubar: f64,
    pub pbar: f64,
    pub sigma_u: f64,
    pub sigma_p: f64,
    pub c_u: f64,
    pub c_p: f64,
    pub rho_u: f64,
    pub rho_p: f64,
    pub rho: f64,
}

fn positive(name: &'static str, v: f64) -> Result<f64, BoundsError> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(BoundsError::NonPositive { name, value: v })
    }
}

/// Evaluates the constant chain γ → α̃ → ū, p̄ → σ_u, σ_p → C_u, C_p → ρ_u, ρ_p, ρ.
pub fn ns_ledger(c: &WellPosedConstants) -> Result<NsConstantLedger, BoundsError> {
    let gamma = solve_gamma(c)?;
    if gamma == 0.0 {
        return Err(BoundsError::DegenerateZeroData);
    }
    let WellPosedConstants { alpha, beta, abar, bbar, mbar, fbar, gbar, .. } = *c;
    let alpha_tilde = positive("alpha_tilde = alpha - mbar*gamma", alpha - mbar * gamma)?;
    let ubar = gamma;
    let pbar = positive("pbar", (fbar / 2.0 + abar * gamma / 2.0 + mbar * gamma * gamma / 2.0) / beta)?;

    let div_part = gbar + bbar * gamma;
    let sigma_u = positive(
        "sigma_u",
        (fbar + bbar * pbar + gamma * (mbar * div_part / beta + abar + mbar * gamma)) / (gamma * alpha_tilde)
            + div_part / (gamma * beta),
    )?;
    let sigma_p = positive(
        "sigma_p",
        (fbar + bbar * pbar + abar * gamma * (1.0 + sigma_u / 2.0) + mbar * gamma * gamma * (1.0 + sigma_u))
            / (beta * pbar),
    )?;
    let c_u = gamma * sigma_u;
    let c_p = pbar * sigma_p;

    let lower = fbar + bbar * pbar + gamma * (abar + mbar * gamma);
    let rho_u = positive(
        "rho_u",
        (1.0 + gamma * mbar / alpha_tilde) * (div_part + 2.0 * c_u * bbar) / (beta * c_u)
            + (lower + 2.0 * c_p * bbar) / (alpha_tilde * c_u)
            + (2.0 * abar + 4.0 * mbar * gamma + 7.0 * mbar * c_u) / alpha_tilde,
    )?;
    let rho_p = positive(
        "rho_p",
        (lower + 2.0 * c_u * abar + 4.0 * mbar * gamma * c_u + 7.0 * mbar * c_u * c_u) / (beta * c_p)
            + c_u * rho_u / (beta * c_p) * (abar / 2.0 + gamma * mbar),
    )?;
    let rho = 1f64.max(rho_u).max(rho_p);
    Ok(NsConstantLedger { gamma, alpha_tilde, ubar, pbar, sigma_u, sigma_p, c_u, c_p, rho_u, rho_p, rho })
}

impl NsConstantLedger {
    /// Constants of the plain Gevrey form ‖∂^ν u‖ ≤ C̃_u (|ν|!)^δ / R̃^ν:
    /// (max(ū, C_u/ρ), max(p̄, C_p/ρ)), with R̃_j = R_j/ρ.
    pub fn plain_gevrey_constants(&self) -> (f64, f64) {
        (self.ubar.max(self.c_u / self.rho), self.pbar.max(self.c_p / self.rho))
    }
}

/// Coefficient bounds of the plain pullback for a transform with constant C_T.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PullbackLedger {
    pub abar: f64,
    pub bbar: f64,
    pub mbar: f64,
    pub rho_inv: f64,
}

fn dfact(d: u32) -> f64 {
    (1..=d).map(f64::from).product()
}

/// ā = 64 d! C_T^{d+6}, b̄ = 16 d! C_T^{d+3}, m̄ = 16 C₄² d! C_T^{d+3}, ρ_inv = 3 C_T.
pub fn pullback_ledger(c_t: f64, d: u32, c4: f64) -> Result<PullbackLedger, BoundsError> {
    if !(c_t >= 1.0 && c_t.is_finite()) {
        return Err(BoundsError::NonPositive { name: "C_T - 1", value: c_t - 1.0 });
    }
    positive("C4", c4)?;
    let df = dfact(d);
    let d = d as i32;
    Ok(PullbackLedger {
        abar: 64.0 * df * c_t.powi(d + 6),
        bbar: 16.0 * df * c_t.powi(d + 3),
        mbar: 16.0 * c4 * c4 * df * c_t.powi(d + 3),
        rho_inv: 3.0 * c_t,
    })
}

/// Bounds of the transported data f̂J and ĝJ.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RhsLedger {
    pub fbar: f64,
    pub gbar: f64,
    pub rho_rhs: f64,
}

/// f̄ = 32 C_f C_T^d (d√d/(d+1)) d!, ḡ likewise with C_g, ρ_RHS = C_T (d+1) τ·1.
pub fn rhs_ledger(c_f: f64, c_g: f64, c_t: f64, d: u32, tau_sum: f64) -> Result<RhsLedger, BoundsError> {
    if !(tau_sum >= 1.0) {
        return Err(BoundsError::TauSum(tau_sum));
    }
    for (name, v) in [("C_f", c_f), ("C_g", c_g)] {
        if !(v >= 0.0 && v.is_finite()) {
            return Err(BoundsError::NonPositive { name, value: v });
        }
    }
    let df = f64::from(d);
    let shape = df * df.sqrt() / (df + 1.0) * dfact(d) * c_t.powi(d as i32);
    Ok(RhsLedger { fbar: 32.0 * c_f * shape, gbar: 32.0 * c_g * shape, rho_rhs: c_t * (df + 1.0) * tau_sum })
}
