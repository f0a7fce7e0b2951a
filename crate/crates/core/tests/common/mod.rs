//! Second transcription of the constant ledgers and random admissible inputs,
//! shared by the ledger tests and the acceptance run.
#![allow(dead_code)]

use nsuq::bounds::{NsConstantLedger, WellPosedConstants};
use rand_chacha::rand_core::RngCore;
use rand_chacha::ChaCha8Rng;

pub fn uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    let u = (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
    lo + (hi - lo) * u
}

/// Admissible constants with the small-data ratio (f̄/α + ḡ/β)/(α/m̄) = theta.
pub fn admissible(alpha: f64, beta: f64, abar: f64, bbar: f64, mbar: f64, c4: f64, theta: f64, split: f64) -> WellPosedConstants {
    let budget = theta * alpha / mbar;
    WellPosedConstants { alpha, beta, abar, bbar, mbar, fbar: split * budget * alpha, gbar: (1.0 - split) * budget * beta, c4 }
}

pub fn random_constants(rng: &mut ChaCha8Rng) -> WellPosedConstants {
    admissible(
        uniform(rng, 0.05, 3.0),
        uniform(rng, 0.05, 2.0),
        uniform(rng, 0.1, 200.0),
        uniform(rng, 0.1, 50.0),
        uniform(rng, 0.1, 50.0),
        uniform(rng, 0.1, 2.0),
        uniform(rng, 1e-3, 0.99),
        uniform(rng, 0.0, 1.0),
    )
}

/// Smaller root of (m̄/2α)γ² − γ + (f̄/2α + ḡ/2β) = 0, Newton-polished.
pub fn gamma_root(c: &WellPosedConstants) -> f64 {
    let (qa, qc) = (c.mbar / (2.0 * c.alpha), c.fbar / (2.0 * c.alpha) + c.gbar / (2.0 * c.beta));
    let mut g = (1.0 - (1.0 - 4.0 * qa * qc).sqrt()) / (2.0 * qa);
    for _ in 0..3 {
        g -= (qa * g * g - g + qc) / (2.0 * qa * g - 1.0);
    }
    g
}

/// Term-by-term evaluation of the derivative-bound constants.
pub fn second_ledger(c: &WellPosedConstants) -> [f64; 11] {
    let (a, b, m, f, g, al, be) = (c.abar, c.bbar, c.mbar, c.fbar, c.gbar, c.alpha, c.beta);
    let gam = gamma_root(c);
    let at = al - m * gam;
    let pb = (0.5 * f + 0.5 * a * gam + 0.5 * m * gam * gam) / be;

    let mass = g + b * gam;
    let su_first = f + b * pb + gam * (m * mass / be + a + m * gam);
    let su = su_first / (gam * at) + mass / (gam * be);

    let sp_num = f + b * pb + a * gam * (1.0 + su / 2.0) + m * gam.powi(2) * (1.0 + su);
    let sp = sp_num / (be * pb);

    let cu = gam * su;
    let cp = pb * sp;

    let ru_a = (1.0 + gam * m / at) * (g + b * gam + 2.0 * cu * b) / (be * cu);
    let ru_b = (f + b * pb + gam * (a + m * gam) + 2.0 * cp * b) / (at * cu);
    let ru_c = (2.0 * a + 4.0 * m * gam + 7.0 * m * cu) / at;
    let ru = ru_a + ru_b + ru_c;

    let rp_a = (f + b * pb + gam * (a + m * gam) + 2.0 * cu * a + 4.0 * m * gam * cu + 7.0 * m * cu.powi(2)) / (be * cp);
    let rp_b = cu * ru / (be * cp) * (a / 2.0 + gam * m);
    let rp = rp_a + rp_b;

    [gam, at, gam, pb, su, sp, cu, cp, ru, rp, [1.0, ru, rp].into_iter().fold(f64::MIN, f64::max)]
}

pub fn fields(l: &NsConstantLedger) -> [f64; 11] {
    [l.gamma, l.alpha_tilde, l.ubar, l.pbar, l.sigma_u, l.sigma_p, l.c_u, l.c_p, l.rho_u, l.rho_p, l.rho]
}

pub fn factorial(d: u32) -> f64 {
    (2..=d).fold(1.0, |acc, k| acc * k as f64)
}

/// (ā, b̄, m̄, ρ_inv) of the plain pullback.
pub fn second_pullback(c_t: f64, d: u32, c4: f64) -> [f64; 4] {
    let (df, dd) = (factorial(d), d as f64);
    [64.0 * df * c_t.powf(dd + 6.0), 16.0 * df * c_t.powf(dd + 3.0), 16.0 * c4.powi(2) * df * c_t.powf(dd + 3.0), 3.0 * c_t]
}

/// (f̄, ḡ, ρ_RHS) of the transported data.
pub fn second_rhs(c_f: f64, c_g: f64, c_t: f64, d: u32, tau: f64) -> [f64; 3] {
    let (df, dd) = (factorial(d), d as f64);
    let shape = dd * dd.sqrt() / (dd + 1.0);
    [32.0 * c_f * c_t.powf(dd) * shape * df, 32.0 * c_g * c_t.powf(dd) * shape * df, c_t * (dd + 1.0) * tau]
}

pub fn close(a: f64, b: f64, rel: f64) -> bool {
    a == b || (a - b).abs() <= rel * a.abs().max(b.abs())
}
