//! Fast end-to-end smoke checks behind the `selftest` subcommand.

use super::cache::{decode_entry, encode_entry, CacheEntry};
use super::config::ExperimentConfig;
use super::studies::run_mms_study;
use crate::bounds::{gamma_residual, ns_ledger, pullback_ledger, solve_gamma, WellPosedConstants};
use crate::geometry::PerturbationFamily;
use crate::multiindex::{fdb_closed_form, fdb_identity_sum, inequality_suite, MultiIndex};
use crate::quadrature::{embedded_points, gauss_legendre, lattice_points, LatticeRule};

#[derive(Clone, Debug, PartialEq)]
pub struct SelfCheck {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, result: Result<String, String>) -> SelfCheck {
    match result {
        Ok(detail) => SelfCheck { name, passed: true, detail },
        Err(detail) => SelfCheck { name, passed: false, detail },
    }
}

fn ensure(cond: bool, msg: String) -> Result<String, String> {
    if cond {
        Ok(msg)
    } else {
        Err(msg)
    }
}

pub fn selftest() -> Vec<SelfCheck> {
    let mut out = Vec::new();
    out.push(check(
        "multi-index inequalities (|nu| <= 4, 2 coordinates)",
        inequality_suite(4, 2).map_err(|e| e.to_string()).and_then(|r| {
            let first = r.first_failure().map(|(n, c)| format!("{n}: {c:?}"));
            ensure(r.all_passed(), first.unwrap_or_else(|| "all hold".into()))
        }),
    ));
    out.push(check("Faa di Bruno identity sum", {
        let nu = MultiIndex::from_dense(&[2, 1]);
        fdb_identity_sum(&nu, 2)
            .map_err(|e| e.to_string())
            .and_then(|v| ensure(v == fdb_closed_form(3, 2), format!("sum {v}")))
    }));
    out.push(check("Gauss-Legendre exactness", {
        let g = gauss_legendre(5);
        let err = (g.integrate(|x| x.powi(8)) - 2.0 / 9.0).abs();
        ensure(err < 1e-14, format!("x^8 error {err:e}"))
    }));
    out.push(check("embedded lattice prefixes", {
        let rule = LatticeRule::new(vec![1, 5, 11], 16).expect("valid rule");
        let all = embedded_points(&rule, &[0.1, 0.2, 0.3]).expect("points");
        let mut lo = lattice_points(&rule, &[0.1, 0.2, 0.3], 2).expect("points");
        let mut pre = all[..4].to_vec();
        let key = |v: &Vec<f64>| v.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
        lo.sort_by_key(key);
        pre.sort_by_key(key);
        ensure(lo == pre, "level-2 prefix".into())
    }));
    out.push(check("constant ledger", {
        let c = WellPosedConstants { alpha: 1.0, beta: 1.0, abar: 1.0, bbar: 1.0, mbar: 1.0, fbar: 0.25, gbar: 0.25, c4: 1.0 };
        let p = pullback_ledger(1.0, 2, 1.0).map_err(|e| e.to_string());
        match (solve_gamma(&c), ns_ledger(&c), p) {
            (Ok(g), Ok(l), Ok(p)) => ensure(
                gamma_residual(&c, g) <= 1e-12 && l.rho >= 1.0 && (p.abar, p.bbar, p.mbar, p.rho_inv) == (128.0, 32.0, 32.0, 3.0),
                format!("gamma {g:.6}, rho {:.4}", l.rho),
            ),
            (a, b, c) => Err(format!("{a:?} {b:?} {c:?}")),
        }
    }));
    out.push(check("cache encoding", {
        let e = CacheEntry { u: vec![1.0, -2.0], p: vec![0.5], norm_u: 1.0, norm_p: 2.0, iterations: 3, increments: vec![0.1] };
        let bytes = encode_entry(&e);
        ensure(decode_entry(&bytes).as_ref() == Ok(&e) && decode_entry(&bytes[..bytes.len() - 1]).is_err(), "round trip".into())
    }));
    out.push(check("manufactured Stokes solution (m = 8, 16)", {
        let mut cfg = ExperimentConfig::new(PerturbationFamily::Identity);
        cfg.study.mms_m = vec![8, 16];
        run_mms_study(&cfg).map_err(|e| e.to_string()).and_then(|r| {
            let (ru, rp) = r.rates();
            ensure(ru >= 0.9 && rp >= 0.45, format!("velocity rate {ru:.3}, pressure rate {rp:.3}"))
        })
    }));
    out
}
