//! Desk-scale acceptance run: one PASS/FAIL line per criterion.
//!
//! Solutions are cached under the cargo target tmp directory, so only the
//! first run pays for the lattice and Monte Carlo studies. Criteria listed in
//! `KNOWN_FAILURES` are still evaluated and printed; they do not fail the
//! process. Any other failure does.

mod common;

use std::path::{Path, PathBuf};
use std::time::Instant;

use nsuq::bounds::{gamma_residual, ns_ledger, pullback_ledger, rhs_ledger, solve_gamma};
use nsuq::harness::{
    run_gl_study, run_mc_study, run_mms_study, run_qmc_study, run_verify_bounds, with_workers, Abscissa, ExperimentConfig,
    HarnessError, PicardStats, SolutionCache, Solver,
};
use nsuq::multiindex::{fdb_closed_form, fdb_identity_sum, inequality_suite, MultiIndex};
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Criteria that are computed faithfully but do not hold at desk scale.
/// Each has a reproduction note in the README.
const KNOWN_FAILURES: &[u32] = &[4];

struct Outcome {
    id: u32,
    name: &'static str,
    passed: bool,
    detail: String,
    seconds: f64,
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn load(name: &str) -> ExperimentConfig {
    let path = configs().join(name);
    let mut cfg = ExperimentConfig::load(&path, std::iter::empty()).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    cfg.paths.cache = Some(Path::new(env!("CARGO_TARGET_TMPDIR")).join("acceptance-cache"));
    cfg
}

fn solver(cfg: &ExperimentConfig) -> Result<Solver, HarnessError> {
    Solver::new(cfg, Some(SolutionCache::new(cfg.paths.cache.as_ref().expect("cache set"))?))
}

fn workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get().min(4))
}

fn run(id: u32, name: &'static str, f: impl FnOnce() -> Result<(bool, String), String>) -> Outcome {
    let start = Instant::now();
    let (passed, detail) = f().unwrap_or_else(|e| (false, format!("error: {e}")));
    Outcome { id, name, passed, detail, seconds: start.elapsed().as_secs_f64() }
}

fn combinatorics() -> Result<(bool, String), String> {
    let suite = inequality_suite(6, 3).map_err(|e| e.to_string())?;
    let mut mismatches = Vec::new();
    let mut checked = 0;
    for total in 1..=5u32 {
        for a in 0..=total {
            for b in 0..=total - a {
                let nu = MultiIndex::from_dense(&[a, b, total - a - b]);
                for d in 1..=3 {
                    checked += 1;
                    let got = fdb_identity_sum(&nu, d).map_err(|e| e.to_string())?;
                    if got != fdb_closed_form(u64::from(total), d) {
                        mismatches.push(format!("{nu:?}, d = {d}: {got}"));
                    }
                }
            }
        }
    }
    let detail = match suite.first_failure() {
        Some((n, c)) => format!("inequality {n} fails at {c:?}"),
        None => format!("all inequalities hold; {checked} Faa di Bruno sums, {} mismatches", mismatches.len()),
    };
    Ok((suite.all_passed() && mismatches.is_empty(), detail))
}

fn mms() -> Result<(bool, String), String> {
    let r = run_mms_study(&load("mms.toml")).map_err(|e| e.to_string())?;
    let (ru, rp) = r.rates();
    Ok((ru >= 0.9 && rp >= 0.45, format!("velocity rate {ru:.3} (>= 0.9), pressure rate {rp:.3} (>= 0.45)")))
}

fn gl(file: &str, abscissa: Abscissa, picard: &mut Vec<(String, PicardStats)>) -> Result<(bool, String), String> {
    let cfg = load(file);
    let s = solver(&cfg).map_err(|e| e.to_string())?;
    let report = with_workers(workers(), || run_gl_study(&cfg, &s)).map_err(|e| e.to_string())?;
    picard.push((cfg.family.name().to_string(), s.stats()));
    let report = report.map_err(|e| e.to_string())?;
    let fit = report.fit_with(abscissa).ok_or("too few rows above the error floor")?;
    let mut passed = fit.r.abs() >= 0.9 && fit.slope < 0.0;
    let mut detail = format!("fit against {}: slope {:.4}, r {:.4}", abscissa.label(), fit.slope, fit.r);
    if abscissa == Abscissa::NTwoThirds {
        let plain = report.fit_with(Abscissa::N).ok_or("too few rows")?;
        passed &= plain.r.abs() < fit.r.abs();
        detail.push_str(&format!("; against n: r {:.4}", plain.r));
    }
    Ok((passed, detail))
}

fn qmc_vs_mc(files: &[&str], picard: &mut Vec<(String, PicardStats)>) -> Result<(bool, String), String> {
    let mut passed = true;
    let mut parts = Vec::new();
    for file in files {
        let cfg = load(file);
        let s = solver(&cfg).map_err(|e| e.to_string())?;
        let result = with_workers(workers(), || -> Result<_, HarnessError> {
            let q = run_qmc_study(&cfg, &s)?;
            let m = run_mc_study(&cfg, &s, Some(q.reference))?;
            Ok((q, m))
        })
        .map_err(|e| e.to_string())?;
        picard.push((cfg.family.name().to_string(), s.stats()));
        let (q, m) = result.map_err(|e| e.to_string())?;
        let (qf, mf) = (q.report.fit.ok_or("no QMC fit")?, m.fit.ok_or("no MC fit")?);
        let (qe, me) = (q.report.last_error().ok_or("no QMC rows")?, m.last_error().ok_or("no MC rows")?);
        let ok = (-1.2..=-0.7).contains(&qf.slope) && (-0.65..=-0.35).contains(&mf.slope) && qe < me;
        passed &= ok;
        parts.push(format!(
            "{}: QMC slope {:.3} in [-1.2, -0.7], MC slope {:.3} in [-0.65, -0.35], top-level RMSE {qe:.3e} vs {me:.3e}",
            cfg.family.name(),
            qf.slope,
            mf.slope
        ));
    }
    Ok((passed, parts.join("; ")))
}

fn ledger() -> Result<(bool, String), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst: f64 = 0.0;
    let mut residual: f64 = 0.0;
    let rel = |a: f64, b: f64| if a == b { 0.0 } else { (a - b).abs() / a.abs().max(b.abs()) };
    for _ in 0..100 {
        let c = common::random_constants(&mut rng);
        let got = common::fields(&ns_ledger(&c).map_err(|e| e.to_string())?);
        for (g, w) in got.iter().zip(common::second_ledger(&c)) {
            worst = worst.max(rel(*g, w));
        }
        residual = residual.max(gamma_residual(&c, solve_gamma(&c).map_err(|e| e.to_string())?));

        let c_t = common::uniform(&mut rng, 1.0, 4.0);
        let c4 = common::uniform(&mut rng, 0.05, 3.0);
        let d = 1 + rng.next_u32() % 3;
        let p = pullback_ledger(c_t, d, c4).map_err(|e| e.to_string())?;
        for (g, w) in [p.abar, p.bbar, p.mbar, p.rho_inv].iter().zip(common::second_pullback(c_t, d, c4)) {
            worst = worst.max(rel(*g, w));
        }
        let (c_f, c_g, tau) =
            (common::uniform(&mut rng, 0.0, 100.0), common::uniform(&mut rng, 0.0, 100.0), common::uniform(&mut rng, 1.0, 20.0));
        let r = rhs_ledger(c_f, c_g, c_t, d, tau).map_err(|e| e.to_string())?;
        for (g, w) in [r.fbar, r.gbar, r.rho_rhs].iter().zip(common::second_rhs(c_f, c_g, c_t, d, tau)) {
            worst = worst.max(rel(*g, w));
        }
    }
    let p = pullback_ledger(1.0, 2, 1.0).map_err(|e| e.to_string())?;
    let exact = (p.abar, p.bbar, p.mbar, p.rho_inv) == (128.0, 32.0, 32.0, 3.0);
    Ok((
        worst <= 1e-12 && residual <= 1e-12 && exact,
        format!("worst relative mismatch {worst:.2e}, worst gamma residual {residual:.2e}, unit pullback exact: {exact}"),
    ))
}

fn domination() -> Result<(bool, String), String> {
    let r = run_verify_bounds(&load("verify.toml")).map_err(|e| e.to_string())?;
    let (mu, mp) = r
        .rows
        .iter()
        .fold((f64::INFINITY, f64::INFINITY), |(a, b), row| (a.min(row.margin_u), b.min(row.margin_p)));
    Ok((
        r.rows.len() == 5 && r.all_dominated(),
        format!(
            "{} points, C_T {:.4}, min R {:.4e}, rho {:.3e}; min margin velocity {mu:.3e}, pressure {mp:.3e}",
            r.rows.len(),
            r.fit.c_t,
            r.fit.r.iter().copied().fold(f64::INFINITY, f64::min),
            r.ledger.rho
        ),
    ))
}

fn picard(stats: &[(String, PicardStats)]) -> Result<(bool, String), String> {
    if stats.is_empty() {
        return Err("no solves were recorded".into());
    }
    let worst = stats.iter().map(|(_, s)| s.worst_ratio).fold(0.0, f64::max);
    let parts: Vec<String> = stats
        .iter()
        .map(|(name, s)| format!("{name}: {} points, iterations {:?}", s.solves, s.iteration_histogram))
        .collect();
    Ok((worst < 1.0, format!("worst increment ratio {worst:.3e}; {}", parts.join("; "))))
}

fn main() {
    // libtest-style flags (filters, --nocapture) are accepted and ignored
    let _ = env_logger::builder().is_test(true).try_init();
    let mut stats = Vec::new();
    let mut outcomes = vec![
        run(1, "combinatorics exactness", combinatorics),
        run(2, "FEM convergence on a manufactured solution", mms),
        run(3, "Gauss-Legendre rate, analytic perturbation", || gl("gl1.toml", Abscissa::N, &mut stats)),
        run(4, "Gauss-Legendre rate, Gevrey perturbation", || gl("gl2.toml", Abscissa::NTwoThirds, &mut stats)),
        run(5, "lattice QMC against Monte Carlo", || qmc_vs_mc(&["qmc1.toml", "qmc2.toml"], &mut stats)),
        run(6, "constant ledger transcription", ledger),
        run(7, "derivative bound domination", domination),
    ];
    outcomes.push(run(8, "Picard contraction", || picard(&stats)));

    let mut unexpected = Vec::new();
    for o in &outcomes {
        let verdict = if o.passed { "PASS" } else { "FAIL" };
        println!("{verdict} criterion {} ({}, {:.1} s): {}", o.id, o.name, o.seconds, o.detail);
        if !o.passed && !KNOWN_FAILURES.contains(&o.id) {
            unexpected.push(o.id);
        }
    }
    for o in outcomes.iter().filter(|o| o.passed && KNOWN_FAILURES.contains(&o.id)) {
        println!("note: criterion {} is listed as a known failure but passed", o.id);
    }
    if !unexpected.is_empty() {
        eprintln!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}
