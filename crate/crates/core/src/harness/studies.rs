//! Gauss-Legendre, shifted-lattice, Monte Carlo, manufactured-solution and
//! bound-verification studies.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;

use super::config::ExperimentConfig;
use super::report::{fmt_f64, Abscissa, StudyReport, StudyRow};
use super::runner::Solver;
use super::HarnessError;
use crate::bounds::{verify_first_order, FdOptions, VerifyConfig, VerifyReport};
use crate::fem::{h_error, l_error, solve_ns, Discretization};
use crate::geometry::{Forcing, ManufacturedData, ParamDomain, PerturbationFamily, PullbackFields};
use crate::multiindex::MultiIndex;
use crate::quadrature::{
    default_weights, embedded_points, gauss_legendre, korobov_search, load_generating_vector, mc_stream, relative_rmse,
    LatticeRule, ShiftSet,
};

/// Runs `f` on a dedicated pool of `workers` threads.
pub fn with_workers<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T, HarnessError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| HarnessError::Study(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}

/// Σ w_i v_i / Σ w_i, returning the common value exactly when all v_i agree.
fn weighted_mean(values: &[f64], weights: &[f64]) -> f64 {
    if values.windows(2).all(|w| w[0].to_bits() == w[1].to_bits()) {
        return values[0];
    }
    let num: f64 = values.iter().zip(weights).map(|(v, w)| v * w).sum();
    num / weights.iter().sum::<f64>()
}

fn mean(values: &[f64]) -> f64 {
    if values.windows(2).all(|w| w[0].to_bits() == w[1].to_bits()) {
        return values[0];
    }
    values.iter().sum::<f64>() / values.len() as f64
}

fn relative_error(q: f64, reference: f64) -> f64 {
    if q == reference {
        0.0
    } else {
        ((q - reference) / reference).abs()
    }
}

fn note_monotonicity(report: &mut StudyReport) {
    let floor = report.error_floor;
    let violations: Vec<u64> = report
        .rows
        .windows(2)
        .filter(|w| w[0].rel_error >= floor && w[1].rel_error > w[0].rel_error)
        .map(|w| w[1].n)
        .collect();
    if !violations.is_empty() {
        let msg = format!("error increased at n = {violations:?}");
        log::warn!("{}: {msg}", report.name);
        report.notes.push(msg);
    }
}

fn note_picard(report: &mut StudyReport, solver: &Solver) {
    let summary = solver.stats().summary();
    log::info!("{}: {summary}", report.name);
    report.notes.push(summary);
}

/// ∫ ‖p(y)‖²_L dy/2 over [−1, 1] by n-point Gauss-Legendre rules, against an
/// n*-point reference. Even families are solved at |y| only.
pub fn run_gl_study(cfg: &ExperimentConfig, solver: &Solver) -> Result<StudyReport, HarnessError> {
    let fam = &cfg.family;
    if fam.param_dim() != 1 || fam.param_domain() != ParamDomain::Gauss {
        return Err(HarnessError::Study(format!("GL study needs a one-parameter family on [-1, 1], got {}", fam.name())));
    }
    let st = &cfg.study;
    if st.reference_n <= *st.n.last().expect("validated") {
        return Err(HarnessError::Study("reference n must exceed every study n".into()));
    }
    let abscissa = if matches!(fam, PerturbationFamily::Gl2 { .. }) { Abscissa::NTwoThirds } else { Abscissa::N };
    let even = fam.is_even_in_y();
    let mut memo: BTreeMap<u64, f64> = BTreeMap::new();

    let mut quad = |n: usize| -> Result<(f64, f64), HarnessError> {
        let start = Instant::now();
        let rule = gauss_legendre(n);
        let ys: Vec<f64> = rule.nodes.iter().map(|&x| if even { x.abs() } else { x }).collect();
        let mut fresh: Vec<f64> = ys.iter().copied().filter(|y| !memo.contains_key(&y.to_bits())).collect();
        fresh.sort_by(f64::total_cmp);
        fresh.dedup_by(|a, b| a.to_bits() == b.to_bits());
        let vals: Vec<f64> =
            fresh.par_iter().map(|&y| solver.solve(&[y]).map(|e| e.norm_p * e.norm_p)).collect::<Result<_, _>>()?;
        memo.extend(fresh.iter().map(|y| y.to_bits()).zip(vals));
        let f: Vec<f64> = ys.iter().map(|y| memo[&y.to_bits()]).collect();
        Ok((weighted_mean(&f, &rule.weights), start.elapsed().as_secs_f64()))
    };

    let (reference, _) = quad(st.reference_n)?;
    let mut report = StudyReport::new(&format!("gl-{}", fam.name()), abscissa, st.error_floor, &cfg.digest(), None);
    report.reference = Some(reference);
    for &n in &st.n {
        let (q, t) = quad(n)?;
        report.rows.push(StudyRow { n: n as u64, value: q, rel_error: relative_error(q, reference), runtime_s: t });
    }
    report.refit();
    note_monotonicity(&mut report);
    note_picard(&mut report, solver);
    Ok(report)
}

/// The configured generating vector (truncated to s) or a Korobov search at
/// n = 2^level_max.
pub fn generating_vector(cfg: &ExperimentConfig) -> Result<LatticeRule, HarnessError> {
    let s = cfg.family.param_dim();
    let n = 1u64 << cfg.study.level_max;
    let z = match &cfg.paths.generating_vector {
        Some(p) => {
            let z = load_generating_vector(p)?;
            if z.len() < s {
                return Err(HarnessError::Study(format!("generating vector has {} entries, need {s}", z.len())));
            }
            z[..s].to_vec()
        }
        None => korobov_search(n, s, &default_weights(s))?,
    };
    Ok(LatticeRule::new(z, n)?)
}

fn check_lattice_family(fam: &PerturbationFamily) -> Result<(), HarnessError> {
    if fam.param_domain() != ParamDomain::Lattice {
        return Err(HarnessError::Study(format!("lattice and MC studies need a family on [-1/2, 1/2]^s, got {}", fam.name())));
    }
    Ok(())
}

/// F(y) = ‖u(y)‖²_H at every point, with per-point wall times.
fn evaluate(solver: &Solver, points: &[Vec<f64>]) -> Result<Vec<(f64, f64)>, HarnessError> {
    points
        .par_iter()
        .map(|y| {
            let t = Instant::now();
            let e = solver.solve(y)?;
            Ok((e.norm_u * e.norm_u, t.elapsed().as_secs_f64()))
        })
        .collect()
}

/// Per-replicate prefix means at 2^ℓ points for each configured level.
fn level_rows(
    cfg: &ExperimentConfig,
    evaluations: &[Vec<(f64, f64)>],
    reference: f64,
) -> Result<Vec<StudyRow>, HarnessError> {
    let st = &cfg.study;
    (st.level_min..=st.level_max)
        .map(|level| {
            let n = 1usize << level;
            let q: Vec<f64> = evaluations.iter().map(|ev| mean(&ev[..n].iter().map(|v| v.0).collect::<Vec<_>>())).collect();
            let t: f64 = evaluations.iter().flat_map(|ev| ev[..n].iter().map(|v| v.1)).sum();
            let rmse = if q.iter().all(|&v| v == reference) { 0.0 } else { relative_rmse(&q, reference)? };
            Ok(StudyRow { n: n as u64, value: mean(&q), rel_error: rmse, runtime_s: t })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct QmcOutcome {
    pub report: StudyReport,
    /// Mean over the shifts of the top-level estimates.
    pub reference: f64,
    pub rule: LatticeRule,
}

/// Randomly shifted embedded lattice estimates of ∫ ‖u(y)‖²_H dy. The top
/// level is evaluated once per shift; every lower level is its prefix, and
/// the reference is the shift average at the top level.
pub fn run_qmc_study(cfg: &ExperimentConfig, solver: &Solver) -> Result<QmcOutcome, HarnessError> {
    check_lattice_family(&cfg.family)?;
    let rule = generating_vector(cfg)?;
    let shifts = ShiftSet::new(rule.dim(), cfg.study.shifts, cfg.study.seed);
    let mut evaluations = Vec::with_capacity(shifts.len());
    for (r, d) in shifts.shifts.iter().enumerate() {
        let pts = embedded_points(&rule, d)?;
        evaluations.push(evaluate(solver, &pts)?);
        log::info!("shift {}/{} done", r + 1, shifts.len());
    }
    let tops: Vec<f64> = evaluations.iter().map(|ev| mean(&ev.iter().map(|v| v.0).collect::<Vec<_>>())).collect();
    let reference = mean(&tops);
    let mut report =
        StudyReport::new(&format!("qmc-{}", cfg.family.name()), Abscissa::LogN, cfg.study.error_floor, &cfg.digest(), Some(cfg.study.seed));
    report.reference = Some(reference);
    report.rows = level_rows(cfg, &evaluations, reference)?;
    report.refit();
    note_picard(&mut report, solver);
    Ok(QmcOutcome { report, reference, rule })
}

/// Offset separating MC replicate streams from the shift streams of the same seed.
const MC_STREAM_OFFSET: u64 = 1 << 32;

/// Independent Monte Carlo replicates at the lattice study sizes. Without a
/// reference the shifted-lattice reference of the same configuration is used.
pub fn run_mc_study(cfg: &ExperimentConfig, solver: &Solver, reference: Option<f64>) -> Result<StudyReport, HarnessError> {
    check_lattice_family(&cfg.family)?;
    let reference = match reference {
        Some(r) => r,
        None => run_qmc_study(cfg, solver)?.reference,
    };
    let s = cfg.family.param_dim();
    let n = 1usize << cfg.study.level_max;
    let mut evaluations = Vec::with_capacity(cfg.study.shifts);
    for r in 0..cfg.study.shifts {
        let pts = mc_stream(s, n, cfg.study.seed, MC_STREAM_OFFSET + r as u64);
        evaluations.push(evaluate(solver, &pts)?);
        log::info!("MC replicate {}/{} done", r + 1, cfg.study.shifts);
    }
    let mut report =
        StudyReport::new(&format!("mc-{}", cfg.family.name()), Abscissa::LogN, cfg.study.error_floor, &cfg.digest(), Some(cfg.study.seed));
    report.reference = Some(reference);
    report.rows = level_rows(cfg, &evaluations, reference)?;
    report.refit();
    note_picard(&mut report, solver);
    Ok(report)
}

#[derive(Clone, Debug, PartialEq)]
pub struct MmsReport {
    /// Rows: n = m, value = ‖u_h − I_h w‖_H, rel_error = value / ‖I_h w‖_H.
    pub velocity: StudyReport,
    /// Rows: n = m, value = ‖p_h − Π₀q‖_L, rel_error = value / ‖Π₀q‖_L.
    pub pressure: StudyReport,
}

impl MmsReport {
    /// Observed rates log(e_k/e_{k+1}) / log(m_{k+1}/m_k) between consecutive meshes.
    pub fn pairwise_rates(report: &StudyReport) -> Vec<f64> {
        report
            .rows
            .windows(2)
            .map(|w| (w[0].value / w[1].value).ln() / (w[1].n as f64 / w[0].n as f64).ln())
            .collect()
    }

    /// Fitted rates: minus the log-log slope.
    pub fn rates(&self) -> (f64, f64) {
        let r = |s: &StudyReport| s.fit.map_or(f64::NAN, |f| -f.slope);
        (r(&self.velocity), r(&self.pressure))
    }
}

/// Stokes solves on the unit square with the manufactured forcing, compared
/// with the interpolated exact velocity and element means of the exact pressure.
pub fn run_mms_study(cfg: &ExperimentConfig) -> Result<MmsReport, HarnessError> {
    if cfg.family != PerturbationFamily::Identity {
        return Err(HarnessError::Study(format!("the manufactured-solution study needs the identity family, got {}", cfg.family.name())));
    }
    let scale = cfg.solver.force_scale;
    let fields = PullbackFields::new(PerturbationFamily::Identity, Forcing::Manufactured { scale }, false);
    let digest = cfg.digest();
    let mut velocity = StudyReport::new("mms-velocity", Abscissa::LogN, 0.0, &digest, None);
    let mut pressure = StudyReport::new("mms-pressure", Abscissa::LogN, 0.0, &digest, None);
    for &m in &cfg.study.mms_m {
        let start = Instant::now();
        let disc = Discretization::new(m, cfg.solver.discretization())?;
        let sol = solve_ns(&disc, &fields, &[0.0], cfg.solver.tol, cfg.solver.max_iter)?;
        let t = start.elapsed().as_secs_f64();
        let mesh = &disc.mesh;
        let grad = |x: [f64; 2]| ManufacturedData.grad_w(x).scale(scale).0;
        let q = |x: [f64; 2]| scale * ManufacturedData.q(x);
        let (eu, ep) = (h_error(mesh, &sol.u, grad, 4), l_error(mesh, &sol.p, q, 4));
        let (nu, np) = (h_error(mesh, &vec![0.0; sol.u.len()], grad, 4), l_error(mesh, &vec![0.0; sol.p.len()], q, 4));
        let rel = |e: f64, n: f64| if n == 0.0 { e } else { e / n };
        velocity.rows.push(StudyRow { n: m as u64, value: eu, rel_error: rel(eu, nu), runtime_s: t });
        pressure.rows.push(StudyRow { n: m as u64, value: ep, rel_error: rel(ep, np), runtime_s: t });
        log::info!("m = {m}: velocity error {eu:.4e}, pressure error {ep:.4e} ({t:.2} s)");
    }
    for r in [&mut velocity, &mut pressure] {
        r.error_floor = f64::MIN_POSITIVE;
        r.refit();
    }
    Ok(MmsReport { velocity, pressure })
}

pub fn verify_config(cfg: &ExperimentConfig) -> Result<VerifyConfig, HarnessError> {
    let b = &cfg.bounds;
    let c4 = b.c4.ok_or_else(|| HarnessError::Config("bounds.c4 (H1_0 to L4 embedding constant) is required".into()))?;
    let mut v = VerifyConfig::new(cfg.family.clone(), c4, b.points.clone());
    v.m = cfg.mesh.m;
    v.discretization = cfg.solver.discretization();
    v.beta = b.beta;
    v.delta = b.delta;
    v.force_scale = b.force_scale;
    v.nu = MultiIndex::from_dense(&b.nu);
    v.fd = FdOptions { h: b.fd_h, richardson: b.richardson, domain: cfg.family.param_domain().bounds() };
    v.picard_tol = b.picard_tol;
    Ok(v)
}

pub fn run_verify_bounds(cfg: &ExperimentConfig) -> Result<VerifyReport, HarnessError> {
    Ok(verify_first_order(&verify_config(cfg)?)?)
}

fn sibling(path: &Path, ext: &str) -> PathBuf {
    let mut p = path.as_os_str().to_owned();
    p.push(ext);
    PathBuf::from(p)
}

/// Margins CSV at `path`, the constant ledger at `path.ledger` and a
/// readable summary at `path.summary`. Returns the summary text.
pub fn write_verify_outputs(report: &VerifyReport, path: &Path) -> Result<String, HarnessError> {
    let io = |p: &Path, e: std::io::Error| HarnessError::Io(format!("{}: {e}", p.display()));
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|e| io(parent, e))?;
    }
    let mut csv = String::from("y,du_h,bound_u,margin_u,dp_l,bound_p,margin_p\n");
    for r in &report.rows {
        let y: Vec<String> = r.y.iter().map(|v| fmt_f64(*v)).collect();
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{}",
            y.join(";"),
            fmt_f64(r.du_h),
            fmt_f64(r.bound_u),
            fmt_f64(r.margin_u),
            fmt_f64(r.dp_l),
            fmt_f64(r.bound_p),
            fmt_f64(r.margin_p)
        );
    }
    std::fs::write(path, csv).map_err(|e| io(path, e))?;

    let c = &report.constants;
    let l = &report.ledger;
    let mut entries = vec![
        ("C_T", report.fit.c_t),
        ("alpha", c.alpha),
        ("beta", c.beta),
        ("abar", c.abar),
        ("bbar", c.bbar),
        ("mbar", c.mbar),
        ("fbar", c.fbar),
        ("gbar", c.gbar),
        ("C4", c.c4),
        ("rho_inv", report.pullback.rho_inv),
        ("rho_rhs", report.rhs.rho_rhs),
        ("force_scale", report.force_scale),
        ("gamma", l.gamma),
        ("alpha_tilde", l.alpha_tilde),
        ("ubar", l.ubar),
        ("pbar", l.pbar),
        ("sigma_u", l.sigma_u),
        ("sigma_p", l.sigma_p),
        ("C_u", l.c_u),
        ("C_p", l.c_p),
        ("rho_u", l.rho_u),
        ("rho_p", l.rho_p),
        ("rho", l.rho),
    ];
    let names: Vec<String> = (1..=report.fit.r.len()).flat_map(|j| [format!("R_{j}"), format!("R_NS_{j}")]).collect();
    for (j, (r, rns)) in report.fit.r.iter().zip(&report.r_ns).enumerate() {
        entries.push((names[2 * j].as_str(), *r));
        entries.push((names[2 * j + 1].as_str(), *rns));
    }
    let mut ledger = String::from("name,value\n");
    for (k, v) in &entries {
        let _ = writeln!(ledger, "{k},{}", fmt_f64(*v));
    }
    let lp = sibling(path, ".ledger");
    std::fs::write(&lp, ledger).map_err(|e| io(&lp, e))?;

    let mut s = String::new();
    let _ = writeln!(s, "derivative nu = {:?}", report.nu.entries());
    let _ = writeln!(s, "fitted C_T = {:.6}, R = {:?}, alpha = {:.6}", report.fit.c_t, report.fit.r, report.alpha);
    let _ = writeln!(
        s,
        "beta = {:.6}{}",
        report.beta,
        if report.beta_heuristic { " (unperturbed-square value; heuristic since B != I)" } else { "" }
    );
    let _ = writeln!(s, "forcing scale {:.6e}, gamma {:.6e}, rho {:.6e}", report.force_scale, l.gamma, l.rho);
    for r in &report.rows {
        let _ = writeln!(
            s,
            "y = {:?}: |d u|_H = {:.4e} <= {:.4e} (margin {:.3e}); |d p|_L = {:.4e} <= {:.4e} (margin {:.3e})",
            r.y, r.du_h, r.bound_u, r.margin_u, r.dp_l, r.bound_p, r.margin_p
        );
    }
    let _ = writeln!(s, "all bounds dominate: {}", report.all_dominated());
    let sp = sibling(path, ".summary");
    std::fs::write(&sp, &s).map_err(|e| io(&sp, e))?;
    Ok(s)
}
