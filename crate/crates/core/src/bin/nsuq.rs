use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use nsuq::harness::{
    emit_report, run_gl_study, run_mc_study, run_mms_study, run_qmc_study, run_verify_bounds, selftest, with_workers,
    write_verify_outputs, ExperimentConfig, HarnessError, SolutionCache, Solver, StudyReport,
};

#[derive(Parser)]
#[command(name = "nsuq", version, about = "Parametric Navier-Stokes solves and quadrature studies")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Experiment configuration (TOML). NSUQ_<SECTION>_<KEY> variables override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file (CSV for studies).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Overrides study.seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for per-point solves.
    #[arg(long, global = true, default_value_t = 1)]
    workers: usize,
    /// Solution cache directory.
    #[arg(long, global = true)]
    cache: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Solve at one parameter point (solve.y in the config or --y).
    Solve {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        y: Option<Vec<f64>>,
    },
    GlStudy,
    QmcStudy,
    /// Monte Carlo study; the reference is the lattice reference of the same config.
    McStudy,
    MmsStudy,
    VerifyBounds,
    Selftest,
}

fn load(common: &Common) -> Result<ExperimentConfig, HarnessError> {
    let path = common.config.as_ref().ok_or_else(|| HarnessError::Config("--config is required".into()))?;
    let mut cfg = ExperimentConfig::load(path, std::env::vars())?;
    if let Some(seed) = common.seed {
        cfg.study.seed = seed;
    }
    if common.cache.is_some() {
        cfg.paths.cache = common.cache.clone();
    }
    if common.out.is_some() {
        cfg.paths.output = common.out.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn solver(cfg: &ExperimentConfig) -> Result<Solver, HarnessError> {
    let cache = cfg.paths.cache.as_deref().map(SolutionCache::new).transpose()?;
    Solver::new(cfg, cache)
}

fn print_study(r: &StudyReport) {
    println!("{}: {} rows", r.name, r.rows.len());
    for row in &r.rows {
        println!("  n = {:>6}  value = {:.10e}  error = {:.4e}  ({:.2} s)", row.n, row.value, row.rel_error, row.runtime_s);
    }
    match r.fit {
        Some(f) => println!("  fit against {}: slope {:.4}, correlation {:.4}", r.abscissa.label(), f.slope, f.r),
        None => println!("  fit against {}: not enough rows above the floor", r.abscissa.label()),
    }
    for n in &r.notes {
        println!("  note: {n}");
    }
}

fn emit(r: &StudyReport, out: Option<&Path>) -> Result<(), HarnessError> {
    print_study(r);
    if let Some(p) = out {
        emit_report(r, p)?;
        println!("wrote {}", p.display());
    }
    Ok(())
}

fn suffixed(path: &Path, tag: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let ext = path.extension().map(|e| format!(".{}", e.to_string_lossy())).unwrap_or_default();
    path.with_file_name(format!("{stem}-{tag}{ext}"))
}

fn run(cli: Cli) -> Result<bool, HarnessError> {
    if let Command::Selftest = cli.command {
        let checks = selftest();
        for c in &checks {
            println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
        }
        return Ok(checks.iter().all(|c| c.passed));
    }
    let cfg = load(&cli.common)?;
    let out = cfg.paths.output.clone();
    with_workers(cli.common.workers, || -> Result<bool, HarnessError> {
        match cli.command {
            Command::Solve { y } => {
                let y = y.unwrap_or_else(|| cfg.solve.y.clone());
                let y = if y.is_empty() && cfg.family.param_dim() == 1 { vec![0.0] } else { y };
                if y.len() != cfg.family.param_dim() {
                    return Err(HarnessError::Config(format!(
                        "{} expects {} parameters, got {}",
                        cfg.family.name(),
                        cfg.family.param_dim(),
                        y.len()
                    )));
                }
                let e = solver(&cfg)?.solve(&y)?;
                let text = format!(
                    "y = {y:?}\nnorm_u_h = {:.16e}\nnorm_p_l = {:.16e}\niterations = {}\nincrements = {:?}\n",
                    e.norm_u, e.norm_p, e.iterations, e.increments
                );
                print!("{text}");
                if let Some(p) = out {
                    std::fs::write(&p, text).map_err(|err| HarnessError::Io(format!("{}: {err}", p.display())))?;
                }
            }
            Command::GlStudy => emit(&run_gl_study(&cfg, &solver(&cfg)?)?, out.as_deref())?,
            Command::QmcStudy => emit(&run_qmc_study(&cfg, &solver(&cfg)?)?.report, out.as_deref())?,
            Command::McStudy => emit(&run_mc_study(&cfg, &solver(&cfg)?, None)?, out.as_deref())?,
            Command::MmsStudy => {
                let r = run_mms_study(&cfg)?;
                emit(&r.velocity, out.as_ref().map(|p| suffixed(p, "velocity")).as_deref())?;
                emit(&r.pressure, out.as_ref().map(|p| suffixed(p, "pressure")).as_deref())?;
                let (ru, rp) = r.rates();
                println!("observed rates: velocity {ru:.3}, pressure {rp:.3}");
            }
            Command::VerifyBounds => {
                let r = run_verify_bounds(&cfg)?;
                let path = out.unwrap_or_else(|| PathBuf::from("verify-bounds.csv"));
                print!("{}", write_verify_outputs(&r, &path)?);
                return Ok(r.all_dominated());
            }
            Command::Selftest => unreachable!("handled above"),
        }
        Ok(true)
    })?
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
