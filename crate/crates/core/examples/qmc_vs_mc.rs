//! Randomly shifted lattice rule against Monte Carlo for E‖u‖² with a
//! twelve-parameter perturbation on a coarse mesh.

use nsuq::harness::{run_mc_study, run_qmc_study, ExperimentConfig, RuleKind, Solver};
use nsuq::geometry::PerturbationFamily;

fn main() {
    let mut cfg = ExperimentConfig::new(PerturbationFamily::qmc1(12));
    cfg.mesh.m = 8;
    cfg.study.rule = RuleKind::Lattice;
    cfg.study.level_min = 3;
    cfg.study.level_max = 8;
    cfg.study.shifts = 8;
    let solver = Solver::new(&cfg, None).expect("valid config");
    let t = std::time::Instant::now();
    let qmc = run_qmc_study(&cfg, &solver).expect("lattice study runs");
    let mc = run_mc_study(&cfg, &solver, Some(qmc.reference)).expect("MC study runs");
    println!("reference E|u|^2 = {:.10} (generating vector {:?})", qmc.reference, qmc.rule.z());
    println!("{:>5} {:>12} {:>12}", "n", "QMC rmse", "MC rmse");
    for (q, m) in qmc.report.rows.iter().zip(&mc.rows) {
        println!("{:>5} {:>12.3e} {:>12.3e}", q.n, q.rel_error, m.rel_error);
    }
    if let (Some(q), Some(m)) = (qmc.report.fit, mc.fit) {
        println!("log-log slopes: QMC {:.3}, MC {:.3}", q.slope, m.slope);
    }
    println!("{} ({:.1} s)", solver.stats().summary(), t.elapsed().as_secs_f64());
}
