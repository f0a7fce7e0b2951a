//! Gauss-Legendre convergence of E‖p‖² for the analytic and the Gevrey
//! single-parameter families on a coarse mesh.

use nsuq::harness::{run_gl_study, Abscissa, ExperimentConfig, Solver};
use nsuq::geometry::PerturbationFamily;

fn main() {
    for family in [PerturbationFamily::gl1(), PerturbationFamily::gl2()] {
        let mut cfg = ExperimentConfig::new(family);
        cfg.mesh.m = 16;
        cfg.study.n = (1..=8).map(|k| 4 * k).collect();
        cfg.study.reference_n = 64;
        let solver = Solver::new(&cfg, None).expect("valid config");
        let report = run_gl_study(&cfg, &solver).expect("study runs");
        println!("{}:", report.name);
        for row in &report.rows {
            println!("  n = {:>3}  Q_n = {:.10}  error = {:.3e}", row.n, row.value, row.rel_error);
        }
        for abscissa in [Abscissa::N, Abscissa::NTwoThirds] {
            if let Some(fit) = report.fit_with(abscissa) {
                println!("  log error against {}: slope {:.4}, r {:.4}", abscissa.label(), fit.slope, fit.r);
            }
        }
        println!("  {}", solver.stats().summary());
    }
}
