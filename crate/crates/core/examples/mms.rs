//! Stokes convergence against the manufactured solution on the unit square.

use nsuq::geometry::PerturbationFamily;
use nsuq::harness::{run_mms_study, ExperimentConfig, MmsReport};

fn main() {
    let mut cfg = ExperimentConfig::new(PerturbationFamily::Identity);
    cfg.solver.convection = false;
    cfg.study.mms_m = vec![8, 16, 32, 64];
    let r = run_mms_study(&cfg).expect("solves succeed");
    let (vu, vp) = (MmsReport::pairwise_rates(&r.velocity), MmsReport::pairwise_rates(&r.pressure));
    println!("{:>4} {:>12} {:>7} {:>12} {:>7}", "m", "|u-u_h|_H", "rate", "|p-p_h|_L", "rate");
    for (i, (u, p)) in r.velocity.rows.iter().zip(&r.pressure.rows).enumerate() {
        let rate = |v: &[f64]| if i == 0 { String::from("-") } else { format!("{:.3}", v[i - 1]) };
        println!("{:>4} {:>12.4e} {:>7} {:>12.4e} {:>7}", u.n, u.value, rate(&vu), p.value, rate(&vp));
    }
    let (ru, rp) = r.rates();
    println!("fitted rates: velocity {ru:.3}, pressure {rp:.3}");
}
