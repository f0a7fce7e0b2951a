//! First-order derivative bound check for the gl1 family.

use nsuq::bounds::{verify_first_order, VerifyConfig};
use nsuq::geometry::PerturbationFamily;

fn main() {
    // Ladyzhenskaya plus Poincaré on the unit square: C₄² ≤ 1/π
    let c4 = std::f64::consts::FRAC_1_PI.sqrt();
    let points = vec![vec![-0.8], vec![-0.35], vec![0.1], vec![0.5], vec![0.9]];
    let cfg = VerifyConfig::new(PerturbationFamily::gl1(), c4, points);
    let t = std::time::Instant::now();
    let rep = verify_first_order(&cfg).expect("verification runs");
    println!("C_T = {:.4}, R = {:?}, alpha = {:.4}, beta = {:.4}", rep.fit.c_t, rep.fit.r, rep.alpha, rep.beta);
    println!("force scale {:.3e}, gamma {:.3e}, rho {:.3e}", rep.force_scale, rep.ledger.gamma, rep.ledger.rho);
    for r in &rep.rows {
        println!(
            "y = {:+.2}  |du|_H = {:.3e} <= {:.3e} (x{:.2e})  |dp|_L = {:.3e} <= {:.3e} (x{:.2e})",
            r.y[0], r.du_h, r.bound_u, r.margin_u, r.dp_l, r.bound_p, r.margin_p
        );
    }
    println!("all dominated: {}  ({:.1} s)", rep.all_dominated(), t.elapsed().as_secs_f64());

    println!("amplitude scan (smallest margin over the same points):");
    for amplitude in [0.05, 0.10, 0.15] {
        let family = PerturbationFamily::Gl1 { amplitude, frequency: 5.0 * std::f64::consts::PI };
        let cfg = VerifyConfig::new(family, c4, cfg.points.clone());
        let rep = verify_first_order(&cfg).expect("verification runs");
        let mu = rep.rows.iter().map(|r| r.margin_u).fold(f64::INFINITY, f64::min);
        let mp = rep.rows.iter().map(|r| r.margin_p).fold(f64::INFINITY, f64::min);
        println!("  a = {amplitude:.2}: C_T = {:.4}, R = {:.4}, velocity x{mu:.3e}, pressure x{mp:.3e}", rep.fit.c_t, rep.fit.r[0]);
    }
}
