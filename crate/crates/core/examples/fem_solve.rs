//! One Navier-Stokes solve on a perturbed domain, with the Picard history.

use nsuq::fem::{norm_h, norm_l, solve_ns, Discretization, DiscretizationOptions};
use nsuq::geometry::{Forcing, PerturbationFamily, PullbackFields};

fn main() {
    let m = 32;
    let disc = Discretization::new(m, DiscretizationOptions::default()).expect("valid mesh");
    let fields = PullbackFields::new(PerturbationFamily::gl1(), Forcing::Manufactured { scale: 1.0 }, true);
    for y in [-1.0, 0.0, 0.45] {
        let t = std::time::Instant::now();
        let sol = solve_ns(&disc, &fields, &[y], 1e-10, 50).expect("Picard converges");
        println!(
            "y = {y:+.2}: |u|_H = {:.8}, |p|_L = {:.8}, {} iterations ({:.2} s)",
            norm_h(&disc.mesh, &sol.u),
            norm_l(&disc.mesh, &sol.p),
            sol.iterations,
            t.elapsed().as_secs_f64()
        );
        let sci = |v: &[f64]| v.iter().map(|x| format!("{x:.3e}")).collect::<Vec<_>>().join(" ");
        println!("  increments {}", sci(&sol.increments));
        println!("  ratios     {}", sci(&sol.contraction_ratios()));
    }
}
