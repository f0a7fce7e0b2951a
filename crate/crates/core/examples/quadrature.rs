//! Gauss-Legendre rules, Korobov lattice search and shifted-lattice estimates
//! against Monte Carlo on a smooth product integrand.

use nsuq::quadrature::{
    default_weights, embedded_points, estimate, gauss_legendre, korobov_search, mc_stream, relative_rmse, LatticeRule,
    ShiftSet,
};

fn main() {
    let g = gauss_legendre(6);
    println!("6-point Gauss-Legendre: nodes {:.6?}", g.nodes);
    println!("  integral of exp over [-1, 1]: {:.15} (exact {:.15})", g.integrate(f64::exp), 1f64.exp() - (-1f64).exp());

    let s = 8;
    let n = 1 << 10;
    let z = korobov_search(n, s, &default_weights(s)).expect("search succeeds");
    println!("Korobov vector for n = {n}, s = {s}: {z:?}");
    let rule = LatticeRule::new(z, n).expect("valid rule");

    // product of 1 + y_j / j², integral 1 over the centered cube
    let f = |y: &[f64]| -> Result<f64, String> {
        Ok(y.iter().enumerate().map(|(j, v)| 1.0 + v / ((j + 1) * (j + 1)) as f64).product())
    };
    let shifts = ShiftSet::new(s, 8, 2024);
    println!("{:>6} {:>12} {:>12}", "n", "QMC rmse", "MC rmse");
    for level in (4..=10).step_by(2) {
        let q = estimate(&f, &rule, level, &shifts, 1.0).expect("evaluates");
        let mc: Vec<f64> = (0..8)
            .map(|r| {
                let pts = mc_stream(s, 1 << level, 2024, r);
                pts.iter().map(|p| f(p).unwrap()).sum::<f64>() / pts.len() as f64
            })
            .collect();
        println!("{:>6} {:>12.3e} {:>12.3e}", 1 << level, q.rmse, relative_rmse(&mc, 1.0).unwrap());
    }

    let all = embedded_points(&rule, &shifts.shifts[0]).expect("points");
    println!("embedded enumeration: {} points, first three {:.4?}", all.len(), &all[..3]);
}
