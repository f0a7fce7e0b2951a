//! Perturbation families: transform values, pulled-back coefficients and
//! parameter derivatives.

use nsuq::geometry::{eval_transform, pullback_matrices, PerturbationFamily};
use nsuq::multiindex::MultiIndex;

fn main() {
    let families = [
        (PerturbationFamily::gl1(), vec![0.3]),
        (PerturbationFamily::gl2(), vec![0.3]),
        (PerturbationFamily::qmc1(4), vec![0.1, -0.2, 0.3, -0.4]),
        (PerturbationFamily::qmc2(4), vec![0.1, -0.2, 0.3, -0.4]),
    ];
    let xhat = [0.3, 0.7];
    for (family, y) in &families {
        let tp = eval_transform(family, xhat, y);
        let (a, b, _) = pullback_matrices(&tp.dt, tp.j);
        println!("{} (dimension {}, domain {:?})", family.name(), family.param_dim(), family.param_domain().bounds());
        println!("  T_y(x) = ({:.4}, {:.4}), J = {:.4}", tp.x[0], tp.x[1], tp.j);
        println!("  A = {:?}", a.0);
        println!("  B = M = {:?}", b.0);
        for order in 1..=2 {
            let nu = MultiIndex::from_sparse([(1, order)]).expect("coordinate 1");
            match family.y_derivative_t(xhat[0], y, &nu) {
                Ok(v) => println!("  d^{order}T/dy1^{order} = {v:.6e}"),
                Err(e) => println!("  d^{order}T/dy1^{order}: {e}"),
            }
        }
    }

    // the Gevrey family is flat at y = 0: T is identically one there
    let gl2 = PerturbationFamily::gl2();
    for y in [0.0, 0.02, 0.05, 0.1, 0.2] {
        println!("gl2 at y = {y:.2}: T(0.5, y) = {:.6}", gl2.eval_t(0.5, &[y]).0);
    }
}
