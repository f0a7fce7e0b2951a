//! Randomized checks of structural invariants across modules.

use std::cmp::Ordering;

use nsuq::geometry::{eval_transform, pullback_matrices, ManufacturedData, Mat2, PerturbationFamily};
use nsuq::multiindex::{enumerate_fdb, nk_lemma_holds, order_cmp, order_lt, MultiIndex};
use nsuq::quadrature::{estimate, gauss_legendre, korobov_vector, lattice_points, LatticeRule, ShiftSet};
use proptest::prelude::*;

fn multi_index(max_dims: usize, max_entry: u32) -> impl Strategy<Value = MultiIndex> {
    prop::collection::vec(0..=max_entry, 1..=max_dims).prop_map(|d| MultiIndex::from_dense(&d))
}

fn family() -> impl Strategy<Value = PerturbationFamily> {
    prop_oneof![
        Just(PerturbationFamily::gl1()),
        Just(PerturbationFamily::gl2()),
        (1usize..=12).prop_map(PerturbationFamily::qmc1),
        (1usize..=12).prop_map(PerturbationFamily::qmc2),
    ]
}

/// Family with a parameter point drawn from its domain.
fn family_and_y() -> impl Strategy<Value = (PerturbationFamily, Vec<f64>)> {
    family().prop_flat_map(|f| {
        let (lo, hi) = f.param_domain().bounds();
        let y = prop::collection::vec(lo..=hi, f.param_dim());
        (Just(f), y)
    })
}

fn rel_close(a: &Mat2, b: &Mat2, tol: f64) -> bool {
    let scale = a.frobenius().max(b.frobenius()).max(1e-300);
    (*a - *b).frobenius() <= tol * scale
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn order_is_strict_and_total(a in multi_index(3, 3), b in multi_index(3, 3), c in multi_index(3, 3)) {
        prop_assert!(!order_lt(&a, &a));
        if a != b {
            prop_assert!(order_lt(&a, &b) ^ order_lt(&b, &a));
        } else {
            prop_assert_eq!(order_cmp(&a, &b), Ordering::Equal);
        }
        if order_lt(&a, &b) && order_lt(&b, &c) {
            prop_assert!(order_lt(&a, &c));
        }
    }

    #[test]
    fn multi_index_arithmetic(a in multi_index(4, 4), b in multi_index(4, 4)) {
        let s = a.add(&b);
        prop_assert_eq!(s.order(), a.order() + b.order());
        prop_assert_eq!(s.checked_sub(&b), Some(a.clone()));
        prop_assert!(a.le(&s) && b.le(&s));
        prop_assert_eq!(a.sub_indices().len() as u64, a.entries().iter().map(|&(_, v)| u64::from(v) + 1).product::<u64>());
    }

    #[test]
    fn fdb_partitions_are_valid_and_obey_the_factorial_lemma(
        nu in multi_index(2, 3),
        lam in multi_index(2, 3),
    ) {
        prop_assume!(!nu.is_zero() && !lam.is_zero() && lam.order() <= nu.order());
        for part in enumerate_fdb(&nu, &lam).unwrap() {
            prop_assert!(part.is_valid_for(&nu, &lam));
            prop_assert!(nk_lemma_holds(&nu, &lam, &part));
        }
    }

    #[test]
    fn pullback_coefficients_are_consistent(
        (f, y) in family_and_y(),
        x1 in 0.0f64..=1.0,
        x2 in 0.0f64..=1.0,
    ) {
        let tp = eval_transform(&f, [x1, x2], &y);
        prop_assert!(tp.j > 0.0);
        let (a, b, m) = pullback_matrices(&tp.dt, tp.j);
        prop_assert_eq!(a, a.transpose());
        prop_assert!(a.sym_eigenvalues().iter().all(|&e| e > 0.0));
        prop_assert_eq!(b, m);
        let dt_inv_t = tp.dt.inverse().unwrap().transpose();
        prop_assert!(rel_close(&a, &(b * dt_inv_t), 1e-13));
    }

    #[test]
    fn manufactured_velocity_is_divergence_free(x1 in 0.0f64..=1.0, x2 in 0.0f64..=1.0) {
        prop_assert!(ManufacturedData.div_w([x1, x2]).abs() <= 1e-13);
    }

    #[test]
    fn frobenius_norm_bounds_products_and_traces(
        p in prop::array::uniform4(-3.0f64..3.0),
        q in prop::array::uniform4(-3.0f64..3.0),
    ) {
        let (a, b) = (Mat2::new(p[0], p[1], p[2], p[3]), Mat2::new(q[0], q[1], q[2], q[3]));
        let bound = a.frobenius() * b.frobenius();
        prop_assert!((a * b).frobenius() <= bound * (1.0 + 1e-15));
        prop_assert!((a * b).trace() <= bound * (1.0 + 1e-15));
    }

    #[test]
    fn gauss_rules_integrate_their_monomials(n in 1usize..=20, k in 0u32..40) {
        prop_assume!(k < 2 * n as u32);
        let rule = gauss_legendre(n);
        let exact = if k % 2 == 1 { 0.0 } else { 2.0 / f64::from(k + 1) };
        prop_assert!((rule.integrate(|x| x.powi(k as i32)) - exact).abs() <= 1e-12);
    }

    #[test]
    fn constant_integrands_are_exact_for_any_shift(seed in any::<u64>(), level in 0u32..=6, c in 0.5f64..5.0) {
        let rule = LatticeRule::new(korobov_vector(17, 64, 3), 64).unwrap();
        let shifts = ShiftSet::new(3, 4, seed);
        let out = estimate(&|_: &[f64]| Ok::<f64, String>(c), &rule, level, &shifts, c).unwrap();
        prop_assert!(out.estimates.iter().all(|&e| (e - c).abs() <= 1e-14 * c));
        for s in &shifts.shifts {
            let pts = lattice_points(&rule, s, level).unwrap();
            prop_assert_eq!(pts.len(), 1 << level);
            prop_assert!(pts.iter().flatten().all(|&v| (-0.5..0.5).contains(&v)));
        }
    }
}
