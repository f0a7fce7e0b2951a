//! Multi-index algebra, the Faà di Bruno partition sets and the exact
//! inequality suite.

use nsuq::multiindex::{enumerate_fdb, falling_half, fdb_closed_form, fdb_identity_sum, inequality_suite, MultiIndex};

fn main() {
    let nu = MultiIndex::from_dense(&[2, 1]);
    let lambda = MultiIndex::from_dense(&[1, 1]);
    println!("nu = {nu:?}, |nu| = {}, nu! = {}", nu.order(), nu.factorial());
    println!("sub-indices of nu: {:?}", nu.sub_indices());

    let parts = enumerate_fdb(&nu, &lambda).expect("orders are compatible");
    println!("{} partitions for lambda = {lambda:?}:", parts.len());
    for p in &parts {
        println!("  k = {:?}  l = {:?}", p.k, p.l);
    }

    for d in 1..=3 {
        let sum = fdb_identity_sum(&nu, d).expect("nonzero orders");
        println!("d = {d}: identity sum {sum}, closed form {}", fdb_closed_form(nu.order(), d));
    }

    for n in 0..6 {
        println!("[1/2]_{n} = {}", falling_half(n));
    }

    let report = inequality_suite(5, 2).expect("within the suite limit");
    for o in &report.outcomes {
        let tight = o.tight_constant.as_ref().map(|c| format!(", tightest constant {c}")).unwrap_or_default();
        println!("{:<45} {:>6} cases, passed: {}{tight}", o.name, o.cases, o.passed());
    }
}
