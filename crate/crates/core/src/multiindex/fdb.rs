//! Faà di Bruno partition sets and the identity they satisfy.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Pow, Zero};

use super::{factorial, order_cmp, MultiIndex, MultiIndexError, Rational};

/// One element of the partition set: pairs `(k_j, l_j)` with the `l_j`
/// strictly increasing under ≺.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FdbPartition {
    pub k: Vec<MultiIndex>,
    pub l: Vec<MultiIndex>,
}

impl FdbPartition {
    pub fn s(&self) -> usize {
        self.k.len()
    }

    /// Checks |k_j| > 0, Σ k_j = λ, Σ |k_j| l_j = ν and 0 ≺ l_1 ≺ … ≺ l_s.
    pub fn is_valid_for(&self, nu: &MultiIndex, lambda: &MultiIndex) -> bool {
        if self.k.len() != self.l.len() || self.k.is_empty() {
            return false;
        }
        if self.k.iter().any(MultiIndex::is_zero) || self.l.iter().any(MultiIndex::is_zero) {
            return false;
        }
        if self.l.windows(2).any(|w| !super::order_lt(&w[0], &w[1])) {
            return false;
        }
        let k_sum = self.k.iter().fold(MultiIndex::zero(), |acc, k| acc.add(k));
        let nu_sum = self
            .k
            .iter()
            .zip(&self.l)
            .fold(MultiIndex::zero(), |acc, (k, l)| acc.add(&scale(l, k.order())));
        &k_sum == lambda && &nu_sum == nu
    }
}

fn scale(l: &MultiIndex, c: u64) -> MultiIndex {
    let c = u32::try_from(c).expect("multiplier fits in u32");
    MultiIndex::from_sparse(l.entries().iter().map(|&(j, v)| (j, v * c))).expect("1-based")
}

/// All partitions of ν with respect to λ, for every s in 1..=|ν|.
///
/// Depth-first over ≺-increasing `l` sequences, pruned on the remaining
/// budget. The output order is the search order and is deterministic.
pub fn enumerate_fdb(nu: &MultiIndex, lambda: &MultiIndex) -> Result<Vec<FdbPartition>, MultiIndexError> {
    let (on, ol) = (nu.order(), lambda.order());
    if on == 0 || ol == 0 || ol > on {
        return Err(MultiIndexError::BadFdbOrders { nu: on, lambda: ol });
    }
    let mut candidates: Vec<MultiIndex> = nu.sub_indices().into_iter().filter(|l| !l.is_zero()).collect();
    candidates.sort_by(order_cmp);
    let mut out = Vec::new();
    let mut k = Vec::new();
    let mut l = Vec::new();
    dfs(&candidates, 0, nu.clone(), lambda.clone(), &mut k, &mut l, &mut out);
    Ok(out)
}

fn dfs(
    candidates: &[MultiIndex],
    start: usize,
    nu_rem: MultiIndex,
    lam_rem: MultiIndex,
    k: &mut Vec<MultiIndex>,
    l: &mut Vec<MultiIndex>,
    out: &mut Vec<FdbPartition>,
) {
    if nu_rem.is_zero() || lam_rem.is_zero() {
        if nu_rem.is_zero() && lam_rem.is_zero() {
            out.push(FdbPartition { k: k.clone(), l: l.clone() });
        }
        return;
    }
    let k_choices: Vec<MultiIndex> = lam_rem.sub_indices().into_iter().filter(|c| !c.is_zero()).collect();
    for (idx, cand) in candidates.iter().enumerate().skip(start) {
        if !cand.le(&nu_rem) {
            continue;
        }
        let max_mult = nu_rem.order() / cand.order();
        for kc in &k_choices {
            if kc.order() > max_mult {
                continue;
            }
            let Some(next_nu) = nu_rem.checked_sub(&scale(cand, kc.order())) else {
                continue;
            };
            let next_lam = lam_rem.checked_sub(kc).expect("kc <= lam_rem");
            k.push(kc.clone());
            l.push(cand.clone());
            dfs(candidates, idx + 1, next_nu, next_lam, k, l, out);
            k.pop();
            l.pop();
        }
    }
}

/// Exact left side of the single-variable identity:
/// Σ_λ |λ|! Σ_{P_s(ν,λ)} ν! Π_j (|l_j|!)^{|k_j|} / (k_j! (l_j!)^{|k_j|}),
/// summed over all λ on `d` coordinates with 1 ≤ |λ| ≤ |ν|.
pub fn fdb_identity_sum(nu: &MultiIndex, d: usize) -> Result<BigUint, MultiIndexError> {
    let n = nu.order();
    if n == 0 || d == 0 {
        return Err(MultiIndexError::BadFdbOrders { nu: n, lambda: 0 });
    }
    let nu_fact = Rational::from_integer(BigInt::from(nu.factorial()));
    let mut total = Rational::zero();
    let top = u32::try_from(n).expect("order fits in u32");
    for lambda in MultiIndex::all_up_to(d, top).into_iter().filter(|x| !x.is_zero()) {
        let lam_fact = Rational::from_integer(BigInt::from(factorial(lambda.order())));
        for part in enumerate_fdb(nu, &lambda)? {
            let mut term = nu_fact.clone();
            for (kj, lj) in part.k.iter().zip(&part.l) {
                let e = kj.order();
                let num = Pow::pow(factorial(lj.order()), e);
                let den = kj.factorial() * Pow::pow(lj.factorial(), e);
                term *= Rational::new(num.into(), den.into());
            }
            total += &lam_fact * term;
        }
    }
    if !total.is_integer() {
        return Err(MultiIndexError::BadFdbOrders { nu: n, lambda: 0 });
    }
    Ok(total.to_integer().to_biguint().expect("sum of positive terms"))
}

/// d (d+1)^{|ν|−1} |ν|!.
pub fn fdb_closed_form(nu_order: u64, d: usize) -> BigUint {
    assert!(nu_order >= 1);
    let d = BigUint::from(d);
    let e = u32::try_from(nu_order - 1).expect("small order");
    &d * Pow::pow(&d + BigUint::one(), e) * factorial(nu_order)
}

/// Checks (|λ|!)^ω Π (|l_j|!)^{ω|k_j|} ≤ (|ν|!)^ω for ω ∈ {0, 1/2, 1}.
///
/// Both sides are positive, so ω = 1/2 is compared after squaring.
pub fn nk_lemma_holds(nu: &MultiIndex, lambda: &MultiIndex, part: &FdbPartition) -> bool {
    let mut lhs = factorial(lambda.order());
    for (kj, lj) in part.k.iter().zip(&part.l) {
        lhs *= Pow::pow(factorial(lj.order()), kj.order());
    }
    let rhs = factorial(nu.order());
    // twice the exponent: 0, 1, 2
    (0u32..=2).all(|two_omega| {
        let l2 = Pow::pow(&lhs, two_omega);
        let r2 = Pow::pow(&rhs, two_omega);
        l2 <= r2
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mi(d: &[u32]) -> MultiIndex {
        MultiIndex::from_dense(d)
    }

    /// Independent brute force: all sequences of (k, l) pairs with bounded
    /// entries, filtered by the defining conditions.
    fn brute_force(nu: &MultiIndex, lambda: &MultiIndex, p: usize, d: usize) -> usize {
        let n = u32::try_from(nu.order()).unwrap();
        let ls: Vec<MultiIndex> = MultiIndex::all_up_to(p, n).into_iter().filter(|x| !x.is_zero()).collect();
        let ks: Vec<MultiIndex> = MultiIndex::all_up_to(d, n).into_iter().filter(|x| !x.is_zero()).collect();
        let mut count = 0;
        let mut stack: Vec<(Vec<MultiIndex>, Vec<MultiIndex>)> = vec![(vec![], vec![])];
        while let Some((k, l)) = stack.pop() {
            if !k.is_empty() {
                let cand = FdbPartition { k: k.clone(), l: l.clone() };
                if cand.is_valid_for(nu, lambda) {
                    count += 1;
                }
            }
            if k.len() as u64 == nu.order() {
                continue;
            }
            for kk in &ks {
                for ll in &ls {
                    let mut k2 = k.clone();
                    let mut l2 = l.clone();
                    k2.push(kk.clone());
                    l2.push(ll.clone());
                    stack.push((k2, l2));
                }
            }
        }
        count
    }

    #[test]
    fn single_coordinate_examples() {
        let p = enumerate_fdb(&mi(&[2]), &mi(&[1])).unwrap();
        assert_eq!(p, vec![FdbPartition { k: vec![mi(&[1])], l: vec![mi(&[2])] }]);
        let p = enumerate_fdb(&mi(&[2]), &mi(&[2])).unwrap();
        assert_eq!(p, vec![FdbPartition { k: vec![mi(&[2])], l: vec![mi(&[1])] }]);
        let p = enumerate_fdb(&mi(&[1]), &mi(&[1])).unwrap();
        assert_eq!(p, vec![FdbPartition { k: vec![mi(&[1])], l: vec![mi(&[1])] }]);
    }

    #[test]
    fn rejects_bad_orders() {
        assert!(enumerate_fdb(&mi(&[1]), &mi(&[2])).is_err());
        assert!(enumerate_fdb(&MultiIndex::zero(), &mi(&[1])).is_err());
        assert!(enumerate_fdb(&mi(&[1]), &MultiIndex::zero()).is_err());
    }

    #[test]
    fn matches_brute_force_on_small_cases() {
        for nu in MultiIndex::all_up_to(2, 3).into_iter().filter(|x| !x.is_zero()) {
            for lambda in MultiIndex::all_up_to(2, 3).into_iter().filter(|x| !x.is_zero()) {
                if lambda.order() > nu.order() {
                    continue;
                }
                let parts = enumerate_fdb(&nu, &lambda).unwrap();
                for part in &parts {
                    assert!(part.is_valid_for(&nu, &lambda));
                }
                for (i, a) in parts.iter().enumerate() {
                    assert!(!parts[i + 1..].contains(a), "duplicate partition");
                }
                assert_eq!(parts.len(), brute_force(&nu, &lambda, 2, 2), "nu={nu} lambda={lambda}");
            }
        }
    }

    #[test]
    fn identity_examples() {
        assert_eq!(fdb_identity_sum(&mi(&[2]), 1).unwrap(), BigUint::from(4u32));
        assert_eq!(fdb_identity_sum(&mi(&[1]), 2).unwrap(), BigUint::from(2u32));
        assert_eq!(fdb_identity_sum(&mi(&[2, 1]), 2).unwrap(), BigUint::from(108u32));
        assert_eq!(fdb_closed_form(3, 2), BigUint::from(108u32));
    }

    #[test]
    fn identity_holds_up_to_order_four() {
        for d in 1..=3 {
            for nu in MultiIndex::all_up_to(2, 4).into_iter().filter(|x| !x.is_zero()) {
                assert_eq!(fdb_identity_sum(&nu, d).unwrap(), fdb_closed_form(nu.order(), d));
            }
        }
    }

    #[test]
    fn nk_lemma_on_enumerated_partitions() {
        for nu in MultiIndex::all_up_to(2, 4).into_iter().filter(|x| !x.is_zero()) {
            for lambda in MultiIndex::all_up_to(2, 4).into_iter().filter(|x| !x.is_zero()) {
                if lambda.order() > nu.order() {
                    continue;
                }
                for part in enumerate_fdb(&nu, &lambda).unwrap() {
                    assert!(nk_lemma_holds(&nu, &lambda, &part));
                }
            }
        }
    }
}
