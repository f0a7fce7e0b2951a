//! Multi-indices and exact combinatorics.
//!
//! Everything here runs on big integers and rationals. Floating point is never
//! used, so equality cases of the inequalities are decided exactly.

mod fdb;
mod inequalities;

use std::fmt;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

pub use fdb::{enumerate_fdb, fdb_closed_form, fdb_identity_sum, nk_lemma_holds, FdbPartition};
pub use inequalities::{inequality_suite, Counterexample, InequalityOutcome, SuiteReport};

/// Exact rational number with big-integer numerator and denominator.
pub type Rational = BigRational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MultiIndexError {
    #[error("binomial needs eta <= nu componentwise, got eta = {eta}, nu = {nu}")]
    NotDominated { nu: MultiIndex, eta: MultiIndex },
    #[error("coordinates are 1-based, got coordinate 0")]
    ZeroCoordinate,
    #[error("Faa di Bruno enumeration needs 1 <= |lambda| <= |nu|, got |lambda| = {lambda}, |nu| = {nu}")]
    BadFdbOrders { nu: u64, lambda: u64 },
    #[error("inequality suite limited to |nu| <= {limit}, got {max_total}")]
    SuiteTooLarge { max_total: u32, limit: u32 },
}

/// Finitely supported multi-index stored in canonical sparse form.
///
/// Entries are `(coordinate, exponent)` pairs sorted by coordinate, with
/// 1-based coordinates and strictly positive exponents.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct MultiIndex {
    entries: Vec<(usize, u32)>,
}

impl MultiIndex {
    pub fn zero() -> Self {
        Self::default()
    }

    /// Unit multi-index `e_j` (1-based).
    pub fn unit(j: usize) -> Result<Self, MultiIndexError> {
        Self::from_sparse([(j, 1)])
    }

    /// Builds from a dense slice where `dense[0]` is coordinate 1.
    pub fn from_dense(dense: &[u32]) -> Self {
        let entries = dense
            .iter()
            .enumerate()
            .filter(|(_, &v)| v > 0)
            .map(|(i, &v)| (i + 1, v))
            .collect();
        Self { entries }
    }

    /// Builds from `(coordinate, exponent)` pairs; zero exponents are dropped
    /// and repeated coordinates are summed.
    pub fn from_sparse<I: IntoIterator<Item = (usize, u32)>>(pairs: I) -> Result<Self, MultiIndexError> {
        let mut entries: Vec<(usize, u32)> = Vec::new();
        for (j, v) in pairs {
            if j == 0 {
                return Err(MultiIndexError::ZeroCoordinate);
            }
            if v > 0 {
                entries.push((j, v));
            }
        }
        entries.sort_unstable_by_key(|e| e.0);
        let mut merged: Vec<(usize, u32)> = Vec::with_capacity(entries.len());
        for (j, v) in entries {
            match merged.last_mut() {
                Some(last) if last.0 == j => last.1 += v,
                _ => merged.push((j, v)),
            }
        }
        Ok(Self { entries: merged })
    }

    /// Exponent of coordinate `j` (1-based); 0 when absent.
    pub fn get(&self, j: usize) -> u32 {
        self.entries
            .binary_search_by_key(&j, |e| e.0)
            .map(|i| self.entries[i].1)
            .unwrap_or(0)
    }

    /// Nonzero entries in coordinate order.
    pub fn entries(&self) -> &[(usize, u32)] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// Largest coordinate with a nonzero exponent, 0 for the zero index.
    pub fn max_coord(&self) -> usize {
        self.entries.last().map_or(0, |e| e.0)
    }

    /// Dense copy with `d` entries; panics if the support exceeds `d`.
    pub fn to_dense(&self, d: usize) -> Vec<u32> {
        assert!(self.max_coord() <= d, "support exceeds requested dimension");
        let mut out = vec![0; d];
        for &(j, v) in &self.entries {
            out[j - 1] = v;
        }
        out
    }

    /// Total order |ν|.
    pub fn order(&self) -> u64 {
        self.entries.iter().map(|e| u64::from(e.1)).sum()
    }

    /// ν! = Π ν_j!.
    pub fn factorial(&self) -> BigUint {
        self.entries
            .iter()
            .fold(BigUint::one(), |acc, &(_, v)| acc * factorial(u64::from(v)))
    }

    /// Componentwise `self <= other`.
    pub fn le(&self, other: &Self) -> bool {
        self.entries.iter().all(|&(j, v)| v <= other.get(j))
    }

    /// Componentwise `self <= other` and `self != other`.
    pub fn lt(&self, other: &Self) -> bool {
        self != other && self.le(other)
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::from_sparse(self.entries.iter().chain(other.entries.iter()).copied())
            .expect("entries are already 1-based")
    }

    /// `self - other`, or `None` when some component would go negative.
    pub fn checked_sub(&self, other: &Self) -> Option<Self> {
        if !other.le(self) {
            return None;
        }
        let entries = self
            .entries
            .iter()
            .filter_map(|&(j, v)| {
                let r = v - other.get(j);
                (r > 0).then_some((j, r))
            })
            .collect();
        Some(Self { entries })
    }

    /// All η with 0 ≤ η ≤ self, in odometer order over the support.
    pub fn sub_indices(&self) -> Vec<Self> {
        let mut out = Vec::new();
        let mut counter = vec![0u32; self.entries.len()];
        loop {
            let entries = self
                .entries
                .iter()
                .zip(&counter)
                .filter(|(_, &c)| c > 0)
                .map(|(&(j, _), &c)| (j, c))
                .collect();
            out.push(Self { entries });
            let mut pos = 0;
            loop {
                if pos == counter.len() {
                    return out;
                }
                if counter[pos] < self.entries[pos].1 {
                    counter[pos] += 1;
                    break;
                }
                counter[pos] = 0;
                pos += 1;
            }
        }
    }

    /// All multi-indices supported on coordinates `1..=d` with |ν| = n.
    pub fn all_of_order(d: usize, n: u32) -> Vec<Self> {
        let mut out = Vec::new();
        let mut dense = vec![0u32; d];
        fill_compositions(&mut dense, 0, n, &mut out);
        out
    }

    /// All multi-indices supported on coordinates `1..=d` with |ν| ≤ n, by increasing order.
    pub fn all_up_to(d: usize, n: u32) -> Vec<Self> {
        (0..=n).flat_map(|k| Self::all_of_order(d, k)).collect()
    }
}

fn fill_compositions(dense: &mut [u32], pos: usize, remaining: u32, out: &mut Vec<MultiIndex>) {
    if dense.is_empty() {
        if remaining == 0 {
            out.push(MultiIndex::zero());
        }
        return;
    }
    if pos + 1 == dense.len() {
        dense[pos] = remaining;
        out.push(MultiIndex::from_dense(dense));
        dense[pos] = 0;
        return;
    }
    for v in (0..=remaining).rev() {
        dense[pos] = v;
        fill_compositions(dense, pos + 1, remaining - v, out);
    }
    dense[pos] = 0;
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let dense = self.to_dense(self.max_coord());
        write!(f, "(")?;
        for (i, v) in dense.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

/// n! as a big integer.
pub fn factorial(n: u64) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, k| acc * BigUint::from(k))
}

/// Ordinary binomial coefficient C(n, k); zero when k > n.
pub fn binom_scalar(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

/// Absolute falling factorial of one half: 1, 1/2, and 1/2 · Π_{k=2..n} |k − 3/2|.
pub fn falling_half(n: u64) -> Rational {
    if n == 0 {
        return Rational::one();
    }
    // Π_{k=2..n} (2k − 3)/2 times 1/2
    let num = (2..=n).fold(BigUint::one(), |acc, k| acc * BigUint::from(2 * k - 3));
    let den = BigUint::one() << n;
    Rational::new(num.into(), den.into())
}

/// Multi-index binomial Π_j C(ν_j, η_j).
pub fn binom(nu: &MultiIndex, eta: &MultiIndex) -> Result<BigUint, MultiIndexError> {
    if !eta.le(nu) {
        return Err(MultiIndexError::NotDominated { nu: nu.clone(), eta: eta.clone() });
    }
    Ok(nu
        .entries
        .iter()
        .fold(BigUint::one(), |acc, &(j, v)| acc * binom_scalar(u64::from(v), u64::from(eta.get(j)))))
}

/// The linear ordering ≺: smaller total order first, then the first differing
/// coordinate decides.
pub fn order_lt(l: &MultiIndex, nu: &MultiIndex) -> bool {
    let (ol, on) = (l.order(), nu.order());
    if ol != on {
        return ol < on;
    }
    let top = l.max_coord().max(nu.max_coord());
    for j in 1..=top {
        let (a, b) = (l.get(j), nu.get(j));
        if a != b {
            return a < b;
        }
    }
    false
}

/// [`order_lt`] as a [`std::cmp::Ordering`], handy for sorting.
pub fn order_cmp(l: &MultiIndex, nu: &MultiIndex) -> std::cmp::Ordering {
    if order_lt(l, nu) {
        std::cmp::Ordering::Less
    } else if order_lt(nu, l) {
        std::cmp::Ordering::Greater
    } else {
        std::cmp::Ordering::Equal
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mi(d: &[u32]) -> MultiIndex {
        MultiIndex::from_dense(d)
    }

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn falling_half_small_values() {
        assert_eq!(falling_half(0), q(1, 1));
        assert_eq!(falling_half(1), q(1, 2));
        assert_eq!(falling_half(2), q(1, 4));
        assert_eq!(falling_half(3), q(3, 8));
        // 1/2 · 1/2 · 3/2 · 5/2
        assert_eq!(falling_half(4), q(15, 16));
    }

    #[test]
    fn falling_half_sandwiches_factorial() {
        for n in 0..=30u64 {
            let f = Rational::from_integer(factorial(n).into());
            let h = falling_half(n);
            let two_pow = Rational::from_integer((BigUint::one() << (n + 1)).into());
            assert!(h <= f, "lower estimate fails at n={n}");
            assert!(f <= two_pow * h, "upper estimate fails at n={n}");
        }
        // equality case 3! = 2·2³·3/8
        assert_eq!(Rational::from_integer(6.into()), q(16, 1) * falling_half(3));
    }

    #[test]
    fn canonical_form_drops_zeros_and_merges() {
        let a = MultiIndex::from_sparse([(3, 1), (1, 0), (3, 2), (2, 1)]).unwrap();
        assert_eq!(a.entries(), &[(2, 1), (3, 3)]);
        assert_eq!(a, mi(&[0, 1, 3]));
        assert_eq!(mi(&[0, 0, 0]), MultiIndex::zero());
        assert!(MultiIndex::from_sparse([(0, 1)]).is_err());
        assert_eq!(a.to_string(), "(0,1,3)");
    }

    #[test]
    fn binomials() {
        assert_eq!(binom(&mi(&[2, 1]), &mi(&[1, 1])).unwrap(), BigUint::from(2u32));
        assert_eq!(binom(&mi(&[4, 0, 2]), &MultiIndex::zero()).unwrap(), BigUint::one());
        assert_eq!(binom(&mi(&[3]), &mi(&[2])).unwrap(), BigUint::from(3u32));
        assert!(binom(&mi(&[1]), &mi(&[2])).is_err());
        assert!(binom(&mi(&[1]), &mi(&[0, 1])).is_err());
    }

    #[test]
    fn ordering_examples() {
        assert!(order_lt(&mi(&[1, 0]), &mi(&[0, 2])));
        assert!(order_lt(&mi(&[1, 1]), &mi(&[2, 0])));
        assert!(!order_lt(&mi(&[2, 0]), &mi(&[1, 1])));
        let nu = mi(&[1, 2, 1]);
        assert!(!order_lt(&nu, &nu));
        assert!(order_lt(&mi(&[1, 1, 2]), &mi(&[1, 2, 1])));
    }

    #[test]
    fn ordering_is_strict_total_order_up_to_four() {
        let all = MultiIndex::all_up_to(3, 4);
        for a in &all {
            for b in &all {
                let ab = order_lt(a, b);
                let ba = order_lt(b, a);
                if a == b {
                    assert!(!ab && !ba);
                } else {
                    assert!(ab ^ ba, "not total/antisymmetric on {a} {b}");
                }
            }
        }
        for a in &all {
            for b in &all {
                if !order_lt(a, b) {
                    continue;
                }
                for c in &all {
                    if order_lt(b, c) {
                        assert!(order_lt(a, c), "not transitive on {a} {b} {c}");
                    }
                }
            }
        }
    }

    #[test]
    fn enumeration_counts() {
        // compositions of n into d parts: C(n+d-1, d-1)
        assert_eq!(MultiIndex::all_of_order(3, 4).len(), 15);
        assert_eq!(MultiIndex::all_up_to(2, 3).len(), 10);
        assert_eq!(mi(&[2, 0, 1]).sub_indices().len(), 6);
        let subs = mi(&[1, 1]).sub_indices();
        assert_eq!(subs, vec![mi(&[0, 0]), mi(&[1, 0]), mi(&[0, 1]), mi(&[1, 1])]);
    }

    #[test]
    fn arithmetic() {
        let a = mi(&[2, 0, 1]);
        let b = mi(&[1, 0, 1]);
        assert_eq!(a.checked_sub(&b), Some(mi(&[1])));
        assert_eq!(b.checked_sub(&a), None);
        assert_eq!(a.add(&b), mi(&[3, 0, 2]));
        assert_eq!(a.order(), 3);
        assert_eq!(a.factorial(), BigUint::from(2u32));
        assert!(b.lt(&a) && b.le(&a) && !a.lt(&a));
    }
}
