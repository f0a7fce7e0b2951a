//! Exhaustive exact checks of the multi-index inequalities.

use num_bigint::BigInt;
use num_traits::{One, Pow, Zero};

use super::{binom, factorial, falling_half, MultiIndex, MultiIndexError, Rational};

/// Largest |ν| accepted by [`inequality_suite`].
pub const MAX_SUITE_ORDER: u32 = 8;

/// Values of δ checked where δ appears, stored as 2(δ − 1).
const TWICE_DELTA_MINUS_ONE: [u32; 3] = [0, 1, 2];

#[derive(Clone, Debug, PartialEq)]
pub struct Counterexample {
    pub nu: MultiIndex,
    pub eta: Option<MultiIndex>,
    pub unit: Option<MultiIndex>,
    /// δ as a string ("1", "3/2", "2") when the inequality depends on it.
    pub delta: Option<String>,
    pub lhs: Rational,
    pub rhs: Rational,
}

#[derive(Clone, Debug, PartialEq)]
pub struct InequalityOutcome {
    pub name: &'static str,
    pub cases: usize,
    pub counterexample: Option<Counterexample>,
    /// Largest observed lhs/rhs ratio; 1 means the stated constant is attained.
    pub max_ratio: Rational,
    /// Smallest constant that would still make the inequality hold on the
    /// checked range (only for the sum inequalities).
    pub tight_constant: Option<Rational>,
}

impl InequalityOutcome {
    pub fn passed(&self) -> bool {
        self.counterexample.is_none()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteReport {
    pub max_total: u32,
    pub max_dims: usize,
    pub outcomes: Vec<InequalityOutcome>,
}

impl SuiteReport {
    pub fn all_passed(&self) -> bool {
        self.outcomes.iter().all(InequalityOutcome::passed)
    }

    pub fn first_failure(&self) -> Option<(&'static str, &Counterexample)> {
        self.outcomes
            .iter()
            .find_map(|o| o.counterexample.as_ref().map(|c| (o.name, c)))
    }
}

struct Tracker {
    name: &'static str,
    constant: Option<Rational>,
    cases: usize,
    counterexample: Option<Counterexample>,
    max_ratio: Rational,
}

impl Tracker {
    fn new(name: &'static str, constant: Option<Rational>) -> Self {
        Self { name, constant, cases: 0, counterexample: None, max_ratio: Rational::zero() }
    }

    fn record(&mut self, ce: Counterexample) {
        self.cases += 1;
        if !ce.rhs.is_zero() {
            let ratio = &ce.lhs / &ce.rhs;
            if ratio > self.max_ratio {
                self.max_ratio = ratio;
            }
        }
        if ce.lhs > ce.rhs && self.counterexample.is_none() {
            self.counterexample = Some(ce);
        }
    }

    fn finish(self) -> InequalityOutcome {
        let tight_constant = self.constant.map(|c| c * &self.max_ratio);
        InequalityOutcome {
            name: self.name,
            cases: self.cases,
            counterexample: self.counterexample,
            max_ratio: self.max_ratio,
            tight_constant,
        }
    }
}

fn int(v: impl Into<BigInt>) -> Rational {
    Rational::from_integer(v.into())
}

fn delta_label(twice_dm1: u32) -> String {
    match twice_dm1 {
        0 => "1".into(),
        1 => "3/2".into(),
        _ => "2".into(),
    }
}

/// Verifies every multi-index inequality exactly over all ν with
/// |ν| ≤ `max_total` supported on the first `max_dims` coordinates, all
/// admissible η, ℓ, unit indices e, and δ ∈ {1, 3/2, 2}.
pub fn inequality_suite(max_total: u32, max_dims: usize) -> Result<SuiteReport, MultiIndexError> {
    if max_total > MAX_SUITE_ORDER {
        return Err(MultiIndexError::SuiteTooLarge { max_total, limit: MAX_SUITE_ORDER });
    }
    let half: Vec<Rational> = (0..=u64::from(max_total) + 1).map(falling_half).collect();
    let h = |n: u64| half[usize::try_from(n).expect("small")].clone();
    let units: Vec<MultiIndex> = (1..=max_dims).map(|j| MultiIndex::unit(j).expect("j >= 1")).collect();

    let mut sandwich = Tracker::new("falling-half sandwich of n!", None);
    let mut split = Tracker::new("factorial split power", None);
    let mut conv_interior = Tracker::new("binomial convolution over 0<eta<nu", Some(int(2)));
    let mut conv_full = Tracker::new("binomial convolution over 0<=eta<=nu", Some(int(4)));
    let mut conv_nonzero = Tracker::new("binomial convolution over 0<eta<=nu", Some(int(3)));
    let mut shifted = Tracker::new("shifted convolution with unit index", Some(int(1)));
    let mut double_interior = Tracker::new("double convolution over 0<l<eta", Some(int(2)));
    let mut double_full = Tracker::new("double convolution over 0<l<=eta", Some(int(3)));

    for n in 0..=u64::from(max_total) {
        let f = int(factorial(n));
        let two_pow = int(BigInt::one() << (n + 1));
        let nu = MultiIndex::from_dense(&[u32::try_from(n).expect("small")]);
        sandwich.record(Counterexample { nu: nu.clone(), eta: None, unit: None, delta: None, lhs: h(n), rhs: f.clone() });
        sandwich.record(Counterexample { nu, eta: None, unit: None, delta: None, lhs: f, rhs: two_pow * h(n) });
    }

    for nu in MultiIndex::all_up_to(max_dims, max_total) {
        let n = nu.order();
        let subs = nu.sub_indices();
        let nu_fact = factorial(n);

        let mut s_interior = Rational::zero();
        let mut s_full = Rational::zero();
        let mut s_nonzero = Rational::zero();
        for eta in &subs {
            let rest = nu.checked_sub(eta).expect("eta <= nu");
            let term = int(binom(&nu, eta).expect("eta <= nu")) * h(eta.order()) * h(rest.order());
            s_full += &term;
            if !eta.is_zero() {
                s_nonzero += &term;
                if eta != &nu {
                    s_interior += &term;
                }
            }
            let prod = factorial(rest.order()) * factorial(eta.order());
            for t in TWICE_DELTA_MINUS_ONE {
                split.record(Counterexample {
                    nu: nu.clone(),
                    eta: Some(eta.clone()),
                    unit: None,
                    delta: Some(delta_label(t)),
                    lhs: int(Pow::pow(&prod, t)),
                    rhs: int(Pow::pow(&nu_fact, t)),
                });
            }
        }
        let base = h(n);
        let rec = |tr: &mut Tracker, lhs: Rational, c: i64, unit: Option<&MultiIndex>, base: &Rational| {
            tr.record(Counterexample {
                nu: nu.clone(),
                eta: None,
                unit: unit.cloned(),
                delta: None,
                lhs,
                rhs: int(c) * base,
            });
        };
        rec(&mut conv_interior, s_interior, 2, None, &base);
        rec(&mut conv_full, s_full, 4, None, &base);
        rec(&mut conv_nonzero, s_nonzero, 3, None, &base);

        for e in &units {
            let nue = nu.add(e);
            let m = nue.order();
            let mut s_shift = Rational::zero();
            let mut s_dbl_interior = Rational::zero();
            let mut s_dbl_full = Rational::zero();
            for eta in subs.iter().filter(|x| !x.is_zero()) {
                let c_nu_eta = int(binom(&nu, eta).expect("eta <= nu"));
                let tail = h(m - eta.order());
                s_shift += &c_nu_eta * h(eta.order()) * &tail;
                for l in eta.sub_indices().iter().filter(|x| !x.is_zero()) {
                    let rest = eta.checked_sub(l).expect("l <= eta");
                    let term = &c_nu_eta
                        * int(binom(eta, l).expect("l <= eta"))
                        * h(rest.order())
                        * h(l.order())
                        * &tail;
                    s_dbl_full += &term;
                    if l != eta {
                        s_dbl_interior += term;
                    }
                }
            }
            let base_e = h(m);
            rec(&mut shifted, s_shift, 1, Some(e), &base_e);
            rec(&mut double_interior, s_dbl_interior, 2, Some(e), &base_e);
            rec(&mut double_full, s_dbl_full, 3, Some(e), &base_e);
        }
    }

    let outcomes = vec![
        sandwich.finish(),
        split.finish(),
        conv_interior.finish(),
        conv_full.finish(),
        conv_nonzero.finish(),
        shifted.finish(),
        double_interior.finish(),
        double_full.finish(),
    ];
    Ok(SuiteReport { max_total, max_dims, outcomes })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_suite_passes() {
        let r = inequality_suite(2, 2).unwrap();
        assert_eq!(r.outcomes.len(), 8);
        assert!(r.all_passed(), "{:?}", r.first_failure());
    }

    #[test]
    fn interior_convolution_equality_at_two() {
        // C(2,1)·[1/2]_1·[1/2]_1 = 1/2 = 2·[1/2]_2
        let r = inequality_suite(2, 1).unwrap();
        let o = r.outcomes.iter().find(|o| o.name.contains("0<eta<nu")).unwrap();
        assert_eq!(o.max_ratio, Rational::one());
    }

    #[test]
    fn split_power_is_trivial_at_delta_one() {
        let r = inequality_suite(3, 2).unwrap();
        let o = &r.outcomes[1];
        assert!(o.passed());
        assert_eq!(o.max_ratio, Rational::one());
    }

    #[test]
    fn rejects_oversized_suite() {
        assert!(inequality_suite(9, 1).is_err());
    }
}
