//! Korobov-type generating vectors z = (1, a, a², …) mod n chosen by exhaustive
//! scan over odd a.

use super::QuadratureError;

/// Product weights γ_j = 1/j². A plumbing default, not tuned to any problem.
pub fn default_weights(s: usize) -> Vec<f64> {
    (1..=s).map(|j| 1.0 / (j * j) as f64).collect()
}

fn bernoulli2(x: f64) -> f64 {
    x * x - x + 1.0 / 6.0
}

/// Squared shift-averaged worst-case error in the weighted unanchored Sobolev
/// space of first order with product weights:
/// −1 + (1/n) Σ_k Π_j (1 + γ_j B₂({k z_j / n})).
pub fn worst_case_error_sq(z: &[u64], n: u64, weights: &[f64]) -> f64 {
    assert_eq!(z.len(), weights.len(), "one weight per coordinate");
    let nf = n as f64;
    let mut acc = 0.0;
    for k in 0..n {
        let mut prod = 1.0;
        for (&zj, &g) in z.iter().zip(weights) {
            let r = (k as u128 * zj as u128 % n as u128) as f64 / nf;
            prod *= 1.0 + g * bernoulli2(r);
        }
        acc += prod;
    }
    acc / nf - 1.0
}

pub fn korobov_vector(a: u64, n: u64, s: usize) -> Vec<u64> {
    let mut z = Vec::with_capacity(s);
    let mut v = 1 % n.max(1);
    for _ in 0..s {
        z.push(if n == 1 { 1 } else { v });
        v = (v as u128 * a as u128 % n as u128) as u64;
    }
    z
}

/// Scans a = 1, 3, 5, …, n − 1 and returns the Korobov vector with the
/// smallest worst-case error; near-ties (relative 1e−12) keep the smaller a.
pub fn korobov_search(n: u64, s: usize, weights: &[f64]) -> Result<Vec<u64>, QuadratureError> {
    if !n.is_power_of_two() {
        return Err(QuadratureError::NotPowerOfTwo(n));
    }
    if s == 0 || weights.len() != s {
        return Err(QuadratureError::DimensionMismatch { expected: s, got: weights.len() });
    }
    if n <= 2 {
        return Ok(vec![1; s]);
    }
    let mut best: Option<(f64, Vec<u64>)> = None;
    for a in (1..n).step_by(2) {
        let z = korobov_vector(a, n, s);
        let e = worst_case_error_sq(&z, n, weights);
        if !e.is_finite() {
            continue;
        }
        let better = match &best {
            None => true,
            Some((b, _)) => e < *b - 1e-12 * b.abs(),
        };
        if better {
            best = Some((e, z));
        }
    }
    best.map(|(_, z)| z).ok_or(QuadratureError::SearchExhausted { n, s })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Direct evaluation of the same error from its Fourier series
    /// −1 + (1/n) Σ_k Π_j (1 + γ_j Σ_{h≠0} e^{2πihx}/(2π²h²)), truncated.
    fn wce_fourier(z: &[u64], n: u64, w: &[f64]) -> f64 {
        let mut acc = 0.0;
        for k in 0..n {
            let mut prod = 1.0;
            for (&zj, &g) in z.iter().zip(w) {
                let x = (k * zj % n) as f64 / n as f64;
                let series: f64 = (1..200_000u64)
                    .map(|h| (2.0 * std::f64::consts::PI * h as f64 * x).cos() / (std::f64::consts::PI * std::f64::consts::PI * (h * h) as f64))
                    .sum();
                prod *= 1.0 + g * series;
            }
            acc += prod;
        }
        acc / n as f64 - 1.0
    }

    #[test]
    fn error_matches_fourier_series() {
        let w = default_weights(3);
        let z = korobov_vector(5, 16, 3);
        assert!((worst_case_error_sq(&z, 16, &w) - wce_fourier(&z, 16, &w)).abs() < 1e-5);
    }

    #[test]
    fn search_is_deterministic_and_valid() {
        let w = default_weights(2);
        let a = korobov_search(16, 2, &w).unwrap();
        assert_eq!(a, korobov_search(16, 2, &w).unwrap());
        assert_eq!(a[0], 1);
        assert!(a.iter().all(|z| z % 2 == 1));
        assert!(korobov_search(12, 2, &w).is_err());
        assert!(korobov_search(16, 3, &w).is_err());
    }

    #[test]
    fn search_beats_the_trivial_vector() {
        let w = default_weights(4);
        let z = korobov_search(256, 4, &w).unwrap();
        let trivial = korobov_vector(1, 256, 4);
        assert!(worst_case_error_sq(&z, 256, &w) < 0.5 * worst_case_error_sq(&trivial, 256, &w));
    }

    #[test]
    fn error_decays_with_n() {
        let w = default_weights(2);
        let e: Vec<f64> = [64u64, 256, 1024]
            .iter()
            .map(|&n| worst_case_error_sq(&korobov_search(n, 2, &w).unwrap(), n, &w).sqrt())
            .collect();
        assert!(e[1] < 0.5 * e[0] && e[2] < 0.5 * e[1], "{e:?}");
    }
}
