//! Randomly shifted rank-1 lattice rules with power-of-two embedding.
//!
//! A rule with generating vector z and n = 2^L points contains the rules with
//! 2^ℓ points for every ℓ ≤ L: frac(i z / 2^ℓ) = frac(i 2^{L−ℓ} z / n). The
//! embedded enumeration visits the indices in bit-reversed order so that the
//! first 2^ℓ points of level L form exactly the point set of level ℓ.

use std::path::Path;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::QuadratureError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeRule {
    z: Vec<u64>,
    n: u64,
    max_level: u32,
}

impl LatticeRule {
    /// Checks that n is a power of two and every z_j is coprime to n (odd).
    pub fn new(z: Vec<u64>, n: u64) -> Result<Self, QuadratureError> {
        if !n.is_power_of_two() {
            return Err(QuadratureError::NotPowerOfTwo(n));
        }
        if z.is_empty() {
            return Err(QuadratureError::EmptyGeneratingVector);
        }
        if n > 1 {
            if let Some((j, &zj)) = z.iter().enumerate().find(|(_, &zj)| zj % 2 == 0) {
                return Err(QuadratureError::GcdViolation { coordinate: j + 1, z: zj, n });
            }
        }
        Ok(Self { z, n, max_level: n.trailing_zeros() })
    }

    pub fn z(&self) -> &[u64] {
        &self.z
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.z.len()
    }

    pub fn max_level(&self) -> u32 {
        self.max_level
    }

    /// Keeps the first `s` coordinates.
    pub fn truncated(&self, s: usize) -> Result<Self, QuadratureError> {
        if s == 0 || s > self.z.len() {
            return Err(QuadratureError::DimensionMismatch { expected: self.z.len(), got: s });
        }
        Self::new(self.z[..s].to_vec(), self.n)
    }

    fn check_level(&self, level: u32) -> Result<(), QuadratureError> {
        if level > self.max_level {
            Err(QuadratureError::LevelTooHigh { level, max: self.max_level })
        } else {
            Ok(())
        }
    }

    fn check_shift(&self, shift: &[f64]) -> Result<(), QuadratureError> {
        if shift.len() != self.z.len() {
            Err(QuadratureError::DimensionMismatch { expected: self.z.len(), got: shift.len() })
        } else {
            Ok(())
        }
    }
}

/// frac(k / n + Δ) − 1/2 with k already reduced mod n.
fn shifted_coordinate(k: u64, n: u64, delta: f64) -> f64 {
    let t = k as f64 / n as f64 + delta;
    (t - t.floor()) - 0.5
}

/// Points frac(i z / 2^level + Δ) − 1/2 for i = 1..2^level, in that order.
pub fn lattice_points(rule: &LatticeRule, shift: &[f64], level: u32) -> Result<Vec<Vec<f64>>, QuadratureError> {
    rule.check_level(level)?;
    rule.check_shift(shift)?;
    let nl = 1u64 << level;
    Ok((1..=nl)
        .map(|i| {
            rule.z
                .iter()
                .zip(shift)
                .map(|(&zj, &d)| shifted_coordinate(((i % nl) as u128 * zj as u128 % nl as u128) as u64, nl, d))
                .collect()
        })
        .collect())
}

/// Reverses the lowest `bits` bits of `k`.
pub fn bit_reverse(k: u64, bits: u32) -> u64 {
    if bits == 0 {
        0
    } else {
        k.reverse_bits() >> (64 - bits)
    }
}

/// All n points of the top level in embedded order: the k-th point uses the
/// lattice index bit_reverse(k). Every prefix of length 2^ℓ is the level-ℓ
/// point set, bit-identical to [`lattice_points`] at that level.
pub fn embedded_points(rule: &LatticeRule, shift: &[f64]) -> Result<Vec<Vec<f64>>, QuadratureError> {
    rule.check_shift(shift)?;
    let n = rule.n;
    let bits = rule.max_level;
    Ok((0..n)
        .map(|k| {
            let idx = bit_reverse(k, bits);
            rule.z
                .iter()
                .zip(shift)
                .map(|(&zj, &d)| shifted_coordinate((idx as u128 * zj as u128 % n as u128) as u64, n, d))
                .collect()
        })
        .collect())
}

/// Reads a generating vector: ASCII, one positive integer per line (blank lines
/// ignored), line j holding z_j.
pub fn load_generating_vector(path: &Path) -> Result<Vec<u64>, QuadratureError> {
    let text = std::fs::read_to_string(path).map_err(|e| QuadratureError::Io(format!("{}: {e}", path.display())))?;
    parse_generating_vector(&text)
}

pub fn parse_generating_vector(text: &str) -> Result<Vec<u64>, QuadratureError> {
    let mut z = Vec::new();
    for (line_no, line) in text.lines().enumerate() {
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        match t.parse::<u64>() {
            Ok(v) if v > 0 => z.push(v),
            _ => return Err(QuadratureError::Malformed { line: line_no + 1, content: t.to_string() }),
        }
    }
    if z.is_empty() {
        return Err(QuadratureError::EmptyGeneratingVector);
    }
    Ok(z)
}

/// R random shifts, uniform in (0, 1)^s.
///
/// Shift r is drawn from ChaCha8 stream r of the seed, so it does not depend
/// on how many shifts are requested.
#[derive(Clone, Debug, PartialEq)]
pub struct ShiftSet {
    pub seed: u64,
    pub shifts: Vec<Vec<f64>>,
}

impl ShiftSet {
    pub fn new(s: usize, r: usize, seed: u64) -> Self {
        let shifts = (0..r).map(|k| uniform_open_stream(s, seed, k as u64)).collect();
        Self { seed, shifts }
    }

    pub fn len(&self) -> usize {
        self.shifts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.shifts.is_empty()
    }
}

/// Uniform double in the open interval (0, 1): the midpoint of one of 2⁵²
/// equal cells, exactly representable.
pub(crate) fn open_unit(bits: u64) -> f64 {
    ((bits >> 12) as f64 + 0.5) / (1u64 << 52) as f64
}

pub(crate) fn uniform_open_stream(count: usize, seed: u64, stream: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    (0..count).map(|_| open_unit(rng.next_u64())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn direct_formula_examples() {
        let rule = LatticeRule::new(vec![1, 3], 4).unwrap();
        let pts = lattice_points(&rule, &[0.0, 0.0], 2).unwrap();
        assert_eq!(pts[0], vec![-0.25, 0.25]);
        assert_eq!(pts[3], vec![-0.5, -0.5]);
    }

    #[test]
    fn rejects_bad_rules() {
        assert!(matches!(LatticeRule::new(vec![1, 2], 8), Err(QuadratureError::GcdViolation { coordinate: 2, .. })));
        assert!(matches!(LatticeRule::new(vec![1], 12), Err(QuadratureError::NotPowerOfTwo(12))));
        let rule = LatticeRule::new(vec![1, 5], 8).unwrap();
        assert!(lattice_points(&rule, &[0.1, 0.2], 4).is_err());
        assert!(lattice_points(&rule, &[0.1], 2).is_err());
    }

    #[test]
    fn embedded_prefixes_are_lower_levels() {
        let z = vec![1, 433, 229, 15, 99, 1023];
        let rule = LatticeRule::new(z, 1 << 10).unwrap();
        let shift = ShiftSet::new(6, 1, 7).shifts.remove(0);
        let all = embedded_points(&rule, &shift).unwrap();
        for level in 0..=10u32 {
            let mut prefix = all[..1 << level].to_vec();
            let mut direct = lattice_points(&rule, &shift, level).unwrap();
            let key = |v: &Vec<f64>| v.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
            prefix.sort_by_key(key);
            direct.sort_by_key(key);
            assert_eq!(prefix, direct, "level {level}");
        }
    }

    #[test]
    fn points_lie_in_centered_cube() {
        let rule = LatticeRule::new(vec![1, 7, 13], 64).unwrap();
        for p in embedded_points(&rule, &[0.999, 0.5, 1e-9]).unwrap() {
            assert!(p.iter().all(|&x| (-0.5..0.5).contains(&x)));
        }
    }

    #[test]
    fn parse_generating_vector_files() {
        assert_eq!(parse_generating_vector("1\n3\n").unwrap(), vec![1, 3]);
        assert!(matches!(parse_generating_vector("1\nx\n"), Err(QuadratureError::Malformed { line: 2, .. })));
        assert!(parse_generating_vector("\n\n").is_err());
        let z = parse_generating_vector("1\n4\n").unwrap();
        assert!(LatticeRule::new(z, 16).is_err());

        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("z.txt");
        std::fs::write(&p, "1\n3\n").unwrap();
        let rule = LatticeRule::new(load_generating_vector(&p).unwrap(), 4).unwrap();
        assert_eq!(rule.z(), &[1, 3]);
        assert!(load_generating_vector(&dir.path().join("missing")).is_err());
    }

    #[test]
    fn shifts_are_reproducible_and_independent_of_count() {
        let a = ShiftSet::new(5, 3, 42);
        let b = ShiftSet::new(5, 8, 42);
        assert_eq!(a.shifts[..], b.shifts[..3]);
        assert_ne!(ShiftSet::new(5, 1, 43).shifts[0], a.shifts[0]);
        assert!(b.shifts.iter().flatten().all(|&x| x > 0.0 && x < 1.0));
        assert_eq!(open_unit(0), 0.5 / (1u64 << 52) as f64);
        assert!(open_unit(u64::MAX) < 1.0);
    }
}
