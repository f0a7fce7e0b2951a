//! Seeded Monte Carlo points.

use super::lattice::uniform_open_stream;

/// n i.i.d. uniform points in (−1/2, 1/2)^s from ChaCha8 stream 0 of `seed`,
/// drawn point by point, coordinate by coordinate.
pub fn mc_sample(s: usize, n: usize, seed: u64) -> Vec<Vec<f64>> {
    mc_stream(s, n, seed, 0)
}

/// Like [`mc_sample`] on an independent stream; replicate r of an MC study
/// uses stream r. Prefixes are stable: the first k points do not depend on n.
pub fn mc_stream(s: usize, n: usize, seed: u64, stream: u64) -> Vec<Vec<f64>> {
    if s == 0 {
        return vec![Vec::new(); n];
    }
    let flat = uniform_open_stream(s * n, seed, stream);
    flat.chunks(s).map(|c| c.iter().map(|u| u - 0.5).collect()).collect()
}
