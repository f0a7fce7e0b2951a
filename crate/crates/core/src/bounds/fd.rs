//! Central finite differences in the parameter, as tensor products of 1D
//! second-order stencils.

use rayon::prelude::*;

use super::BoundsError;
use crate::multiindex::MultiIndex;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FdOptions {
    pub h: f64,
    /// Combine steps h and h/2 as (4 D(h/2) − D(h)) / 3.
    pub richardson: bool,
    /// Closed interval every coordinate of every stencil point must stay in.
    pub domain: (f64, f64),
}

impl Default for FdOptions {
    fn default() -> Self {
        Self { h: 1e-2, richardson: true, domain: (f64::NEG_INFINITY, f64::INFINITY) }
    }
}

/// (offset in units of h, weight) of the 1D central stencil, before dividing by h^k.
fn stencil_1d(k: u32) -> &'static [(i32, f64)] {
    match k {
        1 => &[(-1, -0.5), (1, 0.5)],
        2 => &[(-1, 1.0), (0, -2.0), (1, 1.0)],
        3 => &[(-2, -0.5), (-1, 1.0), (1, -1.0), (2, 0.5)],
        _ => unreachable!("order checked by caller"),
    }
}

/// Points and weights of the tensor stencil for ∂^ν at y0 with step h.
pub fn fd_stencil(y0: &[f64], nu: &MultiIndex, opts: &FdOptions) -> Result<Vec<(f64, Vec<f64>)>, BoundsError> {
    let order = nu.order();
    if !(1..=3).contains(&order) {
        return Err(BoundsError::StencilOrder(order));
    }
    if !(opts.h > 0.0 && opts.h.is_finite()) {
        return Err(BoundsError::NonPositive { name: "h", value: opts.h });
    }
    if nu.max_coord() > y0.len() {
        return Err(BoundsError::MissingRadius { coordinate: nu.max_coord(), available: y0.len() });
    }
    let mut pts = vec![(1.0, y0.to_vec())];
    for &(j, k) in nu.entries() {
        let mut next = Vec::with_capacity(pts.len() * 4);
        for (w, y) in &pts {
            for &(off, sw) in stencil_1d(k) {
                let mut p = y.clone();
                p[j - 1] += f64::from(off) * opts.h;
                next.push((w * sw / opts.h.powi(k as i32), p));
            }
        }
        pts = next;
    }
    let (lo, hi) = opts.domain;
    for (_, p) in &pts {
        if let Some((j, &v)) = p.iter().enumerate().find(|(_, &v)| !(lo..=hi).contains(&v)) {
            return Err(BoundsError::StencilOutsideDomain { coordinate: j + 1, value: v, lo, hi });
        }
    }
    Ok(pts)
}

fn combine(stencil: &[(f64, Vec<f64>)], values: &[Vec<f64>], len: usize) -> Vec<f64> {
    let mut d = vec![0.0; len];
    for ((w, _), v) in stencil.iter().zip(values) {
        d.iter_mut().zip(v).for_each(|(a, b)| *a += w * b);
    }
    d
}

fn single_step<F>(f: &F, y0: &[f64], nu: &MultiIndex, opts: &FdOptions) -> Result<Vec<f64>, BoundsError>
where
    F: Fn(&[f64]) -> Result<Vec<f64>, BoundsError> + Sync,
{
    let st = fd_stencil(y0, nu, opts)?;
    let values: Vec<Vec<f64>> = st.par_iter().map(|(_, p)| f(p)).collect::<Result<_, _>>()?;
    let len = values[0].len();
    if let Some(bad) = values.iter().find(|v| v.len() != len) {
        return Err(BoundsError::LengthMismatch { expected: len, got: bad.len() });
    }
    Ok(combine(&st, &values, len))
}

/// ∂^ν of a vector-valued map, evaluated component-wise. Stencil points are
/// evaluated concurrently; the combination runs in stencil order.
pub fn fd_derivative_vec<F>(f: &F, y0: &[f64], nu: &MultiIndex, opts: &FdOptions) -> Result<Vec<f64>, BoundsError>
where
    F: Fn(&[f64]) -> Result<Vec<f64>, BoundsError> + Sync,
{
    let coarse = single_step(f, y0, nu, opts)?;
    if !opts.richardson {
        return Ok(coarse);
    }
    let fine = single_step(f, y0, nu, &FdOptions { h: opts.h / 2.0, ..*opts })?;
    Ok(fine.iter().zip(&coarse).map(|(a, b)| (4.0 * a - b) / 3.0).collect())
}

pub fn fd_derivative<F>(f: &F, y0: &[f64], nu: &MultiIndex, opts: &FdOptions) -> Result<f64, BoundsError>
where
    F: Fn(&[f64]) -> Result<f64, BoundsError> + Sync,
{
    let v = fd_derivative_vec(&|y: &[f64]| f(y).map(|x| vec![x]), y0, nu, opts)?;
    Ok(v[0])
}
