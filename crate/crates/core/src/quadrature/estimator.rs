//! Randomized estimators and their relative root-mean-square error.

use std::time::Instant;

use rayon::prelude::*;

use super::lattice::{lattice_points, LatticeRule, ShiftSet};
use super::QuadratureError;

#[derive(Clone, Debug, PartialEq)]
pub struct EstimatorOutput {
    /// One estimate per shift (or per independent replicate).
    pub estimates: Vec<f64>,
    pub mean: f64,
    /// sqrt((1/R) Σ_r ((Q_r − I)/I)²).
    pub rmse: f64,
    pub n: usize,
    pub wall_time: f64,
}

impl EstimatorOutput {
    pub fn from_estimates(estimates: Vec<f64>, reference: f64, n: usize, wall_time: f64) -> Result<Self, QuadratureError> {
        let rmse = relative_rmse(&estimates, reference)?;
        let mean = estimates.iter().sum::<f64>() / estimates.len() as f64;
        Ok(Self { estimates, mean, rmse, n, wall_time })
    }
}

pub fn relative_rmse(estimates: &[f64], reference: f64) -> Result<f64, QuadratureError> {
    if reference == 0.0 || !reference.is_finite() {
        return Err(QuadratureError::BadReference(reference));
    }
    if estimates.is_empty() {
        return Err(QuadratureError::NoEstimates);
    }
    let ms = estimates.iter().map(|q| ((q - reference) / reference).powi(2)).sum::<f64>() / estimates.len() as f64;
    Ok(ms.sqrt())
}

/// Equal-weight mean of F over each point set. Points are evaluated
/// concurrently; sums run in index order.
pub fn sample_means<F, E>(f: &F, point_sets: &[Vec<Vec<f64>>]) -> Result<Vec<f64>, QuadratureError>
where
    F: Fn(&[f64]) -> Result<f64, E> + Sync,
    E: std::fmt::Display,
{
    point_sets
        .iter()
        .enumerate()
        .map(|(r, pts)| {
            let vals: Vec<f64> = pts
                .par_iter()
                .enumerate()
                .map(|(i, y)| f(y).map_err(|e| QuadratureError::Evaluator { shift: r, index: i, message: e.to_string() }))
                .collect::<Result<_, _>>()?;
            Ok(vals.iter().sum::<f64>() / vals.len() as f64)
        })
        .collect()
}

/// Shifted-lattice estimate at the given level for every shift, with its RMSE
/// against `reference`.
pub fn estimate<F, E>(
    f: &F,
    rule: &LatticeRule,
    level: u32,
    shifts: &ShiftSet,
    reference: f64,
) -> Result<EstimatorOutput, QuadratureError>
where
    F: Fn(&[f64]) -> Result<f64, E> + Sync,
    E: std::fmt::Display,
{
    if reference == 0.0 || !reference.is_finite() {
        return Err(QuadratureError::BadReference(reference));
    }
    let start = Instant::now();
    let sets = shifts
        .shifts
        .iter()
        .map(|d| lattice_points(rule, d, level))
        .collect::<Result<Vec<_>, _>>()?;
    let q = sample_means(f, &sets)?;
    EstimatorOutput::from_estimates(q, reference, 1 << level, start.elapsed().as_secs_f64())
}
