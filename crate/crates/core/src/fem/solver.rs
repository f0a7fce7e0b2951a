//! Direct solve of one saddle-point system and the Picard iteration.

use std::sync::Arc;

use faer::linalg::solvers::Solve;
use faer::sparse::linalg::solvers::Lu;
use faer::sparse::SparseColMatRef;
use faer::Mat;

use super::assembly::{assemble, MixedSystem};
use super::discretization::Discretization;
use super::norms::norm_h;
use super::FemError;
use crate::geometry::PullbackFields;

/// Relative algebraic residual accepted after a direct solve.
pub const RESIDUAL_TOL: f64 = 1e-10;
/// Default Picard tolerance on the H-norm increment.
pub const DEFAULT_PICARD_TOL: f64 = 1e-7;
pub const DEFAULT_MAX_ITER: usize = 50;

/// Velocity/pressure pair on the reference mesh.
#[derive(Clone, Debug, PartialEq)]
pub struct MixedSolution {
    /// Nodal velocity, component-major, 2(m+1)² entries, zero on the boundary.
    pub u: Vec<f64>,
    /// Element pressures with zero mean.
    pub p: Vec<f64>,
    /// H-norm increments ‖u_{n+1} − u_n‖_H of the Picard iteration.
    pub increments: Vec<f64>,
    /// Number of linear solves performed.
    pub iterations: usize,
}

impl MixedSolution {
    /// Successive increment ratios ‖u_{n+2} − u_{n+1}‖ / ‖u_{n+1} − u_n‖.
    pub fn contraction_ratios(&self) -> Vec<f64> {
        self.increments.windows(2).map(|w| w[1] / w[0]).collect()
    }
}

fn relative_residual(sys: &MixedSystem, x: &[f64]) -> f64 {
    let ax = sys.apply(x);
    let bn = sys.rhs.iter().map(|v| v * v).sum::<f64>().sqrt();
    let rn = ax.iter().zip(&sys.rhs).map(|(a, b)| (b - a) * (b - a)).sum::<f64>().sqrt();
    if bn == 0.0 {
        rn
    } else {
        rn / bn
    }
}

/// Solves the bordered system by factoring the inner block A₁ = A₀ + δ e₀e₀ᵀ
/// (A₀ without the multiplier, first pressure pinned) and correcting for the
/// pin and the mean-value border with two extra right-hand sides.
fn bordered_solve(sys: &MixedSystem, lu: &Lu<usize, f64>, delta: f64, b: &[f64]) -> Vec<f64> {
    let disc = &sys.disc;
    let n = disc.n_unknowns() - 1;
    let p0 = disc.pressure_offset();
    let area = disc.mesh.element_area();
    let mut rhs = Mat::from_fn(n, 3, |i, j| match j {
        0 => b[i],
        1 => {
            if i >= p0 {
                area
            } else {
                0.0
            }
        }
        _ => f64::from(u8::from(i == p0)),
    });
    lu.solve_in_place(rhs.as_mut());
    let border = |j: usize| (p0..n).map(|i| area * rhs[(i, j)]).sum::<f64>();
    let (ez, ewe, ewu) = (border(0), border(1), border(2));
    let (uz, uwe, uwu) = (rhs[(p0, 0)], rhs[(p0, 1)], rhs[(p0, 2)]);
    // [eᵀw_e  −δ eᵀw_u; uᵀw_e  1 − δ uᵀw_u] [λ; s] = [eᵀz − r; uᵀz]
    let r = b[n];
    let (a11, a12, a21, a22) = (ewe, -delta * ewu, uwe, 1.0 - delta * uwu);
    let det = a11 * a22 - a12 * a21;
    let lambda = ((ez - r) * a22 - a12 * uz) / det;
    let s = (a11 * uz - a21 * (ez - r)) / det;
    let mut x: Vec<f64> = (0..n).map(|i| rhs[(i, 0)] - lambda * rhs[(i, 1)] + delta * s * rhs[(i, 2)]).collect();
    x.push(lambda);
    x
}

/// Raw solution vector of the assembled system.
pub fn solve_system(sys: &MixedSystem) -> Result<Vec<f64>, FemError> {
    let disc = &sys.disc;
    let n = disc.n_unknowns();
    if sys.rhs.iter().all(|&v| v == 0.0) {
        return Ok(vec![0.0; n]);
    }
    let delta = disc.mesh.element_area();
    let mut inner_vals: Vec<f64> = disc.inner_src.iter().map(|&k| sys.vals[k as usize]).collect();
    inner_vals[disc.pin_pos] += delta;
    let symbolic = disc.lu_symbolic()?.clone();
    let mat = SparseColMatRef::new(disc.inner.as_ref(), &inner_vals);
    let lu = Lu::try_new_with_symbolic(symbolic, mat)
        .map_err(|e| FemError::Factorization(format!("m = {}, y = {:?}: {e:?}", disc.mesh.m, sys.y)))?;
    let mut x = bordered_solve(sys, &lu, delta, &sys.rhs);
    let mut res = relative_residual(sys, &x);
    if !(res <= RESIDUAL_TOL) {
        // one step of iterative refinement
        let ax = sys.apply(&x);
        let r: Vec<f64> = sys.rhs.iter().zip(&ax).map(|(b, a)| b - a).collect();
        let dx = bordered_solve(sys, &lu, delta, &r);
        x.iter_mut().zip(&dx).for_each(|(xi, d)| *xi += d);
        res = relative_residual(sys, &x);
    }
    if !(res <= RESIDUAL_TOL) {
        return Err(FemError::Residual { m: disc.mesh.m, residual: res });
    }
    Ok(x)
}

/// Scatters interior velocity dofs to a full nodal vector and extracts pressures.
pub fn unpack(disc: &Discretization, x: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let mesh = &disc.mesh;
    let nn = mesh.n_nodes();
    let ni = mesh.n_interior;
    let mut u = vec![0.0; 2 * nn];
    for (node, idx) in mesh.interior_index.iter().enumerate() {
        if let Some(i) = idx {
            u[node] = x[*i];
            u[nn + node] = x[ni + *i];
        }
    }
    let p0 = disc.pressure_offset();
    let p = x[p0..p0 + mesh.n_elements()].to_vec();
    (u, p)
}

/// One linear solve of the assembled system.
pub fn solve_linear(sys: &MixedSystem) -> Result<MixedSolution, FemError> {
    let x = solve_system(sys)?;
    let (u, p) = unpack(&sys.disc, &x);
    Ok(MixedSolution { u, p, increments: Vec::new(), iterations: 1 })
}

/// Picard iteration started from the Stokes solution, stopped once the
/// H-norm increment is at most `tol`.
pub fn solve_ns(
    disc: &Arc<Discretization>,
    fields: &PullbackFields,
    y: &[f64],
    tol: f64,
    max_iter: usize,
) -> Result<MixedSolution, FemError> {
    if !(tol > 0.0) {
        return Err(FemError::BadOption(format!("Picard tolerance {tol} must be positive")));
    }
    let mut sys = assemble(disc, fields, y, None)?;
    let mut sol = solve_linear(&sys)?;
    if !fields.convection {
        return Ok(sol);
    }
    let mesh = &disc.mesh;
    loop {
        if sol.iterations >= max_iter {
            return Err(FemError::NoConvergence { iterations: sol.iterations, increments: sol.increments });
        }
        sys.set_convecting_velocity(&sol.u)?;
        let next = solve_linear(&sys)?;
        let diff: Vec<f64> = next.u.iter().zip(&sol.u).map(|(a, b)| a - b).collect();
        let inc = norm_h(mesh, &diff);
        sol.increments.push(inc);
        sol.iterations += 1;
        sol.u = next.u;
        sol.p = next.p;
        if !inc.is_finite() {
            return Err(FemError::NoConvergence { iterations: sol.iterations, increments: sol.increments });
        }
        if inc <= tol {
            return Ok(sol);
        }
    }
}
