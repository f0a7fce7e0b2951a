//! Assembly of the pulled-back mixed system.
//!
//! Unknowns are ordered [u₁ interior | u₂ interior | p per element | λ] and the
//! matrix is
//!
//! ```text
//! [ F    −Bᵀ   0 ]
//! [ −B   −C    c ]
//! [ 0    cᵀ    0 ]
//! ```
//!
//! with F = K(A) + N(M u_prev), B_{e,(c,a)} = ∫_e Σ_k ∂_k φ_a B_{kc}, C the
//! pressure-jump penalty and c the element areas (zero-mean pressure).

use std::sync::Arc;

use super::discretization::{Discretization, NONE};
use super::FemError;
use crate::geometry::{Mat2, PullbackFields};

/// Assembled saddle-point system for one parameter and one convecting velocity.
#[derive(Clone, Debug)]
pub struct MixedSystem {
    pub disc: Arc<Discretization>,
    pub y: Vec<f64>,
    /// Matrix values without the convection term, in the pattern's CSC order.
    pub base_vals: Vec<f64>,
    /// Full matrix values.
    pub vals: Vec<f64>,
    pub rhs: Vec<f64>,
    convection: bool,
    /// M at every (element, quadrature point).
    m_qp: Vec<Mat2>,
}

/// Assembles everything except convection, then adds N(u_prev) when given.
///
/// `u_prev` is a full nodal velocity vector (component-major, 2(m+1)² entries).
pub fn assemble(
    disc: &Arc<Discretization>,
    fields: &PullbackFields,
    y: &[f64],
    u_prev: Option<&[f64]>,
) -> Result<MixedSystem, FemError> {
    let mesh = &disc.mesh;
    let nq = disc.quad.points.len();
    let ni = mesh.n_interior;
    let mut vals = vec![0.0; disc.nnz()];
    let mut rhs = vec![0.0; disc.n_unknowns()];
    let mut m_qp = Vec::with_capacity(if fields.convection { mesh.n_elements() * nq } else { 0 });
    let area = mesh.element_area();

    for (e, nodes) in mesh.elements.iter().enumerate() {
        let o = mesh.element_origin(e);
        let mut k_loc = [[0.0; 4]; 4];
        let mut b_loc = [[0.0; 4]; 2];
        let mut f_loc = [[0.0; 4]; 2];
        let mut g_loc = 0.0;
        for q in 0..nq {
            let p = disc.quad.points[q];
            let xhat = [o[0] + p[0] * mesh.h, o[1] + p[1] * mesh.h];
            let fp = fields.at(xhat, y);
            if !(fp.a.is_finite() && fp.b.is_finite() && fp.m.is_finite() && fp.j.is_finite())
                || !fp.f_j.iter().all(|v| v.is_finite())
            {
                return Err(FemError::NonFinite { element: e, point: q });
            }
            if fields.convection {
                m_qp.push(fp.m);
            }
            let w = disc.quad.weights[q];
            let g = &disc.grads[q];
            let phi = &disc.basis[q];
            let ag: [[f64; 2]; 4] = std::array::from_fn(|b| fp.a.apply(g[b]));
            for a in 0..4 {
                for b in 0..4 {
                    k_loc[a][b] += w * (g[a][0] * ag[b][0] + g[a][1] * ag[b][1]);
                }
                for c in 0..2 {
                    b_loc[c][a] += w * (g[a][0] * fp.b.get(0, c) + g[a][1] * fp.b.get(1, c));
                    f_loc[c][a] += w * fp.f_j[c] * phi[a];
                }
            }
            g_loc += w * fp.g_j;
        }
        for c in 0..2 {
            for (a, &na) in nodes.iter().enumerate() {
                let Some(i) = mesh.interior_index[na] else { continue };
                let row = c * ni + i;
                rhs[row] += f_loc[c][a];
                let (pv, vp) = disc.div_pos[(e * 2 + c) * 4 + a];
                vals[pv as usize] -= b_loc[c][a];
                vals[vp as usize] -= b_loc[c][a];
                for b in 0..4 {
                    let pos = disc.vel_pos[((e * 2 + c) * 4 + a) * 4 + b];
                    if pos != NONE {
                        vals[pos as usize] += k_loc[a][b];
                    }
                }
            }
        }
        rhs[disc.pressure_offset() + e] -= g_loc;
        let (pl, lp) = disc.mult_pos[e];
        vals[pl as usize] += area;
        vals[lp as usize] += area;
    }
    for (edge, pos) in mesh.interior_edges.iter().zip(&disc.stab_pos) {
        let pen = disc.edge_penalty(edge.length);
        vals[pos[0] as usize] -= pen;
        vals[pos[1] as usize] -= pen;
        vals[pos[2] as usize] += pen;
        vals[pos[3] as usize] += pen;
    }

    let mut sys = MixedSystem {
        disc: Arc::clone(disc),
        y: y.to_vec(),
        vals: vals.clone(),
        base_vals: vals,
        rhs,
        convection: fields.convection,
        m_qp,
    };
    if let Some(u) = u_prev {
        sys.set_convecting_velocity(u)?;
    }
    Ok(sys)
}

impl MixedSystem {
    /// Replaces the convection term by N(M u_prev); a no-op for Stokes fields.
    pub fn set_convecting_velocity(&mut self, u_prev: &[f64]) -> Result<(), FemError> {
        let disc = &self.disc;
        let mesh = &disc.mesh;
        let nn = mesh.n_nodes();
        if u_prev.len() != 2 * nn {
            return Err(FemError::SizeMismatch { expected: 2 * nn, got: u_prev.len() });
        }
        self.vals.copy_from_slice(&self.base_vals);
        if !self.convection {
            return Ok(());
        }
        let nq = disc.quad.points.len();
        for (e, nodes) in mesh.elements.iter().enumerate() {
            let u1: [f64; 4] = std::array::from_fn(|b| u_prev[nodes[b]]);
            let u2: [f64; 4] = std::array::from_fn(|b| u_prev[nn + nodes[b]]);
            let mut n_loc = [[0.0; 4]; 4];
            for q in 0..nq {
                let phi = &disc.basis[q];
                let g = &disc.grads[q];
                let uq = [
                    (0..4).map(|b| u1[b] * phi[b]).sum::<f64>(),
                    (0..4).map(|b| u2[b] * phi[b]).sum::<f64>(),
                ];
                let mu = self.m_qp[e * nq + q].apply(uq);
                let w = disc.quad.weights[q];
                for b in 0..4 {
                    let adv = w * (g[b][0] * mu[0] + g[b][1] * mu[1]);
                    for a in 0..4 {
                        n_loc[a][b] += phi[a] * adv;
                    }
                }
            }
            for c in 0..2 {
                for a in 0..4 {
                    for b in 0..4 {
                        let pos = disc.vel_pos[((e * 2 + c) * 4 + a) * 4 + b];
                        if pos != NONE {
                            self.vals[pos as usize] += n_loc[a][b];
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Dense copy of rows × cols of the given values (test and debugging aid).
    pub fn dense_block(&self, vals: &[f64], rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> Vec<Vec<f64>> {
        let sym = &self.disc.symbolic;
        let (cp, ri) = (sym.col_ptr(), sym.row_idx());
        let mut out = vec![vec![0.0; cols.len()]; rows.len()];
        for c in cols.clone() {
            for k in cp[c]..cp[c + 1] {
                if rows.contains(&ri[k]) {
                    out[ri[k] - rows.start][c - cols.start] = vals[k];
                }
            }
        }
        out
    }

    /// Velocity block F (both components, interior dofs).
    pub fn velocity_block(&self) -> Vec<Vec<f64>> {
        let n = 2 * self.disc.mesh.n_interior;
        self.dense_block(&self.vals, 0..n, 0..n)
    }

    /// Divergence block with entries ∫_e Σ_k ∂_k φ_a B_{kc} (elements × velocity dofs).
    pub fn divergence_block(&self) -> Vec<Vec<f64>> {
        let n = 2 * self.disc.mesh.n_interior;
        let p0 = self.disc.pressure_offset();
        let ne = self.disc.mesh.n_elements();
        let mut blk = self.dense_block(&self.vals, p0..p0 + ne, 0..n);
        blk.iter_mut().flatten().for_each(|v| *v = -*v);
        blk
    }

    /// Stabilization block C (elements × elements).
    pub fn stabilization_block(&self) -> Vec<Vec<f64>> {
        let p0 = self.disc.pressure_offset();
        let ne = self.disc.mesh.n_elements();
        let mut blk = self.dense_block(&self.vals, p0..p0 + ne, p0..p0 + ne);
        blk.iter_mut().flatten().for_each(|v| *v = -*v);
        blk
    }

    /// y = A x with the full matrix.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let sym = &self.disc.symbolic;
        let (cp, ri) = (sym.col_ptr(), sym.row_idx());
        let mut y = vec![0.0; x.len()];
        for (c, &xc) in x.iter().enumerate() {
            if xc == 0.0 {
                continue;
            }
            for k in cp[c]..cp[c + 1] {
                y[ri[k]] += self.vals[k] * xc;
            }
        }
        y
    }
}
