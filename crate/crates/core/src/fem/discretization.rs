//! Mesh plus everything that does not depend on the parameter: element
//! quadrature, basis tables, the global sparsity pattern and its symbolic LU.

use std::sync::{Arc, OnceLock};

use faer::sparse::linalg::solvers::SymbolicLu;
use faer::sparse::{SparseColMat, SymbolicSparseColMat, Triplet};
use serde::{Deserialize, Serialize};

use super::mesh::{build_mesh, Mesh};
use super::FemError;
use crate::quadrature::gauss_legendre;

/// How the pressure-jump penalty scales with the edge length h_E.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum StabScaling {
    /// β h_E per edge. Over-penalizes on fine meshes: the observed velocity
    /// rate drops to about 1/2.
    Edge,
    /// β h_E² per edge (β h_E times the jump integral over E).
    #[default]
    EdgeSquared,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscretizationOptions {
    /// Gauss points per direction on each element (2, 3 or 4).
    pub quad_order: usize,
    pub beta_stab: f64,
    pub stab_scaling: StabScaling,
}

impl Default for DiscretizationOptions {
    fn default() -> Self {
        Self { quad_order: 3, beta_stab: 0.25, stab_scaling: StabScaling::EdgeSquared }
    }
}

/// Tensor Gauss rule on one element, local coordinates in [0, 1]².
#[derive(Clone, Debug, PartialEq)]
pub struct QuadRule2D {
    pub points: Vec<[f64; 2]>,
    /// Weights scaled to the element area.
    pub weights: Vec<f64>,
}

impl QuadRule2D {
    pub fn tensor_gauss(order: usize, h: f64) -> Self {
        let (x, w) = gauss_legendre(order).mapped(0.0, 1.0);
        let mut points = Vec::with_capacity(order * order);
        let mut weights = Vec::with_capacity(order * order);
        for (b, wb) in x.iter().zip(&w) {
            for (a, wa) in x.iter().zip(&w) {
                points.push([*a, *b]);
                weights.push(wa * wb * h * h);
            }
        }
        Self { points, weights }
    }
}

/// Q1 shape functions on [0, 1]² in counter-clockwise node order.
pub fn q1_values(p: [f64; 2]) -> [f64; 4] {
    let [s, t] = p;
    [(1.0 - s) * (1.0 - t), s * (1.0 - t), s * t, (1.0 - s) * t]
}

/// Local-coordinate gradients of the Q1 shape functions.
pub fn q1_local_gradients(p: [f64; 2]) -> [[f64; 2]; 4] {
    let [s, t] = p;
    [[-(1.0 - t), -(1.0 - s)], [1.0 - t, -s], [t, s], [-t, 1.0 - s]]
}

/// Sentinel for "no entry" in position tables.
pub(crate) const NONE: u32 = u32::MAX;

pub struct Discretization {
    pub mesh: Mesh,
    pub options: DiscretizationOptions,
    pub quad: QuadRule2D,
    /// Shape values at each quadrature point.
    pub(crate) basis: Vec<[f64; 4]>,
    /// Reference-square gradients (already divided by h) at each quadrature point.
    pub(crate) grads: Vec<[[f64; 2]; 4]>,
    pub(crate) symbolic: SymbolicSparseColMat<usize>,
    /// [e][c][a][b] position of velocity entry (row dof(c,a), col dof(c,b)).
    pub(crate) vel_pos: Vec<u32>,
    /// [e][c][a] positions of (p_e, dof(c,a)) and (dof(c,a), p_e).
    pub(crate) div_pos: Vec<(u32, u32)>,
    /// Per interior edge: (k,k), (l,l), (k,l), (l,k).
    pub(crate) stab_pos: Vec<[u32; 4]>,
    /// Per element: (p_e, λ) and (λ, p_e).
    pub(crate) mult_pos: Vec<(u32, u32)>,
    /// Pattern without the multiplier row and column; the dense border makes
    /// partial-pivoting LU fill badly, so it is eliminated by a bordered solve.
    pub(crate) inner: SymbolicSparseColMat<usize>,
    /// Position in the full value array of every inner entry.
    pub(crate) inner_src: Vec<u32>,
    /// Inner position of the first pressure's diagonal (the pin).
    pub(crate) pin_pos: usize,
    lu_symbolic: OnceLock<SymbolicLu<usize>>,
}

impl std::fmt::Debug for Discretization {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Discretization")
            .field("m", &self.mesh.m)
            .field("options", &self.options)
            .field("unknowns", &self.n_unknowns())
            .finish()
    }
}

impl Discretization {
    pub fn new(m: usize, options: DiscretizationOptions) -> Result<Arc<Self>, FemError> {
        if !(2..=4).contains(&options.quad_order) {
            return Err(FemError::BadOption(format!("quadrature order {} not in 2..=4", options.quad_order)));
        }
        if !(options.beta_stab > 0.0 && options.beta_stab.is_finite()) {
            return Err(FemError::BadOption(format!("stabilization parameter {} must be positive", options.beta_stab)));
        }
        let mesh = build_mesh(m)?;
        let quad = QuadRule2D::tensor_gauss(options.quad_order, mesh.h);
        let basis = quad.points.iter().map(|&p| q1_values(p)).collect();
        let grads = quad
            .points
            .iter()
            .map(|&p| {
                let g = q1_local_gradients(p);
                g.map(|v| [v[0] / mesh.h, v[1] / mesh.h])
            })
            .collect();

        let ni = mesh.n_interior;
        let ne = mesh.n_elements();
        let n = 2 * ni + ne + 1;
        let p_dof = |e: usize| 2 * ni + e;
        let lambda = 2 * ni + ne;
        let vel_dof = |c: usize, node: usize| mesh.interior_index[node].map(|i| c * ni + i);

        let mut triplets = Vec::new();
        for nodes in &mesh.elements {
            for c in 0..2 {
                for &a in nodes {
                    let Some(r) = vel_dof(c, a) else { continue };
                    for &b in nodes {
                        if let Some(col) = vel_dof(c, b) {
                            triplets.push(Triplet::new(r, col, 1.0));
                        }
                    }
                }
            }
        }
        for (e, nodes) in mesh.elements.iter().enumerate() {
            for c in 0..2 {
                for &a in nodes {
                    if let Some(d) = vel_dof(c, a) {
                        triplets.push(Triplet::new(p_dof(e), d, 1.0));
                        triplets.push(Triplet::new(d, p_dof(e), 1.0));
                    }
                }
            }
            triplets.push(Triplet::new(p_dof(e), lambda, 1.0));
            triplets.push(Triplet::new(lambda, p_dof(e), 1.0));
            triplets.push(Triplet::new(p_dof(e), p_dof(e), 1.0));
        }
        for edge in &mesh.interior_edges {
            let [k, l] = edge.elements;
            triplets.push(Triplet::new(p_dof(k), p_dof(l), 1.0));
            triplets.push(Triplet::new(p_dof(l), p_dof(k), 1.0));
        }
        let pattern = SparseColMat::<usize, f64>::try_new_from_triplets(n, n, &triplets)
            .map_err(|e| FemError::Pattern(format!("{e:?}")))?;
        let symbolic = pattern.symbolic().to_owned().map_err(|e| FemError::Pattern(format!("{e:?}")))?;

        let col_ptr = symbolic.col_ptr();
        let row_idx = symbolic.row_idx();
        let pos = |r: usize, c: usize| -> u32 {
            let slice = &row_idx[col_ptr[c]..col_ptr[c + 1]];
            let k = slice.binary_search(&r).expect("entry present in pattern");
            u32::try_from(col_ptr[c] + k).expect("nnz fits in u32")
        };

        let mut vel_pos = vec![NONE; ne * 2 * 16];
        let mut div_pos = vec![(NONE, NONE); ne * 2 * 4];
        let mut mult_pos = Vec::with_capacity(ne);
        for (e, nodes) in mesh.elements.iter().enumerate() {
            for c in 0..2 {
                for (la, &a) in nodes.iter().enumerate() {
                    let Some(r) = vel_dof(c, a) else { continue };
                    div_pos[(e * 2 + c) * 4 + la] = (pos(p_dof(e), r), pos(r, p_dof(e)));
                    for (lb, &b) in nodes.iter().enumerate() {
                        if let Some(col) = vel_dof(c, b) {
                            vel_pos[((e * 2 + c) * 4 + la) * 4 + lb] = pos(r, col);
                        }
                    }
                }
            }
            mult_pos.push((pos(p_dof(e), lambda), pos(lambda, p_dof(e))));
        }
        let stab_pos = mesh
            .interior_edges
            .iter()
            .map(|edge| {
                let [k, l] = edge.elements;
                let (pk, pl) = (p_dof(k), p_dof(l));
                [pos(pk, pk), pos(pl, pl), pos(pk, pl), pos(pl, pk)]
            })
            .collect();

        let mut inner_triplets = Vec::with_capacity(row_idx.len());
        let mut inner_src = Vec::with_capacity(row_idx.len());
        for c in 0..lambda {
            for k in col_ptr[c]..col_ptr[c + 1] {
                if row_idx[k] != lambda {
                    inner_triplets.push(Triplet::new(row_idx[k], c, 1.0));
                    inner_src.push(u32::try_from(k).expect("nnz fits in u32"));
                }
            }
        }
        let inner = SparseColMat::<usize, f64>::try_new_from_triplets(lambda, lambda, &inner_triplets)
            .map_err(|e| FemError::Pattern(format!("{e:?}")))?
            .symbolic()
            .to_owned()
            .map_err(|e| FemError::Pattern(format!("{e:?}")))?;
        let p0 = p_dof(0);
        let pin_pos = {
            let (cp, ri) = (inner.col_ptr(), inner.row_idx());
            cp[p0] + ri[cp[p0]..cp[p0 + 1]].binary_search(&p0).expect("pressure diagonal present")
        };

        Ok(Arc::new(Self {
            mesh,
            options,
            quad,
            basis,
            grads,
            symbolic,
            vel_pos,
            div_pos,
            stab_pos,
            mult_pos,
            inner,
            inner_src,
            pin_pos,
            lu_symbolic: OnceLock::new(),
        }))
    }

    pub fn n_unknowns(&self) -> usize {
        2 * self.mesh.n_interior + self.mesh.n_elements() + 1
    }

    pub fn nnz(&self) -> usize {
        self.symbolic.row_idx().len()
    }

    pub fn pressure_offset(&self) -> usize {
        2 * self.mesh.n_interior
    }

    pub fn multiplier_index(&self) -> usize {
        self.n_unknowns() - 1
    }

    /// Global row/column of velocity component `c` at `node`.
    pub fn velocity_dof(&self, c: usize, node: usize) -> Option<usize> {
        self.mesh.interior_index[node].map(|i| c * self.mesh.n_interior + i)
    }

    /// Penalty weight of one interior edge.
    pub fn edge_penalty(&self, length: f64) -> f64 {
        match self.options.stab_scaling {
            StabScaling::Edge => self.options.beta_stab * length,
            StabScaling::EdgeSquared => self.options.beta_stab * length * length,
        }
    }

    pub(crate) fn lu_symbolic(&self) -> Result<&SymbolicLu<usize>, FemError> {
        if let Some(s) = self.lu_symbolic.get() {
            return Ok(s);
        }
        let s = SymbolicLu::try_new(self.inner.as_ref()).map_err(|e| FemError::Factorization(format!("{e:?}")))?;
        Ok(self.lu_symbolic.get_or_init(|| s))
    }
}
