//! Uniform quadrilateral mesh of the unit square.

use super::FemError;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InteriorEdge {
    /// The two elements sharing the edge.
    pub elements: [usize; 2],
    pub length: f64,
}

/// m × m uniform grid with lexicographic node and element numbering.
///
/// Node (i, j) has index i + j(m + 1) and sits at (i h, j h). Element (i, j)
/// has index i + j m and nodes ordered counter-clockwise from its lower-left
/// corner.
#[derive(Clone, Debug, PartialEq)]
pub struct Mesh {
    pub m: usize,
    pub h: f64,
    pub coords: Vec<[f64; 2]>,
    pub elements: Vec<[usize; 4]>,
    pub boundary: Vec<bool>,
    pub interior_edges: Vec<InteriorEdge>,
    /// Interior velocity dof index of each node, `None` on the boundary.
    pub interior_index: Vec<Option<usize>>,
    pub n_interior: usize,
}

pub fn build_mesh(m: usize) -> Result<Mesh, FemError> {
    if m < 2 {
        return Err(FemError::MeshTooCoarse(m));
    }
    let h = 1.0 / m as f64;
    let np = m + 1;
    let node = |i: usize, j: usize| i + j * np;
    let mut coords = Vec::with_capacity(np * np);
    let mut boundary = Vec::with_capacity(np * np);
    let mut interior_index = Vec::with_capacity(np * np);
    let mut n_interior = 0;
    for j in 0..np {
        for i in 0..np {
            coords.push([i as f64 * h, j as f64 * h]);
            let b = i == 0 || j == 0 || i == m || j == m;
            boundary.push(b);
            if b {
                interior_index.push(None);
            } else {
                interior_index.push(Some(n_interior));
                n_interior += 1;
            }
        }
    }
    let mut elements = Vec::with_capacity(m * m);
    for j in 0..m {
        for i in 0..m {
            elements.push([node(i, j), node(i + 1, j), node(i + 1, j + 1), node(i, j + 1)]);
        }
    }
    let elem = |i: usize, j: usize| i + j * m;
    let mut interior_edges = Vec::with_capacity(2 * m * (m - 1));
    for j in 0..m {
        for i in 0..m - 1 {
            interior_edges.push(InteriorEdge { elements: [elem(i, j), elem(i + 1, j)], length: h });
        }
    }
    for j in 0..m - 1 {
        for i in 0..m {
            interior_edges.push(InteriorEdge { elements: [elem(i, j), elem(i, j + 1)], length: h });
        }
    }
    Ok(Mesh { m, h, coords, elements, boundary, interior_edges, interior_index, n_interior })
}

impl Mesh {
    pub fn n_nodes(&self) -> usize {
        self.coords.len()
    }

    pub fn n_elements(&self) -> usize {
        self.elements.len()
    }

    pub fn element_area(&self) -> f64 {
        self.h * self.h
    }

    /// Lower-left corner of element `e`.
    pub fn element_origin(&self, e: usize) -> [f64; 2] {
        self.coords[self.elements[e][0]]
    }

    /// Nodal interpolant of a vector field, boundary values forced to zero.
    pub fn interpolate_velocity<F: Fn([f64; 2]) -> [f64; 2]>(&self, f: F) -> Vec<f64> {
        let n = self.n_nodes();
        let mut u = vec![0.0; 2 * n];
        for (k, &x) in self.coords.iter().enumerate() {
            if !self.boundary[k] {
                let v = f(x);
                u[k] = v[0];
                u[n + k] = v[1];
            }
        }
        u
    }

    /// Element means of a scalar field by the given 1D rule on [0, 1] (tensorized).
    pub fn project_pressure<F: Fn([f64; 2]) -> f64>(&self, f: F, pts: &[f64], wts: &[f64]) -> Vec<f64> {
        (0..self.n_elements())
            .map(|e| {
                let o = self.element_origin(e);
                let mut acc = 0.0;
                for (a, wa) in pts.iter().zip(wts) {
                    for (b, wb) in pts.iter().zip(wts) {
                        acc += wa * wb * f([o[0] + a * self.h, o[1] + b * self.h]);
                    }
                }
                acc
            })
            .collect()
    }
}
