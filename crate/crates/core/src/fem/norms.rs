//! Discrete norms on the reference mesh.

use super::discretization::q1_local_gradients;
use super::mesh::Mesh;
use crate::quadrature::gauss_legendre;

/// Exact Q1 element stiffness on a square (independent of h in 2D).
const Q1_STIFFNESS: [[f64; 4]; 4] = [
    [4.0 / 6.0, -1.0 / 6.0, -2.0 / 6.0, -1.0 / 6.0],
    [-1.0 / 6.0, 4.0 / 6.0, -1.0 / 6.0, -2.0 / 6.0],
    [-2.0 / 6.0, -1.0 / 6.0, 4.0 / 6.0, -1.0 / 6.0],
    [-1.0 / 6.0, -2.0 / 6.0, -1.0 / 6.0, 4.0 / 6.0],
];

/// (Σ_{i,j} ‖∂_j u_i‖²_{L²})^{1/2} of a nodal Q1 velocity (component-major).
pub fn norm_h(mesh: &Mesh, u: &[f64]) -> f64 {
    let nn = mesh.n_nodes();
    assert_eq!(u.len(), 2 * nn, "velocity vector has the wrong length");
    let mut acc = 0.0;
    for nodes in &mesh.elements {
        for c in 0..2 {
            let v: [f64; 4] = std::array::from_fn(|a| u[c * nn + nodes[a]]);
            for a in 0..4 {
                for b in 0..4 {
                    acc += v[a] * Q1_STIFFNESS[a][b] * v[b];
                }
            }
        }
    }
    acc.max(0.0).sqrt()
}

/// L² norm of an element-wise constant pressure after removing its mean.
pub fn norm_l(mesh: &Mesh, p: &[f64]) -> f64 {
    assert_eq!(p.len(), mesh.n_elements(), "pressure vector has the wrong length");
    let area = mesh.element_area();
    let mean = p.iter().sum::<f64>() / p.len() as f64;
    (p.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() * area).sqrt()
}

/// ∫ p over the reference square.
pub fn pressure_integral(mesh: &Mesh, p: &[f64]) -> f64 {
    p.iter().sum::<f64>() * mesh.element_area()
}

/// ‖∇(u_h − u)‖ over the square by an `order`-point tensor Gauss rule per
/// element. `grad(x)[i][j]` is ∂_j u_i.
pub fn h_error<F: Fn([f64; 2]) -> [[f64; 2]; 2]>(mesh: &Mesh, u: &[f64], grad: F, order: usize) -> f64 {
    let nn = mesh.n_nodes();
    assert_eq!(u.len(), 2 * nn, "velocity vector has the wrong length");
    let (pts, wts) = gauss_legendre(order).mapped(0.0, 1.0);
    let area = mesh.element_area();
    let mut acc = 0.0;
    for (e, nodes) in mesh.elements.iter().enumerate() {
        let o = mesh.element_origin(e);
        for (t, wt) in pts.iter().zip(&wts) {
            for (s, ws) in pts.iter().zip(&wts) {
                let g = q1_local_gradients([*s, *t]);
                let exact = grad([o[0] + s * mesh.h, o[1] + t * mesh.h]);
                for c in 0..2 {
                    for j in 0..2 {
                        let uh: f64 = (0..4).map(|a| u[c * nn + nodes[a]] * g[a][j]).sum::<f64>() / mesh.h;
                        let d = uh - exact[c][j];
                        acc += ws * wt * area * d * d;
                    }
                }
            }
        }
    }
    acc.sqrt()
}

/// ‖(p_h − p̄_h) − (q − q̄)‖_{L²} for an element-wise constant p_h.
pub fn l_error<F: Fn([f64; 2]) -> f64>(mesh: &Mesh, p: &[f64], q: F, order: usize) -> f64 {
    assert_eq!(p.len(), mesh.n_elements(), "pressure vector has the wrong length");
    let (pts, wts) = gauss_legendre(order).mapped(0.0, 1.0);
    let area = mesh.element_area();
    let mut samples = Vec::with_capacity(p.len() * order * order);
    for e in 0..mesh.n_elements() {
        let o = mesh.element_origin(e);
        for (t, wt) in pts.iter().zip(&wts) {
            for (s, ws) in pts.iter().zip(&wts) {
                samples.push((e, ws * wt * area, q([o[0] + s * mesh.h, o[1] + t * mesh.h])));
            }
        }
    }
    let q_mean: f64 = samples.iter().map(|(_, w, v)| w * v).sum();
    let p_mean = pressure_integral(mesh, p);
    samples
        .iter()
        .map(|&(e, w, v)| {
            let d = (p[e] - p_mean) - (v - q_mean);
            w * d * d
        })
        .sum::<f64>()
        .sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::mesh::build_mesh;
    use std::f64::consts::PI;

    #[test]
    fn zero_and_constant() {
        let mesh = build_mesh(6).unwrap();
        assert_eq!(norm_h(&mesh, &vec![0.0; 2 * mesh.n_nodes()]), 0.0);
        assert!(norm_l(&mesh, &vec![3.7; mesh.n_elements()]) < 1e-15);
    }

    #[test]
    fn stiffness_matches_quadrature_of_gradients() {
        let (x, w) = gauss_legendre(2).mapped(0.0, 1.0);
        for a in 0..4 {
            for b in 0..4 {
                let mut acc = 0.0;
                for (s, ws) in x.iter().zip(&w) {
                    for (t, wt) in x.iter().zip(&w) {
                        let g = q1_local_gradients([*s, *t]);
                        acc += ws * wt * (g[a][0] * g[b][0] + g[a][1] * g[b][1]);
                    }
                }
                assert!((acc - Q1_STIFFNESS[a][b]).abs() < 1e-15);
            }
        }
    }

    /// Interpolant of u = (x₂ sin(πx₁) (1 − x₂), 0): its discrete H-norm is
    /// compared with an independent dense quadrature of the interpolant's
    /// piecewise-bilinear gradient.
    #[test]
    fn h_norm_against_dense_quadrature() {
        let mesh = build_mesh(8).unwrap();
        let f = |x: [f64; 2]| [x[1] * (PI * x[0]).sin() * (1.0 - x[1]), 0.0];
        let u = mesh.interpolate_velocity(f);
        let (pts, wts) = gauss_legendre(6).mapped(0.0, 1.0);
        let nn = mesh.n_nodes();
        let mut acc = 0.0;
        for nodes in &mesh.elements {
            let v: [f64; 4] = std::array::from_fn(|a| u[nodes[a]]);
            for (s, ws) in pts.iter().zip(&wts) {
                for (t, wt) in pts.iter().zip(&wts) {
                    let g = q1_local_gradients([*s, *t]);
                    let gx: f64 = (0..4).map(|a| v[a] * g[a][0]).sum::<f64>() / mesh.h;
                    let gy: f64 = (0..4).map(|a| v[a] * g[a][1]).sum::<f64>() / mesh.h;
                    acc += ws * wt * mesh.h * mesh.h * (gx * gx + gy * gy);
                }
            }
        }
        assert!(u[nn..].iter().all(|&v| v == 0.0));
        assert!((norm_h(&mesh, &u) - acc.sqrt()).abs() < 1e-13);
        // and it approaches the analytic norm: ∫∫ (π x₂(1−x₂) cos)² + (sin (1−2x₂))² = π²/60 + 1/6
        let fine = build_mesh(128).unwrap();
        let uf = fine.interpolate_velocity(f);
        let exact = (PI * PI / 60.0 + 1.0 / 6.0).sqrt();
        assert!((norm_h(&fine, &uf) - exact).abs() < 1e-3);
    }

    #[test]
    fn true_errors_of_an_interpolant() {
        let f = |x: [f64; 2]| [(PI * x[0]).sin() * (PI * x[1]).sin(), 0.0];
        let grad = |x: [f64; 2]| {
            let (s0, c0, s1, c1) = ((PI * x[0]).sin(), (PI * x[0]).cos(), (PI * x[1]).sin(), (PI * x[1]).cos());
            [[PI * c0 * s1, PI * s0 * c1], [0.0, 0.0]]
        };
        let errs: Vec<f64> = [8, 16, 32]
            .iter()
            .map(|&m| {
                let mesh = build_mesh(m).unwrap();
                h_error(&mesh, &mesh.interpolate_velocity(f), grad, 4)
            })
            .collect();
        // interpolation error in H¹ halves with h
        for w in errs.windows(2) {
            assert!((w[0] / w[1] - 2.0).abs() < 0.05, "{errs:?}");
        }
        let mesh = build_mesh(16).unwrap();
        let q = |x: [f64; 2]| x[0] + 5.0;
        let (pts, wts) = gauss_legendre(2).mapped(0.0, 1.0);
        let p = mesh.project_pressure(q, &pts, &wts);
        // piecewise constant best fit of x₀ leaves h/√12
        assert!((l_error(&mesh, &p, q, 4) - mesh.h / 12f64.sqrt()).abs() < 1e-12);
        assert!(l_error(&mesh, &vec![2.0; mesh.n_elements()], |_| -1.0, 2) < 1e-14);
    }
}
