//! Closed-form manufactured velocity/pressure pair and its forcing.

use std::f64::consts::PI;

use super::Mat2;

/// w = (sin²(πx₁) sin(2πx₂), −sin(2πx₁) sin²(πx₂)), q = sin(2πx₁) sin(2πx₂),
/// f = −Δw + ∇q.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ManufacturedData;

impl ManufacturedData {
    pub fn w(&self, x: [f64; 2]) -> [f64; 2] {
        let (s1, s2) = ((PI * x[0]).sin(), (PI * x[1]).sin());
        [s1 * s1 * (2.0 * PI * x[1]).sin(), -(2.0 * PI * x[0]).sin() * s2 * s2]
    }

    pub fn q(&self, x: [f64; 2]) -> f64 {
        (2.0 * PI * x[0]).sin() * (2.0 * PI * x[1]).sin()
    }

    /// Velocity gradient with entry (i, k) = ∂_k w_i.
    pub fn grad_w(&self, x: [f64; 2]) -> Mat2 {
        let (a, b) = (2.0 * PI * x[0], 2.0 * PI * x[1]);
        let (s1, s2) = ((PI * x[0]).sin(), (PI * x[1]).sin());
        Mat2::new(
            PI * a.sin() * b.sin(),
            2.0 * PI * s1 * s1 * b.cos(),
            -2.0 * PI * a.cos() * s2 * s2,
            -PI * a.sin() * b.sin(),
        )
    }

    pub fn div_w(&self, x: [f64; 2]) -> f64 {
        let g = self.grad_w(x);
        g.get(0, 0) + g.get(1, 1)
    }

    pub fn laplacian_w(&self, x: [f64; 2]) -> [f64; 2] {
        let (a, b) = (2.0 * PI * x[0], 2.0 * PI * x[1]);
        let (s1, s2) = ((PI * x[0]).sin(), (PI * x[1]).sin());
        let p2 = PI * PI;
        [
            2.0 * p2 * a.cos() * b.sin() - 4.0 * p2 * s1 * s1 * b.sin(),
            4.0 * p2 * a.sin() * s2 * s2 - 2.0 * p2 * a.sin() * b.cos(),
        ]
    }

    pub fn grad_q(&self, x: [f64; 2]) -> [f64; 2] {
        let (a, b) = (2.0 * PI * x[0], 2.0 * PI * x[1]);
        [2.0 * PI * a.cos() * b.sin(), 2.0 * PI * a.sin() * b.cos()]
    }

    pub fn f(&self, x: [f64; 2]) -> [f64; 2] {
        let lap = self.laplacian_w(x);
        let gq = self.grad_q(x);
        [-lap[0] + gq[0], -lap[1] + gq[1]]
    }

    /// Uniform bound on |f| (componentwise sum of the trigonometric amplitudes).
    pub fn forcing_sup_bound(&self) -> f64 {
        6.0 * PI * PI + 2.0 * PI
    }
}
