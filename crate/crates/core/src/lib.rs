//! Uncertainty quantification for steady incompressible Navier-Stokes flow on
//! randomly perturbed domains.

pub mod multiindex;
pub mod geometry;
pub mod fem;
pub mod quadrature;
pub mod bounds;
pub mod harness;
