//! Shared exact and floating-point kernels.

mod bessel;
mod cmatrix;
mod imat;
mod kloosterman;
mod quadrature;
mod sum;

pub use bessel::{bessel_j, bessel_j_bound, BESSEL_MAX_ARG, BESSEL_MAX_ORDER};
pub use cmatrix::ComplexMatrix;
pub use imat::IntMatrix2;
pub use kloosterman::{euler_phi, ext_gcd, kloosterman, mod_inverse};
pub use quadrature::{cube_quadrature, cube_quadrature_vec, QuadratureGrid};
pub use sum::{pairwise_sum, pairwise_sum_complex};

use num_complex::Complex64;
use std::f64::consts::TAU;

/// `e(z) = exp(2 pi i z)`.
#[inline]
pub fn e(z: Complex64) -> Complex64 {
    (Complex64::new(0.0, TAU) * z).exp()
}

/// `w^(-k)` evaluated in polar form.
#[inline]
pub fn pow_neg(w: Complex64, k: u32) -> Complex64 {
    let (r, theta) = w.to_polar();
    Complex64::from_polar(r.powi(-(k as i32)), -(k as f64) * theta)
}
