//! Computation and verification engine for smooth Deligne cohomology on
//! 3-dimensional foliated dynamical systems.
//!
//! The crate builds Čech–Deligne cocycles over a good cover of a 2-torus,
//! integrates them over triangulated tori via a flag summation formula,
//! computes local symbols of meromorphic functions along closed orbits of
//! explicit model flows, and numerically verifies the resulting
//! Hilbert-type reciprocity law.

pub mod catmap;
pub mod cover;
pub mod deligne;
pub mod error;
pub mod forms;
pub mod functions;
pub mod lattice;
pub mod mesh;
pub mod models;
pub mod quad;
pub mod symbols;
pub mod verify;

pub use error::{Error, Result};

use num_complex::Complex64;

/// 2πi, the ubiquitous normalization constant.
pub const TWO_PI_I: Complex64 = Complex64::new(0.0, 2.0 * std::f64::consts::PI);

/// (2πi)^n.
pub fn two_pi_i_pow(n: u32) -> Complex64 {
    let mut acc = Complex64::new(1.0, 0.0);
    for _ in 0..n {
        acc *= TWO_PI_I;
    }
    acc
}
