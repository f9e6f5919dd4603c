//! Certification kernels for the sharpened Strichartz estimate of the wave
//! equation on `R^{1+5}` in the energy space.
//!
//! Everything here works on Penrose-transformed data, i.e. on coefficient
//! expansions in the hyperspherical harmonics `Y_{l,m}` of `S^5`:
//!
//! * [`specfun`]: Gegenbauer and normalized associated Legendre functions and
//!   the Gauss rule for the weight `(1 - t^2)^{3/2}`.
//! * [`harmonics`]: the index lattice `N(l)`, coefficient fields and the
//!   tridiagonal multiplication-by-`X_0` operator.
//! * [`energy`]: the energy inner product, the maximiser, its tangent space and
//!   the two orthogonality projections.
//! * [`quadform`]: the deficit quadratic form, assembled along two independent
//!   routes, and the rescaled coefficients used for dominance certificates.
//! * [`certify`]: exact diagonal-dominance certificates and spectral gap
//!   measurements.
//! * [`penrose`]: radial data, sphere-side quadrature of the `L^4` norm and the
//!   perturbative deficit experiments.
//!
//! The crate is `no_std` (it needs `alloc`); all file formats and the command
//! line live in the companion `strichartz-cli` crate.

#![no_std]
#![deny(rustdoc::broken_intra_doc_links)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod audit;
pub mod certify;
pub mod energy;
mod error;
pub mod harmonics;
pub mod interval;
pub mod linalg;
mod math;
pub mod penrose;
pub mod poly;
pub mod quadform;
pub mod specfun;

pub use error::{Error, Result};

/// Exact rationals used by the certificate layer.
pub use num_rational::BigRational;
