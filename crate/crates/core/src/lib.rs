//! Weak-measurement simulation on small labeled composite Hilbert spaces.
//!
//! The crate is `no_std` and only needs `alloc`. It provides dense states and
//! operators over labeled bases ([`qstate`]), pre/post-selected ensembles and
//! weak values ([`weakval`]), a Gaussian von Neumann pointer ([`vonneumann`]),
//! interferometer components ([`optics`]) and the built-in scenarios with
//! their consistency audits ([`scenarios`]).
#![no_std]
extern crate alloc;
#[cfg(test)]
extern crate std;

mod eigen;
mod error;
mod fft;
pub mod optics;
pub mod qstate;
pub mod scenarios;
pub mod vonneumann;
pub mod weakval;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use qstate::{
    apply, basis_ket, inner, normalize, projector_onto, superpose, tensor_op, tensor_state, Amplitude, CompositeBasis,
    LinearOperator, StateVector,
};
pub use weakval::{PrePostEnsemble, WeakValue};

/// Tolerance used by every exact-algebra check (projector, unitary, unit norm).
pub const EXACT_TOL: f64 = 1e-12;

/// Largest composite dimension the engine accepts.
pub const MAX_DIM: usize = 4096;
