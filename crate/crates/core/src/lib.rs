//! Geometric quantization of Bohr–Sommerfeld Legendrian loops on model
//! Kähler manifolds.
//!
//! The crate is split along the lines of the computation:
//!
//! - [`geometry`]: Hermitian/symplectic primitives on a tangent space `ℂ^d`.
//! - [`model`]: the Bargmann–Fock space and `ℂP¹` with `O(D)`, their circle
//!   bundles, Heisenberg charts and Szegő kernels.
//! - [`hardy`]: orthonormal bases of the level-`k` Hardy isotypes and the
//!   projector kernel assembled from them.
//! - [`legendrian`]: Legendrian loops and planes, holonomy, branch detection
//!   and the quantizer `u_k = P_k(δ_{Λ,λ})`.
//! - [`asymptotics`]: Gaussian moments, half-power series and the predicted
//!   scaling expansion with its remainder envelopes.

// `!(x > 0.0)` is used on purpose so that NaN fails positivity checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod error;
pub mod geometry;
pub mod hardy;
pub mod legendrian;
pub mod model;
pub mod ode;
pub mod quadrature;
pub mod tol;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
