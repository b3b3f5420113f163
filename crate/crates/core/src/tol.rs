//! Fixed numerical tolerances shared across modules.

/// Reconstruction and orthogonality tolerance for tangent decompositions.
pub const DECOMPOSE: f64 = 1e-12;

/// Antisymmetry tolerance for the symplectic pairing.
pub const ANTISYMMETRY: f64 = 1e-15;

/// Lagrangian condition on frames: `|ω(f_a, f_b)| ≤ LAGRANGIAN · |f_a||f_b|`.
pub const LAGRANGIAN: f64 = 1e-12;

/// Unit-norm slack for circle elements passed to the circle action.
pub const UNIT_CIRCLE: f64 = 1e-12;

/// Unit-norm slack for points of the circle bundle.
pub const UNIT_POINT: f64 = 1e-14;

/// Orthonormality residual accepted for a Hardy basis.
pub const ORTHONORMAL: f64 = 1e-10;

/// Horizontality residual accepted for a Legendrian loop.
pub const HORIZONTAL: f64 = 1e-8;

/// Holonomy slack for the Bohr–Sommerfeld condition.
pub const BOHR_SOMMERFELD: f64 = 1e-6;

/// Local error target of the phase-transport integrator.
pub const TRANSPORT: f64 = 1e-12;
