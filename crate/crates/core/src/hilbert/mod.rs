//! Dense complex linear algebra for small Hilbert spaces.
//!
//! Everything here is immutable after construction. Kets are always stored
//! normalized with a canonical global phase, so two kets describing the same
//! ray compare equal up to round-off.

mod basis;
mod eigen;
mod ket;
mod matrix;
mod random;

pub use basis::MeasurementBasis;
pub use eigen::{hermitian_eigendecomposition, EigenSystem};
pub use ket::{canonicalize_phase, inner_product, Ket};
pub use matrix::SquareMatrix;
pub use random::{random_basis, random_hermitian, random_pure_state, random_weights};

pub use num_complex::Complex64 as Complex;

/// Normalization tolerance for kets and unit traces.
pub const TOL_NORM: f64 = 1e-10;
/// Orthonormality tolerance for measurement bases.
pub const TOL_ORTHO: f64 = 1e-10;
/// Hermiticity tolerance, max-entry norm of `M - M^dagger`.
pub const TOL_HERM: f64 = 1e-10;
/// Eigen-equation residual tolerance.
pub const TOL_EIG: f64 = 1e-9;
/// Eigenvalues closer than this are treated as one degenerate cluster.
pub const TOL_DEGENERATE: f64 = 1e-8;
/// Amplitudes below this modulus never fix the global phase.
pub const EPS_PHASE: f64 = 1e-12;

pub(crate) const ZERO: Complex = Complex::new(0.0, 0.0);
pub(crate) const ONE: Complex = Complex::new(1.0, 0.0);

/// `sum_i conj(x_i) y_i` over raw amplitude slices.
pub(crate) fn dot(x: &[Complex], y: &[Complex]) -> Complex {
    x.iter().zip(y).map(|(a, b)| a.conj() * b).sum()
}

pub(crate) fn norm_sqr(x: &[Complex]) -> f64 {
    x.iter().map(|a| a.norm_sqr()).sum()
}
