//! Weak values as contextual values of quantum fluctuations.
//!
//! - [`hilbert`]: dense complex linear algebra, Hermitian eigensolver, seeded
//!   Haar sampling.
//! - [`contextual`]: variances, pure and mixed weak values, the error
//!   operator and residual errors, and the Bayesian commuting case.
//! - [`steering`]: purification, reference-measurement conditional states,
//!   decomposition-averaged estimates and the cross-context identities.
//! - [`harness`]: scenarios, the identity suite, the CHSH demonstration and
//!   report emission used by the `cwv` binary.

pub mod contextual;
pub mod error;
pub mod harness;
pub mod hilbert;
pub mod steering;

pub use error::{Error, Result};
pub use hilbert::{Complex, Ket, MeasurementBasis, SquareMatrix};
