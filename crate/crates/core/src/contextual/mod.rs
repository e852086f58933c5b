//! Weak values as the contextual values of an observable's fluctuations.
//!
//! For a pure preparation `|psi>` and outcome `|m>` the contextual value is
//! the weak value `<m|A|psi> / <m|psi>`; for a mixed preparation it is the
//! optimal estimate `<m|A rho|m> / <m|rho|m>`, which leaves a residual error.
//!
//! Outcomes with probability below [`EPS_PROB`] carry no weak value. In
//! probability-weighted sums they contribute the finite limit of their term,
//! e.g. `|<m|A|psi>|^2` in place of `P(m) |A(m)|^2`, which is zero whenever
//! `A|psi>` is also orthogonal to `|m>`.

mod classical;
mod mixed;
mod pure;
mod types;

pub use classical::{classical_commuting_stats, common_eigenbasis, BayesianRow, CommonEigenbasis};
pub use mixed::{mixed_weak_value, residual_error, total_error};
pub use pure::{contextual_variance, error_operator, variance, weak_value, zero_error_residual};
pub use types::{ContextualAssignment, DensityOperator, HermitianObservable, VarianceReport};

/// Outcomes less likely than this have no defined weak value.
pub const EPS_PROB: f64 = 1e-12;
/// Tolerance for algebraic identities.
pub const TOL_ID: f64 = 1e-9;
/// Slack on density-operator positivity.
pub const TOL_PSD: f64 = 1e-10;
