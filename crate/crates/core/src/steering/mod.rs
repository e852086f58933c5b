//! Steering of mixed-state contexts through an entangled reference.
//!
//! A mixed state is purified into a bipartite pure state; measuring the
//! reference in a basis `{|nu>}` prepares conditional pure states of the
//! system. Each reference basis yields different weak values, yet all of
//! them reproduce the same optimal estimate, residual error and total
//! variance.

mod bipartite;
mod decomposition;
mod table;
mod transform;

pub use bipartite::{purify, BipartiteState};
pub use decomposition::{
    conditional_states, decomposition_error, decomposition_estimate, DecompositionEstimate, PureStateDecomposition,
};
pub use table::{equivalence_check, total_variance_decomposition, ContextCell, ContextTable, Equivalence, OutcomeSummary};
pub use transform::{steering_transform_check, SteeringTransform};

/// Transform coefficients `<lambda|psi_nu>` below this modulus are dropped.
pub const EPS_AMP: f64 = 1e-12;
