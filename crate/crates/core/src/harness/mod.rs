//! Scenario loading, built-in demonstrations, the identity-suite runner and
//! report emission.

mod builtins;
mod chsh;
mod report;
mod scenario;
mod suite;

pub use builtins::{builtin, builtin_descriptions, builtins, BUILTIN_NAMES};
pub use chsh::{analyzer, analyzer_basis, chsh_demo, pair_correlation, PairCorrelation, DEFAULT_ANGLES};
pub use report::{emit_report, format_float, render_report, render_table, CheckRecord, Report, ReportFormat, Status, Summary};
pub use scenario::{
    load_scenario, BasisSpec, ComplexPair, Scenario, ScenarioSpec, ScenarioState, StateSpec, Tolerances,
};
pub use suite::{run_identity_suite, run_identity_suite_with_tolerance};

/// Environment variable that overrides scenario seeds.
pub const SEED_ENV: &str = "CONTEXTUAL_WV_SEED";

/// Seed from [`SEED_ENV`], if set to an unsigned integer.
pub fn seed_override() -> Option<u64> {
    std::env::var(SEED_ENV).ok()?.trim().parse().ok()
}
