//! Built-in scenarios.

use super::scenario::{BasisSpec, ComplexPair, Scenario, ScenarioSpec, StateSpec};
use crate::error::{Error, Result};

pub const BUILTIN_NAMES: [&str; 5] =
    ["anomalous-qubit", "mixed-qubit-steering", "commuting-classical", "thermal-qutrit", "chsh-singlet"];

/// One-line description of each built-in, in [`BUILTIN_NAMES`] order.
pub fn builtin_descriptions() -> Vec<(&'static str, &'static str)> {
    BUILTIN_NAMES
        .iter()
        .map(|&n| {
            let d = match n {
                "anomalous-qubit" => "pure qubit sqrt(0.9)|0> + sqrt(0.1)|1>, sigma_x, computational outcomes; weak values 1/3 and 3",
                "mixed-qubit-steering" => "maximally mixed qubit purified to a Bell state, sigma_z, |+>/|-> outcomes, circular reference basis",
                "commuting-classical" => "diag(0.75, 0.25) with sigma_z: Bayesian estimates from |+>/|-> outcomes",
                "thermal-qutrit" => "Gibbs state of H = diag(0, 1, 2) at T = 1, observable H, Fourier outcomes and reference basis",
                _ => "singlet (|01> - |10>)/sqrt(2), sigma_z, diagonal outcomes and reference basis",
            };
            (n, d)
        })
        .collect()
}

pub fn builtin(name: &str) -> Result<Scenario> {
    let spec = match name {
        "anomalous-qubit" => ScenarioSpec {
            state: StateSpec::Ket(vec![re(0.9f64.sqrt()), re(0.1f64.sqrt())]),
            observable: real_matrix(&[&[0.0, 1.0], &[1.0, 0.0]]),
            m_basis: named("computational"),
            nu_basis: Some(named("computational")),
            ..base(name, 2)
        },
        "mixed-qubit-steering" => ScenarioSpec {
            state: StateSpec::Density(real_matrix(&[&[0.5, 0.0], &[0.0, 0.5]])),
            observable: sigma_z(),
            m_basis: named("diagonal"),
            nu_basis: Some(named("circular")),
            ..base(name, 2)
        },
        "commuting-classical" => ScenarioSpec {
            state: StateSpec::Density(real_matrix(&[&[0.75, 0.0], &[0.0, 0.25]])),
            observable: sigma_z(),
            m_basis: named("diagonal"),
            nu_basis: Some(named("diagonal")),
            ..base(name, 2)
        },
        "thermal-qutrit" => {
            let energies = [0.0, 1.0, 2.0];
            let z: f64 = energies.iter().map(|e: &f64| (-e).exp()).sum();
            let weights: Vec<f64> = energies.iter().map(|e| (-e).exp() / z).collect();
            ScenarioSpec {
                state: StateSpec::Density(diagonal(&weights)),
                observable: diagonal(&energies),
                m_basis: named("fourier"),
                nu_basis: Some(named("fourier")),
                ..base(name, 3)
            }
        }
        "chsh-singlet" => {
            let h = std::f64::consts::FRAC_1_SQRT_2;
            ScenarioSpec {
                reference_dim: Some(2),
                state: StateSpec::Bipartite(vec![vec![re(0.0), re(h)], vec![re(-h), re(0.0)]]),
                observable: sigma_z(),
                m_basis: named("diagonal"),
                nu_basis: Some(named("diagonal")),
                ..base(name, 2)
            }
        }
        other => {
            return Err(Error::validation(
                "scenario",
                format!("unknown built-in {other:?} (available: {})", BUILTIN_NAMES.join(", ")),
            ))
        }
    };
    Scenario::from_spec(spec)
}

pub fn builtins() -> Vec<Scenario> {
    BUILTIN_NAMES.iter().map(|n| builtin(n).expect("built-in scenarios are valid")).collect()
}

fn base(name: &str, dim: usize) -> ScenarioSpec {
    ScenarioSpec {
        name: name.to_string(),
        system_dim: dim,
        reference_dim: None,
        state: StateSpec::Ket(Vec::new()),
        observable: Vec::new(),
        m_basis: named("computational"),
        nu_basis: None,
        tolerances: None,
        seed: None,
        normalize: false,
    }
}

fn re(x: f64) -> ComplexPair {
    [x, 0.0]
}

fn named(s: &str) -> BasisSpec {
    BasisSpec::Named(s.to_string())
}

fn real_matrix(rows: &[&[f64]]) -> Vec<Vec<ComplexPair>> {
    rows.iter().map(|r| r.iter().map(|&x| re(x)).collect()).collect()
}

fn diagonal(values: &[f64]) -> Vec<Vec<ComplexPair>> {
    let n = values.len();
    (0..n).map(|i| (0..n).map(|j| re(if i == j { values[i] } else { 0.0 })).collect()).collect()
}

fn sigma_z() -> Vec<Vec<ComplexPair>> {
    diagonal(&[1.0, -1.0])
}
