//! Scenario files: JSON descriptions of a preparation, an observable and the
//! measurement bases to analyze.
//!
//! ```json
//! {
//!   "name": "example",
//!   "system_dim": 2,
//!   "state": {"ket": [[1, 0], [0, 0]]},
//!   "observable": [[[1, 0], [0, 0]], [[0, 0], [-1, 0]]],
//!   "m_basis": "computational",
//!   "nu_basis": {"kets": [[[0.7071067811865476, 0], [0.7071067811865476, 0]],
//!                         [[0.7071067811865476, 0], [-0.7071067811865476, 0]]]}
//! }
//! ```
//!
//! `state` holds exactly one of `ket`, `density` or `bipartite` (a
//! `system_dim x reference_dim` coefficient matrix). Complex numbers are
//! `[re, im]` pairs and matrices are row-major nested arrays. A basis is a
//! name (`computational`, `fourier`, `diagonal`, `circular`, `random`), an
//! explicit `{"kets": [...]}` list, or `{"random": seed}`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::report::write_json;
use crate::contextual::{DensityOperator, HermitianObservable, TOL_ID};
use crate::error::{Error, Result};
use crate::hilbert::{random_basis, Complex, Ket, MeasurementBasis, SquareMatrix};
use crate::steering::{purify, BipartiteState};

pub type ComplexPair = [f64; 2];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum StateSpec {
    Ket(Vec<ComplexPair>),
    Density(Vec<Vec<ComplexPair>>),
    Bipartite(Vec<Vec<ComplexPair>>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BasisSpec {
    Named(String),
    Kets { kets: Vec<Vec<ComplexPair>> },
    Random { random: u64 },
}

impl std::str::FromStr for BasisSpec {
    type Err = Error;

    /// A basis name, or inline JSON for the other forms.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if t.starts_with('{') || t.starts_with('"') {
            serde_json::from_str(t).map_err(|e| parse_error(&e))
        } else {
            Ok(BasisSpec::Named(t.to_string()))
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Tolerance applied to every identity check.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub identity: Option<f64>,
}

/// The on-disk form of a scenario.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSpec {
    pub name: String,
    pub system_dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference_dim: Option<usize>,
    pub state: StateSpec,
    pub observable: Vec<Vec<ComplexPair>>,
    pub m_basis: BasisSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu_basis: Option<BasisSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerances: Option<Tolerances>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub normalize: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ScenarioState {
    Pure(Ket),
    Mixed(DensityOperator),
    Bipartite(BipartiteState),
}

/// A validated scenario.
#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    spec: ScenarioSpec,
    state: ScenarioState,
    observable: HermitianObservable,
    m_basis: MeasurementBasis,
    nu_basis: Option<MeasurementBasis>,
}

impl Scenario {
    pub fn from_spec(spec: ScenarioSpec) -> Result<Self> {
        let n = spec.system_dim;
        if n == 0 {
            return Err(Error::validation("system_dim", "must be positive"));
        }
        if spec.name.trim().is_empty() {
            return Err(Error::validation("name", "must not be empty"));
        }
        if let Some(tol) = spec.tolerances.as_ref().and_then(|t| t.identity) {
            if !(tol.is_finite() && tol > 0.0) {
                return Err(Error::validation("tolerances.identity", "must be a positive number"));
            }
        }
        let state = resolve_state(&spec)?;
        let observable = matrix_from(&spec.observable, n, "observable")
            .and_then(HermitianObservable::new)
            .map_err(|e| in_field("observable", e))?;
        let seed = spec.seed.unwrap_or(0);
        let m_basis = resolve_basis(&spec.m_basis, n, seed).map_err(|e| in_field("m_basis", e))?;
        let nu_dim = match &state {
            ScenarioState::Bipartite(e) => e.dim_r(),
            _ => n,
        };
        let nu_basis = spec
            .nu_basis
            .as_ref()
            .map(|b| resolve_basis(b, nu_dim, seed.wrapping_add(1)))
            .transpose()
            .map_err(|e| in_field("nu_basis", e))?;
        Ok(Scenario { spec, state, observable, m_basis, nu_basis })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: ScenarioSpec = serde_json::from_str(text).map_err(|e| parse_error(&e))?;
        Scenario::from_spec(spec)
    }

    /// JSON with sorted keys that loads back into an equal scenario.
    pub fn to_json(&self) -> String {
        let value = serde_json::to_value(&self.spec).expect("scenario serializes");
        let mut out = String::new();
        write_json(&value, 0, &mut out);
        out.push('\n');
        out
    }

    pub fn spec(&self) -> &ScenarioSpec {
        &self.spec
    }

    pub fn name(&self) -> &str {
        &self.spec.name
    }

    pub fn state(&self) -> &ScenarioState {
        &self.state
    }

    pub fn observable(&self) -> &HermitianObservable {
        &self.observable
    }

    pub fn m_basis(&self) -> &MeasurementBasis {
        &self.m_basis
    }

    pub fn nu_basis(&self) -> Option<&MeasurementBasis> {
        self.nu_basis.as_ref()
    }

    pub fn seed(&self) -> Option<u64> {
        self.spec.seed
    }

    /// Tolerance from the scenario, or the library default.
    pub fn tolerance(&self) -> f64 {
        self.spec.tolerances.as_ref().and_then(|t| t.identity).unwrap_or(TOL_ID)
    }

    /// Reduced state of the system.
    pub fn density(&self) -> DensityOperator {
        match &self.state {
            ScenarioState::Pure(psi) => DensityOperator::pure(psi),
            ScenarioState::Mixed(rho) => rho.clone(),
            ScenarioState::Bipartite(e) => e.reduced_system(),
        }
    }

    /// The given bipartite state, or a purification of the system state.
    pub fn bipartite(&self) -> BipartiteState {
        match &self.state {
            ScenarioState::Bipartite(e) => e.clone(),
            ScenarioState::Pure(psi) => purify(&DensityOperator::pure(psi)),
            ScenarioState::Mixed(rho) => purify(rho),
        }
    }

    /// Same scenario with a different seed; randomized bases are redrawn.
    pub fn with_seed(&self, seed: u64) -> Result<Self> {
        let mut spec = self.spec.clone();
        spec.seed = Some(seed);
        Scenario::from_spec(spec)
    }

    pub fn with_nu_basis(&self, nu: BasisSpec) -> Result<Self> {
        let mut spec = self.spec.clone();
        spec.nu_basis = Some(nu);
        Scenario::from_spec(spec)
    }
}

pub fn load_scenario(path: impl AsRef<Path>) -> Result<Scenario> {
    let text = std::fs::read_to_string(path)?;
    Scenario::from_json(&text)
}

fn parse_error(e: &serde_json::Error) -> Error {
    Error::Parse { line: e.line(), column: e.column(), message: e.to_string() }
}

/// Re-labels a validation failure with the scenario field it came from.
fn in_field(field: &str, e: Error) -> Error {
    match e {
        Error::Validation { reason, .. } => Error::validation(field, reason),
        other => Error::validation(field, other.to_string()),
    }
}

fn complex_vec(pairs: &[ComplexPair]) -> Vec<Complex> {
    pairs.iter().map(|[re, im]| Complex::new(*re, *im)).collect()
}

fn matrix_from(rows: &[Vec<ComplexPair>], dim: usize, what: &str) -> Result<SquareMatrix> {
    if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
        return Err(Error::validation(what, format!("expected a {dim}x{dim} matrix")));
    }
    let rows: Vec<Vec<Complex>> = rows.iter().map(|r| complex_vec(r)).collect();
    SquareMatrix::from_rows(&rows)
}

fn resolve_state(spec: &ScenarioSpec) -> Result<ScenarioState> {
    let n = spec.system_dim;
    let check_reference = |expected: usize| match spec.reference_dim {
        Some(r) if r != expected => {
            Err(Error::validation("reference_dim", format!("expected {expected}, found {r}")))
        }
        _ => Ok(()),
    };
    let state = match &spec.state {
        StateSpec::Ket(amps) => {
            if amps.len() != n {
                return Err(Error::validation("state", format!("expected {n} amplitudes, found {}", amps.len())));
            }
            check_reference(n)?;
            let amps = complex_vec(amps);
            let ket = if spec.normalize { Ket::normalized(amps) } else { Ket::new(amps) };
            ScenarioState::Pure(ket.map_err(|e| in_field("state", e))?)
        }
        StateSpec::Density(rows) => {
            check_reference(n)?;
            let mut m = matrix_from(rows, n, "state").map_err(|e| in_field("state", e))?;
            if spec.normalize {
                let tr = m.trace().re;
                if tr > 0.0 {
                    m = m.scale(Complex::new(1.0 / tr, 0.0));
                }
            }
            ScenarioState::Mixed(DensityOperator::new(m).map_err(|e| in_field("state", e))?)
        }
        StateSpec::Bipartite(rows) => {
            let r = spec.reference_dim.ok_or_else(|| Error::validation("reference_dim", "required for a bipartite state"))?;
            if r == 0 {
                return Err(Error::validation("reference_dim", "must be positive"));
            }
            if rows.len() != n || rows.iter().any(|row| row.len() != r) {
                return Err(Error::validation("state", format!("expected a {n}x{r} coefficient matrix")));
            }
            let mut coeffs: Vec<Complex> = rows.iter().flat_map(|row| complex_vec(row)).collect();
            if spec.normalize {
                let norm = coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
                if norm > 0.0 {
                    coeffs.iter_mut().for_each(|c| *c /= norm);
                }
            }
            ScenarioState::Bipartite(BipartiteState::new(n, r, coeffs).map_err(|e| in_field("state", e))?)
        }
    };
    Ok(state)
}

fn resolve_basis(spec: &BasisSpec, dim: usize, seed: u64) -> Result<MeasurementBasis> {
    match spec {
        BasisSpec::Named(name) => match name.as_str() {
            "computational" => MeasurementBasis::computational(dim),
            "fourier" => MeasurementBasis::fourier(dim),
            "random" => random_basis(dim, seed),
            "diagonal" | "circular" if dim != 2 => {
                Err(Error::validation("basis", format!("{name:?} is only defined for a qubit")))
            }
            "diagonal" => Ok(MeasurementBasis::diagonal()),
            "circular" => Ok(MeasurementBasis::circular()),
            other => Err(Error::validation("basis", format!("unknown basis name {other:?}"))),
        },
        BasisSpec::Random { random } => random_basis(dim, *random),
        BasisSpec::Kets { kets } => {
            if kets.len() != dim {
                return Err(Error::validation("basis", format!("expected {dim} kets, found {}", kets.len())));
            }
            let kets = kets
                .iter()
                .map(|k| {
                    if k.len() != dim {
                        return Err(Error::validation("basis", format!("ket of dimension {} in a {dim}-dimensional basis", k.len())));
                    }
                    Ket::new(complex_vec(k))
                })
                .collect::<Result<Vec<_>>>()?;
            MeasurementBasis::new(kets)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SIGMA_Z: &str = "[[[1, 0], [0, 0]], [[0, 0], [-1, 0]]]";

    fn doc(state: &str, extra: &str) -> String {
        format!(r#"{{"name": "t", "system_dim": 2, "state": {state}, "observable": {SIGMA_Z}, "m_basis": "computational"{extra}}}"#)
    }

    #[test]
    fn smoke_case() {
        let s = Scenario::from_json(&doc(r#"{"ket": [[1, 0], [0, 0]]}"#, "")).unwrap();
        assert_eq!(s.name(), "t");
        assert!(matches!(s.state(), ScenarioState::Pure(_)));
        assert_eq!(s.tolerance(), TOL_ID);
    }

    #[test]
    fn unnormalized_ket_rejected_unless_flagged() {
        let state = r#"{"ket": [[0.98, 0], [0, 0]]}"#;
        let err = Scenario::from_json(&doc(state, "")).unwrap_err();
        assert!(err.to_string().starts_with("state: norm deviates"), "{err}");
        let s = Scenario::from_json(&doc(state, r#", "normalize": true"#)).unwrap();
        let ScenarioState::Pure(psi) = s.state() else { panic!() };
        assert!((psi.amps()[0].re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn parse_error_has_position() {
        let err = Scenario::from_json("{\n  \"name\": \"t\",\n  oops\n}").unwrap_err();
        match err {
            Error::Parse { line, column, .. } => assert_eq!((line, column), (3, 3)),
            other => panic!("{other}"),
        }
    }

    #[test]
    fn two_state_forms_rejected() {
        let err = Scenario::from_json(&doc(r#"{"ket": [[1, 0], [0, 0]], "density": [[[1, 0], [0, 0]], [[0, 0], [0, 0]]]}"#, ""));
        assert!(matches!(err, Err(Error::Parse { .. })));
    }

    #[test]
    fn field_named_in_validation_errors() {
        let bad_obs = r#"{"name": "t", "system_dim": 2, "state": {"ket": [[1, 0], [0, 0]]},
            "observable": [[[0, 0], [1, 0]], [[0, 0], [0, 0]]], "m_basis": "computational"}"#;
        assert!(Scenario::from_json(bad_obs).unwrap_err().to_string().starts_with("observable:"));

        let bad_basis = doc(r#"{"ket": [[1, 0], [0, 0]]}"#, r#", "nu_basis": "hexagonal""#);
        assert!(Scenario::from_json(&bad_basis).unwrap_err().to_string().starts_with("nu_basis:"));

        let bad_trace = doc(r#"{"density": [[[0.6, 0], [0, 0]], [[0, 0], [0.6, 0]]]}"#, "");
        assert!(Scenario::from_json(&bad_trace).unwrap_err().to_string().starts_with("state: trace"));

        let no_ref = doc(r#"{"bipartite": [[[1, 0]], [[0, 0]]]}"#, "");
        assert!(Scenario::from_json(&no_ref).unwrap_err().to_string().starts_with("reference_dim:"));
    }

    #[test]
    fn bipartite_with_rectangular_reference() {
        let text = doc(r#"{"bipartite": [[[0.6, 0], [0, 0], [0, 0]], [[0, 0], [0, 0.8], [0, 0]]]}"#, r#", "reference_dim": 3, "nu_basis": "fourier""#);
        let s = Scenario::from_json(&text).unwrap();
        assert_eq!(s.nu_basis().unwrap().dim(), 3);
        let rho = s.density();
        assert!((rho.matrix()[(0, 0)].re - 0.36).abs() < 1e-15);
    }

    #[test]
    fn seeded_random_basis_is_reproducible() {
        let text = doc(r#"{"ket": [[1, 0], [0, 0]]}"#, r#", "nu_basis": "random", "seed": 7"#);
        let a = Scenario::from_json(&text).unwrap();
        let b = Scenario::from_json(&text).unwrap();
        assert_eq!(a.nu_basis(), b.nu_basis());
        assert_ne!(a.nu_basis(), a.with_seed(8).unwrap().nu_basis());
    }

    #[test]
    fn basis_spec_from_cli_text() {
        assert_eq!("circular".parse::<BasisSpec>().unwrap(), BasisSpec::Named("circular".into()));
        assert_eq!(r#"{"random": 3}"#.parse::<BasisSpec>().unwrap(), BasisSpec::Random { random: 3 });
    }

    #[test]
    fn load_from_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.json");
        std::fs::write(&path, doc(r#"{"ket": [[1, 0], [0, 0]]}"#, "")).unwrap();
        assert_eq!(load_scenario(&path).unwrap().name(), "t");
        assert!(matches!(load_scenario(dir.path().join("missing.json")), Err(Error::Io(_))));
    }
}
