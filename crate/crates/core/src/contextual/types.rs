use crate::error::{check_dim, Error, Result};
use crate::hilbert::{
    hermitian_eigendecomposition, random_pure_state, random_weights, Complex, EigenSystem, Ket,
    MeasurementBasis, SquareMatrix, TOL_HERM, TOL_NORM,
};

use super::{EPS_PROB, TOL_PSD};

/// A Hermitian operator standing for a physical property.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianObservable {
    matrix: SquareMatrix,
}

impl HermitianObservable {
    /// Accepts matrices Hermitian within [`TOL_HERM`] and stores the exact
    /// Hermitian part.
    pub fn new(matrix: SquareMatrix) -> Result<Self> {
        let deviation = matrix.hermiticity_deviation();
        if deviation > TOL_HERM {
            return Err(Error::Hermiticity { deviation });
        }
        Ok(HermitianObservable { matrix: hermitian_part(&matrix) })
    }

    pub fn pauli_x() -> Self {
        let m = SquareMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap();
        HermitianObservable { matrix: m }
    }

    pub fn pauli_y() -> Self {
        let i = Complex::i();
        let z = Complex::new(0.0, 0.0);
        let m = SquareMatrix::from_rows(&[vec![z, -i], vec![i, z]]).unwrap();
        HermitianObservable { matrix: m }
    }

    pub fn pauli_z() -> Self {
        HermitianObservable { matrix: SquareMatrix::diagonal(&[1.0, -1.0]) }
    }

    pub fn diagonal(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::ZeroDimension);
        }
        HermitianObservable::new(SquareMatrix::diagonal(values))
    }

    /// `sum_a A_a |a><a|` for real eigenvalues on an orthonormal basis.
    pub fn from_spectrum(values: &[f64], basis: &MeasurementBasis) -> Result<Self> {
        check_dim(basis.dim(), values.len())?;
        let n = basis.dim();
        let m = values.iter().zip(basis).fold(SquareMatrix::zeros(n), |acc, (&v, k)| {
            &acc + &SquareMatrix::projector(k).scale(Complex::new(v, 0.0))
        });
        HermitianObservable::new(m)
    }

    pub fn random(dim: usize, seed: u64) -> Result<Self> {
        HermitianObservable::new(crate::hilbert::random_hermitian(dim, seed)?)
    }

    pub fn matrix(&self) -> &SquareMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// Eigenvalues `A_a` (descending) and eigenstates `|a>`.
    pub fn eigen(&self) -> EigenSystem {
        hermitian_eigendecomposition(&self.matrix).expect("observable is Hermitian")
    }
}

/// A density operator: Hermitian, unit trace, positive semidefinite.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityOperator {
    matrix: SquareMatrix,
}

impl DensityOperator {
    pub fn new(matrix: SquareMatrix) -> Result<Self> {
        let deviation = matrix.hermiticity_deviation();
        if deviation > TOL_HERM {
            return Err(Error::validation("density", format!("not Hermitian (deviation {deviation:e})")));
        }
        let matrix = hermitian_part(&matrix);
        let trace = matrix.trace().re;
        if (trace - 1.0).abs() > TOL_NORM {
            return Err(Error::validation("density", format!("trace deviates from 1 (trace = {trace})")));
        }
        let es = hermitian_eigendecomposition(&matrix)?;
        let smallest = es.values.last().copied().unwrap_or(0.0);
        if smallest < -TOL_PSD {
            return Err(Error::validation("density", format!("negative eigenvalue {smallest:e}")));
        }
        Ok(DensityOperator { matrix })
    }

    /// `|psi><psi|`.
    pub fn pure(psi: &Ket) -> Self {
        DensityOperator { matrix: SquareMatrix::projector(psi) }
    }

    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        Ok(DensityOperator { matrix: SquareMatrix::diagonal(&vec![1.0 / dim as f64; dim]) })
    }

    pub fn diagonal(weights: &[f64]) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::ZeroDimension);
        }
        DensityOperator::new(SquareMatrix::diagonal(weights))
    }

    /// `sum_nu w_nu |psi_nu><psi_nu|`.
    pub fn mixture(components: &[(f64, Ket)]) -> Result<Self> {
        let dim = components.first().map(|(_, k)| k.dim()).ok_or(Error::ZeroDimension)?;
        let mut m = SquareMatrix::zeros(dim);
        for (w, k) in components {
            check_dim(dim, k.dim())?;
            if *w < 0.0 {
                return Err(Error::validation("density", "negative mixture weight"));
            }
            m = &m + &SquareMatrix::projector(k).scale(Complex::new(*w, 0.0));
        }
        DensityOperator::new(m)
    }

    /// Mixture of `dim` Haar-random pure states with weights uniform on the simplex.
    pub fn random(dim: usize, seed: u64) -> Result<Self> {
        let weights = random_weights(dim, seed)?;
        let comps = weights
            .into_iter()
            .enumerate()
            .map(|(i, w)| Ok((w, random_pure_state(dim, seed.wrapping_mul(1_000_003).wrapping_add(i as u64))?)))
            .collect::<Result<Vec<_>>>()?;
        DensityOperator::mixture(&comps)
    }

    pub fn matrix(&self) -> &SquareMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// Weights `rho_lambda` (descending) and eigenstates `|lambda>`.
    pub fn eigen(&self) -> EigenSystem {
        hermitian_eigendecomposition(&self.matrix).expect("density operator is Hermitian")
    }

    /// `Tr(rho^2)`.
    pub fn purity(&self) -> f64 {
        self.matrix.matmul(&self.matrix).expect("square").trace().re
    }

    pub fn is_pure(&self) -> bool {
        self.purity() >= 1.0 - 1e-10
    }

    /// `Tr(rho A)`.
    pub fn expectation(&self, a: &HermitianObservable) -> Result<f64> {
        Ok(self.matrix.matmul(a.matrix())?.trace().re)
    }

    /// `<m|rho|m>`.
    pub fn probability(&self, m: &Ket) -> Result<f64> {
        Ok(self.matrix.sandwich(m.amps(), m.amps())?.re)
    }
}

/// Contextual values `A(m)` for every outcome of a basis, with the outcome
/// probabilities. `None` marks an outcome too unlikely to carry a value.
#[derive(Clone, Debug, PartialEq)]
pub struct ContextualAssignment {
    pub basis: MeasurementBasis,
    pub values: Vec<Option<Complex>>,
    pub probabilities: Vec<f64>,
}

impl ContextualAssignment {
    pub fn new(basis: MeasurementBasis, values: Vec<Option<Complex>>, probabilities: Vec<f64>) -> Result<Self> {
        check_dim(basis.dim(), values.len())?;
        check_dim(basis.dim(), probabilities.len())?;
        if probabilities.iter().any(|&p| p < 0.0) {
            return Err(Error::validation("probabilities", "negative probability"));
        }
        let total: f64 = probabilities.iter().sum();
        if (total - 1.0).abs() > TOL_NORM {
            return Err(Error::validation("probabilities", format!("sum to {total}, not 1")));
        }
        for (i, (v, p)) in values.iter().zip(&probabilities).enumerate() {
            if v.is_none() != (*p < EPS_PROB) {
                return Err(Error::validation(
                    "values",
                    format!("outcome {i}: value must be undefined exactly when its probability is below {EPS_PROB:e}"),
                ));
            }
        }
        Ok(ContextualAssignment { basis, values, probabilities })
    }
}

/// Variance of an observable resolved into contextual values.
#[derive(Clone, Debug, PartialEq)]
pub struct VarianceReport {
    pub variance: f64,
    pub mean: Complex,
    pub second_moment: f64,
    pub per_outcome: ContextualAssignment,
}

fn hermitian_part(m: &SquareMatrix) -> SquareMatrix {
    (m + &m.adjoint()).scale(Complex::new(0.5, 0.0))
}
