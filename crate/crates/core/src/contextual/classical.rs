use crate::error::{check_dim, Error, Result};
use crate::hilbert::{
    dot, hermitian_eigendecomposition, Complex, Ket, MeasurementBasis, SquareMatrix, TOL_DEGENERATE,
};

use super::{DensityOperator, HermitianObservable, EPS_PROB, TOL_ID};

/// A basis diagonalizing both a density operator and a commuting observable.
#[derive(Clone, Debug, PartialEq)]
pub struct CommonEigenbasis {
    pub basis: MeasurementBasis,
    /// Eigenvalue `A_a` of the observable for each basis state.
    pub observable_values: Vec<f64>,
    /// Prior weight `rho_a = <a|rho|a>` for each basis state.
    pub weights: Vec<f64>,
}

/// Bayesian estimate for one outcome in the commuting case.
#[derive(Clone, Debug, PartialEq)]
pub struct BayesianRow {
    /// `<m|rho|m> = sum_a |<m|a>|^2 rho_a`.
    pub probability: f64,
    /// Posterior `P(a|rho, m)`, indexed like [`CommonEigenbasis::basis`]. Empty
    /// when the outcome is improbable.
    pub posterior: Vec<f64>,
    pub estimate: Option<f64>,
    pub residual: Option<f64>,
}

fn commutator_norm(rho: &DensityOperator, a: &HermitianObservable) -> Result<f64> {
    Ok(rho.matrix().commutator(a.matrix())?.max_abs())
}

/// Diagonalizes `A`, then resolves each degenerate eigenspace of `A` into
/// eigenvectors of `rho` restricted to it. Fails unless `[rho, A] = 0` within
/// [`TOL_ID`].
pub fn common_eigenbasis(rho: &DensityOperator, a: &HermitianObservable) -> Result<CommonEigenbasis> {
    check_dim(rho.dim(), a.dim())?;
    let norm = commutator_norm(rho, a)?;
    if norm > TOL_ID {
        return Err(Error::Commutation { norm });
    }
    let es = a.eigen();
    let n = es.dim();
    let mut kets = Vec::with_capacity(n);
    let mut values = Vec::with_capacity(n);
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && es.values[end - 1] - es.values[end] < TOL_DEGENERATE {
            end += 1;
        }
        let block = &es.vectors.kets()[start..end];
        let k = block.len();
        // rho restricted to the eigenspace, in the basis `block`.
        let mut restricted = Vec::with_capacity(k * k);
        for u in block {
            for v in block {
                restricted.push(rho.matrix().sandwich(u.amps(), v.amps())?);
            }
        }
        let inner = hermitian_eigendecomposition(&SquareMatrix::from_entries(k, restricted)?)?;
        for w in inner.vectors.iter() {
            let mut amps = vec![Complex::new(0.0, 0.0); n];
            for (coef, u) in w.amps().iter().zip(block) {
                for (x, ui) in amps.iter_mut().zip(u.amps()) {
                    *x += coef * ui;
                }
            }
            kets.push(Ket::normalized(amps)?);
            values.push(es.values[start..end].iter().sum::<f64>() / k as f64);
        }
        start = end;
    }
    let weights = kets.iter().map(|k| rho.probability(k)).collect::<Result<Vec<_>>>()?;
    Ok(CommonEigenbasis { basis: MeasurementBasis::new(kets)?, observable_values: values, weights })
}

/// Bayesian estimates `A(m) = sum_a P(a|rho, m) A_a` and residuals
/// `sum_a P(a|rho, m) A_a^2 - A(m)^2` for every outcome of `basis`, valid when
/// `rho` and `A` commute.
pub fn classical_commuting_stats(
    rho: &DensityOperator,
    basis: &MeasurementBasis,
    a: &HermitianObservable,
) -> Result<Vec<BayesianRow>> {
    check_dim(rho.dim(), basis.dim())?;
    let common = common_eigenbasis(rho, a)?;
    Ok(basis.iter().map(|m| bayesian_row(&common, m)).collect())
}

pub(crate) fn bayesian_row(common: &CommonEigenbasis, m: &Ket) -> BayesianRow {
    let joint: Vec<f64> = common
        .basis
        .iter()
        .zip(&common.weights)
        .map(|(ak, w)| dot(m.amps(), ak.amps()).norm_sqr() * w)
        .collect();
    let probability: f64 = joint.iter().sum();
    if probability < EPS_PROB {
        return BayesianRow { probability, posterior: Vec::new(), estimate: None, residual: None };
    }
    let posterior: Vec<f64> = joint.iter().map(|j| j / probability).collect();
    let estimate: f64 = posterior.iter().zip(&common.observable_values).map(|(p, v)| p * v).sum();
    let second: f64 = posterior.iter().zip(&common.observable_values).map(|(p, v)| p * v * v).sum();
    BayesianRow { probability, posterior, estimate: Some(estimate), residual: Some(second - estimate * estimate) }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contextual::{mixed_weak_value, residual_error};
    use crate::hilbert::{random_basis, random_pure_state, random_weights};

    #[test]
    fn bayesian_examples() {
        let z = HermitianObservable::pauli_z();
        let plus = Ket::from_real(&[1.0, 1.0]).unwrap();
        let rho = DensityOperator::diagonal(&[0.75, 0.25]).unwrap();
        let rows = classical_commuting_stats(&rho, &MeasurementBasis::diagonal(), &z).unwrap();
        assert!((rows[0].estimate.unwrap() - 0.5).abs() < 1e-12);
        assert!((rows[0].residual.unwrap() - 0.75).abs() < 1e-12);
        assert!((mixed_weak_value(&rho, &plus, &z).unwrap().re - 0.5).abs() < 1e-12);

        let e0 = DensityOperator::pure(&Ket::basis_state(2, 0).unwrap());
        for m in random_basis(2, 4).unwrap().iter() {
            let row = &classical_commuting_stats(&e0, &MeasurementBasis::new(vec![m.clone(), orth(m)]).unwrap(), &z).unwrap()[0];
            assert!((row.estimate.unwrap() - 1.0).abs() < 1e-12 && row.residual.unwrap().abs() < 1e-12);
        }

        let half = DensityOperator::maximally_mixed(2).unwrap();
        let rows = classical_commuting_stats(&half, &MeasurementBasis::computational(2).unwrap(), &z).unwrap();
        assert!((rows[0].estimate.unwrap() - 1.0).abs() < 1e-15 && rows[0].residual.unwrap().abs() < 1e-15);
    }

    fn orth(k: &Ket) -> Ket {
        let a = k.amps();
        Ket::normalized(vec![-a[1].conj(), a[0].conj()]).unwrap()
    }

    #[test]
    fn rejects_non_commuting() {
        let rho = DensityOperator::diagonal(&[0.75, 0.25]).unwrap();
        let err = classical_commuting_stats(&rho, &MeasurementBasis::diagonal(), &HermitianObservable::pauli_x()).unwrap_err();
        assert!(matches!(err, Error::Commutation { .. }));
    }

    #[test]
    fn degenerate_observable_uses_rho_eigenbasis() {
        // A = diag(1, 1, -1) in a rotated frame where rho mixes the degenerate block.
        let frame = random_basis(3, 21).unwrap();
        let a = HermitianObservable::from_spectrum(&[1.0, 1.0, -1.0], &frame).unwrap();
        let inner = random_basis(2, 5).unwrap();
        let k = |i: usize| -> Vec<Complex> {
            let f = frame.kets();
            let c = inner.kets()[i].amps();
            (0..3).map(|r| c[0] * f[0].amps()[r] + c[1] * f[1].amps()[r]).collect()
        };
        let rho = DensityOperator::mixture(&[
            (0.5, Ket::normalized(k(0)).unwrap()),
            (0.3, Ket::normalized(k(1)).unwrap()),
            (0.2, frame.kets()[2].clone()),
        ])
        .unwrap();
        let basis = random_basis(3, 8).unwrap();
        let rows = classical_commuting_stats(&rho, &basis, &a).unwrap();
        for (m, row) in basis.iter().zip(&rows) {
            assert!((row.probability - rho.probability(m).unwrap()).abs() < 1e-12);
            assert!((row.estimate.unwrap() - mixed_weak_value(&rho, m, &a).unwrap().re).abs() < 1e-9);
            assert!((row.residual.unwrap() - residual_error(&rho, m, &a).unwrap()).abs() < 1e-9);
        }
    }

    #[test]
    fn bayesian_matches_operator_route_on_random_commuting_pairs() {
        for s in 0..50u64 {
            let dim = 2 + (s as usize % 4);
            let frame = random_basis(dim, s).unwrap();
            let rho_w = random_weights(dim, s).unwrap();
            let a_vals: Vec<f64> = random_pure_state(dim, s).unwrap().amps().iter().map(|z| z.re * 3.0).collect();
            let rho = DensityOperator::new(HermitianObservable::from_spectrum(&rho_w, &frame).unwrap().matrix().clone()).unwrap();
            let a = HermitianObservable::from_spectrum(&a_vals, &frame).unwrap();
            let basis = random_basis(dim, s + 1).unwrap();
            let rows = classical_commuting_stats(&rho, &basis, &a).unwrap();
            for (m, row) in basis.iter().zip(&rows) {
                assert!((row.estimate.unwrap() - mixed_weak_value(&rho, m, &a).unwrap().re).abs() < 1e-9);
                assert!(mixed_weak_value(&rho, m, &a).unwrap().im.abs() < 1e-9);
                assert!((row.residual.unwrap() - residual_error(&rho, m, &a).unwrap()).abs() < 1e-9);
            }
        }
    }
}
