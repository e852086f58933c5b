use crate::error::{check_dim, Error, Result};
use crate::hilbert::{dot, Complex, Ket, MeasurementBasis, SquareMatrix};

use super::{ContextualAssignment, DensityOperator, HermitianObservable, VarianceReport, EPS_PROB};

/// `Tr(rho A^2) - Tr(rho A)^2`.
pub fn variance(rho: &DensityOperator, a: &HermitianObservable) -> Result<f64> {
    check_dim(rho.dim(), a.dim())?;
    let ra = rho.matrix().matmul(a.matrix())?;
    let mean = ra.trace().re;
    let second = ra.matmul(a.matrix())?.trace().re;
    Ok(second - mean * mean)
}

/// Weak value `<m|A|psi> / <m|psi>`.
pub fn weak_value(psi: &Ket, m: &Ket, a: &HermitianObservable) -> Result<Complex> {
    check_dim(psi.dim(), m.dim())?;
    check_dim(psi.dim(), a.dim())?;
    weak_value_raw(psi.amps(), m.amps(), a)
}

/// Weak value on raw (not necessarily canonical-phase) amplitudes.
pub(crate) fn weak_value_raw(psi: &[Complex], m: &[Complex], a: &HermitianObservable) -> Result<Complex> {
    let overlap = dot(m, psi);
    let p = overlap.norm_sqr();
    if p < EPS_PROB {
        return Err(Error::undefined("post-selection <m|psi>", p));
    }
    Ok(a.matrix().sandwich(m, psi)? / overlap)
}

/// Resolves the variance of `A` in `|psi>` into the weak values of every
/// outcome of `basis`.
pub fn contextual_variance(psi: &Ket, basis: &MeasurementBasis, a: &HermitianObservable) -> Result<VarianceReport> {
    check_dim(psi.dim(), basis.dim())?;
    check_dim(psi.dim(), a.dim())?;
    let a_psi = a.matrix().apply(psi.amps())?;

    let mut values = Vec::with_capacity(basis.dim());
    let mut probabilities = Vec::with_capacity(basis.dim());
    let mut mean = Complex::new(0.0, 0.0);
    let mut second_moment = 0.0;
    for m in basis {
        let overlap = dot(m.amps(), psi.amps());
        let a_overlap = dot(m.amps(), &a_psi);
        let p = overlap.norm_sqr();
        probabilities.push(p);
        if p >= EPS_PROB {
            let value = a_overlap / overlap;
            mean += value * p;
            second_moment += p * value.norm_sqr();
            values.push(Some(value));
        } else {
            mean += overlap.conj() * a_overlap;
            second_moment += a_overlap.norm_sqr();
            values.push(None);
        }
    }
    let variance = second_moment - mean.norm_sqr();
    Ok(VarianceReport {
        variance,
        mean,
        second_moment,
        per_outcome: ContextualAssignment { basis: basis.clone(), values, probabilities },
    })
}

/// Error operator `A - sum_m A(m) |m><m|`. Not Hermitian in general.
pub fn error_operator(a: &HermitianObservable, assignment: &ContextualAssignment) -> Result<SquareMatrix> {
    check_dim(a.dim(), assignment.basis.dim())?;
    let mut eta = a.matrix().clone();
    for (i, (m, value)) in assignment.basis.iter().zip(&assignment.values).enumerate() {
        let value = value.ok_or_else(|| Error::undefined(format!("assignment outcome {i}"), assignment.probabilities[i]))?;
        eta = &eta - &SquareMatrix::projector(m).scale(value);
    }
    Ok(eta)
}

/// `|| eta_A |psi> ||` for the weak-value assignment of `|psi>` in `basis`.
pub fn zero_error_residual(psi: &Ket, basis: &MeasurementBasis, a: &HermitianObservable) -> Result<f64> {
    let report = contextual_variance(psi, basis, a)?;
    let eta = error_operator(a, &report.per_outcome)?;
    let v = eta.apply(psi.amps())?;
    Ok(v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contextual::TOL_ID;
    use crate::hilbert::{random_basis, random_pure_state};
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    fn anomalous() -> Ket {
        Ket::from_real(&[0.9f64.sqrt(), 0.1f64.sqrt()]).unwrap()
    }

    fn plus() -> Ket {
        Ket::from_real(&[1.0, 1.0]).unwrap()
    }

    fn minus_i() -> Ket {
        Ket::normalized(vec![c(1.0, 0.0), c(0.0, -1.0)]).unwrap()
    }

    #[test]
    fn variance_examples() {
        let z = HermitianObservable::pauli_z();
        let x = HermitianObservable::pauli_x();
        let e0 = DensityOperator::pure(&Ket::basis_state(2, 0).unwrap());
        assert!(variance(&e0, &z).unwrap().abs() < 1e-15);
        // 1 - (2 sqrt(0.09))^2
        let v = variance(&DensityOperator::pure(&anomalous()), &x).unwrap();
        assert!((v - 0.64).abs() < 1e-12, "{v}");
        let mixed = DensityOperator::maximally_mixed(2).unwrap();
        assert!((variance(&mixed, &z).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn weak_value_examples() {
        let z = HermitianObservable::pauli_z();
        let x = HermitianObservable::pauli_x();
        let e0 = Ket::basis_state(2, 0).unwrap();
        assert!((weak_value(&e0, &plus(), &z).unwrap() - c(1.0, 0.0)).norm() < 1e-15);
        // beta / alpha = sqrt(0.1/0.9)... times <0|X|psi>/<0|psi> = sqrt(.1)/sqrt(.9) = 1/3
        assert!((weak_value(&anomalous(), &e0, &x).unwrap() - c(1.0 / 3.0, 0.0)).norm() < 1e-12);
        // (1 + i) / (1 - i) = i
        assert!((weak_value(&minus_i(), &plus(), &z).unwrap() - c(0.0, 1.0)).norm() < 1e-12);
    }

    #[test]
    fn weak_value_undefined_at_orthogonal_postselection() {
        let e0 = Ket::basis_state(2, 0).unwrap();
        let e1 = Ket::basis_state(2, 1).unwrap();
        let err = weak_value(&e0, &e1, &HermitianObservable::pauli_x()).unwrap_err();
        assert!(matches!(err, Error::UndefinedWeakValue { .. }));
    }

    #[test]
    fn contextual_variance_anomalous_qubit() {
        let r = contextual_variance(&anomalous(), &MeasurementBasis::computational(2).unwrap(), &HermitianObservable::pauli_x())
            .unwrap();
        let a = &r.per_outcome;
        assert!((a.probabilities[0] - 0.9).abs() < 1e-12 && (a.probabilities[1] - 0.1).abs() < 1e-12);
        assert!((a.values[0].unwrap() - c(1.0 / 3.0, 0.0)).norm() < 1e-12);
        assert!((a.values[1].unwrap() - c(3.0, 0.0)).norm() < 1e-12);
        assert!((r.second_moment - 1.0).abs() < 1e-12);
        assert!((r.mean - c(0.6, 0.0)).norm() < 1e-12);
        assert!((r.variance - 0.64).abs() < 1e-12);
    }

    #[test]
    fn contextual_variance_eigenbasis_and_imaginary() {
        let r = contextual_variance(&plus(), &MeasurementBasis::diagonal(), &HermitianObservable::pauli_x()).unwrap();
        assert!((r.per_outcome.values[0].unwrap() - c(1.0, 0.0)).norm() < 1e-12);
        assert_eq!(r.per_outcome.values[1], None);
        assert!(r.variance.abs() < 1e-12);

        let r = contextual_variance(&minus_i(), &MeasurementBasis::diagonal(), &HermitianObservable::pauli_z()).unwrap();
        assert!((r.per_outcome.values[0].unwrap() - c(0.0, 1.0)).norm() < 1e-12);
        assert!((r.per_outcome.values[1].unwrap() - c(0.0, -1.0)).norm() < 1e-12);
        assert!((r.per_outcome.probabilities[0] - 0.5).abs() < 1e-12);
        assert!((r.variance - 1.0).abs() < 1e-12);
    }

    #[test]
    fn undefined_outcome_keeps_variance_complete() {
        // |0> measured in {|0>,|1>} with A = X: outcome |1> is impossible but
        // A|0> = |1>, so its limit term carries the whole variance.
        let e0 = Ket::basis_state(2, 0).unwrap();
        let r = contextual_variance(&e0, &MeasurementBasis::computational(2).unwrap(), &HermitianObservable::pauli_x())
            .unwrap();
        assert_eq!(r.per_outcome.values[1], None);
        assert!((r.variance - 1.0).abs() < 1e-15);
        assert!(zero_error_residual(&e0, &MeasurementBasis::computational(2).unwrap(), &HermitianObservable::pauli_x())
            .is_err());
    }

    #[test]
    fn error_operator_examples() {
        let z = HermitianObservable::pauli_z();
        let comp = MeasurementBasis::computational(2).unwrap();
        let exact = ContextualAssignment::new(comp.clone(), vec![Some(c(1.0, 0.0)), Some(c(-1.0, 0.0))], vec![0.5, 0.5])
            .unwrap();
        assert_eq!(error_operator(&z, &exact).unwrap().max_abs(), 0.0);

        let x = HermitianObservable::pauli_x();
        let weak = ContextualAssignment::new(comp, vec![Some(c(1.0 / 3.0, 0.0)), Some(c(3.0, 0.0))], vec![0.9, 0.1]).unwrap();
        let eta = error_operator(&x, &weak).unwrap();
        let v = eta.apply(anomalous().amps()).unwrap();
        assert!(v.iter().map(|z| z.norm()).fold(0.0, f64::max) < TOL_ID);

        let zero = ContextualAssignment::new(MeasurementBasis::diagonal(), vec![Some(c(0.0, 0.0)); 2], vec![0.5, 0.5]).unwrap();
        assert_eq!(error_operator(&z, &zero).unwrap(), *z.matrix());
    }

    #[test]
    fn error_operator_rejects_undefined_values() {
        let comp = MeasurementBasis::computational(2).unwrap();
        let a = ContextualAssignment::new(comp, vec![Some(c(1.0, 0.0)), None], vec![1.0, 0.0]).unwrap();
        let err = error_operator(&HermitianObservable::pauli_z(), &a).unwrap_err();
        assert!(matches!(err, Error::UndefinedWeakValue { .. }));
    }

    #[test]
    fn zero_error_examples() {
        let r = zero_error_residual(&anomalous(), &MeasurementBasis::computational(2).unwrap(), &HermitianObservable::pauli_x())
            .unwrap();
        assert!(r <= 1e-10);
        let r = zero_error_residual(&Ket::basis_state(2, 0).unwrap(), &random_basis(2, 3).unwrap(), &HermitianObservable::pauli_z())
            .unwrap();
        assert!(r <= 1e-10);
    }

    #[test]
    fn zero_error_sweep() {
        let mut worst = 0.0f64;
        for s in 0..200u64 {
            let psi = random_pure_state(4, s).unwrap();
            let basis = random_basis(4, s + 1000).unwrap();
            let a = HermitianObservable::random(4, s + 2000).unwrap();
            worst = worst.max(zero_error_residual(&psi, &basis, &a).unwrap());
        }
        assert!(worst <= 1e-9, "{worst}");
    }

    #[test]
    fn eigenstate_anchors_weak_value() {
        let a = HermitianObservable::random(3, 17).unwrap();
        let es = a.eigen();
        for (val, k) in es.iter() {
            for s in 0..20 {
                let m = random_pure_state(3, s).unwrap();
                let w = weak_value(k, &m, &a).unwrap();
                assert!((w - c(val, 0.0)).norm() <= 1e-10);
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn weak_value_phase_invariant(seed in 0u64..10_000, theta in 0.0..6.3f64, phi in 0.0..6.3f64) {
            let psi = random_pure_state(3, seed).unwrap();
            let m = random_pure_state(3, seed + 1).unwrap();
            let a = HermitianObservable::random(3, seed + 2).unwrap();
            let rot = |k: &Ket, t: f64| -> Vec<Complex> {
                k.amps().iter().map(|z| z * Complex::from_polar(1.0, t)).collect()
            };
            let w0 = weak_value(&psi, &m, &a).unwrap();
            let w1 = weak_value_raw(&rot(&psi, theta), &rot(&m, phi), &a).unwrap();
            prop_assert!((w0 - w1).norm() <= 1e-12 * (1.0 + w0.norm()));
        }

        #[test]
        fn pure_state_completeness(seed in 0u64..10_000, dim in 2usize..=8) {
            let psi = random_pure_state(dim, seed).unwrap();
            let basis = random_basis(dim, seed + 7).unwrap();
            let a = HermitianObservable::random(dim, seed + 13).unwrap();
            let r = contextual_variance(&psi, &basis, &a).unwrap();
            let direct = variance(&DensityOperator::pure(&psi), &a).unwrap();
            prop_assert!((r.variance - direct).abs() <= 1e-9);
            prop_assert!(r.mean.im.abs() <= 1e-9);
            let expectation = DensityOperator::pure(&psi).expectation(&a).unwrap();
            prop_assert!((r.mean.re - expectation).abs() <= 1e-9);
            prop_assert!(zero_error_residual(&psi, &basis, &a).unwrap() <= 1e-9);
        }
    }
}
