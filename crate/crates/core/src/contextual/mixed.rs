use crate::error::{check_dim, Error, Result};
use crate::hilbert::{dot, Complex, Ket, MeasurementBasis};

use super::{DensityOperator, HermitianObservable, EPS_PROB};

fn outcome_probability(rho: &DensityOperator, m: &Ket, a: &HermitianObservable) -> Result<f64> {
    check_dim(rho.dim(), m.dim())?;
    check_dim(rho.dim(), a.dim())?;
    let p = rho.probability(m)?;
    if p < EPS_PROB {
        return Err(Error::undefined("outcome <m|rho|m>", p));
    }
    Ok(p)
}

/// Optimal estimate `<m|A rho|m> / <m|rho|m>` for a mixed preparation.
pub fn mixed_weak_value(rho: &DensityOperator, m: &Ket, a: &HermitianObservable) -> Result<Complex> {
    let p = outcome_probability(rho, m, a)?;
    let a_rho = a.matrix().matmul(rho.matrix())?;
    Ok(a_rho.sandwich(m.amps(), m.amps())? / p)
}

/// Residual error `<m|A rho A|m> / <m|rho|m> - |A(m)|^2` left by the optimal
/// estimate of outcome `m`.
pub fn residual_error(rho: &DensityOperator, m: &Ket, a: &HermitianObservable) -> Result<f64> {
    let p = outcome_probability(rho, m, a)?;
    let am = a.matrix().apply(m.amps())?;
    let second = rho.matrix().sandwich(&am, &am)?.re / p;
    Ok(second - mixed_weak_value(rho, m, a)?.norm_sqr())
}

/// Total error `sum_m <m|(A - A(m)) rho (A - A*(m))|m>` of the optimal
/// estimates, which equals `sum_m <m|rho|m> residual_error(m)`. Improbable
/// outcomes use `A(m) = 0`, i.e. contribute `<m|A rho A|m>`.
///
/// The conjugate sits on the right-hand factor. With it on the left the
/// cross terms become `-2 Re(A(m)^2) <m|rho|m>` and the sum no longer
/// vanishes for pure states with complex weak values.
pub fn total_error(rho: &DensityOperator, basis: &MeasurementBasis, a: &HermitianObservable) -> Result<f64> {
    check_dim(rho.dim(), basis.dim())?;
    check_dim(rho.dim(), a.dim())?;
    let mut total = 0.0;
    for m in basis {
        let estimate = match mixed_weak_value(rho, m, a) {
            Ok(v) => v,
            Err(Error::UndefinedWeakValue { .. }) => Complex::new(0.0, 0.0),
            Err(e) => return Err(e),
        };
        // v = (A - A*(m))|m>, so v^dagger = <m|(A - A(m)) since A is Hermitian.
        let v: Vec<Complex> =
            a.matrix().apply(m.amps())?.iter().zip(m.amps()).map(|(x, mi)| x - estimate.conj() * mi).collect();
        total += dot(&v, &rho.matrix().apply(&v)?).re;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contextual::weak_value;
    use crate::hilbert::{random_basis, random_pure_state};

    fn plus() -> Ket {
        Ket::from_real(&[1.0, 1.0]).unwrap()
    }

    #[test]
    fn mixed_weak_value_examples() {
        let z = HermitianObservable::pauli_z();
        let half = DensityOperator::maximally_mixed(2).unwrap();
        assert!(mixed_weak_value(&half, &plus(), &z).unwrap().norm() < 1e-15);
        let rho = DensityOperator::diagonal(&[0.75, 0.25]).unwrap();
        let w = mixed_weak_value(&rho, &plus(), &z).unwrap();
        assert!((w - Complex::new(0.5, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn mixed_reduces_to_pure() {
        for s in 0..50 {
            let psi = random_pure_state(3, s).unwrap();
            let m = random_pure_state(3, s + 500).unwrap();
            let a = HermitianObservable::random(3, s + 900).unwrap();
            let rho = DensityOperator::pure(&psi);
            let d = (mixed_weak_value(&rho, &m, &a).unwrap() - weak_value(&psi, &m, &a).unwrap()).norm();
            assert!(d <= 1e-9, "{d}");
        }
    }

    #[test]
    fn residual_error_examples() {
        let z = HermitianObservable::pauli_z();
        let psi = random_pure_state(3, 5).unwrap();
        let m = random_pure_state(3, 6).unwrap();
        let a = HermitianObservable::random(3, 5).unwrap();
        assert!(residual_error(&DensityOperator::pure(&psi), &m, &a).unwrap().abs() <= 1e-9);
        let rho = DensityOperator::diagonal(&[0.75, 0.25]).unwrap();
        assert!((residual_error(&rho, &plus(), &z).unwrap() - 0.75).abs() < 1e-12);
        let half = DensityOperator::maximally_mixed(2).unwrap();
        assert!((residual_error(&half, &plus(), &z).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn improbable_outcome_is_undefined() {
        let rho = DensityOperator::pure(&Ket::basis_state(2, 0).unwrap());
        let m = Ket::basis_state(2, 1).unwrap();
        let z = HermitianObservable::pauli_z();
        assert!(matches!(mixed_weak_value(&rho, &m, &z), Err(Error::UndefinedWeakValue { .. })));
        assert!(matches!(residual_error(&rho, &m, &z), Err(Error::UndefinedWeakValue { .. })));
    }

    #[test]
    fn total_error_examples() {
        let psi = random_pure_state(4, 9).unwrap();
        let basis = random_basis(4, 9).unwrap();
        let a = HermitianObservable::random(4, 9).unwrap();
        assert!(total_error(&DensityOperator::pure(&psi), &basis, &a).unwrap().abs() <= 1e-9);

        let z = HermitianObservable::pauli_z();
        let rho = DensityOperator::diagonal(&[0.75, 0.25]).unwrap();
        assert!((total_error(&rho, &MeasurementBasis::diagonal(), &z).unwrap() - 0.75).abs() < 1e-12);
        let half = DensityOperator::maximally_mixed(2).unwrap();
        assert!(total_error(&half, &MeasurementBasis::computational(2).unwrap(), &z).unwrap().abs() < 1e-15);
    }

    #[test]
    fn total_error_is_weighted_residual_sum() {
        for dim in 2..=6 {
            for s in 0..20u64 {
                let rho = DensityOperator::random(dim, s * 7 + dim as u64).unwrap();
                let basis = random_basis(dim, s + 77).unwrap();
                let a = HermitianObservable::random(dim, s + 99).unwrap();
                let weighted: f64 = basis
                    .iter()
                    .map(|m| rho.probability(m).unwrap() * residual_error(&rho, m, &a).unwrap())
                    .sum();
                let total = total_error(&rho, &basis, &a).unwrap();
                assert!((total - weighted).abs() <= 1e-9, "dim {dim}: {total} vs {weighted}");
                assert!(total >= -1e-9);
            }
        }
    }
}
