use crate::contextual::{HermitianObservable, EPS_PROB};
use crate::error::{check_dim, Error, Result};
use crate::hilbert::{dot, Complex, Ket, MeasurementBasis};

use super::EPS_AMP;

/// Both sides of the change-of-context relation for one steered state.
#[derive(Clone, Debug, PartialEq)]
pub struct SteeringTransform {
    /// `<m|A|psi_nu> / <m|psi_nu>`.
    pub lhs: Complex,
    /// `sum_lambda coefficient_lambda * lambda_value_lambda`.
    pub rhs: Complex,
    /// Weak values of the projectors `|lambda><lambda|`:
    /// `<m|lambda><lambda|psi_nu> / <m|psi_nu>`. `None` for dropped terms.
    pub coefficients: Vec<Option<Complex>>,
    /// `<m|A|lambda> / <m|lambda>`. `None` for dropped terms.
    pub lambda_values: Vec<Option<Complex>>,
}

impl SteeringTransform {
    pub fn deviation(&self) -> f64 {
        (self.lhs - self.rhs).norm()
    }
}

/// Expands the weak value of a steered state `|psi_nu>` in the weak values
/// of the basis states `|lambda>`, with projector weak values as the
/// transform coefficients.
///
/// Terms with `|<lambda|psi_nu>| < EPS_AMP` are dropped. A kept term whose
/// own post-selection `<m|lambda>` vanishes has no finite weak value and is
/// reported as an error naming `lambda`.
pub fn steering_transform_check(
    psi_nu: &Ket,
    lambda_basis: &MeasurementBasis,
    m: &Ket,
    a: &HermitianObservable,
) -> Result<SteeringTransform> {
    let dim = psi_nu.dim();
    check_dim(dim, lambda_basis.dim())?;
    check_dim(dim, m.dim())?;
    check_dim(dim, a.dim())?;
    let post = dot(m.amps(), psi_nu.amps());
    if post.norm_sqr() < EPS_PROB {
        return Err(Error::undefined("post-selection <m|psi_nu>", post.norm_sqr()));
    }
    let lhs = a.matrix().sandwich(m.amps(), psi_nu.amps())? / post;

    let mut rhs = Complex::new(0.0, 0.0);
    let mut coefficients = Vec::with_capacity(dim);
    let mut lambda_values = Vec::with_capacity(dim);
    for (idx, lambda) in lambda_basis.iter().enumerate() {
        let prep = dot(lambda.amps(), psi_nu.amps());
        if prep.norm() < EPS_AMP {
            coefficients.push(None);
            lambda_values.push(None);
            continue;
        }
        let m_lambda = dot(m.amps(), lambda.amps());
        if m_lambda.norm_sqr() < EPS_PROB {
            return Err(Error::undefined(format!("lambda {idx}: post-selection <m|lambda>"), m_lambda.norm_sqr()));
        }
        let coefficient = m_lambda * prep / post;
        let value = a.matrix().sandwich(m.amps(), lambda.amps())? / m_lambda;
        rhs += coefficient * value;
        coefficients.push(Some(coefficient));
        lambda_values.push(Some(value));
    }
    Ok(SteeringTransform { lhs, rhs, coefficients, lambda_values })
}
