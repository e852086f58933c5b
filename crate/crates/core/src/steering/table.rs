use crate::contextual::{
    common_eigenbasis, mixed_weak_value, residual_error, DensityOperator, HermitianObservable, EPS_PROB,
};
use crate::error::{check_dim, Error, Result};
use crate::hilbert::{dot, Complex, Ket, MeasurementBasis};

use super::{conditional_states, decomposition_estimate, BipartiteState};

/// One `(m, nu)` context.
#[derive(Clone, Debug, PartialEq)]
pub struct ContextCell {
    pub m: usize,
    pub nu: usize,
    /// `|<m; nu|E>|^2`.
    pub joint_probability: f64,
    /// `P(nu|rho, m)`; zero when outcome `m` itself is improbable.
    pub conditional_probability: f64,
    /// `A^(nu)(m)`; `None` when the joint probability is below `EPS_PROB`.
    pub weak_value: Option<Complex>,
}

/// Per-`m` aggregates over the reference outcomes.
#[derive(Clone, Debug, PartialEq)]
pub struct OutcomeSummary {
    /// `<m|rho|m>`.
    pub probability: f64,
    /// `A(m)`; `None` when `m` is improbable.
    pub estimate: Option<Complex>,
    /// `eta_A^2(m)`; `None` when `m` is improbable.
    pub residual: Option<f64>,
}

/// All `(m, nu)` contexts of a bipartite state, `m` on the system and `nu`
/// on the reference. Cells are ordered `m`-major.
#[derive(Clone, Debug, PartialEq)]
pub struct ContextTable {
    pub m_basis: MeasurementBasis,
    pub nu_basis: MeasurementBasis,
    pub cells: Vec<ContextCell>,
    pub outcomes: Vec<OutcomeSummary>,
}

impl ContextTable {
    pub fn cell(&self, m: usize, nu: usize) -> &ContextCell {
        &self.cells[m * self.nu_basis.dim() + nu]
    }
}

/// Resolves the variance of `A` in the reduced state of `e` over the joint
/// contexts `(m, nu)`:
/// `sum_{m,nu} |<m;nu|E>|^2 |A^(nu)(m)|^2 - Tr(rho A)^2`.
///
/// Cells without a weak value contribute the limit `|<m;nu|(A ⊗ I)|E>|^2`.
pub fn total_variance_decomposition(
    e: &BipartiteState,
    m_basis: &MeasurementBasis,
    nu_basis: &MeasurementBasis,
    a: &HermitianObservable,
) -> Result<(ContextTable, f64)> {
    check_dim(e.dim_s(), m_basis.dim())?;
    check_dim(e.dim_r(), nu_basis.dim())?;
    check_dim(e.dim_s(), a.dim())?;
    let ae = e.apply_system(a.matrix())?;
    let rho = e.reduced_system();
    let mean = rho.expectation(a)?;

    // Conditioned reference vectors are shared by every m.
    let conditioned: Vec<(Vec<Complex>, Vec<Complex>)> = nu_basis
        .iter()
        .map(|nu| Ok((e.condition_on_reference(nu)?, ae.condition_on_reference(nu)?)))
        .collect::<Result<_>>()?;

    let mut cells = Vec::with_capacity(m_basis.dim() * nu_basis.dim());
    let mut outcomes = Vec::with_capacity(m_basis.dim());
    let mut second_moment = 0.0;
    for (mi, m) in m_basis.iter().enumerate() {
        let joint: Vec<(Complex, Complex)> =
            conditioned.iter().map(|(c, ac)| (dot(m.amps(), c), dot(m.amps(), ac))).collect();
        let p_m: f64 = joint.iter().map(|(amp, _)| amp.norm_sqr()).sum();

        let mut estimate = Complex::new(0.0, 0.0);
        let mut conditional_square = 0.0;
        for (ni, (amp, a_amp)) in joint.iter().enumerate() {
            let jp = amp.norm_sqr();
            let weak_value = (jp >= EPS_PROB).then(|| a_amp / amp);
            let square_term = match weak_value {
                Some(w) => jp * w.norm_sqr(),
                None => a_amp.norm_sqr(),
            };
            second_moment += square_term;
            let conditional_probability = if p_m >= EPS_PROB { jp / p_m } else { 0.0 };
            if p_m >= EPS_PROB {
                estimate += match weak_value {
                    Some(w) => w * conditional_probability,
                    None => amp.conj() * a_amp / p_m,
                };
                conditional_square += square_term / p_m;
            }
            cells.push(ContextCell { m: mi, nu: ni, joint_probability: jp, conditional_probability, weak_value });
        }
        outcomes.push(if p_m >= EPS_PROB {
            OutcomeSummary {
                probability: p_m,
                estimate: Some(estimate),
                residual: Some(conditional_square - estimate.norm_sqr()),
            }
        } else {
            OutcomeSummary { probability: p_m, estimate: None, residual: None }
        });
    }
    let table = ContextTable { m_basis: m_basis.clone(), nu_basis: nu_basis.clone(), cells, outcomes };
    Ok((table, second_moment - mean * mean))
}

/// Averaged squares of outcome `m` in two preparation contexts.
#[derive(Clone, Debug, PartialEq)]
pub struct Equivalence {
    /// Steered weak values: `sum_nu P(nu|rho, m) |A^(nu)(m)|^2`.
    pub lhs: f64,
    /// Eigenvalues: `sum_a P(a|rho, m) A_a^2`.
    pub rhs: f64,
    /// Operator route: `eta_A^2(m) + |A(m)|^2`.
    pub reference: f64,
}

/// Compares the averaged squares obtained from the steered decomposition of
/// `nu_basis` with the Bayesian eigenvalue decomposition. Requires the
/// reduced state to commute with `A`.
pub fn equivalence_check(
    e: &BipartiteState,
    m: &Ket,
    nu_basis: &MeasurementBasis,
    a: &HermitianObservable,
) -> Result<Equivalence> {
    let rho: DensityOperator = e.reduced_system();
    check_dim(rho.dim(), m.dim())?;
    let common = common_eigenbasis(&rho, a)?;
    let p = rho.probability(m)?;
    if p < EPS_PROB {
        return Err(Error::undefined("outcome <m|rho|m>", p));
    }
    let lhs = decomposition_estimate(&conditional_states(e, nu_basis)?, m, a)?.averaged_square;
    let rhs: f64 = common
        .basis
        .iter()
        .zip(&common.weights)
        .zip(&common.observable_values)
        .map(|((ak, w), v)| dot(m.amps(), ak.amps()).norm_sqr() * w / p * v * v)
        .sum();
    let reference = residual_error(&rho, m, a)? + mixed_weak_value(&rho, m, a)?.norm_sqr();
    Ok(Equivalence { lhs, rhs, reference })
}
