use crate::contextual::{HermitianObservable, EPS_PROB};
use crate::error::{check_dim, Error, Result};
use crate::hilbert::{dot, norm_sqr, Complex, Ket, MeasurementBasis, SquareMatrix, TOL_NORM};

use super::BipartiteState;

/// `rho = sum_nu w_nu |psi_nu><psi_nu|`, one branch per reference outcome.
/// Branches with weight below [`EPS_PROB`] carry no state.
#[derive(Clone, Debug, PartialEq)]
pub struct PureStateDecomposition {
    pub weights: Vec<f64>,
    pub states: Vec<Option<Ket>>,
    pub source_basis: MeasurementBasis,
}

impl PureStateDecomposition {
    pub fn new(weights: Vec<f64>, states: Vec<Option<Ket>>, source_basis: MeasurementBasis) -> Result<Self> {
        check_dim(weights.len(), states.len())?;
        check_dim(source_basis.dim(), weights.len())?;
        let total: f64 = weights.iter().sum();
        if weights.iter().any(|&w| w < 0.0) || (total - 1.0).abs() > TOL_NORM {
            return Err(Error::validation("weights", format!("not a probability vector (sum = {total})")));
        }
        let dim = states.iter().flatten().map(Ket::dim).next().ok_or(Error::ZeroDimension)?;
        for (i, (w, s)) in weights.iter().zip(&states).enumerate() {
            match s {
                Some(k) => check_dim(dim, k.dim())?,
                None if *w >= EPS_PROB => {
                    return Err(Error::validation("states", format!("branch {i} has weight {w} but no state")));
                }
                None => {}
            }
        }
        Ok(PureStateDecomposition { weights, states, source_basis })
    }

    pub fn system_dim(&self) -> usize {
        self.states.iter().flatten().map(Ket::dim).next().unwrap_or(0)
    }

    fn branches(&self) -> impl Iterator<Item = (usize, f64, &Ket)> {
        self.weights.iter().zip(&self.states).enumerate().filter_map(|(i, (w, s))| s.as_ref().map(|k| (i, *w, k)))
    }

    /// `sum_nu w_nu |psi_nu><psi_nu|`.
    pub fn reconstruct(&self) -> SquareMatrix {
        self.branches().fold(SquareMatrix::zeros(self.system_dim()), |acc, (_, w, k)| {
            &acc + &SquareMatrix::projector(k).scale(Complex::new(w, 0.0))
        })
    }
}

/// Conditional system states prepared by measuring the reference in `nu_basis`:
/// `sqrt(rho_nu) |psi_nu> = (I ⊗ <nu|) |E>`.
pub fn conditional_states(e: &BipartiteState, nu_basis: &MeasurementBasis) -> Result<PureStateDecomposition> {
    check_dim(e.dim_r(), nu_basis.dim())?;
    let mut weights = Vec::with_capacity(nu_basis.dim());
    let mut states = Vec::with_capacity(nu_basis.dim());
    for nu in nu_basis {
        let cond = e.condition_on_reference(nu)?;
        let w = norm_sqr(&cond);
        weights.push(w);
        states.push(if w >= EPS_PROB { Some(Ket::normalized(cond)?) } else { None });
    }
    Ok(PureStateDecomposition { weights, states, source_basis: nu_basis.clone() })
}

/// Optimal estimate for outcome `m` written as an average over the branches
/// of a pure-state decomposition.
#[derive(Clone, Debug, PartialEq)]
pub struct DecompositionEstimate {
    /// `A(m) = sum_nu P(nu|rho, m) A^(nu)(m)`.
    pub estimate: Complex,
    /// `<m|rho|m>`.
    pub probability: f64,
    /// `P(nu|rho, m) = w_nu |<m|psi_nu>|^2 / <m|rho|m>`.
    pub conditionals: Vec<f64>,
    /// Weak value of each branch; `None` where `P(nu|rho, m) < EPS_PROB`.
    pub branch_values: Vec<Option<Complex>>,
    /// `sum_nu P(nu|rho, m) |A^(nu)(m)|^2`.
    pub averaged_square: f64,
}

impl DecompositionEstimate {
    /// `averaged_square - |estimate|^2`.
    pub fn error(&self) -> f64 {
        self.averaged_square - self.estimate.norm_sqr()
    }
}

/// Averages the branch weak values of `dec` with the conditional
/// probabilities of each branch given outcome `m`.
///
/// Branches too unlikely to carry a weak value contribute their finite limits
/// `w_nu conj(<m|psi_nu>) <m|A|psi_nu> / p` and `w_nu |<m|A|psi_nu>|^2 / p`.
pub fn decomposition_estimate(
    dec: &PureStateDecomposition,
    m: &Ket,
    a: &HermitianObservable,
) -> Result<DecompositionEstimate> {
    check_dim(dec.system_dim(), m.dim())?;
    check_dim(dec.system_dim(), a.dim())?;
    let n = dec.weights.len();
    let mut overlaps = vec![(Complex::new(0.0, 0.0), Complex::new(0.0, 0.0)); n];
    for (i, _, k) in dec.branches() {
        overlaps[i] = (dot(m.amps(), k.amps()), a.matrix().sandwich(m.amps(), k.amps())?);
    }
    let probability: f64 = dec.weights.iter().zip(&overlaps).map(|(w, (o, _))| w * o.norm_sqr()).sum();
    if probability < EPS_PROB {
        return Err(Error::undefined("outcome <m|rho|m>", probability));
    }

    let mut estimate = Complex::new(0.0, 0.0);
    let mut averaged_square = 0.0;
    let mut conditionals = Vec::with_capacity(n);
    let mut branch_values = Vec::with_capacity(n);
    for (w, (overlap, a_overlap)) in dec.weights.iter().zip(&overlaps) {
        let cond = w * overlap.norm_sqr() / probability;
        conditionals.push(cond);
        if cond >= EPS_PROB {
            let value = a_overlap / overlap;
            estimate += value * cond;
            averaged_square += cond * value.norm_sqr();
            branch_values.push(Some(value));
        } else {
            estimate += overlap.conj() * a_overlap * (w / probability);
            averaged_square += w * a_overlap.norm_sqr() / probability;
            branch_values.push(None);
        }
    }
    Ok(DecompositionEstimate { estimate, probability, conditionals, branch_values, averaged_square })
}

/// Residual error of outcome `m` explained as the spread of branch weak values.
pub fn decomposition_error(dec: &PureStateDecomposition, m: &Ket, a: &HermitianObservable) -> Result<f64> {
    Ok(decomposition_estimate(dec, m, a)?.error())
}
