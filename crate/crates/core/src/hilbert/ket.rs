use std::fmt;

use super::{dot, norm_sqr, Complex, EPS_PHASE, TOL_NORM};
use crate::error::{check_dim, Error, Result};

/// A normalized state vector with canonical global phase.
#[derive(Clone, PartialEq)]
pub struct Ket {
    amps: Vec<Complex>,
}

impl Ket {
    /// Builds a ket from amplitudes that are already normalized within
    /// [`TOL_NORM`]. The global phase is canonicalized.
    pub fn new(amps: Vec<Complex>) -> Result<Self> {
        if amps.is_empty() {
            return Err(Error::ZeroDimension);
        }
        if amps.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::validation("ket", "non-finite amplitude"));
        }
        let norm = norm_sqr(&amps).sqrt();
        if (norm - 1.0).abs() > TOL_NORM {
            return Err(Error::validation("ket", format!("norm deviates from 1 (norm = {norm})")));
        }
        // Remove the residual round-off so the stored vector is unit length.
        let amps = amps.into_iter().map(|a| a / norm).collect();
        Ok(Ket { amps: canonicalize_phase(amps) })
    }

    /// Normalizes arbitrary nonzero amplitudes.
    pub fn normalized(amps: Vec<Complex>) -> Result<Self> {
        if amps.is_empty() {
            return Err(Error::ZeroDimension);
        }
        let norm = norm_sqr(&amps).sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::validation("ket", "cannot normalize a zero or non-finite vector"));
        }
        Ket::new(amps.into_iter().map(|a| a / norm).collect())
    }

    /// Real amplitudes, normalized.
    pub fn from_real(amps: &[f64]) -> Result<Self> {
        Ket::normalized(amps.iter().map(|&x| Complex::new(x, 0.0)).collect())
    }

    /// Computational basis state `|index>`.
    pub fn basis_state(dim: usize, index: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        if index >= dim {
            return Err(Error::Dimension { expected: dim, found: index + 1 });
        }
        let mut amps = vec![super::ZERO; dim];
        amps[index] = super::ONE;
        Ok(Ket { amps })
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amps(&self) -> &[Complex] {
        &self.amps
    }

    pub fn into_amps(self) -> Vec<Complex> {
        self.amps
    }
}

impl fmt::Debug for Ket {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.amps.iter().map(|a| (a.re, a.im))).finish()
    }
}

/// `<x|y>`.
pub fn inner_product(x: &Ket, y: &Ket) -> Result<Complex> {
    check_dim(x.dim(), y.dim())?;
    Ok(dot(&x.amps, &y.amps))
}

/// Rotates the global phase so the first amplitude with modulus above
/// [`EPS_PHASE`] is real and positive. Idempotent bit-for-bit.
pub fn canonicalize_phase(mut amps: Vec<Complex>) -> Vec<Complex> {
    let Some(pivot) = amps.iter().position(|a| a.norm() > EPS_PHASE) else {
        return amps;
    };
    let a = amps[pivot];
    if a.im == 0.0 && a.re > 0.0 {
        return amps;
    }
    let modulus = a.norm();
    let phase = a.conj() / modulus;
    for (i, x) in amps.iter_mut().enumerate() {
        *x = if i == pivot { Complex::new(modulus, 0.0) } else { *x * phase };
    }
    amps
}
