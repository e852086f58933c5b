use std::f64::consts::{FRAC_1_SQRT_2, PI};

use super::{dot, Complex, Ket, SquareMatrix, TOL_ORTHO};
use crate::error::{check_dim, Error, Result};

/// An orthonormal basis of kets, in a fixed outcome order.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementBasis {
    kets: Vec<Ket>,
}

impl MeasurementBasis {
    /// Validates completeness and pairwise orthonormality within [`TOL_ORTHO`].
    pub fn new(kets: Vec<Ket>) -> Result<Self> {
        let dim = kets.first().map(Ket::dim).ok_or(Error::ZeroDimension)?;
        check_dim(dim, kets.len())?;
        for k in &kets {
            check_dim(dim, k.dim())?;
        }
        for (i, a) in kets.iter().enumerate() {
            for (j, b) in kets.iter().enumerate().skip(i + 1) {
                let overlap = dot(a.amps(), b.amps()).norm();
                if overlap > TOL_ORTHO {
                    return Err(Error::validation(
                        "basis",
                        format!("kets {i} and {j} are not orthogonal (|<i|j>| = {overlap:e})"),
                    ));
                }
            }
        }
        Ok(MeasurementBasis { kets })
    }

    pub fn computational(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        let kets = (0..dim).map(|i| Ket::basis_state(dim, i)).collect::<Result<_>>()?;
        Ok(MeasurementBasis { kets })
    }

    /// Discrete Fourier basis, `|f_k> = sum_j e^{2 pi i jk/d} |j> / sqrt(d)`.
    /// At `dim = 2` this is `{|+>, |->}`.
    pub fn fourier(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        let scale = 1.0 / (dim as f64).sqrt();
        let kets = (0..dim)
            .map(|k| {
                let amps = (0..dim)
                    .map(|j| Complex::from_polar(scale, 2.0 * PI * ((j * k) % dim) as f64 / dim as f64))
                    .collect();
                Ket::new(amps)
            })
            .collect::<Result<_>>()?;
        MeasurementBasis::new(kets)
    }

    /// `{|+>, |->}` on a qubit.
    pub fn diagonal() -> Self {
        let s = FRAC_1_SQRT_2;
        MeasurementBasis {
            kets: vec![
                Ket::new(vec![Complex::new(s, 0.0), Complex::new(s, 0.0)]).unwrap(),
                Ket::new(vec![Complex::new(s, 0.0), Complex::new(-s, 0.0)]).unwrap(),
            ],
        }
    }

    /// `{(|0> + i|1>)/sqrt 2, (|0> - i|1>)/sqrt 2}` on a qubit.
    pub fn circular() -> Self {
        let s = FRAC_1_SQRT_2;
        MeasurementBasis {
            kets: vec![
                Ket::new(vec![Complex::new(s, 0.0), Complex::new(0.0, s)]).unwrap(),
                Ket::new(vec![Complex::new(s, 0.0), Complex::new(0.0, -s)]).unwrap(),
            ],
        }
    }

    /// Basis formed by the columns of a unitary matrix.
    pub fn from_unitary_columns(u: &SquareMatrix) -> Result<Self> {
        let n = u.dim();
        let kets = (0..n)
            .map(|j| Ket::new((0..n).map(|i| u.get(i, j)).collect()))
            .collect::<Result<_>>()?;
        MeasurementBasis::new(kets)
    }

    pub fn dim(&self) -> usize {
        self.kets.len()
    }

    pub fn kets(&self) -> &[Ket] {
        &self.kets
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Ket> {
        self.kets.iter()
    }

    /// Unitary whose columns are the basis kets.
    pub fn to_unitary(&self) -> SquareMatrix {
        let n = self.dim();
        let mut entries = vec![super::ZERO; n * n];
        for (j, k) in self.kets.iter().enumerate() {
            for (i, a) in k.amps().iter().enumerate() {
                entries[i * n + j] = *a;
            }
        }
        SquareMatrix::from_entries(n, entries).expect("basis kets are finite")
    }

    pub(crate) fn from_kets_unchecked(kets: Vec<Ket>) -> Self {
        MeasurementBasis { kets }
    }
}

impl<'a> IntoIterator for &'a MeasurementBasis {
    type Item = &'a Ket;
    type IntoIter = std::slice::Iter<'a, Ket>;

    fn into_iter(self) -> Self::IntoIter {
        self.kets.iter()
    }
}
