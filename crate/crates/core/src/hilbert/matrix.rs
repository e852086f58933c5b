use std::ops::{Add, Index, Mul, Sub};

use super::{dot, Complex, Ket, ONE, ZERO};
use crate::error::{check_dim, Error, Result};

/// Dense row-major complex square matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct SquareMatrix {
    dim: usize,
    entries: Vec<Complex>,
}

impl SquareMatrix {
    pub fn from_entries(dim: usize, entries: Vec<Complex>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        check_dim(dim * dim, entries.len())?;
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::validation("matrix", "non-finite entry"));
        }
        Ok(SquareMatrix { dim, entries })
    }

    pub fn from_rows(rows: &[Vec<Complex>]) -> Result<Self> {
        let dim = rows.len();
        for row in rows {
            check_dim(dim, row.len())?;
        }
        SquareMatrix::from_entries(dim, rows.concat())
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let rows: Vec<Vec<Complex>> =
            rows.iter().map(|r| r.iter().map(|&x| Complex::new(x, 0.0)).collect()).collect();
        SquareMatrix::from_rows(&rows)
    }

    pub fn zeros(dim: usize) -> Self {
        SquareMatrix { dim, entries: vec![ZERO; dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = SquareMatrix::zeros(dim);
        for i in 0..dim {
            m.entries[i * dim + i] = ONE;
        }
        m
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let dim = values.len();
        let mut m = SquareMatrix::zeros(dim);
        for (i, &v) in values.iter().enumerate() {
            m.entries[i * dim + i] = Complex::new(v, 0.0);
        }
        m
    }

    /// `|x><y|` from raw amplitudes.
    pub(crate) fn outer(x: &[Complex], y: &[Complex]) -> Self {
        let dim = x.len();
        let mut entries = Vec::with_capacity(dim * dim);
        for xi in x {
            entries.extend(y.iter().map(|yj| xi * yj.conj()));
        }
        SquareMatrix { dim, entries }
    }

    /// Projector `|k><k|`.
    pub fn projector(k: &Ket) -> Self {
        SquareMatrix::outer(k.amps(), k.amps())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[Complex] {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> Complex {
        self.entries[row * self.dim + col]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[Complex]> {
        self.entries.chunks(self.dim)
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut entries = vec![ZERO; n * n];
        for i in 0..n {
            for j in 0..n {
                entries[j * n + i] = self.entries[i * n + j].conj();
            }
        }
        SquareMatrix { dim: n, entries }
    }

    pub fn scale(&self, factor: Complex) -> Self {
        SquareMatrix { dim: self.dim, entries: self.entries.iter().map(|z| z * factor).collect() }
    }

    pub fn trace(&self) -> Complex {
        (0..self.dim).map(|i| self.entries[i * self.dim + i]).sum()
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Max-entry deviation from Hermiticity.
    pub fn hermiticity_deviation(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                let d = (self.entries[i * n + j] - self.entries[j * n + i].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    /// `M v` for a raw amplitude vector.
    pub fn apply(&self, v: &[Complex]) -> Result<Vec<Complex>> {
        check_dim(self.dim, v.len())?;
        Ok(self.rows().map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect())
    }

    /// `<x| M |y>`.
    pub fn sandwich(&self, x: &[Complex], y: &[Complex]) -> Result<Complex> {
        check_dim(self.dim, x.len())?;
        Ok(dot(x, &self.apply(y)?))
    }

    pub fn matmul(&self, other: &SquareMatrix) -> Result<SquareMatrix> {
        check_dim(self.dim, other.dim)?;
        let n = self.dim;
        let mut entries = vec![ZERO; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.entries[i * n + k];
                if a == ZERO {
                    continue;
                }
                for j in 0..n {
                    entries[i * n + j] += a * other.entries[k * n + j];
                }
            }
        }
        Ok(SquareMatrix { dim: n, entries })
    }

    /// `AB - BA`.
    pub fn commutator(&self, other: &SquareMatrix) -> Result<SquareMatrix> {
        Ok(&self.matmul(other)? - &other.matmul(self)?)
    }

    /// `M ⊗ I_r` acting on a row-major `dim × r` coefficient matrix.
    pub(crate) fn apply_left(&self, coeffs: &[Complex], r: usize) -> Vec<Complex> {
        let n = self.dim;
        let mut out = vec![ZERO; n * r];
        for i in 0..n {
            for k in 0..n {
                let a = self.entries[i * n + k];
                for j in 0..r {
                    out[i * r + j] += a * coeffs[k * r + j];
                }
            }
        }
        out
    }
}

impl Index<(usize, usize)> for SquareMatrix {
    type Output = Complex;

    fn index(&self, (row, col): (usize, usize)) -> &Complex {
        &self.entries[row * self.dim + col]
    }
}

fn zip_with(a: &SquareMatrix, b: &SquareMatrix, f: impl Fn(Complex, Complex) -> Complex) -> SquareMatrix {
    assert_eq!(a.dim, b.dim, "matrix dimension mismatch");
    SquareMatrix { dim: a.dim, entries: a.entries.iter().zip(&b.entries).map(|(x, y)| f(*x, *y)).collect() }
}

impl Add for &SquareMatrix {
    type Output = SquareMatrix;

    fn add(self, rhs: &SquareMatrix) -> SquareMatrix {
        zip_with(self, rhs, |x, y| x + y)
    }
}

impl Sub for &SquareMatrix {
    type Output = SquareMatrix;

    fn sub(self, rhs: &SquareMatrix) -> SquareMatrix {
        zip_with(self, rhs, |x, y| x - y)
    }
}

impl Mul for &SquareMatrix {
    type Output = SquareMatrix;

    /// Panics on dimension mismatch; use [`SquareMatrix::matmul`] for a checked product.
    fn mul(self, rhs: &SquareMatrix) -> SquareMatrix {
        self.matmul(rhs).expect("matrix dimension mismatch")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn from_rows_rejects_ragged_and_empty() {
        let c = Complex::new(1.0, 0.0);
        assert!(SquareMatrix::from_rows(&[vec![c, c], vec![c]]).is_err());
        assert!(matches!(SquareMatrix::from_entries(0, vec![]), Err(Error::ZeroDimension)));
    }

    #[test]
    fn commutator_of_paulis() {
        let x = SquareMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap();
        let z = SquareMatrix::diagonal(&[1.0, -1.0]);
        let c = x.commutator(&z).unwrap();
        // [X, Z] = -2iY
        assert_eq!(c.get(0, 1), Complex::new(-2.0, 0.0));
        assert_eq!(c.get(1, 0), Complex::new(2.0, 0.0));
        assert_eq!(z.commutator(&z).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn adjoint_and_hermiticity() {
        let m = SquareMatrix::from_rows(&[
            vec![Complex::new(1.0, 0.0), Complex::new(0.0, 2.0)],
            vec![Complex::new(0.0, -2.0), Complex::new(3.0, 0.0)],
        ])
        .unwrap();
        assert_eq!(m.adjoint(), m);
        assert_eq!(m.hermiticity_deviation(), 0.0);
        assert_eq!(m.trace(), Complex::new(4.0, 0.0));
    }
}
