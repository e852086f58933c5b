use std::f64::consts::FRAC_1_SQRT_2;

use crate::contextual::{DensityOperator, EPS_PROB};
use crate::error::{check_dim, Error, Result};
use crate::hilbert::{norm_sqr, Complex, Ket, SquareMatrix, TOL_NORM, ZERO};

/// Pure state of system ⊗ reference, stored as the row-major
/// `dim_s × dim_r` matrix of amplitudes of `|i>_S ⊗ |j>_R`.
#[derive(Clone, Debug, PartialEq)]
pub struct BipartiteState {
    dim_s: usize,
    dim_r: usize,
    coeffs: Vec<Complex>,
}

impl BipartiteState {
    pub fn new(dim_s: usize, dim_r: usize, coeffs: Vec<Complex>) -> Result<Self> {
        if dim_s == 0 || dim_r == 0 {
            return Err(Error::ZeroDimension);
        }
        check_dim(dim_s * dim_r, coeffs.len())?;
        if coeffs.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::validation("bipartite", "non-finite coefficient"));
        }
        let norm = norm_sqr(&coeffs).sqrt();
        if (norm - 1.0).abs() > TOL_NORM {
            return Err(Error::validation("bipartite", format!("norm deviates from 1 (norm = {norm})")));
        }
        Ok(BipartiteState { dim_s, dim_r, coeffs })
    }

    /// `|psi>_S ⊗ |r>_R`.
    pub fn product(psi: &Ket, r: &Ket) -> Self {
        let coeffs = psi.amps().iter().flat_map(|a| r.amps().iter().map(move |b| a * b)).collect();
        BipartiteState { dim_s: psi.dim(), dim_r: r.dim(), coeffs }
    }

    /// `(|00> + |11>) / sqrt 2`.
    pub fn bell() -> Self {
        let s = Complex::new(FRAC_1_SQRT_2, 0.0);
        BipartiteState { dim_s: 2, dim_r: 2, coeffs: vec![s, ZERO, ZERO, s] }
    }

    /// `(|01> - |10>) / sqrt 2`.
    pub fn singlet() -> Self {
        let s = Complex::new(FRAC_1_SQRT_2, 0.0);
        BipartiteState { dim_s: 2, dim_r: 2, coeffs: vec![ZERO, s, -s, ZERO] }
    }

    pub fn dim_s(&self) -> usize {
        self.dim_s
    }

    pub fn dim_r(&self) -> usize {
        self.dim_r
    }

    pub fn coeffs(&self) -> &[Complex] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize, j: usize) -> Complex {
        self.coeffs[i * self.dim_r + j]
    }

    /// Reduced system state `Tr_R |E><E| = C C^dagger`.
    pub fn reduced_system(&self) -> DensityOperator {
        let (n, r) = (self.dim_s, self.dim_r);
        let mut entries = vec![ZERO; n * n];
        for i in 0..n {
            for k in 0..n {
                entries[i * n + k] = (0..r).map(|j| self.coeff(i, j) * self.coeff(k, j).conj()).sum();
            }
        }
        let m = SquareMatrix::from_entries(n, entries).expect("finite");
        DensityOperator::new(m).expect("reduced state of a normalized pure state is a density operator")
    }

    /// `(I ⊗ <nu|) |E>`, the unnormalized conditional system state.
    pub fn condition_on_reference(&self, nu: &Ket) -> Result<Vec<Complex>> {
        check_dim(self.dim_r, nu.dim())?;
        Ok((0..self.dim_s)
            .map(|i| (0..self.dim_r).map(|j| nu.amps()[j].conj() * self.coeff(i, j)).sum())
            .collect())
    }

    /// `<m; nu | E>`.
    pub fn joint_amplitude(&self, m: &Ket, nu: &Ket) -> Result<Complex> {
        check_dim(self.dim_s, m.dim())?;
        let cond = self.condition_on_reference(nu)?;
        Ok(crate::hilbert::dot(m.amps(), &cond))
    }

    /// `(A ⊗ I) |E>` for a system operator `A`.
    pub(crate) fn apply_system(&self, a: &SquareMatrix) -> Result<BipartiteState> {
        check_dim(self.dim_s, a.dim())?;
        Ok(BipartiteState { dim_s: self.dim_s, dim_r: self.dim_r, coeffs: a.apply_left(&self.coeffs, self.dim_r) })
    }
}

/// Schmidt purification `sum_lambda sqrt(rho_lambda) |lambda>_S ⊗ |lambda>_R`.
///
/// The reference has the system's dimension and `|lambda>_R` is the
/// computational basis state labelled by the eigenvalue's rank, so the
/// coefficient matrix is `V diag(sqrt rho)` with `V` the eigenvectors in
/// descending-eigenvalue order. Zero weights are kept as zero columns;
/// weights below `EPS_PROB` count as zero.
pub fn purify(rho: &DensityOperator) -> BipartiteState {
    let es = rho.eigen();
    let n = es.dim();
    let mut coeffs = vec![ZERO; n * n];
    for (k, (w, v)) in es.iter().enumerate() {
        // sqrt would turn round-off zeros (~1e-17) into 1e-9 amplitudes.
        let s = if w < EPS_PROB { 0.0 } else { w.sqrt() };
        for (i, a) in v.amps().iter().enumerate() {
            coeffs[i * n + k] = a * s;
        }
    }
    // Renormalize away the dropped round-off weight.
    let norm = norm_sqr(&coeffs).sqrt();
    coeffs.iter_mut().for_each(|c| *c /= norm);
    BipartiteState { dim_s: n, dim_r: n, coeffs }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::random_pure_state;

    #[test]
    fn purify_diagonal() {
        let e = purify(&DensityOperator::diagonal(&[0.75, 0.25]).unwrap());
        let expect = [0.75f64.sqrt(), 0.0, 0.0, 0.25f64.sqrt()];
        for (c, x) in e.coeffs().iter().zip(expect) {
            assert!((c - Complex::new(x, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn purify_pure_is_product_with_reference_zero() {
        let psi = random_pure_state(3, 2).unwrap();
        let e = purify(&DensityOperator::pure(&psi));
        let expect = BipartiteState::product(&psi, &Ket::basis_state(3, 0).unwrap());
        for (a, b) in e.coeffs().iter().zip(expect.coeffs()) {
            assert!((a - b).norm() < 1e-12, "{:?}\n{:?}", e.coeffs(), expect.coeffs());
        }
    }

    #[test]
    fn purify_maximally_mixed_is_bell() {
        assert_eq!(purify(&DensityOperator::maximally_mixed(2).unwrap()), BipartiteState::bell());
    }

    #[test]
    fn purification_round_trip() {
        for dim in 2..=8 {
            for s in 0..5u64 {
                let rho = DensityOperator::random(dim, s * 13 + dim as u64).unwrap();
                let back = purify(&rho).reduced_system();
                let dev = (back.matrix() - rho.matrix()).max_abs();
                assert!(dev <= 1e-10, "dim {dim}: {dev}");
            }
        }
    }

    #[test]
    fn rejects_unnormalized() {
        let half = Complex::new(0.5, 0.0);
        assert!(BipartiteState::new(2, 2, vec![half; 4]).is_ok());
        assert!(BipartiteState::new(2, 2, vec![half, half, half, ZERO]).is_err());
        assert!(BipartiteState::new(2, 2, vec![half; 3]).is_err());
    }
}
