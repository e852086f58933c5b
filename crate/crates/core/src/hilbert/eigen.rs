use super::{dot, norm_sqr, Complex, Ket, MeasurementBasis, SquareMatrix, TOL_DEGENERATE, TOL_HERM, ZERO};
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 100;
/// Projected unit vectors shorter than this are not used to span a
/// degenerate eigenspace.
const MIN_PROJECTION: f64 = 1e-6;

/// Eigenvalues in descending order with their eigenvectors.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenSystem {
    pub values: Vec<f64>,
    pub vectors: MeasurementBasis,
}

impl EigenSystem {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, &Ket)> {
        self.values.iter().copied().zip(self.vectors.iter())
    }

    /// `sum_k values_k |v_k><v_k|`.
    pub fn reconstruct(&self) -> SquareMatrix {
        let n = self.dim();
        self.iter().fold(SquareMatrix::zeros(n), |acc, (v, k)| {
            &acc + &SquareMatrix::projector(k).scale(Complex::new(v, 0.0))
        })
    }
}

/// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi
/// rotations.
///
/// Eigenvalues come out descending. Eigenvalues within [`TOL_DEGENERATE`] of
/// their neighbour form a cluster; the cluster's eigenspace is re-spanned by
/// projecting computational basis vectors in index order and
/// Gram-Schmidt orthonormalizing them, so the output depends only on the
/// eigenspaces and not on rotation order. Every vector is phase-canonical.
pub fn hermitian_eigendecomposition(m: &SquareMatrix) -> Result<EigenSystem> {
    let deviation = m.hermiticity_deviation();
    if deviation > TOL_HERM {
        return Err(Error::Hermiticity { deviation });
    }
    let n = m.dim();
    let (diag, vecs) = jacobi(m);

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| diag[j].total_cmp(&diag[i]).then(i.cmp(&j)));
    let values: Vec<f64> = order.iter().map(|&i| diag[i]).collect();
    let columns: Vec<Vec<Complex>> =
        order.iter().map(|&j| (0..n).map(|i| vecs[i * n + j]).collect()).collect();

    let mut kets = Vec::with_capacity(n);
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && values[end - 1] - values[end] < TOL_DEGENERATE {
            end += 1;
        }
        if end - start == 1 {
            kets.push(Ket::normalized(columns[start].clone())?);
        } else {
            kets.extend(respan_cluster(&columns[start..end], n)?);
        }
        start = end;
    }
    Ok(EigenSystem { values, vectors: MeasurementBasis::from_kets_unchecked(kets) })
}

fn respan_cluster(cluster: &[Vec<Complex>], n: usize) -> Result<Vec<Ket>> {
    let k = cluster.len();
    let mut span: Vec<Vec<Complex>> = Vec::with_capacity(k);
    for idx in 0..n {
        if span.len() == k {
            break;
        }
        // P e_idx = sum_v v conj(v_idx)
        let mut w = vec![ZERO; n];
        for v in cluster {
            let c = v[idx].conj();
            for (wi, vi) in w.iter_mut().zip(v) {
                *wi += vi * c;
            }
        }
        // Two Gram-Schmidt passes against the vectors already chosen.
        for _ in 0..2 {
            for u in &span {
                let c = dot(u, &w);
                for (wi, ui) in w.iter_mut().zip(u) {
                    *wi -= ui * c;
                }
            }
        }
        let norm = norm_sqr(&w).sqrt();
        if norm > MIN_PROJECTION {
            span.push(w.into_iter().map(|x| x / norm).collect());
        }
    }
    debug_assert_eq!(span.len(), k, "degenerate eigenspace lost rank");
    span.into_iter().map(Ket::normalized).collect()
}

/// Returns the real diagonal and the row-major matrix of column eigenvectors.
fn jacobi(m: &SquareMatrix) -> (Vec<f64>, Vec<Complex>) {
    let n = m.dim();
    let h = &(m + &m.adjoint()).scale(Complex::new(0.5, 0.0));
    let mut a: Vec<Complex> = h.entries().to_vec();
    let mut v: Vec<Complex> = SquareMatrix::identity(n).entries().to_vec();
    for i in 0..n {
        a[i * n + i].im = 0.0;
    }
    let scale = norm_sqr(&a).sqrt();

    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i * n + j].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= f64::EPSILON * scale * 1e-2 || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                let r = apq.norm();
                if r == 0.0 || r < f64::MIN_POSITIVE {
                    continue;
                }
                let e = apq / r;
                let app = a[p * n + p].re;
                let aqq = a[q * n + q].re;
                let theta = (aqq - app) / (2.0 * r);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                let j_pp = Complex::new(c, 0.0);
                let j_pq = Complex::new(s, 0.0);
                let j_qp = e.conj() * -s;
                let j_qq = e.conj() * c;

                for k in 0..n {
                    let (akp, akq) = (a[k * n + p], a[k * n + q]);
                    a[k * n + p] = akp * j_pp + akq * j_qp;
                    a[k * n + q] = akp * j_pq + akq * j_qq;
                    let (vkp, vkq) = (v[k * n + p], v[k * n + q]);
                    v[k * n + p] = vkp * j_pp + vkq * j_qp;
                    v[k * n + q] = vkp * j_pq + vkq * j_qq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p * n + k], a[q * n + k]);
                    a[p * n + k] = j_pp.conj() * apk + j_qp.conj() * aqk;
                    a[q * n + k] = j_pq.conj() * apk + j_qq.conj() * aqk;
                }
                a[p * n + q] = ZERO;
                a[q * n + p] = ZERO;
                a[p * n + p].im = 0.0;
                a[q * n + q].im = 0.0;
            }
        }
    }
    ((0..n).map(|i| a[i * n + i].re).collect(), v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{random_hermitian, TOL_EIG};
    use std::f64::consts::FRAC_1_SQRT_2;

    fn assert_ket(k: &Ket, expected: &[f64]) {
        for (a, e) in k.amps().iter().zip(expected) {
            assert!((a - Complex::new(*e, 0.0)).norm() < 1e-12, "{k:?} vs {expected:?}");
        }
    }

    #[test]
    fn diagonal_input_sorted_descending() {
        let es = hermitian_eigendecomposition(&SquareMatrix::diagonal(&[0.25, 0.75])).unwrap();
        assert_eq!(es.values, vec![0.75, 0.25]);
        assert_ket(&es.vectors.kets()[0], &[0.0, 1.0]);
        assert_ket(&es.vectors.kets()[1], &[1.0, 0.0]);
    }

    #[test]
    fn pauli_x_closed_form() {
        let x = SquareMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap();
        let es = hermitian_eigendecomposition(&x).unwrap();
        assert!((es.values[0] - 1.0).abs() < 1e-15 && (es.values[1] + 1.0).abs() < 1e-15);
        assert_ket(&es.vectors.kets()[0], &[FRAC_1_SQRT_2, FRAC_1_SQRT_2]);
        assert_ket(&es.vectors.kets()[1], &[FRAC_1_SQRT_2, -FRAC_1_SQRT_2]);
    }

    #[test]
    fn degenerate_identity_gives_canonical_basis() {
        let es = hermitian_eigendecomposition(&SquareMatrix::diagonal(&[0.5, 0.5])).unwrap();
        assert_eq!(es.values, vec![0.5, 0.5]);
        assert_ket(&es.vectors.kets()[0], &[1.0, 0.0]);
        assert_ket(&es.vectors.kets()[1], &[0.0, 1.0]);
    }

    #[test]
    fn degenerate_cluster_independent_of_input_rotation() {
        // diag(2, 1, 1) conjugated by a rotation that mixes only the degenerate block.
        let c = 0.6;
        let s = 0.8;
        let u = SquareMatrix::from_real_rows(&[&[1.0, 0.0, 0.0], &[0.0, c, -s], &[0.0, s, c]]).unwrap();
        let m = &(&u * &SquareMatrix::diagonal(&[2.0, 1.0, 1.0])) * &u.adjoint();
        let es = hermitian_eigendecomposition(&m).unwrap();
        let plain = hermitian_eigendecomposition(&SquareMatrix::diagonal(&[2.0, 1.0, 1.0])).unwrap();
        for (a, b) in es.vectors.iter().zip(plain.vectors.iter()) {
            for (x, y) in a.amps().iter().zip(b.amps()) {
                assert!((x - y).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = SquareMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
        assert!(matches!(hermitian_eigendecomposition(&m), Err(Error::Hermiticity { .. })));
    }

    #[test]
    fn random_reconstruction_and_eigen_equation() {
        for dim in 1..=16 {
            for seed in 0..4 {
                let m = random_hermitian(dim, seed * 31 + dim as u64).unwrap();
                let es = hermitian_eigendecomposition(&m).unwrap();
                assert!(es.values.windows(2).all(|w| w[0] >= w[1]));
                let diff = (&m - &es.reconstruct()).max_abs();
                assert!(diff <= 1e-9, "dim {dim}: reconstruction error {diff}");
                for (val, k) in es.iter() {
                    let mv = m.apply(k.amps()).unwrap();
                    let res = mv.iter().zip(k.amps()).map(|(a, b)| (a - b * val).norm()).fold(0.0, f64::max);
                    assert!(res <= TOL_EIG, "dim {dim}: eigen residual {res}");
                }
            }
        }
    }

    #[test]
    fn deterministic_for_fixed_input() {
        let m = random_hermitian(6, 42).unwrap();
        assert_eq!(hermitian_eigendecomposition(&m).unwrap(), hermitian_eigendecomposition(&m).unwrap());
    }
}
