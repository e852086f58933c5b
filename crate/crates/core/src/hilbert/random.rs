//! Seeded Haar-random states, bases and test matrices.
//!
//! Each generator owns a separate ChaCha stream so the same seed fed to two
//! different generators gives unrelated draws.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};

use super::{dot, norm_sqr, Complex, Ket, MeasurementBasis, SquareMatrix};
use crate::error::{Error, Result};

const STREAM_STATE: u64 = 1;
const STREAM_BASIS: u64 = 2;
const STREAM_HERMITIAN: u64 = 3;
const STREAM_WEIGHTS: u64 = 4;

fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn gaussian(rng: &mut ChaCha8Rng) -> Complex {
    Complex::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Haar-random pure state: normalized complex Gaussian amplitudes.
pub fn random_pure_state(dim: usize, seed: u64) -> Result<Ket> {
    if dim == 0 {
        return Err(Error::ZeroDimension);
    }
    let mut rng = rng(seed, STREAM_STATE);
    Ket::normalized((0..dim).map(|_| gaussian(&mut rng)).collect())
}

/// Haar-random orthonormal basis: Gram-Schmidt over the columns of a complex
/// Gaussian matrix, in column order.
pub fn random_basis(dim: usize, seed: u64) -> Result<MeasurementBasis> {
    if dim == 0 {
        return Err(Error::ZeroDimension);
    }
    let mut rng = rng(seed, STREAM_BASIS);
    let mut columns: Vec<Vec<Complex>> = Vec::with_capacity(dim);
    while columns.len() < dim {
        let mut w: Vec<Complex> = (0..dim).map(|_| gaussian(&mut rng)).collect();
        for _ in 0..2 {
            for u in &columns {
                let c = dot(u, &w);
                for (wi, ui) in w.iter_mut().zip(u) {
                    *wi -= ui * c;
                }
            }
        }
        let norm = norm_sqr(&w).sqrt();
        // A near-dependent Gaussian draw has probability ~0; redraw if it happens.
        if norm > 1e-8 {
            columns.push(w.into_iter().map(|x| x / norm).collect());
        }
    }
    let kets = columns.into_iter().map(Ket::normalized).collect::<Result<_>>()?;
    MeasurementBasis::new(kets)
}

/// Random Hermitian matrix `(G + G^dagger) / 2` with complex Gaussian `G`.
pub fn random_hermitian(dim: usize, seed: u64) -> Result<SquareMatrix> {
    if dim == 0 {
        return Err(Error::ZeroDimension);
    }
    let mut rng = rng(seed, STREAM_HERMITIAN);
    let g = SquareMatrix::from_entries(dim, (0..dim * dim).map(|_| gaussian(&mut rng)).collect())?;
    Ok((&g + &g.adjoint()).scale(Complex::new(0.5, 0.0)))
}

/// Probability vector drawn uniformly from the simplex.
pub fn random_weights(n: usize, seed: u64) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::ZeroDimension);
    }
    let mut rng = rng(seed, STREAM_WEIGHTS);
    let raw: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let total: f64 = raw.iter().sum();
    Ok(raw.into_iter().map(|x| x / total).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dim_one_is_trivial() {
        assert_eq!(random_pure_state(1, 99).unwrap().amps(), &[Complex::new(1.0, 0.0)]);
        let b = random_basis(1, 5).unwrap();
        assert_eq!(b.kets()[0].amps(), &[Complex::new(1.0, 0.0)]);
    }

    #[test]
    fn zero_dim_rejected() {
        assert!(matches!(random_pure_state(0, 1), Err(Error::ZeroDimension)));
        assert!(matches!(random_basis(0, 1), Err(Error::ZeroDimension)));
    }

    #[test]
    fn deterministic_per_seed() {
        assert_eq!(random_pure_state(4, 7).unwrap(), random_pure_state(4, 7).unwrap());
        assert_eq!(random_basis(3, 11).unwrap(), random_basis(3, 11).unwrap());
        assert_ne!(random_pure_state(4, 7).unwrap(), random_pure_state(4, 8).unwrap());
    }

    #[test]
    fn haar_first_moment() {
        // E|<e_0|psi>|^2 = 1/d for Haar states.
        let n = 10_000;
        let mean: f64 =
            (0..n).map(|s| random_pure_state(4, s).unwrap().amps()[0].norm_sqr()).sum::<f64>() / n as f64;
        assert!((mean - 0.25).abs() <= 0.02, "mean {mean}");
    }

    #[test]
    fn random_basis_is_unitary() {
        for dim in 1..=8 {
            let u = random_basis(dim, dim as u64 * 3).unwrap().to_unitary();
            let id = &u.adjoint() * &u;
            let dev = (&id - &SquareMatrix::identity(dim)).max_abs();
            assert!(dev <= 1e-10, "dim {dim}: {dev}");
        }
    }

    #[test]
    fn weights_on_simplex() {
        let w = random_weights(5, 3).unwrap();
        assert!(w.iter().all(|&x| x >= 0.0));
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-14);
    }
}
