//! Seeded randomness with an explicit stream-splitting rule.
//!
//! Every stochastic routine in the crate is driven by a `ChaCha8Rng`
//! derived from a user-supplied 64-bit seed plus a stream index, so results
//! are bit-reproducible regardless of batching or thread scheduling.
//!
//! Stream layout for a given seed:
//! - stream 0: setup draws (random state generation, phase perturbation)
//! - stream `1 + b`: shot batch `b` of a sampling run ([`SHOT_BATCH`] shots
//!   per batch)
//! - trial `t` of a multi-trial run uses the same layout shifted into its
//!   own block: stream `(t + 1) << 32 | sub` with `sub` as above.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::eigen::min_eigenvalue;
use crate::ket::Ket;
use crate::matrix::ComplexMatrix;
use crate::quantum::DensityMatrix;
use crate::scalar::{cast, Scalar};

/// Shots per RNG stream when sampling.
pub const SHOT_BATCH: u64 = 1 << 16;

/// The generator for (seed, stream).
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Stream index for sub-draw `sub` of trial `t`; trial blocks never collide
/// with the top-level streams (block 0).
pub fn trial_stream(trial: u64, sub: u64) -> u64 {
    debug_assert!(sub < (1 << 32));
    ((trial + 1) << 32) | sub
}

fn standard_normal<T: Scalar>(rng: &mut ChaCha8Rng) -> T {
    let x: f64 = StandardNormal.sample(rng);
    cast(x)
}

fn gaussian_complex<T: Scalar>(rng: &mut ChaCha8Rng) -> Complex<T> {
    Complex::new(standard_normal(rng), standard_normal(rng))
}

/// Haar-distributed pure state: a normalized complex Gaussian vector.
pub fn random_pure_state<T: Scalar>(dim: usize, rng: &mut ChaCha8Rng) -> Ket<T> {
    loop {
        let amps: Vec<Complex<T>> = (0..dim).map(|_| gaussian_complex(rng)).collect();
        if let Ok(ket) = Ket::normalized(amps) {
            return ket;
        }
    }
}

/// Random full-rank mixed state G G^dagger / tr(G G^dagger) with G a square
/// complex Gaussian matrix (Hilbert-Schmidt ensemble).
pub fn random_mixed_state<T: Scalar>(dim: usize, rng: &mut ChaCha8Rng) -> DensityMatrix<T> {
    loop {
        let g = ComplexMatrix::from_fn(dim, dim, |_, _| gaussian_complex::<T>(rng));
        let gram = g.matmul(&g.adjoint());
        let tr = gram.trace().re;
        if tr <= T::min_branch_prob() {
            continue;
        }
        let candidate = gram.scale_re(T::one() / tr).hermitized();
        if min_eigenvalue(&candidate) < T::zero() {
            // Round-off can push an eigenvalue epsilon-negative; redraw
            // rather than hand out a boundary case.
            continue;
        }
        if let Ok(rho) = DensityMatrix::new(candidate) {
            return rho;
        }
    }
}

/// Haar-ish random unitary via Gram-Schmidt on a Gaussian matrix. Good
/// enough for invariance tests; not used for statistics.
pub fn random_unitary<T: Scalar>(dim: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix<T> {
    loop {
        let g = ComplexMatrix::from_fn(dim, dim, |_, _| gaussian_complex::<T>(rng));
        if let Some(u) = gram_schmidt(&g) {
            return u;
        }
    }
}

fn gram_schmidt<T: Scalar>(m: &ComplexMatrix<T>) -> Option<ComplexMatrix<T>> {
    let n = m.dim();
    let mut cols: Vec<Vec<Complex<T>>> = (0..n)
        .map(|j| (0..n).map(|i| m[(i, j)]).collect())
        .collect();
    for j in 0..n {
        // Two orthogonalization passes keep loss of orthogonality at bay.
        for _ in 0..2 {
            for k in 0..j {
                let proj = inner(&cols[k], &cols[j]);
                let col_k = cols[k].clone();
                for (x, y) in cols[j].iter_mut().zip(col_k) {
                    *x -= proj * y;
                }
            }
        }
        let norm = cols[j]
            .iter()
            .map(|z| z.norm_sqr())
            .fold(T::zero(), |a, b| a + b)
            .sqrt();
        if norm <= cast::<T>(1e-8) {
            return None;
        }
        let inv = Complex::new(T::one() / norm, T::zero());
        for x in cols[j].iter_mut() {
            *x *= inv;
        }
    }
    Some(ComplexMatrix::from_fn(n, n, |i, j| cols[j][i]))
}

fn inner<T: Scalar>(a: &[Complex<T>], b: &[Complex<T>]) -> Complex<T> {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.conj() * y)
        .fold(Complex::new(T::zero(), T::zero()), |acc, z| acc + z)
}

/// Draws one outcome index from a cumulative distribution table.
pub(crate) fn draw_from_cdf<T: Scalar>(cdf: &[T], rng: &mut ChaCha8Rng) -> usize {
    let u: T = cast(rng.random::<f64>());
    for (i, &c) in cdf.iter().enumerate() {
        if u < c {
            return i;
        }
    }
    cdf.len() - 1
}

/// Builds the cumulative table for `draw_from_cdf`.
pub(crate) fn cdf_table<T: Scalar>(dist: &[T]) -> Vec<T> {
    let mut acc = T::zero();
    dist.iter()
        .map(|&p| {
            acc += p.max(T::zero());
            acc
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_independent_and_reproducible() {
        let mut a = stream_rng(42, 1);
        let mut b = stream_rng(42, 2);
        let mut a2 = stream_rng(42, 1);
        let xs: Vec<f64> = (0..8).map(|_| a.random()).collect();
        let ys: Vec<f64> = (0..8).map(|_| b.random()).collect();
        let xs2: Vec<f64> = (0..8).map(|_| a2.random()).collect();
        assert_eq!(xs, xs2);
        assert_ne!(xs, ys);
    }

    #[test]
    fn trial_streams_do_not_collide_with_top_level() {
        assert!(trial_stream(0, 0) > 1 + (u32::MAX as u64) / 2);
        assert_ne!(trial_stream(0, 1), trial_stream(1, 1));
    }

    #[test]
    fn random_states_are_valid() {
        let mut rng = stream_rng(7, 0);
        for _ in 0..10 {
            let ket = random_pure_state::<f64>(4, &mut rng);
            assert_eq!(ket.dim(), 4);
            let rho = random_mixed_state::<f64>(4, &mut rng);
            assert!((rho.matrix().trace().re - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn random_unitary_is_unitary() {
        let mut rng = stream_rng(3, 0);
        for dim in [2, 4] {
            let u = random_unitary::<f64>(dim, &mut rng);
            assert!(u.is_unitary(1e-10));
        }
    }

    #[test]
    fn cdf_draws_cover_support() {
        let dist = [0.25f64, 0.25, 0.5];
        let cdf = cdf_table(&dist);
        let mut rng = stream_rng(1, 1);
        let mut seen = [0usize; 3];
        for _ in 0..1000 {
            seen[draw_from_cdf(&cdf, &mut rng)] += 1;
        }
        assert!(seen.iter().all(|&c| c > 0));
        assert_eq!(seen.iter().sum::<usize>(), 1000);
    }
}
