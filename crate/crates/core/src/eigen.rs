use num_complex::Complex;

use crate::matrix::ComplexMatrix;
use crate::scalar::{cast, Scalar};

/// Eigendecomposition of a Hermitian matrix: `values` ascending, `vectors`
/// holding the matching eigenvectors as columns.
#[derive(Clone, Debug)]
pub struct HermitianEigen<T> {
    pub values: Vec<T>,
    pub vectors: ComplexMatrix<T>,
}

impl<T: Scalar> HermitianEigen<T> {
    pub fn min_value(&self) -> T {
        self.values.first().copied().unwrap_or_else(T::zero)
    }

    /// Rebuilds V f(L) V^dagger for a scalar function of the eigenvalues.
    pub fn map_values(&self, f: impl Fn(T) -> T) -> ComplexMatrix<T> {
        let diag: Vec<Complex<T>> = self
            .values
            .iter()
            .map(|&l| Complex::new(f(l), T::zero()))
            .collect();
        let d = ComplexMatrix::from_diag(&diag);
        let v = &self.vectors;
        v.matmul(&d).matmul(&v.adjoint()).hermitized()
    }
}

/// Jacobi eigensolver for Hermitian matrices.
///
/// The input is symmetrized first, so tiny anti-Hermitian round-off is
/// harmless. Each sweep annihilates off-diagonal entries with two-sided
/// unitary rotations; for the small dimensions used here (at most 16)
/// convergence to machine precision takes a handful of sweeps.
pub fn eigh<T: Scalar>(m: &ComplexMatrix<T>) -> HermitianEigen<T> {
    let n = m.dim();
    let mut a = m.hermitized();
    let mut v = ComplexMatrix::<T>::identity(n);

    let scale = a.frobenius_norm().max(T::one());
    let stop = scale * T::epsilon() * cast::<T>(n as f64);
    let tiny = scale * cast::<T>(1e-300).max(T::min_positive_value());

    for _sweep in 0..60 {
        let mut off = T::zero();
        for p in 0..n {
            for q in p + 1..n {
                off += a[(p, q)].norm_sqr();
            }
        }
        if off.sqrt() <= stop {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let mag = apq.norm();
                if mag <= tiny {
                    continue;
                }
                let phase = apq / Complex::new(mag, T::zero());
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let tau = (aqq - app) / (cast::<T>(2.0) * mag);
                let t = if tau.is_zero() {
                    T::one()
                } else {
                    tau.signum() / (tau.abs() + (T::one() + tau * tau).sqrt())
                };
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = t * c;

                // Combined rotation V = diag(1, e^{-i phi}) * [[c, s], [-s, c]]
                // acting on the (p, q) plane; apply A <- V^dagger A V.
                let cc = Complex::new(c, T::zero());
                let ss = Complex::new(s, T::zero());
                let pc = phase.conj();

                for i in 0..n {
                    let x = a[(i, p)];
                    let y = a[(i, q)];
                    a.set(i, p, x * cc - y * pc * ss);
                    a.set(i, q, x * ss + y * pc * cc);
                }
                for j in 0..n {
                    let x = a[(p, j)];
                    let y = a[(q, j)];
                    a.set(p, j, x * cc - y * phase * ss);
                    a.set(q, j, x * ss + y * phase * cc);
                }
                for i in 0..n {
                    let x = v[(i, p)];
                    let y = v[(i, q)];
                    v.set(i, p, x * cc - y * pc * ss);
                    v.set(i, q, x * ss + y * pc * cc);
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<T> = (0..n).map(|i| a[(i, i)].re).collect();
    order.sort_by(|&i, &j| diag[i].partial_cmp(&diag[j]).unwrap());

    let values: Vec<T> = order.iter().map(|&i| diag[i]).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    HermitianEigen { values, vectors }
}

/// Cutoff below which an eigenvalue of a PSD matrix is round-off noise:
/// the square root's unbounded derivative at zero would otherwise turn
/// O(eps) eigenvalue errors into O(sqrt(eps)) results.
pub fn noise_floor<T: Scalar>(values: &[T]) -> T {
    let scale = values.iter().fold(T::zero(), |acc, &l| acc.max(l.abs()));
    scale * T::epsilon() * T::from(values.len().max(1)).unwrap()
}

/// Hermitian square root, zeroing eigenvalues at or below round-off.
pub fn sqrt_psd<T: Scalar>(m: &ComplexMatrix<T>) -> ComplexMatrix<T> {
    let e = eigh(m);
    let floor = noise_floor(&e.values);
    e.map_values(|l| if l > floor { l.sqrt() } else { T::zero() })
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue<T: Scalar>(m: &ComplexMatrix<T>) -> T {
    eigh(m).min_value()
}
