use num_complex::Complex;

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::scalar::{as_f64, Scalar};

/// A normalized state vector. Construction enforces unit Euclidean norm,
/// so a `Ket` is always a valid pure state.
#[derive(Clone, Debug, PartialEq)]
pub struct Ket<T> {
    amps: Vec<Complex<T>>,
}

impl<T: Scalar> Ket<T> {
    pub fn new(amps: Vec<Complex<T>>) -> Result<Self> {
        let norm = vec_norm(&amps);
        if (norm - T::one()).abs() > T::strict_tol() {
            return Err(Error::InvalidState(format!(
                "ket norm {} differs from 1 beyond tolerance",
                as_f64(norm)
            )));
        }
        Ok(Self { amps })
    }

    /// Normalizes the input; errors on a (numerically) zero vector.
    pub fn normalized(amps: Vec<Complex<T>>) -> Result<Self> {
        let norm = vec_norm(&amps);
        if norm <= T::min_branch_prob() {
            return Err(Error::InvalidState("cannot normalize a zero vector".into()));
        }
        let inv = T::one() / norm;
        Ok(Self {
            amps: amps
                .into_iter()
                .map(|a| a * Complex::new(inv, T::zero()))
                .collect(),
        })
    }

    /// Computational basis ket |idx> in the given dimension.
    pub fn computational(dim: usize, idx: usize) -> Self {
        assert!(idx < dim);
        let mut amps = vec![Complex::new(T::zero(), T::zero()); dim];
        amps[idx] = Complex::new(T::one(), T::zero());
        Self { amps }
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amps(&self) -> &[Complex<T>] {
        &self.amps
    }

    pub fn amp(&self, i: usize) -> Complex<T> {
        self.amps[i]
    }

    /// Inner product <self|other>.
    pub fn inner(&self, other: &Self) -> Complex<T> {
        assert_eq!(self.dim(), other.dim(), "inner product dimension mismatch");
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .fold(Complex::new(T::zero(), T::zero()), |acc, z| acc + z)
    }

    /// Rank-1 projector |self><self|.
    pub fn projector(&self) -> ComplexMatrix<T> {
        let n = self.dim();
        ComplexMatrix::from_fn(n, n, |i, j| self.amps[i] * self.amps[j].conj())
    }

    /// Tensor product with `self` as the most significant factor.
    pub fn tensor(&self, other: &Self) -> Self {
        let mut amps = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amps {
            for b in &other.amps {
                amps.push(a * b);
            }
        }
        Self { amps }
    }

    /// Applies a unitary; errors if the result fails the norm check, which
    /// flags a non-unitary matrix rather than a bad state.
    pub fn apply(&self, u: &ComplexMatrix<T>) -> Result<Self> {
        if u.cols() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "operator is {}x{}, ket has dimension {}",
                u.rows(),
                u.cols(),
                self.dim()
            )));
        }
        Self::new(u.mul_vec(&self.amps))
    }
}

fn vec_norm<T: Scalar>(amps: &[Complex<T>]) -> T {
    amps.iter()
        .map(|a| a.norm_sqr())
        .fold(T::zero(), |acc, x| acc + x)
        .sqrt()
}

/// |<a|b>|^2 for pure states.
pub fn fidelity_pure<T: Scalar>(a: &Ket<T>, b: &Ket<T>) -> Result<T> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(format!(
            "fidelity_pure: dimensions {} and {}",
            a.dim(),
            b.dim()
        )));
    }
    Ok(a.inner(b).norm_sqr())
}

/// Frobenius norm of |a><a| - |b><b|; zero exactly when the kets agree up
/// to a global phase, which makes this the right comparison for physically
/// equivalent states.
pub fn projector_distance<T: Scalar>(a: &Ket<T>, b: &Ket<T>) -> T {
    assert_eq!(a.dim(), b.dim(), "projector_distance dimension mismatch");
    a.projector().frobenius_distance(&b.projector())
}
