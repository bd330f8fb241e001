use std::ops::{Add, Index, Mul, Neg, Sub};

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{cast, Scalar};

/// Dense complex matrix in row-major order.
///
/// This is the numeric substrate for every operator in the crate: states,
/// effects, Kraus operators, gates and compiled optical circuits. Sizes stay
/// small (16x16 at most), so everything is plain `Vec`-backed with no
/// blocking or sparsity.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<Complex<T>>,
}

impl<T: Scalar> ComplexMatrix<T> {
    pub fn new(rows: usize, cols: usize, data: Vec<Complex<T>>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::EntryCount {
                rows,
                cols,
                found: data.len(),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex::new(T::zero(), T::zero()); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = Complex::new(T::one(), T::zero());
        }
        m
    }

    /// Builds from nested rows; panics on ragged input.
    pub fn from_rows(rows: Vec<Vec<Complex<T>>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Self {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn from_diag(diag: &[Complex<T>]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            m.data[i * n + i] = d;
        }
        m
    }

    pub fn from_fn(
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> Complex<T>,
    ) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Side length of a square matrix; panics if not square.
    pub fn dim(&self) -> usize {
        assert!(self.is_square(), "dim() on a non-square matrix");
        self.rows
    }

    pub fn entries(&self) -> &[Complex<T>] {
        &self.data
    }

    pub(crate) fn set(&mut self, i: usize, j: usize, v: Complex<T>) {
        self.data[i * self.cols + j] = v;
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "matmul dimension mismatch");
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a.re.is_zero() && a.im.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let prod = a * rhs.data[k * rhs.cols + j];
                    let cur = out.data[i * rhs.cols + j];
                    out.data[i * rhs.cols + j] = cur + prod;
                }
            }
        }
        out
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let data = self
            .data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| a + b)
            .collect();
        Self {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let data = self
            .data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| a - b)
            .collect();
        Self {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a * s).collect(),
        }
    }

    pub fn scale_re(&self, s: T) -> Self {
        self.scale(Complex::new(s, T::zero()))
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| {
            self.data[j * self.cols + i].conj()
        })
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.data[j * self.cols + i])
    }

    pub fn conj(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(Complex::conj).collect(),
        }
    }

    pub fn trace(&self) -> Complex<T> {
        assert!(self.is_square());
        (0..self.rows)
            .map(|i| self.data[i * self.cols + i])
            .fold(Complex::new(T::zero(), T::zero()), |acc, z| acc + z)
    }

    /// Kronecker product; the left factor is the most significant one.
    pub fn kron(&self, rhs: &Self) -> Self {
        let (br, bc) = (rhs.rows, rhs.cols);
        Self::from_fn(self.rows * br, self.cols * bc, |i, j| {
            self.data[(i / br) * self.cols + (j / bc)] * rhs.data[(i % br) * bc + (j % bc)]
        })
    }

    pub fn mul_vec(&self, v: &[Complex<T>]) -> Vec<Complex<T>> {
        assert_eq!(self.cols, v.len(), "mul_vec dimension mismatch");
        (0..self.rows)
            .map(|i| {
                (0..self.cols)
                    .map(|j| self.data[i * self.cols + j] * v[j])
                    .fold(Complex::new(T::zero(), T::zero()), |acc, z| acc + z)
            })
            .collect()
    }

    pub fn frobenius_norm(&self) -> T {
        self.data
            .iter()
            .map(|z| z.norm_sqr())
            .fold(T::zero(), |acc, x| acc + x)
            .sqrt()
    }

    pub fn frobenius_distance(&self, rhs: &Self) -> T {
        self.sub(rhs).frobenius_norm()
    }

    pub fn max_abs_entry(&self) -> T {
        self.data.iter().map(|z| z.norm()).fold(T::zero(), T::max)
    }

    /// Largest entry of |A - A^dagger|.
    pub fn hermiticity_residual(&self) -> T {
        assert!(self.is_square());
        let mut worst = T::zero();
        for i in 0..self.rows {
            for j in 0..self.cols {
                let d = self.data[i * self.cols + j] - self.data[j * self.cols + i].conj();
                worst = worst.max(d.norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: T) -> bool {
        self.hermiticity_residual() <= tol
    }

    /// Largest entry of |U^dagger U - I|.
    pub fn unitarity_residual(&self) -> T {
        let gram = self.adjoint().matmul(self);
        gram.sub(&Self::identity(gram.dim())).max_abs_entry()
    }

    pub fn is_unitary(&self, tol: T) -> bool {
        self.is_square() && self.unitarity_residual() <= tol
    }

    /// (A + A^dagger) / 2, discarding anti-Hermitian round-off.
    pub fn hermitized(&self) -> Self {
        self.add(&self.adjoint()).scale_re(cast::<T>(0.5))
    }

    /// Solves `self * x = rhs` by LU decomposition with partial pivoting.
    pub fn solve(&self, rhs: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
        let n = self.dim();
        if rhs.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "solve: matrix is {n}x{n}, rhs has length {}",
                rhs.len()
            )));
        }
        let mut a = self.data.clone();
        let mut x = rhs.to_vec();
        for col in 0..n {
            let (pivot, pivot_mag) = (col..n).map(|r| (r, a[r * n + col].norm_sqr())).fold(
                (col, T::neg_infinity()),
                |best, cand| {
                    if cand.1 > best.1 {
                        cand
                    } else {
                        best
                    }
                },
            );
            if pivot_mag <= cast::<T>(1e-300) {
                return Err(Error::SingularSystem(format!("zero pivot at column {col}")));
            }
            if pivot != col {
                for j in 0..n {
                    a.swap(col * n + j, pivot * n + j);
                }
                x.swap(col, pivot);
            }
            let inv = Complex::new(T::one(), T::zero()) / a[col * n + col];
            for r in col + 1..n {
                let factor = a[r * n + col] * inv;
                if factor.norm_sqr().is_zero() {
                    continue;
                }
                for j in col..n {
                    let sub = factor * a[col * n + j];
                    a[r * n + j] -= sub;
                }
                let sub = factor * x[col];
                x[r] -= sub;
            }
        }
        for r in (0..n).rev() {
            let mut acc = x[r];
            for j in r + 1..n {
                acc -= a[r * n + j] * x[j];
            }
            x[r] = acc / a[r * n + r];
        }
        Ok(x)
    }

    // Fixed small gates used throughout.

    pub fn pauli_x() -> Self {
        let o = T::one();
        let z = T::zero();
        Self::from_rows(vec![
            vec![Complex::new(z, z), Complex::new(o, z)],
            vec![Complex::new(o, z), Complex::new(z, z)],
        ])
    }

    pub fn pauli_y() -> Self {
        let o = T::one();
        let z = T::zero();
        Self::from_rows(vec![
            vec![Complex::new(z, z), Complex::new(z, -o)],
            vec![Complex::new(z, o), Complex::new(z, z)],
        ])
    }

    pub fn pauli_z() -> Self {
        let o = T::one();
        let z = T::zero();
        Self::from_rows(vec![
            vec![Complex::new(o, z), Complex::new(z, z)],
            vec![Complex::new(z, z), Complex::new(-o, z)],
        ])
    }

    pub fn hadamard() -> Self {
        let h = T::one() / cast::<T>(2.0).sqrt();
        let z = T::zero();
        Self::from_rows(vec![
            vec![Complex::new(h, z), Complex::new(h, z)],
            vec![Complex::new(h, z), Complex::new(-h, z)],
        ])
    }

    /// Controlled-Z, diag(1, 1, 1, -1).
    pub fn cz() -> Self {
        let o = Complex::new(T::one(), T::zero());
        Self::from_diag(&[o, o, o, -o])
    }
}

/// Kronecker product as a free function.
pub fn tensor<T: Scalar>(a: &ComplexMatrix<T>, b: &ComplexMatrix<T>) -> ComplexMatrix<T> {
    a.kron(b)
}

/// Largest entry of |a - e^{i phi} b| minimized over the global phase phi,
/// the right comparison for transformations that are physically defined
/// only up to phase. Returns infinity when the overlap trace vanishes.
pub fn global_phase_distance<T: Scalar>(a: &ComplexMatrix<T>, b: &ComplexMatrix<T>) -> T {
    assert_eq!((a.rows(), a.cols()), (b.rows(), b.cols()));
    let overlap = b.adjoint().matmul(a).trace();
    let mag = overlap.norm();
    if mag <= cast::<T>(1e-300).max(T::min_positive_value()) {
        return T::infinity();
    }
    let phase = overlap / Complex::new(mag, T::zero());
    a.sub(&b.scale(phase)).max_abs_entry()
}

impl<T: Scalar> Index<(usize, usize)> for ComplexMatrix<T> {
    type Output = Complex<T>;
    fn index(&self, (i, j): (usize, usize)) -> &Complex<T> {
        &self.data[i * self.cols + j]
    }
}

impl<T: Scalar> Mul for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;
    fn mul(self, rhs: Self) -> ComplexMatrix<T> {
        self.matmul(rhs)
    }
}

impl<T: Scalar> Add for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;
    fn add(self, rhs: Self) -> ComplexMatrix<T> {
        ComplexMatrix::add(self, rhs)
    }
}

impl<T: Scalar> Sub for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;
    fn sub(self, rhs: Self) -> ComplexMatrix<T> {
        ComplexMatrix::sub(self, rhs)
    }
}

impl<T: Scalar> Neg for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;
    fn neg(self) -> ComplexMatrix<T> {
        self.scale_re(-T::one())
    }
}
