//! Statistical operators, measurement effects and the measurement calculus:
//! Born probabilities, post-measurement updates and state comparison metrics.

use num_complex::Complex;

use crate::eigen::{eigh, min_eigenvalue, sqrt_psd};
use crate::error::{Error, Result};
use crate::ket::Ket;
use crate::matrix::ComplexMatrix;
use crate::scalar::{as_f64, Scalar};

const SUPPORTED_DIMS: [usize; 4] = [2, 4, 8, 16];

fn check_operator_dim(n: usize) -> Result<()> {
    if SUPPORTED_DIMS.contains(&n) {
        Ok(())
    } else {
        Err(Error::UnsupportedDimension(n))
    }
}

/// A density matrix: Hermitian, positive semidefinite, unit trace.
/// All three invariants are checked at construction, so holding a value of
/// this type is proof of a valid state.
#[derive(Clone, Debug)]
pub struct DensityMatrix<T> {
    matrix: ComplexMatrix<T>,
}

impl<T: Scalar> DensityMatrix<T> {
    pub fn new(matrix: ComplexMatrix<T>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::InvalidState("density matrix must be square".into()));
        }
        check_operator_dim(matrix.dim())?;
        let herm = matrix.hermiticity_residual();
        if herm > T::strict_tol() {
            return Err(Error::InvalidState(format!(
                "not Hermitian: residual {}",
                as_f64(herm)
            )));
        }
        let tr = matrix.trace();
        if (tr.re - T::one()).abs() > T::strict_tol() || tr.im.abs() > T::strict_tol() {
            return Err(Error::InvalidState(format!(
                "trace {} + {}i differs from 1",
                as_f64(tr.re),
                as_f64(tr.im)
            )));
        }
        let min_eig = min_eigenvalue(&matrix);
        if min_eig < -T::psd_slack() {
            return Err(Error::InvalidState(format!(
                "negative eigenvalue {}",
                as_f64(min_eig)
            )));
        }
        Ok(Self { matrix })
    }

    pub fn from_ket(ket: &Ket<T>) -> Self {
        // A projector of a unit ket satisfies every invariant by construction.
        Self {
            matrix: ket.projector(),
        }
    }

    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        check_operator_dim(dim)?;
        let scale = T::one() / T::from(dim).unwrap();
        Ok(Self {
            matrix: ComplexMatrix::identity(dim).scale_re(scale),
        })
    }

    pub fn matrix(&self) -> &ComplexMatrix<T> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn eigenvalues(&self) -> Vec<T> {
        eigh(&self.matrix).values
    }
}

/// A measurement effect: Hermitian, positive semidefinite, carrying an
/// outcome label.
#[derive(Clone, Debug)]
pub struct Effect<T> {
    matrix: ComplexMatrix<T>,
    label: String,
}

impl<T: Scalar> Effect<T> {
    pub fn new(matrix: ComplexMatrix<T>, label: impl Into<String>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::InvalidState("effect must be square".into()));
        }
        check_operator_dim(matrix.dim())?;
        let herm = matrix.hermiticity_residual();
        if herm > T::strict_tol() {
            return Err(Error::InvalidState(format!(
                "effect not Hermitian: residual {}",
                as_f64(herm)
            )));
        }
        let min_eig = min_eigenvalue(&matrix);
        if min_eig < -T::psd_slack() {
            return Err(Error::InvalidState(format!(
                "effect has negative eigenvalue {}",
                as_f64(min_eig)
            )));
        }
        Ok(Self {
            matrix,
            label: label.into(),
        })
    }

    pub fn matrix(&self) -> &ComplexMatrix<T> {
        &self.matrix
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn trace_re(&self) -> T {
        self.matrix.trace().re
    }
}

/// A probability-operator measurement: an ordered list of effects of equal
/// dimension summing to the identity.
#[derive(Clone, Debug)]
pub struct Pom<T> {
    effects: Vec<Effect<T>>,
}

impl<T: Scalar> Pom<T> {
    pub fn new(effects: Vec<Effect<T>>) -> Result<Self> {
        let dim = match effects.first() {
            Some(e) => e.matrix().dim(),
            None => return Err(Error::InvalidState("POM needs at least one effect".into())),
        };
        if effects.iter().any(|e| e.matrix().dim() != dim) {
            return Err(Error::DimensionMismatch(
                "POM effects have mixed dimensions".into(),
            ));
        }
        let mut sum = ComplexMatrix::zeros(dim, dim);
        for e in &effects {
            sum = sum.add(e.matrix());
        }
        let residual = sum.sub(&ComplexMatrix::identity(dim)).max_abs_entry();
        if residual > T::psd_slack() {
            return Err(Error::InvalidState(format!(
                "effects do not sum to identity: residual {}",
                as_f64(residual)
            )));
        }
        Ok(Self { effects })
    }

    pub fn effects(&self) -> &[Effect<T>] {
        &self.effects
    }

    pub fn len(&self) -> usize {
        self.effects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.effects.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.effects[0].matrix().dim()
    }

    /// Largest entry of |sum of effects - identity|.
    pub fn completeness_residual(&self) -> T {
        let dim = self.dim();
        let mut sum = ComplexMatrix::zeros(dim, dim);
        for e in &self.effects {
            sum = sum.add(e.matrix());
        }
        sum.sub(&ComplexMatrix::identity(dim)).max_abs_entry()
    }
}

/// Born rule: p = Re tr(effect * rho). Values in `[-prob_clamp, 0)` are
/// round-off and clamp to zero; anything more negative is rejected.
pub fn born_probability<T: Scalar>(rho: &DensityMatrix<T>, effect: &Effect<T>) -> Result<T> {
    if rho.dim() != effect.matrix().dim() {
        return Err(Error::DimensionMismatch(format!(
            "state dimension {} vs effect dimension {}",
            rho.dim(),
            effect.matrix().dim()
        )));
    }
    let p = effect.matrix().matmul(rho.matrix()).trace().re;
    if p < T::zero() {
        if p >= -T::prob_clamp() {
            return Ok(T::zero());
        }
        return Err(Error::InvalidProbability(as_f64(p)));
    }
    Ok(p)
}

/// State update for Kraus operator A: returns (A rho A^dagger / p, p) with
/// p = tr(A rho A^dagger). Outcomes with p below threshold are impossible.
pub fn post_measurement_state<T: Scalar>(
    rho: &DensityMatrix<T>,
    kraus: &ComplexMatrix<T>,
) -> Result<(DensityMatrix<T>, T)> {
    if kraus.cols() != rho.dim() {
        return Err(Error::DimensionMismatch(format!(
            "Kraus operator is {}x{}, state dimension {}",
            kraus.rows(),
            kraus.cols(),
            rho.dim()
        )));
    }
    let updated = kraus.matmul(rho.matrix()).matmul(&kraus.adjoint());
    let p = updated.trace().re;
    if p <= T::min_branch_prob() {
        return Err(Error::ImpossibleOutcome(as_f64(p)));
    }
    let normalized = updated.scale_re(T::one() / p).hermitized();
    Ok((DensityMatrix::new(normalized)?, p))
}

/// Uhlmann fidelity (tr sqrt(sqrt(a) b sqrt(a)))^2.
pub fn state_fidelity<T: Scalar>(a: &DensityMatrix<T>, b: &DensityMatrix<T>) -> Result<T> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(format!(
            "state_fidelity: dimensions {} and {}",
            a.dim(),
            b.dim()
        )));
    }
    let root_a = sqrt_psd(a.matrix());
    let inner = root_a.matmul(b.matrix()).matmul(&root_a).hermitized();
    let decomposition = eigh(&inner);
    let floor = crate::eigen::noise_floor(&decomposition.values);
    let tr: T = decomposition
        .values
        .into_iter()
        .map(|l| if l > floor { l.sqrt() } else { T::zero() })
        .sum();
    Ok((tr * tr).min(T::one() + T::strict_tol()))
}

/// Trace distance (1/2) tr |a - b|.
pub fn trace_distance<T: Scalar>(a: &DensityMatrix<T>, b: &DensityMatrix<T>) -> Result<T> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(format!(
            "trace_distance: dimensions {} and {}",
            a.dim(),
            b.dim()
        )));
    }
    let diff = a.matrix().sub(b.matrix());
    let half = T::one() / (T::one() + T::one());
    let sum: T = eigh(&diff).values.into_iter().map(T::abs).sum();
    Ok(half * sum)
}

/// Convenience: diag entries as a complex vector.
pub fn diag<T: Scalar>(entries: &[T]) -> ComplexMatrix<T> {
    let zs: Vec<Complex<T>> = entries
        .iter()
        .map(|&x| Complex::new(x, T::zero()))
        .collect();
    ComplexMatrix::from_diag(&zs)
}
