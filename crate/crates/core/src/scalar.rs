use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, NumAssign, NumCast};

/// Real scalar type backing every complex amplitude in this crate.
///
/// All of the math is written against this trait so the same code runs in
/// `f32` or `f64`; the `*64` aliases at the crate root pin everything the
/// CLI and file formats touch to double precision. The tolerance methods
/// encode the numeric contracts (hermiticity, unit trace, positivity
/// slack) appropriate for each precision.
pub trait Scalar:
    Float + FloatConst + NumAssign + Sum + Debug + Display + Send + Sync + 'static
{
    /// Tolerance for construction-time checks: unit norm, hermiticity, unit trace.
    fn strict_tol() -> Self;

    /// How far below zero an eigenvalue may dip before a positivity check fails.
    fn psd_slack() -> Self;

    /// Probabilities in `[-prob_clamp, 0)` are rounded up to zero; anything
    /// more negative is treated as a logic error rather than round-off.
    fn prob_clamp() -> Self;

    /// Branch probabilities at or below this threshold count as impossible outcomes.
    fn min_branch_prob() -> Self;
}

impl Scalar for f64 {
    fn strict_tol() -> Self {
        1e-12
    }
    fn psd_slack() -> Self {
        1e-10
    }
    fn prob_clamp() -> Self {
        1e-12
    }
    fn min_branch_prob() -> Self {
        1e-14
    }
}

impl Scalar for f32 {
    fn strict_tol() -> Self {
        1e-5
    }
    fn psd_slack() -> Self {
        1e-4
    }
    fn prob_clamp() -> Self {
        1e-5
    }
    fn min_branch_prob() -> Self {
        1e-7
    }
}

/// Lossy conversion from `f64`, used for tolerances and RNG draws.
pub fn cast<T: Scalar>(x: f64) -> T {
    <T as NumCast>::from(x).expect("f64 value representable in scalar type")
}

/// Conversion to `f64` for reports and serialization.
pub fn as_f64<T: Scalar>(x: T) -> f64 {
    x.to_f64().expect("scalar value representable as f64")
}
