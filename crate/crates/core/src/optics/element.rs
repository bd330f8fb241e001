use num_complex::Complex;

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::scalar::{as_f64, cast, Scalar};

/// Index into a circuit's spatial mode list.
pub type ModeId = usize;

/// What a phase shifter acts on: the whole spatial mode, or a single
/// polarization component of it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PhaseTarget {
    Path,
    PolV,
    PolH,
}

/// The linear-optical element kinds used by the benches.
///
/// Conventions, fixed once for the whole crate:
/// - a path beam splitter with amplitude reflectivity r acts as
///   [[r, t], [t, -r]] on its ordered mode pair (t = sqrt(1 - r^2));
/// - a PPBS acts block-diagonally on polarization, [[r_v, t_v], [-t_v, r_v]]
///   on the vertical components and [[r_h, t_h], [t_h, -r_h]] on the
///   horizontal ones, in the basis (v mode1, v mode2, h mode1, h mode2);
/// - a half-wave plate at angle theta applies the Jones matrix
///   [[cos 2theta, sin 2theta], [sin 2theta, -cos 2theta]], so theta = pi/8
///   is the polarization Hadamard;
/// - a phase shifter multiplies its target by e^{i phase}.
#[derive(Clone, Debug, PartialEq)]
pub enum ElementKind<T> {
    BeamSplitter { reflectivity: T },
    Ppbs { r_v: T, r_h: T },
    HalfWavePlate { angle: T },
    PhaseShifter { phase: T, target: PhaseTarget },
}

/// An element attached to the spatial modes it couples.
#[derive(Clone, Debug, PartialEq)]
pub struct OpticalElement<T> {
    pub kind: ElementKind<T>,
    pub modes: Vec<ModeId>,
}

impl<T: Scalar> OpticalElement<T> {
    pub fn beam_splitter(reflectivity: T, a: ModeId, b: ModeId) -> Self {
        Self {
            kind: ElementKind::BeamSplitter { reflectivity },
            modes: vec![a, b],
        }
    }

    /// Balanced beam splitter: the path-qubit Hadamard.
    pub fn balanced_bs(a: ModeId, b: ModeId) -> Self {
        Self::beam_splitter(T::one() / cast::<T>(2.0).sqrt(), a, b)
    }

    pub fn ppbs(r_v: T, r_h: T, a: ModeId, b: ModeId) -> Self {
        Self {
            kind: ElementKind::Ppbs { r_v, r_h },
            modes: vec![a, b],
        }
    }

    /// The CZ gate as the fully reflective PPBS special case.
    pub fn cz(a: ModeId, b: ModeId) -> Self {
        Self::ppbs(T::one(), T::one(), a, b)
    }

    pub fn hwp(angle: T, mode: ModeId) -> Self {
        Self {
            kind: ElementKind::HalfWavePlate { angle },
            modes: vec![mode],
        }
    }

    /// Half-wave plate at pi/8: the polarization Hadamard.
    pub fn hadamard_hwp(mode: ModeId) -> Self {
        Self::hwp(T::FRAC_PI_8(), mode)
    }

    pub fn path_phase(phase: T, mode: ModeId) -> Self {
        Self {
            kind: ElementKind::PhaseShifter {
                phase,
                target: PhaseTarget::Path,
            },
            modes: vec![mode],
        }
    }

    pub fn pol_phase(phase: T, target: PhaseTarget, mode: ModeId) -> Self {
        assert!(
            target != PhaseTarget::Path,
            "use path_phase for path targets"
        );
        Self {
            kind: ElementKind::PhaseShifter { phase, target },
            modes: vec![mode],
        }
    }

    /// True for elements that couple polarization and path (PPBS family).
    pub fn is_entangling(&self) -> bool {
        matches!(self.kind, ElementKind::Ppbs { .. })
    }

    /// True for elements that only make sense with a polarization degree
    /// of freedom.
    pub fn needs_polarization(&self) -> bool {
        match &self.kind {
            ElementKind::Ppbs { .. } | ElementKind::HalfWavePlate { .. } => true,
            ElementKind::PhaseShifter { target, .. } => *target != PhaseTarget::Path,
            ElementKind::BeamSplitter { .. } => false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let unit_range = |x: T, what: &str| -> Result<()> {
            if x < T::zero() || x > T::one() {
                Err(Error::InvalidCircuit(format!(
                    "{what} amplitude {} outside [0, 1]",
                    as_f64(x)
                )))
            } else {
                Ok(())
            }
        };
        match &self.kind {
            ElementKind::BeamSplitter { reflectivity } => {
                unit_range(*reflectivity, "beam-splitter reflectivity")?;
                if self.modes.len() != 2 || self.modes[0] == self.modes[1] {
                    return Err(Error::InvalidCircuit(
                        "beam splitter needs two distinct modes".into(),
                    ));
                }
            }
            ElementKind::Ppbs { r_v, r_h } => {
                unit_range(*r_v, "PPBS r_v")?;
                unit_range(*r_h, "PPBS r_h")?;
                if self.modes.len() != 2 || self.modes[0] == self.modes[1] {
                    return Err(Error::InvalidCircuit(
                        "PPBS needs two distinct modes".into(),
                    ));
                }
            }
            ElementKind::HalfWavePlate { angle } => {
                if !angle.is_finite() {
                    return Err(Error::InvalidCircuit("HWP angle not finite".into()));
                }
                if self.modes.len() != 1 {
                    return Err(Error::InvalidCircuit("HWP acts on one mode".into()));
                }
            }
            ElementKind::PhaseShifter { phase, .. } => {
                if !phase.is_finite() {
                    return Err(Error::InvalidCircuit("phase not finite".into()));
                }
                if self.modes.len() != 1 {
                    return Err(Error::InvalidCircuit(
                        "phase shifter acts on one mode".into(),
                    ));
                }
            }
        }
        Ok(())
    }
}

/// The element's local unitary in its own basis:
/// - beam splitter: 2x2 over its mode pair;
/// - PPBS: 4x4 over (v mode1, v mode2, h mode1, h mode2);
/// - HWP: 2x2 over (v, h);
/// - polarization phase shifter: 2x2 diag over (v, h);
/// - path phase shifter: 1x1.
pub fn element_unitary<T: Scalar>(element: &OpticalElement<T>) -> Result<ComplexMatrix<T>> {
    element.validate()?;
    let zero = T::zero();
    let re = |x: T| Complex::new(x, zero);
    let u = match &element.kind {
        ElementKind::BeamSplitter { reflectivity } => {
            let r = *reflectivity;
            let t = (T::one() - r * r).sqrt();
            ComplexMatrix::from_rows(vec![vec![re(r), re(t)], vec![re(t), re(-r)]])
        }
        ElementKind::Ppbs { r_v, r_h } => {
            let t_v = (T::one() - *r_v * *r_v).sqrt();
            let t_h = (T::one() - *r_h * *r_h).sqrt();
            ComplexMatrix::from_rows(vec![
                vec![re(*r_v), re(t_v), re(zero), re(zero)],
                vec![re(-t_v), re(*r_v), re(zero), re(zero)],
                vec![re(zero), re(zero), re(*r_h), re(t_h)],
                vec![re(zero), re(zero), re(t_h), re(-*r_h)],
            ])
        }
        ElementKind::HalfWavePlate { angle } => {
            let two = cast::<T>(2.0);
            let c = (two * *angle).cos();
            let s = (two * *angle).sin();
            ComplexMatrix::from_rows(vec![vec![re(c), re(s)], vec![re(s), re(-c)]])
        }
        ElementKind::PhaseShifter { phase, target } => {
            let ph = Complex::new(phase.cos(), phase.sin());
            let one = Complex::new(T::one(), zero);
            match target {
                PhaseTarget::Path => ComplexMatrix::from_diag(&[ph]),
                PhaseTarget::PolV => ComplexMatrix::from_diag(&[ph, one]),
                PhaseTarget::PolH => ComplexMatrix::from_diag(&[one, ph]),
            }
        }
    };
    debug_assert!(u.is_unitary(T::strict_tol()));
    Ok(u)
}

#[cfg(test)]
mod tests {
    use super::*;

    type E = OpticalElement<f64>;

    #[test]
    fn hwp_at_pi_over_8_is_hadamard() {
        let u = element_unitary(&E::hadamard_hwp(0)).unwrap();
        assert!(u.frobenius_distance(&ComplexMatrix::hadamard()) < 1e-12);
    }

    #[test]
    fn balanced_bs_is_hadamard() {
        let u = element_unitary(&E::balanced_bs(0, 1)).unwrap();
        assert!(u.frobenius_distance(&ComplexMatrix::hadamard()) < 1e-12);
    }

    #[test]
    fn quarter_phase_shift_is_diag_one_i() {
        let u = element_unitary(&E::pol_phase(
            std::f64::consts::FRAC_PI_2,
            PhaseTarget::PolH,
            0,
        ))
        .unwrap();
        assert!((u[(0, 0)] - Complex::new(1.0, 0.0)).norm() < 1e-15);
        assert!((u[(1, 1)] - Complex::new(0.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn fully_reflective_ppbs_is_cz() {
        let u = element_unitary(&E::cz(0, 1)).unwrap();
        assert!(u.frobenius_distance(&ComplexMatrix::cz()) < 1e-15);
        assert!(u.is_unitary(1e-14));
    }

    #[test]
    fn ppbs_is_unitary_for_generic_coefficients() {
        let u = element_unitary(&E::ppbs(0.437, 0.12, 0, 1)).unwrap();
        assert!(u.is_unitary(1e-12));
    }

    #[test]
    fn out_of_range_amplitude_rejected() {
        assert!(element_unitary(&E::beam_splitter(1.2, 0, 1)).is_err());
        assert!(element_unitary(&E::ppbs(-0.1, 0.5, 0, 1)).is_err());
    }
}
