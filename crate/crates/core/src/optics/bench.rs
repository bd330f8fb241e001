//! The concrete benches: the two-beam-splitter tetrahedron interferometer
//! for a path qubit, and the polarization-path bench that realizes the
//! two-qubit SIC POM.
//!
//! First-stage routing for the two-qubit bench (one arm per input path;
//! both arms identical):
//!
//! ```text
//! in ──BS1 (r1)──BS2 (r2)──PPBS (r_v = t_h = y)──> transmitted (chi branch)
//!        │          │              └──> reflected + h-flip PS
//!        │          └──> reflected
//!        └──> reflected
//! ```
//!
//! The four branch amplitudes per arm are r1, t1 r2, t1 t2 y and
//! t1 t2 sqrt(1 - y^2); with r1 = 1/N, r2 = 1/sqrt(N^2 - 1) and
//! y = 1/sqrt(N^2 - 2) the first three all equal 1/N and the last equals
//! chi/N, matching the diagonal Kraus operators entry by entry. The PPBS
//! block conventions put a minus sign on the reflected horizontal
//! amplitude; a half-turn phase shifter on the horizontal component of
//! that arm absorbs it, so every port Kraus operator comes out exactly
//! diagonal with no leftover per-port phase.
//!
//! Each port then runs the *inverse* of its MUB unitary before the
//! polarizing beam splitters and detectors: a gate G followed by
//! computational detection measures in the basis G^dagger maps the
//! detectors to, so measuring in the columns of U_k takes G = U_k^dagger.
//! The inverses reuse the same element set with negated phases.

use crate::error::Result;
use crate::quantum::Pom;
use crate::scalar::{cast, Scalar};
use crate::sic::normalization;

use super::circuit::{PhotonicCircuit, Port};
use super::element::{ModeId, OpticalElement, PhaseTarget};

/// Closed-form amplitude coefficients of the two-qubit first stage.
#[derive(Clone, Copy, Debug)]
pub struct FirstStageParams<T> {
    /// Reflection of BS1a/BS1b: 1/N.
    pub r1: T,
    /// Reflection of BS2a/BS2b: 1/sqrt(N^2 - 1).
    pub r2: T,
    /// PPBS coefficient r_v = t_h = y: 1/sqrt(N^2 - 2).
    pub y: T,
    /// Transmission of BS1a/BS1b.
    pub t1: T,
    /// Transmission of BS2a/BS2b.
    pub t2: T,
}

/// Evaluates r1 = 1/N, r2 = 1/sqrt(N^2 - 1), y = 1/sqrt(N^2 - 2).
pub fn first_stage_params<T: Scalar>() -> FirstStageParams<T> {
    let n2 = normalization::<T>() * normalization::<T>();
    let one = T::one();
    let two = cast::<T>(2.0);
    let r1 = one / n2.sqrt();
    let r2 = one / (n2 - one).sqrt();
    let y = one / (n2 - two).sqrt();
    FirstStageParams {
        r1,
        r2,
        y,
        t1: (one - r1 * r1).sqrt(),
        t2: (one - r2 * r2).sqrt(),
    }
}

fn port(label: &str, a: ModeId, b: ModeId) -> Port {
    Port {
        label: label.into(),
        modes: (a, b),
    }
}

/// One arm of the two-qubit first stage: splits the input mode into the
/// four branch modes. `branches` = (chi-transmit, ppbs-reflect, bs2-reflect)
/// destination modes; the bs1 reflection stays on the input mode.
fn first_stage_arm<T: Scalar>(
    input: ModeId,
    bs2_out: ModeId,
    ppbs_reflect: ModeId,
    transmit: ModeId,
    params: &FirstStageParams<T>,
) -> Vec<OpticalElement<T>> {
    let r_h = (T::one() - params.y * params.y).sqrt();
    vec![
        OpticalElement::beam_splitter(params.r1, input, bs2_out),
        OpticalElement::beam_splitter(params.r2, bs2_out, ppbs_reflect),
        // The photon enters the PPBS on its second mode so that both
        // transmitted amplitudes come out positive.
        OpticalElement::ppbs(params.y, r_h, transmit, ppbs_reflect),
        OpticalElement::pol_phase(T::PI(), PhaseTarget::PolH, ppbs_reflect),
    ]
}

/// Mode layout of the two-qubit bench.
/// Inputs: L = 0, R = 1. Left-arm branches: w1 = 2 (BS2 reflect),
/// w2 = 3 (PPBS reflect), w3 = 4 (PPBS transmit); right arm mirrors them
/// as u1 = 5, u2 = 6, u3 = 7.
const L: ModeId = 0;
const R: ModeId = 1;
const W1: ModeId = 2;
const W2: ModeId = 3;
const W3: ModeId = 4;
const U1: ModeId = 5;
const U2: ModeId = 6;
const U3: ModeId = 7;

fn d4_mode_names() -> Vec<String> {
    ["L", "R", "w1", "w2", "w3", "u1", "u2", "u3"]
        .into_iter()
        .map(String::from)
        .collect()
}

fn d4_ports() -> Vec<Port> {
    // Each port pairs one left-arm branch with one right-arm branch, in
    // (left, right) order so the port's path qubit matches the input's.
    vec![
        port("1", W3, R),
        port("2", L, U3),
        port("3", W2, U1),
        port("4", W1, U2),
    ]
}

fn d4_first_stage_elements<T: Scalar>() -> Vec<OpticalElement<T>> {
    let params = first_stage_params::<T>();
    let mut elements = first_stage_arm(L, W1, W2, W3, &params);
    elements.extend(first_stage_arm(R, U1, U2, U3, &params));
    elements
}

/// The first measurement of the two-qubit bench: four output ports whose
/// Kraus operators are the diagonal chi/N operators.
pub fn build_first_stage_bench_d4<T: Scalar>() -> Result<PhotonicCircuit<T>> {
    PhotonicCircuit::new(
        true,
        d4_mode_names(),
        d4_first_stage_elements(),
        (L, R),
        d4_ports(),
    )
}

/// Elements realizing U_k on the ordered mode pair (a, b), following the
/// tensor-product decompositions: Hadamards from a HWP per mode and a
/// balanced BS, quarter-wave phases from polarization/path shifters, and
/// the CZ from a fully reflective PPBS.
fn basis_elements<T: Scalar>(k: usize, a: ModeId, b: ModeId) -> Vec<OpticalElement<T>> {
    let quarter = T::FRAC_PI_2();
    let hadamards = |v: &mut Vec<OpticalElement<T>>| {
        v.push(OpticalElement::hadamard_hwp(a));
        v.push(OpticalElement::hadamard_hwp(b));
    };
    let mut v = Vec::new();
    match k {
        1 => {
            hadamards(&mut v);
            v.push(OpticalElement::balanced_bs(a, b));
        }
        2 => {
            hadamards(&mut v);
            v.push(OpticalElement::pol_phase(quarter, PhaseTarget::PolH, a));
            v.push(OpticalElement::pol_phase(quarter, PhaseTarget::PolH, b));
            v.push(OpticalElement::balanced_bs(a, b));
            v.push(OpticalElement::path_phase(quarter, b));
        }
        3 => {
            hadamards(&mut v);
            v.push(OpticalElement::pol_phase(quarter, PhaseTarget::PolH, a));
            v.push(OpticalElement::pol_phase(quarter, PhaseTarget::PolH, b));
            v.push(OpticalElement::balanced_bs(a, b));
            v.push(OpticalElement::cz(a, b));
        }
        4 => {
            hadamards(&mut v);
            v.push(OpticalElement::balanced_bs(a, b));
            v.push(OpticalElement::path_phase(quarter, b));
            v.push(OpticalElement::cz(a, b));
        }
        _ => panic!("basis index must be 1..=4"),
    }
    v
}

/// Elements realizing U_k^dagger: the same pieces with negated phases in
/// reverse order (Hadamards and the CZ are self-inverse).
fn basis_adjoint_elements<T: Scalar>(k: usize, a: ModeId, b: ModeId) -> Vec<OpticalElement<T>> {
    let back = -T::FRAC_PI_2();
    let mut v = Vec::new();
    match k {
        1 => {}
        2 => {
            v.push(OpticalElement::path_phase(back, b));
            v.push(OpticalElement::pol_phase(back, PhaseTarget::PolH, a));
            v.push(OpticalElement::pol_phase(back, PhaseTarget::PolH, b));
        }
        3 => {
            v.push(OpticalElement::cz(a, b));
            v.push(OpticalElement::pol_phase(back, PhaseTarget::PolH, a));
            v.push(OpticalElement::pol_phase(back, PhaseTarget::PolH, b));
        }
        4 => {
            v.push(OpticalElement::cz(a, b));
            v.push(OpticalElement::path_phase(back, b));
        }
        _ => panic!("basis index must be 1..=4"),
    }
    v.push(OpticalElement::hadamard_hwp(a));
    v.push(OpticalElement::hadamard_hwp(b));
    v.push(OpticalElement::balanced_bs(a, b));
    v
}

/// A two-mode circuit whose compiled unitary is U_k.
pub fn build_basis_circuit<T: Scalar>(k: usize) -> Result<PhotonicCircuit<T>> {
    assert!((1..=4).contains(&k), "basis index must be 1..=4");
    PhotonicCircuit::new(
        true,
        vec!["a".into(), "b".into()],
        basis_elements(k, 0, 1),
        (0, 1),
        vec![port("1", 0, 1)],
    )
}

/// The complete two-qubit bench: first stage, then the inverse MUB
/// rotation on each port, ready for computational detection.
pub fn build_full_bench_d4<T: Scalar>() -> Result<PhotonicCircuit<T>> {
    let mut elements = d4_first_stage_elements::<T>();
    let ports = d4_ports();
    for (k, p) in ports.iter().enumerate() {
        elements.extend(basis_adjoint_elements(k + 1, p.modes.0, p.modes.1));
    }
    PhotonicCircuit::new(true, d4_mode_names(), elements, (L, R), ports)
}

/// The 16-outcome POM realized by the full bench with photodetectors on
/// every port basis state.
pub fn full_bench_pom<T: Scalar>() -> Result<Pom<T>> {
    build_full_bench_d4::<T>()?.detection_pom()
}

/// The tetrahedron bench (path qubit): the first stage alone, and the full
/// interferometer with the sigma_1 / sigma_2 analyzers.
#[derive(Clone, Debug)]
pub struct TetrahedronBench<T> {
    pub first_stage: PhotonicCircuit<T>,
    pub full: PhotonicCircuit<T>,
}

impl<T: Scalar> TetrahedronBench<T> {
    /// The end-to-end four-outcome POM.
    pub fn pom(&self) -> Result<Pom<T>> {
        self.full.detection_pom()
    }
}

/// Builds the tetrahedron interferometer: BS1/BS2 with
/// t1 = r2 = sqrt(1/2 - 1/sqrt 12), transmitted pair analyzed in the
/// sigma_1 basis, reflected pair phase-shifted and analyzed in the
/// sigma_2 basis.
pub fn build_tetrahedron_bench<T: Scalar>() -> Result<TetrahedronBench<T>> {
    let half = cast::<T>(0.5);
    let split = T::one() / cast::<T>(12.0).sqrt();
    let t1 = (half - split).sqrt();
    let r1 = (half + split).sqrt();

    let names: Vec<String> = ["L", "R", "tL", "tR"]
        .into_iter()
        .map(String::from)
        .collect();
    // Port 1 = transmitted pair (tL, tR) with Kraus diag(t1, t2);
    // port 2 = reflected pair (L, R) with Kraus diag(r1, r2).
    let ports = vec![port("1", 2, 3), port("2", 0, 1)];
    let first_elements = vec![
        OpticalElement::beam_splitter(r1, 0, 2),
        OpticalElement::beam_splitter(t1, 1, 3),
    ];
    let first_stage = PhotonicCircuit::new(
        false,
        names.clone(),
        first_elements.clone(),
        (0, 1),
        ports.clone(),
    )?;

    let mut elements = first_elements;
    // sigma_1 analyzer on port 1.
    elements.push(OpticalElement::balanced_bs(2, 3));
    // sigma_2 analyzer on port 2: quarter-phase back-rotation then the BS,
    // compiling to H diag(1, -i).
    elements.push(OpticalElement::path_phase(-T::FRAC_PI_2(), 1));
    elements.push(OpticalElement::balanced_bs(0, 1));
    let full = PhotonicCircuit::new(false, names, elements, (0, 1), ports)?;

    Ok(TetrahedronBench { first_stage, full })
}
