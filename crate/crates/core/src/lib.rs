//! Construction, simulation and tomography of the two-qubit symmetric
//! informationally complete POM.
//!
//! The crate builds the 16-outcome SIC measurement three equivalent ways —
//! directly from its fiducial kets, as a two-stage measurement (a diagonal
//! full-rank Kraus stage followed by a conditional measurement in one of
//! the mutually unbiased bases), and as a simulated linear-optical bench on
//! a polarization-path encoded photon — and provides sampling plus
//! linear-inversion and maximum-likelihood state reconstruction on top.
//!
//! All math is generic over the real scalar type through [`Scalar`]; the
//! `*64` aliases below fix `f64`, which is what the file formats and the
//! CLI use.

pub mod error;
pub mod scalar;

pub mod eigen;
pub mod ket;
pub mod matrix;
pub mod quantum;

pub mod report;
pub mod rng;
pub mod sic;

pub mod sequential;

pub mod optics;

pub mod tomography;

pub mod io;
pub mod validate;

pub use error::{Error, Result};
pub use ket::{fidelity_pure, projector_distance, Ket};
pub use matrix::{global_phase_distance, tensor, ComplexMatrix};
pub use quantum::{
    born_probability, post_measurement_state, state_fidelity, trace_distance, DensityMatrix,
    Effect, Pom,
};
pub use report::{CheckResult, ValidationReport};
pub use scalar::Scalar;
pub use sequential::{KrausSet, MatchReport, OutcomeLabel, TwoStepScheme};
pub use tomography::{CountRecord, Method, ReconstructionResult};

/// Double-precision complex number, the concrete amplitude type.
pub type C64 = num_complex::Complex<f64>;
/// Double-precision matrix.
pub type Matrix64 = ComplexMatrix<f64>;
/// Double-precision ket.
pub type Ket64 = Ket<f64>;
/// Double-precision density matrix.
pub type Density64 = DensityMatrix<f64>;
/// Double-precision effect.
pub type Effect64 = Effect<f64>;
/// Double-precision POM.
pub type Pom64 = Pom<f64>;
