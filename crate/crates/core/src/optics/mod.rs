//! Linear-optics simulation: optical elements as mode unitaries, circuits
//! compiled to a global single-photon transformation, per-port Kraus
//! extraction, the concrete benches, and phase-drift perturbation.

mod bench;
mod circuit;
mod element;

pub use bench::{
    build_basis_circuit, build_first_stage_bench_d4, build_full_bench_d4, build_tetrahedron_bench,
    first_stage_params, full_bench_pom, FirstStageParams, TetrahedronBench,
};
pub use circuit::{PhotonicCircuit, Port, PortKraus};
pub use element::{element_unitary, ElementKind, ModeId, OpticalElement, PhaseTarget};
