//! The full invariant suite behind the `validate` CLI subcommand: SIC and
//! MUB structure, two-stage equivalence, and the optical-bench
//! equivalences, all collected into one machine-readable report.

use crate::ket::projector_distance;
use crate::matrix::{global_phase_distance, tensor, ComplexMatrix};
use crate::quantum::{diag, DensityMatrix};
use crate::report::ValidationReport;
use crate::scalar::{as_f64, cast, Scalar};
use crate::sequential::{
    compose_two_step, kraus_first_stage_d4, match_to_sic, two_step_scheme_d2, two_step_scheme_d4,
};
use crate::sic::{
    basis_from_unitary, bloch_vector, chi, fiducial_kets, mub_bases, mub_unitary, normalization,
    sic_pom, validate_mub, validate_sic, BlochVector,
};
use crate::{optics, Result};

/// Runs every structural check the crate promises and merges the results.
/// A failure anywhere flips the overall `pass` flag; nothing panics.
pub fn full_validation_report<T: Scalar>() -> Result<ValidationReport> {
    let mut report = ValidationReport::new();

    report.merge("sic-d4", validate_sic(&sic_pom::<T>(4)?, cast::<T>(1e-12)));
    report.merge("sic-d2", validate_sic(&sic_pom::<T>(2)?, cast::<T>(1e-12)));
    report.merge("mub", validate_mub(&mub_bases::<T>(), cast::<T>(1e-12)));

    // The columns of each U_k coincide with basis k, ket by ket up to
    // global phase after index matching.
    let mub = mub_bases::<T>();
    let mut basis_residual = T::zero();
    let mut unitary_residual = T::zero();
    for k in 1..=4 {
        unitary_residual = unitary_residual.max(mub_unitary::<T>(k).unitarity_residual());
        for col in basis_from_unitary::<T>(k) {
            let best = mub.bases()[k]
                .iter()
                .map(|b| projector_distance(&col, b))
                .fold(T::infinity(), T::min);
            basis_residual = basis_residual.max(best);
        }
    }
    report.check("mub-unitaries/unitarity", as_f64(unitary_residual), 1e-12);
    report.check("mub-unitaries/basis-match", as_f64(basis_residual), 1e-12);

    // Two-stage composition reproduces the fiducial projectors.
    let fiducials = fiducial_kets::<T>();
    let composed = compose_two_step(&two_step_scheme_d4::<T>())?;
    let matching = match_to_sic(&composed, &fiducials, cast::<T>(1e-10));
    report.check_bool("two-step-d4/bijective-match", matching.pass);
    report.check("two-step-d4/max-distance", matching.max_distance, 1e-12);
    report.check_bool(
        "two-step-d4/port-permutation",
        matching.port_to_matrix.is_some(),
    );

    // Tetrahedron: first-stage effects and Bloch geometry.
    let tetra = compose_two_step(&two_step_scheme_d2::<T>())?;
    report.merge("tetrahedron", validate_sic(&tetra, cast::<T>(1e-12)));
    let scheme = two_step_scheme_d2::<T>();
    let s3 = T::one() / cast::<T>(3.0).sqrt();
    let half = cast::<T>(0.5);
    let mut first_stage_residual = T::zero();
    for (k, a) in scheme.first().operators().iter().enumerate() {
        let sign = if k == 0 { -T::one() } else { T::one() };
        let expect = diag(&[half * (T::one() + sign * s3), half * (T::one() - sign * s3)]);
        let effect = a.adjoint().matmul(a);
        first_stage_residual = first_stage_residual.max(effect.frobenius_distance(&expect));
    }
    report.check(
        "tetrahedron/first-stage-effects",
        as_f64(first_stage_residual),
        1e-12,
    );
    let blochs: Vec<BlochVector<T>> = tetra
        .effects()
        .iter()
        .map(|e| {
            let state = DensityMatrix::new(e.matrix().scale_re(cast::<T>(2.0)))?;
            bloch_vector(&state)
        })
        .collect::<Result<_>>()?;
    let third = -T::one() / cast::<T>(3.0);
    let mut dot_residual = T::zero();
    let mut norm_residual = T::zero();
    for (i, a) in blochs.iter().enumerate() {
        norm_residual = norm_residual.max((a.norm() - T::one()).abs());
        for b in blochs.iter().skip(i + 1) {
            dot_residual = dot_residual.max((a.dot(b) - third).abs());
        }
    }
    let sum = blochs.iter().fold(
        BlochVector::new(T::zero(), T::zero(), T::zero()),
        |acc, v| BlochVector::new(acc.x + v.x, acc.y + v.y, acc.z + v.z),
    );
    report.check("tetrahedron/bloch-dots", as_f64(dot_residual), 1e-10);
    report.check("tetrahedron/bloch-norms", as_f64(norm_residual), 1e-10);
    report.check("tetrahedron/bloch-sum", as_f64(sum.norm()), 1e-10);

    // Optical first stage: amplitude constraints and the Kraus operators.
    let params = optics::first_stage_params::<T>();
    let inv_n = T::one() / normalization::<T>();
    let chi_n = chi::<T>() * inv_n;
    let mut constraint_residual = (params.r1 - inv_n).abs();
    constraint_residual = constraint_residual.max((params.t1 * params.r2 - inv_n).abs());
    constraint_residual = constraint_residual.max((params.t1 * params.t2 * params.y - inv_n).abs());
    constraint_residual = constraint_residual
        .max((params.t1 * params.t2 * (T::one() - params.y * params.y).sqrt() - chi_n).abs());
    report.check(
        "bench-first-stage/amplitude-constraints",
        as_f64(constraint_residual),
        1e-12,
    );
    let bench = optics::build_first_stage_bench_d4::<T>()?;
    let ports = bench.port_kraus()?;
    let reference = kraus_first_stage_d4::<T>();
    let mut kraus_residual = T::zero();
    for (pk, a) in ports.iter().zip(reference.operators()) {
        kraus_residual = kraus_residual.max(global_phase_distance(&pk.matrix, a));
    }
    report.check("bench-first-stage/kraus", as_f64(kraus_residual), 1e-10);

    // Full bench realizes the SIC POM.
    let bench_pom = optics::full_bench_pom::<T>()?;
    report.merge("bench-full", validate_sic(&bench_pom, cast::<T>(1e-10)));
    let bench_match = match_to_sic(&bench_pom, &fiducials, cast::<T>(1e-10));
    report.check_bool("bench-full/bijective-match", bench_match.pass);
    report.check("bench-full/max-distance", bench_match.max_distance, 1e-10);

    // Basis circuits reproduce the MUB unitaries and use the right
    // entangling elements.
    let mut circuit_residual = T::zero();
    for k in 1..=4 {
        let circuit = optics::build_basis_circuit::<T>(k)?;
        circuit_residual = circuit_residual.max(global_phase_distance(
            &circuit.unitary(),
            &mub_unitary::<T>(k),
        ));
        let entangling = circuit
            .elements()
            .iter()
            .filter(|e| e.is_entangling())
            .count();
        let expect = usize::from(k > 2);
        report.check_bool(
            format!("basis-circuits/u{k}-entangling-count"),
            entangling == expect,
        );
    }
    report.check(
        "basis-circuits/unitary-match",
        as_f64(circuit_residual),
        1e-12,
    );

    // The simplest factorization identity: H (x) H equals U_1 entrywise.
    let h = ComplexMatrix::<T>::hadamard();
    report.check(
        "basis-circuits/hadamard-tensor",
        as_f64(tensor(&h, &h).frobenius_distance(&mub_unitary::<T>(1))),
        1e-14,
    );

    Ok(report)
}
