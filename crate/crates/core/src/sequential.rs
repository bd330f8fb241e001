//! The two-stage realization of the SIC POM: a first measurement with
//! full-rank diagonal Kraus operators, then a projective measurement in a
//! basis conditioned on the first outcome.
//!
//! Composing the stages gives a single POM with d^2 outcomes
//! P(n, m) = A_n^dagger |b_m^(n)><b_m^(n)| A_n. For the diagonal Kraus
//! operators built from chi/N and the conditional bases taken as the
//! columns of the four MUB unitaries, that composition reproduces the SIC
//! fiducial projectors exactly; [`match_to_sic`] discovers the port-to-
//! fiducial-matrix pairing rather than assuming it.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ket::Ket;
use crate::matrix::ComplexMatrix;
use crate::quantum::{born_probability, post_measurement_state, DensityMatrix, Effect, Pom};
use crate::rng::{cdf_table, draw_from_cdf, stream_rng, SHOT_BATCH};
use crate::scalar::{as_f64, cast, Scalar};
use crate::sic::{basis_from_unitary, chi, normalization, FiducialSet};
use crate::tomography::CountRecord;

/// An ordered set of Kraus operators with the completeness property
/// sum A^dagger A = identity.
#[derive(Clone, Debug)]
pub struct KrausSet<T> {
    operators: Vec<ComplexMatrix<T>>,
}

impl<T: Scalar> KrausSet<T> {
    pub fn new(operators: Vec<ComplexMatrix<T>>) -> Result<Self> {
        let dim = match operators.first() {
            Some(op) if op.is_square() => op.dim(),
            _ => {
                return Err(Error::InvalidState(
                    "Kraus set needs at least one square operator".into(),
                ))
            }
        };
        if operators
            .iter()
            .any(|op| !op.is_square() || op.dim() != dim)
        {
            return Err(Error::DimensionMismatch(
                "Kraus operators have mixed dimensions".into(),
            ));
        }
        let mut sum = ComplexMatrix::zeros(dim, dim);
        for op in &operators {
            sum = sum.add(&op.adjoint().matmul(op));
        }
        let residual = sum.sub(&ComplexMatrix::identity(dim)).max_abs_entry();
        if residual > T::strict_tol() {
            return Err(Error::InvalidState(format!(
                "Kraus completeness residual {}",
                as_f64(residual)
            )));
        }
        Ok(Self { operators })
    }

    pub fn operators(&self) -> &[ComplexMatrix<T>] {
        &self.operators
    }

    pub fn len(&self) -> usize {
        self.operators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.operators.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.operators[0].dim()
    }
}

/// First-stage Kraus operators plus one conditional orthonormal basis per
/// first-stage outcome.
#[derive(Clone, Debug)]
pub struct TwoStepScheme<T> {
    first: KrausSet<T>,
    conditional_bases: Vec<Vec<Ket<T>>>,
}

impl<T: Scalar> TwoStepScheme<T> {
    pub fn new(first: KrausSet<T>, conditional_bases: Vec<Vec<Ket<T>>>) -> Result<Self> {
        let d = first.dim();
        if conditional_bases.len() != first.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} Kraus operators but {} conditional bases",
                first.len(),
                conditional_bases.len()
            )));
        }
        for (k, basis) in conditional_bases.iter().enumerate() {
            if basis.len() != d || basis.iter().any(|ket| ket.dim() != d) {
                return Err(Error::DimensionMismatch(format!(
                    "conditional basis {k} does not span dimension {d}"
                )));
            }
            for (i, a) in basis.iter().enumerate() {
                for (j, b) in basis.iter().enumerate() {
                    let expect = if i == j { T::one() } else { T::zero() };
                    if (a.inner(b).norm() - expect).abs() > T::strict_tol() {
                        return Err(Error::InvalidState(format!(
                            "conditional basis {k} not orthonormal at ({i}, {j})"
                        )));
                    }
                }
            }
        }
        Ok(Self {
            first,
            conditional_bases,
        })
    }

    pub fn first(&self) -> &KrausSet<T> {
        &self.first
    }

    pub fn conditional_bases(&self) -> &[Vec<Ket<T>>] {
        &self.conditional_bases
    }

    pub fn dim(&self) -> usize {
        self.first.dim()
    }
}

/// Outcome of the composed measurement: first-stage port and second-stage
/// result, both 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct OutcomeLabel {
    pub port: usize,
    pub result: usize,
}

impl OutcomeLabel {
    pub fn new(port: usize, result: usize) -> Self {
        Self { port, result }
    }
}

impl std::fmt::Display for OutcomeLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "p{}r{}", self.port, self.result)
    }
}

/// The four diagonal Kraus operators diag(..., chi, ...)/N, one chi per
/// slot.
pub fn kraus_first_stage_d4<T: Scalar>() -> KrausSet<T> {
    let n_inv = T::one() / normalization::<T>();
    let x = chi::<T>() * n_inv;
    let operators = (0..4)
        .map(|slot| {
            let entries: Vec<T> = (0..4).map(|i| if i == slot { x } else { n_inv }).collect();
            crate::quantum::diag(&entries)
        })
        .collect();
    KrausSet::new(operators).expect("chi^2 + 3 = N^2 gives completeness")
}

/// The tetrahedron first stage: A1 = diag(t1, t2), A2 = diag(r1, r2) with
/// t1 = r2 = sqrt(1/2 - 1/sqrt 12) and t2 = r1 = sqrt(1/2 + 1/sqrt 12).
pub fn kraus_first_stage_d2<T: Scalar>() -> KrausSet<T> {
    let half = cast::<T>(0.5);
    let split = T::one() / cast::<T>(12.0).sqrt();
    let small = (half - split).sqrt();
    let large = (half + split).sqrt();
    let a1 = crate::quantum::diag(&[small, large]);
    let a2 = crate::quantum::diag(&[large, small]);
    KrausSet::new(vec![a1, a2]).expect("t^2 + r^2 = 1 per mode")
}

/// Two-stage scheme for the qubit pair: Kraus stage plus the conditional
/// MUB measurement, basis k for port k.
pub fn two_step_scheme_d4<T: Scalar>() -> TwoStepScheme<T> {
    let bases = (1..=4).map(|k| basis_from_unitary::<T>(k)).collect();
    TwoStepScheme::new(kraus_first_stage_d4(), bases).expect("built from valid parts")
}

/// Two-stage scheme for the tetrahedron: the sigma_1 eigenbasis behind
/// port 1 and the sigma_2 eigenbasis behind port 2.
pub fn two_step_scheme_d2<T: Scalar>() -> TwoStepScheme<T> {
    let half = cast::<T>(0.5).sqrt();
    let zero = T::zero();
    let sigma1 = vec![
        Ket::new(vec![
            num_complex::Complex::new(half, zero),
            num_complex::Complex::new(half, zero),
        ])
        .unwrap(),
        Ket::new(vec![
            num_complex::Complex::new(half, zero),
            num_complex::Complex::new(-half, zero),
        ])
        .unwrap(),
    ];
    let sigma2 = vec![
        Ket::new(vec![
            num_complex::Complex::new(half, zero),
            num_complex::Complex::new(zero, half),
        ])
        .unwrap(),
        Ket::new(vec![
            num_complex::Complex::new(half, zero),
            num_complex::Complex::new(zero, -half),
        ])
        .unwrap(),
    ];
    TwoStepScheme::new(kraus_first_stage_d2(), vec![sigma1, sigma2])
        .expect("built from valid parts")
}

/// Collapses the two stages into the single POM with effects
/// A_n^dagger |b_m><b_m| A_n in lexicographic (port, result) order.
pub fn compose_two_step<T: Scalar>(scheme: &TwoStepScheme<T>) -> Result<Pom<T>> {
    let mut effects = Vec::with_capacity(scheme.first().len() * scheme.dim());
    for (n, kraus) in scheme.first().operators().iter().enumerate() {
        let adj = kraus.adjoint();
        for (m, ket) in scheme.conditional_bases()[n].iter().enumerate() {
            let effect = adj.matmul(&ket.projector()).matmul(kraus).hermitized();
            let label = OutcomeLabel::new(n + 1, m + 1);
            effects.push(Effect::new(effect, label.to_string())?);
        }
    }
    Pom::new(effects)
}

/// One matched pair: composed outcome, fiducial index, projector distance.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MatchedOutcome {
    pub outcome: OutcomeLabel,
    pub matrix: usize,
    pub column: usize,
    pub distance: f64,
}

/// Result of matching a 16-outcome POM against the fiducial projectors:
/// the full assignment, the induced port-to-matrix permutation (when each
/// port maps into a single fiducial matrix), and the worst distance.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MatchReport {
    pub pairs: Vec<MatchedOutcome>,
    pub port_to_matrix: Option<Vec<(usize, usize)>>,
    pub max_distance: f64,
    pub pass: bool,
}

/// Matches each effect of a 16-outcome POM to the unique fiducial whose
/// projector it equals (after normalization) within `tol`. Fails, in the
/// report, if any effect is unmatched or any fiducial claimed twice.
pub fn match_to_sic<T: Scalar>(pom: &Pom<T>, fiducials: &FiducialSet<T>, tol: T) -> MatchReport {
    if pom.len() != fiducials.len() || pom.dim() != 4 {
        return MatchReport {
            pairs: Vec::new(),
            port_to_matrix: None,
            max_distance: f64::INFINITY,
            pass: false,
        };
    }
    let mut pairs = Vec::with_capacity(pom.len());
    let mut claimed = vec![false; fiducials.len()];
    let mut max_distance = 0.0f64;
    let mut pass = true;

    for (flat, effect) in pom.effects().iter().enumerate() {
        let outcome = OutcomeLabel::new(flat / 4 + 1, flat % 4 + 1);
        let trace = effect.trace_re();
        let normalized = effect
            .matrix()
            .scale_re(T::one() / trace.max(T::min_branch_prob()));

        let mut best: Option<(usize, T)> = None;
        let mut hits = 0usize;
        for (idx, ket) in fiducials.kets().iter().enumerate() {
            let d = normalized.frobenius_distance(&ket.projector());
            if d < tol {
                hits += 1;
                if claimed[idx] {
                    pass = false;
                }
                claimed[idx] = true;
            }
            if best.is_none_or(|(_, bd)| d < bd) {
                best = Some((idx, d));
            }
        }
        let (idx, dist) = best.expect("sixteen candidates");
        if hits != 1 {
            pass = false;
        }
        max_distance = max_distance.max(as_f64(dist));
        pairs.push(MatchedOutcome {
            outcome,
            matrix: idx / 4 + 1,
            column: idx % 4 + 1,
            distance: as_f64(dist),
        });
    }
    if !claimed.iter().all(|&c| c) {
        pass = false;
    }

    // The permutation is reported only when every port lands in one matrix.
    let mut port_to_matrix = Vec::new();
    let mut consistent = true;
    for port in 1..=4 {
        let mut matrices = pairs
            .iter()
            .filter(|p| p.outcome.port == port)
            .map(|p| p.matrix);
        let first = matrices.next();
        if let Some(m) = first {
            if matrices.all(|x| x == m) {
                port_to_matrix.push((port, m));
            } else {
                consistent = false;
            }
        }
    }

    MatchReport {
        pairs,
        port_to_matrix: if consistent && port_to_matrix.len() == 4 {
            Some(port_to_matrix)
        } else {
            None
        },
        max_distance,
        pass,
    }
}

/// Samples the physical cascade shot by shot: draw the port from
/// p(n) = tr(rho A_n^dagger A_n), collapse the state, then draw the result
/// in the port's conditional basis. RNG streams advance per [`SHOT_BATCH`]
/// shots (stream 1 + b for batch b).
pub fn sample_sequential<T: Scalar>(
    rho: &DensityMatrix<T>,
    scheme: &TwoStepScheme<T>,
    shots: u64,
    seed: u64,
) -> Result<CountRecord> {
    if rho.dim() != scheme.dim() {
        return Err(Error::DimensionMismatch(format!(
            "state dimension {} vs scheme dimension {}",
            rho.dim(),
            scheme.dim()
        )));
    }
    let d = scheme.dim();

    // The cascade tables: port probabilities, then per-port conditional
    // result probabilities on the collapsed state.
    let mut port_probs = Vec::with_capacity(scheme.first().len());
    let mut conditional = Vec::with_capacity(scheme.first().len());
    for (n, kraus) in scheme.first().operators().iter().enumerate() {
        match post_measurement_state(rho, kraus) {
            Ok((collapsed, p)) => {
                port_probs.push(p);
                let basis = &scheme.conditional_bases()[n];
                let probs: Result<Vec<T>> = basis
                    .iter()
                    .enumerate()
                    .map(|(m, ket)| {
                        let e = Effect::new(
                            ket.projector(),
                            OutcomeLabel::new(n + 1, m + 1).to_string(),
                        )?;
                        born_probability(&collapsed, &e)
                    })
                    .collect();
                conditional.push(cdf_table(&probs?));
            }
            Err(Error::ImpossibleOutcome(_)) => {
                port_probs.push(T::zero());
                conditional.push(cdf_table(&vec![T::zero(); d]));
            }
            Err(e) => return Err(e),
        }
    }
    let port_cdf = cdf_table(&port_probs);

    let mut counts: BTreeMap<OutcomeLabel, u64> = BTreeMap::new();
    for n in 1..=scheme.first().len() {
        for m in 1..=d {
            counts.insert(OutcomeLabel::new(n, m), 0);
        }
    }

    let mut remaining = shots;
    let mut batch = 0u64;
    while remaining > 0 {
        let in_batch = remaining.min(SHOT_BATCH);
        let mut rng = stream_rng(seed, 1 + batch);
        for _ in 0..in_batch {
            let n = draw_from_cdf(&port_cdf, &mut rng);
            let m = draw_from_cdf(&conditional[n], &mut rng);
            *counts
                .get_mut(&OutcomeLabel::new(n + 1, m + 1))
                .expect("preset label") += 1;
        }
        remaining -= in_batch;
        batch += 1;
    }

    CountRecord::new(format!("two-step-d{d}"), shots, counts)
}
