//! From states to data and back: Born-rule distributions, multinomial
//! sampling, linear inversion through the SIC dual frame, nearest-state
//! projection, and iterative maximum-likelihood reconstruction.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::eigen::{eigh, min_eigenvalue};
use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::quantum::{born_probability, state_fidelity, DensityMatrix, Effect, Pom};
use crate::rng::{
    cdf_table, draw_from_cdf, random_mixed_state, random_pure_state, stream_rng, trial_stream,
    SHOT_BATCH,
};
use crate::scalar::{as_f64, cast, Scalar};
use crate::sequential::OutcomeLabel;
use crate::sic::{sic_pom, validate_sic};

/// Counted outcomes of a measurement run. The label map always carries
/// every outcome of the POM, including zero counts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountRecord {
    pom: String,
    shots: u64,
    counts: BTreeMap<OutcomeLabel, u64>,
}

impl CountRecord {
    pub fn new(
        pom: impl Into<String>,
        shots: u64,
        counts: BTreeMap<OutcomeLabel, u64>,
    ) -> Result<Self> {
        let total: u64 = counts.values().sum();
        if total != shots {
            return Err(Error::InvalidCounts(format!(
                "counts sum to {total}, expected {shots}"
            )));
        }
        Ok(Self {
            pom: pom.into(),
            shots,
            counts,
        })
    }

    pub fn pom_id(&self) -> &str {
        &self.pom
    }

    pub fn total(&self) -> u64 {
        self.shots
    }

    pub fn counts(&self) -> &BTreeMap<OutcomeLabel, u64> {
        &self.counts
    }

    /// Relative frequencies in sorted label order, which matches the
    /// effect order of every POM constructed by this crate.
    pub fn frequencies<T: Scalar>(&self) -> Vec<T> {
        let total = self.shots.max(1);
        self.counts
            .values()
            .map(|&c| cast::<T>(c as f64 / total as f64))
            .collect()
    }
}

/// Outcome labels used when a distribution is sampled without an explicit
/// POM: a square table of k groups times k results when the length is a
/// perfect square, a single group otherwise.
pub fn default_labels(len: usize) -> Vec<OutcomeLabel> {
    let k = (len as f64).sqrt().round() as usize;
    if k * k == len {
        (0..len)
            .map(|i| OutcomeLabel::new(i / k + 1, i % k + 1))
            .collect()
    } else {
        (0..len).map(|i| OutcomeLabel::new(1, i + 1)).collect()
    }
}

/// Born-rule outcome distribution of a POM on a state.
pub fn outcome_distribution<T: Scalar>(rho: &DensityMatrix<T>, pom: &Pom<T>) -> Result<Vec<T>> {
    let probs: Result<Vec<T>> = pom
        .effects()
        .iter()
        .map(|e| born_probability(rho, e))
        .collect();
    let probs = probs?;
    let total: T = probs.iter().copied().sum();
    if (total - T::one()).abs() > T::psd_slack() {
        return Err(Error::ConsistencyCheck(format!(
            "distribution sums to {}",
            as_f64(total)
        )));
    }
    Ok(probs)
}

/// Multinomial sampling of a distribution, deterministic in the seed.
/// Batches of [`SHOT_BATCH`] shots use RNG streams `1 + b`.
pub fn sample_counts<T: Scalar>(
    dist: &[T],
    shots: u64,
    seed: u64,
    pom_id: impl Into<String>,
) -> Result<CountRecord> {
    sample_counts_streamed(dist, shots, seed, pom_id, |b| 1 + b)
}

/// Sampling with a caller-chosen batch-to-stream rule, so multi-trial runs
/// can keep disjoint stream blocks.
pub fn sample_counts_streamed<T: Scalar>(
    dist: &[T],
    shots: u64,
    seed: u64,
    pom_id: impl Into<String>,
    stream_for_batch: impl Fn(u64) -> u64,
) -> Result<CountRecord> {
    let mut clean = Vec::with_capacity(dist.len());
    for &p in dist {
        if p < -T::prob_clamp() {
            return Err(Error::InvalidProbability(as_f64(p)));
        }
        clean.push(p.max(T::zero()));
    }
    let total: T = clean.iter().copied().sum();
    if (total - T::one()).abs() > cast::<T>(1e-9) {
        return Err(Error::InvalidCounts(format!(
            "distribution sums to {}, not 1",
            as_f64(total)
        )));
    }

    let labels = default_labels(dist.len());
    let mut tallies = vec![0u64; dist.len()];
    let cdf = cdf_table(&clean);
    let mut remaining = shots;
    let mut batch = 0u64;
    while remaining > 0 {
        let in_batch = remaining.min(SHOT_BATCH);
        let mut rng = stream_rng(seed, stream_for_batch(batch));
        for _ in 0..in_batch {
            tallies[draw_from_cdf(&cdf, &mut rng)] += 1;
        }
        remaining -= in_batch;
        batch += 1;
    }

    let counts: BTreeMap<OutcomeLabel, u64> = labels.into_iter().zip(tallies).collect();
    CountRecord::new(pom_id, shots, counts)
}

/// Linear inversion through the SIC dual frame:
/// rho = sum_j ((d+1) f_j - 1/d) Pi_j with Pi_j = d * effect_j.
///
/// Exact Born frequencies invert exactly; sampled frequencies give a
/// Hermitian unit-trace matrix that may have (slightly) negative
/// eigenvalues, which is left to the caller to project or flag.
pub fn linear_inversion<T: Scalar>(freqs: &[T], pom: &Pom<T>) -> Result<ComplexMatrix<T>> {
    let d = pom.dim();
    if freqs.len() != d * d || pom.len() != d * d {
        return Err(Error::DimensionMismatch(format!(
            "expected {} frequencies for dimension {d}, got {}",
            d * d,
            freqs.len()
        )));
    }
    let gate = validate_sic(pom, T::psd_slack());
    if !gate.pass {
        let failed: Vec<&str> = gate.failed_checks().map(|c| c.name.as_str()).collect();
        return Err(Error::NotSic(failed.join(", ")));
    }

    let dt = T::from(d).unwrap();
    let mut estimate = ComplexMatrix::zeros(d, d);
    for (e, &f) in pom.effects().iter().zip(freqs) {
        let coeff = (dt + T::one()) * f - T::one() / dt;
        // Pi_j = d * effect_j, so the total scale is d * coeff.
        estimate = estimate.add(&e.matrix().scale_re(dt * coeff));
    }
    Ok(estimate.hermitized())
}

/// Euclidean projection of a Hermitian unit-trace matrix onto the density
/// matrix cone: eigenvalues are projected onto the probability simplex,
/// the eigenbasis is kept.
pub fn project_to_physical<T: Scalar>(h: &ComplexMatrix<T>) -> Result<DensityMatrix<T>> {
    if !h.is_square() {
        return Err(Error::InvalidState(
            "projection input must be square".into(),
        ));
    }
    if h.hermiticity_residual() > T::psd_slack() {
        return Err(Error::InvalidState(format!(
            "projection input not Hermitian: residual {}",
            as_f64(h.hermiticity_residual())
        )));
    }
    let decomposition = eigh(h);
    let projected = project_simplex(&decomposition.values);
    let n = decomposition.values.len();
    let diag: Vec<Complex<T>> = projected
        .iter()
        .map(|&l| Complex::new(l, T::zero()))
        .collect();
    let v = &decomposition.vectors;
    let rebuilt = v
        .matmul(&ComplexMatrix::from_diag(&diag))
        .matmul(&v.adjoint())
        .hermitized();
    debug_assert_eq!(rebuilt.dim(), n);
    DensityMatrix::new(rebuilt)
}

/// Euclidean projection of a real vector onto the probability simplex.
fn project_simplex<T: Scalar>(values: &[T]) -> Vec<T> {
    let mut sorted: Vec<T> = values.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut cumulative = T::zero();
    let mut theta = T::zero();
    let mut support = 0usize;
    for (k, &l) in sorted.iter().enumerate() {
        cumulative += l;
        let candidate = (cumulative - T::one()) / T::from(k + 1).unwrap();
        if l - candidate > T::zero() {
            theta = candidate;
            support = k + 1;
        }
    }
    debug_assert!(support > 0);
    values.iter().map(|&l| (l - theta).max(T::zero())).collect()
}

/// Reconstruction method names as used in configs and reports.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "linear")]
    Linear,
    #[serde(rename = "linear-projected")]
    LinearProjected,
    #[serde(rename = "mle")]
    Mle,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Method::Linear => "linear",
            Method::LinearProjected => "linear-projected",
            Method::Mle => "mle",
        };
        f.write_str(s)
    }
}

impl FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "linear" => Ok(Method::Linear),
            "linear-projected" => Ok(Method::LinearProjected),
            "mle" => Ok(Method::Mle),
            other => Err(Error::InvalidConfig(format!(
                "unknown method '{other}' (expected linear, linear-projected or mle)"
            ))),
        }
    }
}

/// Stopping parameters for the iterative MLE.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct MleOptions {
    pub max_iter: usize,
    pub tol: f64,
}

impl Default for MleOptions {
    fn default() -> Self {
        Self {
            max_iter: 100_000,
            tol: 1e-10,
        }
    }
}

/// Outcome of one reconstruction. `estimate` is always the raw Hermitian
/// matrix; `physical` records whether it satisfies the density-matrix
/// invariants (linear inversion of noisy data may not).
#[derive(Clone, Debug)]
pub struct ReconstructionResult<T> {
    pub method: Method,
    pub estimate: ComplexMatrix<T>,
    pub physical: bool,
    pub iterations: usize,
    pub converged: bool,
    /// max_j |p_j(estimate) - f_j|
    pub max_prob_deviation: T,
    /// Per-shot log-likelihood gain of the final iteration (MLE only).
    pub loglik_delta: T,
    /// Most negative per-shot log-likelihood step observed; >= -1e-12
    /// means the ascent was monotone to within round-off.
    pub min_loglik_step: T,
}

impl<T: Scalar> ReconstructionResult<T> {
    pub fn density(&self) -> Result<DensityMatrix<T>> {
        DensityMatrix::new(self.estimate.clone())
    }
}

fn probabilities_of<T: Scalar>(estimate: &ComplexMatrix<T>, pom: &Pom<T>) -> Vec<T> {
    pom.effects()
        .iter()
        .map(|e| e.matrix().matmul(estimate).trace().re)
        .collect()
}

fn max_abs_diff<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| (x - y).abs())
        .fold(T::zero(), T::max)
}

/// Iterative maximum-likelihood reconstruction by the fixed-point map
/// rho <- normalize(R rho R), R = sum_j (f_j / p_j) effect_j over outcomes
/// with f_j > 0, started from the maximally mixed state.
pub fn mle_reconstruct<T: Scalar>(
    counts: &CountRecord,
    pom: &Pom<T>,
    opts: MleOptions,
) -> Result<ReconstructionResult<T>> {
    if counts.total() == 0 {
        return Err(Error::InvalidCounts("MLE requires shots > 0".into()));
    }
    if counts.counts().len() != pom.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} counted outcomes vs {} effects",
            counts.counts().len(),
            pom.len()
        )));
    }
    let freqs: Vec<T> = counts.frequencies();
    let d = pom.dim();
    let tol = cast::<T>(opts.tol);
    // The likelihood-stall test bounds the increase of the *total* data
    // log-likelihood sum_j n_j ln p_j by tol; internally the likelihood is
    // tracked per shot so the monotonicity slack stays meaningful.
    let stall = tol / cast::<T>(counts.total() as f64);
    let prob_floor = cast::<T>(1e-18);

    let loglik = |probs: &[T]| -> T {
        freqs
            .iter()
            .zip(probs)
            .filter(|(&f, _)| f > T::zero())
            .map(|(&f, &p)| f * p.max(prob_floor).ln())
            .sum()
    };

    let mut rho = ComplexMatrix::identity(d).scale_re(T::one() / T::from(d).unwrap());
    let mut probs = probabilities_of(&rho, pom);
    let mut ll = loglik(&probs);

    let mut iterations = 0usize;
    let mut converged = false;
    let mut last_delta = T::zero();
    let mut min_step = T::zero();

    for _ in 0..opts.max_iter {
        if max_abs_diff(&probs, &freqs) < tol {
            converged = true;
            break;
        }
        let mut r = ComplexMatrix::zeros(d, d);
        for ((e, &f), &p) in pom.effects().iter().zip(&freqs).zip(&probs) {
            if f > T::zero() {
                r = r.add(&e.matrix().scale_re(f / p.max(prob_floor)));
            }
        }
        let raw = r.matmul(&rho).matmul(&r);
        let trace = raw.trace().re;
        rho = raw.scale_re(T::one() / trace).hermitized();
        probs = probabilities_of(&rho, pom);
        let ll_next = loglik(&probs);
        last_delta = ll_next - ll;
        min_step = min_step.min(last_delta);
        ll = ll_next;
        iterations += 1;
        if last_delta < stall {
            converged = true;
            break;
        }
    }
    if max_abs_diff(&probs, &freqs) < tol {
        converged = true;
    }

    Ok(ReconstructionResult {
        method: Method::Mle,
        estimate: rho,
        physical: true,
        iterations,
        converged,
        max_prob_deviation: max_abs_diff(&probs, &freqs),
        loglik_delta: last_delta,
        min_loglik_step: min_step,
    })
}

/// Runs one reconstruction method on a count record.
pub fn reconstruct<T: Scalar>(
    counts: &CountRecord,
    pom: &Pom<T>,
    method: Method,
    opts: MleOptions,
) -> Result<ReconstructionResult<T>> {
    match method {
        Method::Mle => mle_reconstruct(counts, pom, opts),
        Method::Linear | Method::LinearProjected => {
            let freqs: Vec<T> = counts.frequencies();
            let raw = linear_inversion(&freqs, pom)?;
            let (estimate, physical) = match method {
                Method::Linear => {
                    let physical = min_eigenvalue(&raw) >= -T::psd_slack();
                    (raw, physical)
                }
                _ => (project_to_physical(&raw)?.matrix().clone(), true),
            };
            let probs = probabilities_of(&estimate, pom);
            Ok(ReconstructionResult {
                method,
                estimate,
                physical,
                iterations: 0,
                converged: true,
                max_prob_deviation: max_abs_diff(&probs, &freqs),
                loglik_delta: T::zero(),
                min_loglik_step: T::zero(),
            })
        }
    }
}

/// Trace distance that accepts raw Hermitian matrices, so non-physical
/// linear estimates can still be scored against the truth.
pub fn hermitian_trace_distance<T: Scalar>(a: &ComplexMatrix<T>, b: &ComplexMatrix<T>) -> T {
    let half = T::one() / (T::one() + T::one());
    let diff = a.sub(b).hermitized();
    let sum: T = eigh(&diff).values.into_iter().map(T::abs).sum();
    half * sum
}

// ---------------------------------------------------------------------
// End-to-end experiment pipeline (double precision; this is the layer the
// file formats and CLI talk to).
// ---------------------------------------------------------------------

/// Where the true state comes from.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "kebab-case")]
pub enum StateSource {
    File { path: String },
    RandomPure { dim: usize },
    RandomMixed { dim: usize },
}

/// Which realization of the measurement produces the statistics.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    Direct,
    TwoStep,
    Optical,
}

impl FromStr for Scheme {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "direct" => Ok(Scheme::Direct),
            "two-step" => Ok(Scheme::TwoStep),
            "optical" => Ok(Scheme::Optical),
            other => Err(Error::InvalidConfig(format!(
                "unknown scheme '{other}' (expected direct, two-step or optical)"
            ))),
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Scheme::Direct => "direct",
            Scheme::TwoStep => "two-step",
            Scheme::Optical => "optical",
        };
        f.write_str(s)
    }
}

fn default_methods() -> Vec<Method> {
    vec![Method::Linear, Method::LinearProjected, Method::Mle]
}

/// Everything needed to reproduce one experiment end to end.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub state: StateSource,
    #[serde(default = "default_scheme")]
    pub scheme: Scheme,
    pub shots: u64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_methods")]
    pub methods: Vec<Method>,
    #[serde(default)]
    pub mle: MleOptions,
}

fn default_scheme() -> Scheme {
    Scheme::Direct
}

/// One counted outcome row, shared by the JSON and CSV count formats.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct CountRow {
    pub port: usize,
    pub result: usize,
    pub count: u64,
}

/// Per-method part of an experiment report.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MethodReport {
    pub method: Method,
    pub estimate: Vec<Vec<[f64; 2]>>,
    pub physical: bool,
    pub iterations: usize,
    pub converged: bool,
    pub max_prob_deviation: f64,
    pub loglik_delta: f64,
    pub min_loglik_step: f64,
    pub fidelity: Option<f64>,
    pub trace_distance: f64,
}

/// Full record of one experiment. Serialization is deterministic for a
/// fixed config: the optional timing field stays out of the JSON unless a
/// caller explicitly fills it in.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub dim: usize,
    pub pom: String,
    pub true_state: Vec<Vec<[f64; 2]>>,
    pub probabilities: Vec<f64>,
    pub counts: Vec<CountRow>,
    pub methods: Vec<MethodReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<u64>,
}

pub(crate) fn matrix_rows(m: &ComplexMatrix<f64>) -> Vec<Vec<[f64; 2]>> {
    (0..m.rows())
        .map(|i| {
            (0..m.cols())
                .map(|j| [m[(i, j)].re, m[(i, j)].im])
                .collect()
        })
        .collect()
}

/// Permutes `pom` so its effects line up one-to-one with `reference`,
/// relabeling them with the reference labels. Errors if the matching is
/// not a bijection within `tol`.
pub fn align_to_reference<T: Scalar>(pom: &Pom<T>, reference: &Pom<T>, tol: T) -> Result<Pom<T>> {
    if pom.len() != reference.len() || pom.dim() != reference.dim() {
        return Err(Error::DimensionMismatch(
            "POMs of different shapes cannot be aligned".into(),
        ));
    }
    let mut used = vec![false; pom.len()];
    let mut effects = Vec::with_capacity(pom.len());
    for target in reference.effects() {
        let mut found = None;
        for (i, candidate) in pom.effects().iter().enumerate() {
            if used[i] {
                continue;
            }
            if target.matrix().frobenius_distance(candidate.matrix()) < tol {
                found = Some(i);
                break;
            }
        }
        let i = found.ok_or_else(|| {
            Error::ConsistencyCheck(format!(
                "no effect matches reference outcome '{}'",
                target.label()
            ))
        })?;
        used[i] = true;
        effects.push(Effect::new(
            pom.effects()[i].matrix().clone(),
            target.label(),
        )?);
    }
    Pom::new(effects)
}

/// The POM a scheme realizes, aligned outcome-by-outcome with the
/// canonical SIC POM of that dimension.
pub fn scheme_pom(scheme: Scheme, dim: usize) -> Result<Pom<f64>> {
    let reference = sic_pom::<f64>(dim)?;
    let tol = 1e-10;
    match scheme {
        Scheme::Direct => Ok(reference),
        Scheme::TwoStep => {
            let composed = match dim {
                4 => crate::sequential::compose_two_step(&crate::sequential::two_step_scheme_d4())?,
                2 => crate::sequential::compose_two_step(&crate::sequential::two_step_scheme_d2())?,
                other => return Err(Error::UnsupportedDimension(other)),
            };
            align_to_reference(&composed, &reference, tol)
        }
        Scheme::Optical => {
            let bench = match dim {
                4 => crate::optics::full_bench_pom()?,
                2 => crate::optics::build_tetrahedron_bench::<f64>()?.pom()?,
                other => return Err(Error::UnsupportedDimension(other)),
            };
            align_to_reference(&bench, &reference, tol)
        }
    }
}

fn resolve_state(cfg: &ExperimentConfig) -> Result<DensityMatrix<f64>> {
    match &cfg.state {
        StateSource::File { path } => {
            let text = std::fs::read_to_string(path)?;
            crate::io::parse_state_json(&text).map(|s| s.density())
        }
        StateSource::RandomPure { dim } => {
            let mut rng = stream_rng(cfg.seed, 0);
            Ok(DensityMatrix::from_ket(&random_pure_state(*dim, &mut rng)))
        }
        StateSource::RandomMixed { dim } => {
            let mut rng = stream_rng(cfg.seed, 0);
            Ok(random_mixed_state(*dim, &mut rng))
        }
    }
}

/// Deterministic end-to-end run: resolve the state and scheme, verify the
/// scheme reproduces the direct Born distribution, sample, reconstruct
/// with every requested method, and score against the truth.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    if cfg.shots == 0 {
        return Err(Error::InvalidConfig("shots: must be positive".into()));
    }
    if cfg.methods.is_empty() {
        return Err(Error::InvalidConfig("methods: none requested".into()));
    }
    if cfg.mle.max_iter == 0 || cfg.mle.tol <= 0.0 || cfg.mle.tol.is_nan() {
        return Err(Error::InvalidConfig(
            "mle: max_iter must be positive and tol > 0".into(),
        ));
    }
    let rho = resolve_state(cfg)?;
    let dim = rho.dim();
    if dim != 2 && dim != 4 {
        return Err(Error::InvalidConfig(format!(
            "state: dimension {dim} not supported (use 2 or 4)"
        )));
    }

    let reference = sic_pom::<f64>(dim)?;
    let pom = scheme_pom(cfg.scheme, dim)?;
    let probabilities = outcome_distribution(&rho, &pom)?;
    let direct = outcome_distribution(&rho, &reference)?;
    let drift = max_abs_diff(&probabilities, &direct);
    if drift > 1e-10 {
        return Err(Error::ConsistencyCheck(format!(
            "scheme distribution deviates from direct Born rule by {drift}"
        )));
    }

    let pom_id = format!("sic-d{dim}");
    let counts = sample_counts(&probabilities, cfg.shots, cfg.seed, pom_id.clone())?;

    let mut methods = Vec::with_capacity(cfg.methods.len());
    for &method in &cfg.methods {
        let res = reconstruct(&counts, &pom, method, cfg.mle)?;
        let fidelity = res
            .density()
            .ok()
            .map(|est| state_fidelity(&est, &rho))
            .transpose()?;
        let trace_distance = hermitian_trace_distance(&res.estimate, rho.matrix());
        methods.push(MethodReport {
            method,
            estimate: matrix_rows(&res.estimate),
            physical: res.physical,
            iterations: res.iterations,
            converged: res.converged,
            max_prob_deviation: res.max_prob_deviation,
            loglik_delta: res.loglik_delta,
            min_loglik_step: res.min_loglik_step,
            fidelity,
            trace_distance,
        });
    }

    Ok(ExperimentReport {
        config: cfg.clone(),
        dim,
        pom: pom_id,
        true_state: matrix_rows(rho.matrix()),
        probabilities,
        counts: counts
            .counts()
            .iter()
            .map(|(l, &c)| CountRow {
                port: l.port,
                result: l.result,
                count: c,
            })
            .collect(),
        methods,
        timing_ms: None,
    })
}

/// Summary statistics of one method over a batch of trials.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MethodStats {
    pub method: Method,
    pub fidelity_median: f64,
    pub fidelity_q1: f64,
    pub fidelity_q3: f64,
    pub fidelity_min: f64,
    pub fidelity_max: f64,
}

/// Fidelity statistics over repeated random-pure-state experiments.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BenchSummary {
    pub trials: u64,
    pub shots: u64,
    pub dim: usize,
    pub seed: u64,
    pub methods: Vec<MethodStats>,
}

/// Runs `trials` independent tomography trials on random pure states and
/// summarizes reconstruction fidelities per method. Trials parallelize
/// over `jobs` threads (0 = rayon default); the per-trial stream blocks
/// make the result independent of the scheduling.
pub fn bench_trials(
    trials: u64,
    shots: u64,
    dim: usize,
    seed: u64,
    methods: &[Method],
    jobs: usize,
) -> Result<BenchSummary> {
    if trials == 0 || shots == 0 {
        return Err(Error::InvalidConfig(
            "trials and shots must be positive".into(),
        ));
    }
    let pom = sic_pom::<f64>(dim)?;
    let pom_id = format!("sic-d{dim}");

    let run = |t: u64| -> Result<Vec<f64>> {
        let mut rng = stream_rng(seed, trial_stream(t, 0));
        let rho = DensityMatrix::from_ket(&random_pure_state::<f64>(dim, &mut rng));
        let dist = outcome_distribution(&rho, &pom)?;
        let counts = sample_counts_streamed(&dist, shots, seed, pom_id.clone(), |b| {
            trial_stream(t, 1 + b)
        })?;
        methods
            .iter()
            .map(|&m| {
                let res = reconstruct(&counts, &pom, m, MleOptions::default())?;
                match res.density() {
                    Ok(est) => state_fidelity(&est, &rho),
                    // Non-physical linear estimates are scored after
                    // projection so the statistic stays defined.
                    Err(_) => state_fidelity(&project_to_physical(&res.estimate)?, &rho),
                }
            })
            .collect()
    };

    let per_trial: Result<Vec<Vec<f64>>> = if jobs == 1 {
        (0..trials).map(run).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| Error::InvalidConfig(format!("jobs: {e}")))?;
        pool.install(|| (0..trials).into_par_iter().map(run).collect())
    };
    let per_trial = per_trial?;

    let methods = methods
        .iter()
        .enumerate()
        .map(|(mi, &method)| {
            let mut fids: Vec<f64> = per_trial.iter().map(|row| row[mi]).collect();
            fids.sort_by(|a, b| a.partial_cmp(b).unwrap());
            MethodStats {
                method,
                fidelity_median: quantile(&fids, 0.5),
                fidelity_q1: quantile(&fids, 0.25),
                fidelity_q3: quantile(&fids, 0.75),
                fidelity_min: fids[0],
                fidelity_max: fids[fids.len() - 1],
            }
        })
        .collect();

    Ok(BenchSummary {
        trials,
        shots,
        dim,
        seed,
        methods,
    })
}

/// Linear-interpolated quantile of a sorted slice.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty());
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    if lo == hi {
        sorted[lo]
    } else {
        let w = pos - lo as f64;
        sorted[lo] * (1.0 - w) + sorted[hi] * w
    }
}
