//! Tomography pipeline checks with independent oracles: the dual-frame
//! closed form against a generic linear-system inversion of the
//! probability map, Uhlmann fidelity against a Newton-iteration matrix
//! square root, projection behavior on noisy data, and end-to-end
//! experiment consistency.

use num_complex::Complex;

use sicpom::matrix::ComplexMatrix;
use sicpom::quantum::{state_fidelity, DensityMatrix, Pom};
use sicpom::rng::{random_mixed_state, random_pure_state, stream_rng};
use sicpom::sequential::{sample_sequential, two_step_scheme_d4};
use sicpom::sic::sic_pom;
use sicpom::tomography::{
    hermitian_trace_distance, linear_inversion, mle_reconstruct, outcome_distribution,
    project_to_physical, reconstruct, run_experiment, sample_counts, ExperimentConfig, Method,
    MleOptions, Scheme, StateSource,
};

type M = ComplexMatrix<f64>;
type C = Complex<f64>;

/// Oracle: invert the full probability map p = tr(E_j rho) as a dim^2 x
/// dim^2 complex linear system in vec(rho), with no dual-frame knowledge.
fn invert_probability_map(freqs: &[f64], pom: &Pom<f64>) -> M {
    let d = pom.dim();
    let n = d * d;
    assert_eq!(freqs.len(), n);
    // p_j = sum_{a,b} E_j[a, b] rho[b, a]; unknowns x[(b, a)] = rho[b, a].
    let system = M::from_fn(n, n, |j, col| {
        let (b, a) = (col / d, col % d);
        pom.effects()[j].matrix()[(a, b)]
    });
    let rhs: Vec<C> = freqs.iter().map(|&f| C::new(f, 0.0)).collect();
    let x = system
        .solve(&rhs)
        .expect("SIC probability map is invertible");
    M::from_fn(d, d, |r, c| x[r * d + c])
}

#[test]
fn dual_frame_formula_matches_linear_system_oracle() {
    let pom = sic_pom::<f64>(4).unwrap();
    let mut rng = stream_rng(31, 0);
    for _ in 0..25 {
        let rho = random_mixed_state::<f64>(4, &mut rng);
        let freqs = outcome_distribution(&rho, &pom).unwrap();
        let oracle = invert_probability_map(&freqs, &pom);
        let closed_form = linear_inversion(&freqs, &pom).unwrap();
        assert!(
            oracle.frobenius_distance(&closed_form) < 1e-10,
            "dual frame deviates from the generic inversion"
        );
        assert!(oracle.frobenius_distance(rho.matrix()) < 1e-10);
    }
    // The oracle also applies to noisy frequencies, where both routes
    // must still agree even though neither returns the true state.
    let truth = random_mixed_state::<f64>(4, &mut rng);
    let dist = outcome_distribution(&truth, &pom).unwrap();
    let counts = sample_counts(&dist, 10_000, 8, "sic-d4").unwrap();
    let freqs: Vec<f64> = counts.frequencies();
    let oracle = invert_probability_map(&freqs, &pom);
    let closed_form = linear_inversion(&freqs, &pom).unwrap();
    assert!(oracle.frobenius_distance(&closed_form) < 1e-10);
}

#[test]
fn dual_frame_formula_matches_oracle_for_the_tetrahedron() {
    let pom = sic_pom::<f64>(2).unwrap();
    let mut rng = stream_rng(32, 0);
    for _ in 0..25 {
        let rho = random_mixed_state::<f64>(2, &mut rng);
        let freqs = outcome_distribution(&rho, &pom).unwrap();
        let oracle = invert_probability_map(&freqs, &pom);
        let closed_form = linear_inversion(&freqs, &pom).unwrap();
        assert!(oracle.frobenius_distance(&closed_form) < 1e-11);
        assert!(closed_form.frobenius_distance(rho.matrix()) < 1e-10);
    }
}

/// Oracle: matrix square root by the Denman-Beavers iteration, a Newton
/// method that never touches the eigensolver.
fn sqrt_denman_beavers(m: &M) -> M {
    let n = m.dim();
    let mut y = m.clone();
    let mut z = M::identity(n);
    for _ in 0..60 {
        let y_inv = invert(&y);
        let z_inv = invert(&z);
        let y_next = y.add(&z_inv).scale_re(0.5);
        let z_next = z.add(&y_inv).scale_re(0.5);
        let drift = y_next.frobenius_distance(&y);
        y = y_next;
        z = z_next;
        if drift < 1e-14 {
            break;
        }
    }
    y
}

fn invert(m: &M) -> M {
    let n = m.dim();
    let mut cols = Vec::with_capacity(n);
    for j in 0..n {
        let mut e = vec![C::new(0.0, 0.0); n];
        e[j] = C::new(1.0, 0.0);
        cols.push(m.solve(&e).expect("invertible"));
    }
    M::from_fn(n, n, |i, j| cols[j][i])
}

#[test]
fn uhlmann_fidelity_matches_newton_sqrt_oracle() {
    let mut rng = stream_rng(33, 0);
    for _ in 0..10 {
        let a = random_mixed_state::<f64>(4, &mut rng);
        let b = random_mixed_state::<f64>(4, &mut rng);
        // Oracle route: sqrt(a) via Newton, then tr sqrt(sqrt(a) b sqrt(a))
        // via Newton again; no eigendecomposition involved.
        let root_a = sqrt_denman_beavers(a.matrix());
        let inner = root_a.matmul(b.matrix()).matmul(&root_a).hermitized();
        let tr = sqrt_denman_beavers(&inner).trace().re;
        let oracle = tr * tr;
        let implementation = state_fidelity(&a, &b).unwrap();
        assert!(
            (oracle - implementation).abs() < 1e-10,
            "fidelity {implementation} vs oracle {oracle}"
        );
    }
}

#[test]
fn fidelity_against_pure_state_is_expectation_value() {
    let mut rng = stream_rng(34, 0);
    for _ in 0..10 {
        let rho = random_mixed_state::<f64>(4, &mut rng);
        let psi = random_pure_state::<f64>(4, &mut rng);
        let pure = DensityMatrix::from_ket(&psi);
        let expect = psi.projector().matmul(rho.matrix()).trace().re;
        let f = state_fidelity(&rho, &pure).unwrap();
        assert!((f - expect).abs() < 1e-10);
    }
}

/// Projection onto the physical set does not (statistically) hurt: the
/// median Frobenius distance to the truth over seeds never grows.
#[test]
fn projection_never_increases_median_error() {
    let pom = sic_pom::<f64>(4).unwrap();
    let shots = 10_000u64;
    let mut raw_errors = Vec::new();
    let mut projected_errors = Vec::new();
    let mut rng = stream_rng(35, 0);
    let truth = random_mixed_state::<f64>(4, &mut rng);
    let dist = outcome_distribution(&truth, &pom).unwrap();
    for seed in 0..50u64 {
        let counts = sample_counts(&dist, shots, seed, "sic-d4").unwrap();
        let freqs: Vec<f64> = counts.frequencies();
        let raw = linear_inversion(&freqs, &pom).unwrap();
        let projected = project_to_physical(&raw).unwrap();
        raw_errors.push(raw.frobenius_distance(truth.matrix()));
        projected_errors.push(projected.matrix().frobenius_distance(truth.matrix()));
    }
    raw_errors.sort_by(|a, b| a.partial_cmp(b).unwrap());
    projected_errors.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let median = |xs: &[f64]| xs[xs.len() / 2];
    assert!(
        median(&projected_errors) <= median(&raw_errors) + 1e-12,
        "projection made the median error worse"
    );
}

#[test]
fn mle_matches_truth_on_sampled_data() {
    let pom = sic_pom::<f64>(4).unwrap();
    let mut rng = stream_rng(36, 0);
    for trial in 0..3u64 {
        let psi = random_pure_state::<f64>(4, &mut rng);
        let truth = DensityMatrix::from_ket(&psi);
        let dist = outcome_distribution(&truth, &pom).unwrap();
        let counts = sample_counts(&dist, 200_000, 100 + trial, "sic-d4").unwrap();
        let res = mle_reconstruct(&counts, &pom, MleOptions::default()).unwrap();
        assert!(res.min_loglik_step >= -1e-12, "likelihood decreased");
        let est = res.density().unwrap();
        let f = state_fidelity(&est, &truth).unwrap();
        assert!(f > 0.99, "trial {trial} fidelity {f}");
    }
}

#[test]
fn reconstruct_dispatch_flags_linear_nonphysical() {
    let pom = sic_pom::<f64>(4).unwrap();
    let mut rng = stream_rng(37, 0);
    let psi = random_pure_state::<f64>(4, &mut rng);
    let truth = DensityMatrix::from_ket(&psi);
    let dist = outcome_distribution(&truth, &pom).unwrap();
    // Few shots: the raw linear estimate of a pure state is essentially
    // surely non-physical.
    let counts = sample_counts(&dist, 300, 4, "sic-d4").unwrap();
    let linear = reconstruct(&counts, &pom, Method::Linear, MleOptions::default()).unwrap();
    assert!(!linear.physical);
    assert!(linear.density().is_err());
    let projected = reconstruct(
        &counts,
        &pom,
        Method::LinearProjected,
        MleOptions::default(),
    )
    .unwrap();
    assert!(projected.physical);
    assert!(projected.density().is_ok());
    let d = hermitian_trace_distance(&projected.estimate, truth.matrix());
    assert!(d < 0.9);
}

#[test]
fn sequential_and_multinomial_sampling_agree_in_distribution() {
    let scheme = two_step_scheme_d4::<f64>();
    let mut rng = stream_rng(38, 0);
    let rho = random_mixed_state::<f64>(4, &mut rng);
    let composed = sicpom::sequential::compose_two_step(&scheme).unwrap();
    let dist = outcome_distribution(&rho, &composed).unwrap();
    let shots = 500_000u64;
    let record = sample_sequential(&rho, &scheme, shots, 9).unwrap();
    for ((_, &count), &p) in record.counts().iter().zip(&dist) {
        let f = count as f64 / shots as f64;
        let sigma = (p * (1.0 - p) / shots as f64).sqrt();
        assert!(
            (f - p).abs() < 5.0 * sigma,
            "frequency {f} vs probability {p}"
        );
    }
}

/// The computational |00> state under the cascade: the four port-1
/// outcomes each land near chi^2/(4 N^2) and the remaining twelve near
/// 1/(4 N^2), within five-sigma multinomial bounds at a million shots.
#[test]
fn sequential_frequencies_of_computational_state() {
    let rho = DensityMatrix::from_ket(&sicpom::Ket64::computational(4, 0));
    let scheme = two_step_scheme_d4::<f64>();
    let shots = 1_000_000u64;
    let record = sample_sequential(&rho, &scheme, shots, 2024).unwrap();
    let big = 0.146_352_549_156_242_1;
    let small = 0.034_549_150_281_252_63;
    for (label, &count) in record.counts() {
        let p = if label.port == 1 { big } else { small };
        let f = count as f64 / shots as f64;
        let sigma = (p * (1.0 - p) / shots as f64).sqrt();
        assert!(
            (f - p).abs() < 5.0 * sigma,
            "outcome {label}: frequency {f}, expected {p}"
        );
    }
}

#[test]
fn experiment_is_deterministic_and_scheme_consistent() {
    for scheme in [Scheme::Direct, Scheme::TwoStep, Scheme::Optical] {
        let cfg = ExperimentConfig {
            state: StateSource::RandomMixed { dim: 4 },
            scheme,
            shots: 20_000,
            seed: 77,
            methods: vec![Method::Linear, Method::LinearProjected, Method::Mle],
            mle: MleOptions::default(),
        };
        let a = run_experiment(&cfg).unwrap();
        let b = run_experiment(&cfg).unwrap();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap(),
            "report not deterministic under {scheme}"
        );
        // Counts do not depend on the scheme used to realize the POM:
        // the aligned distributions coincide.
        if scheme != Scheme::Direct {
            let direct = run_experiment(&ExperimentConfig {
                scheme: Scheme::Direct,
                ..cfg.clone()
            })
            .unwrap();
            assert_eq!(a.counts, direct.counts);
        }
    }
}

#[test]
fn experiment_config_validation() {
    let cfg = ExperimentConfig {
        state: StateSource::RandomPure { dim: 4 },
        scheme: Scheme::Direct,
        shots: 0,
        seed: 1,
        methods: vec![Method::Mle],
        mle: MleOptions::default(),
    };
    let err = run_experiment(&cfg).unwrap_err().to_string();
    assert!(err.contains("shots"), "unexpected message: {err}");

    let cfg = ExperimentConfig {
        state: StateSource::RandomPure { dim: 3 },
        scheme: Scheme::Direct,
        shots: 10,
        seed: 1,
        methods: vec![Method::Mle],
        mle: MleOptions::default(),
    };
    let err = run_experiment(&cfg).unwrap_err().to_string();
    assert!(err.contains("dimension"), "unexpected message: {err}");
}
