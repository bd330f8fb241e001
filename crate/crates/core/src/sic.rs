//! The two-qubit SIC POM fiducials, the dimension-4 mutually unbiased
//! bases, the qubit tetrahedron, and their validators.
//!
//! The 16 fiducial kets are the columns of four fixed 4x4 matrices built
//! from the constants N = sqrt(5 + sqrt 5) and chi = sqrt(2 + sqrt 5);
//! chi^2 + 3 = N^2 makes every column a unit vector. Each fiducial matrix
//! factors as a diagonal matrix times one of four unitaries whose columns,
//! together with the computational basis, form the complete set of five
//! MUB in dimension 4. That factorization is what the two-stage
//! measurement in [`crate::sequential`] exploits.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::ket::Ket;
use crate::matrix::ComplexMatrix;
use crate::quantum::{DensityMatrix, Effect, Pom};
use crate::report::ValidationReport;
use crate::scalar::{as_f64, cast, Scalar};
use crate::{eigen, sequential};

/// N = sqrt(5 + sqrt 5), the fiducial normalization.
pub fn normalization<T: Scalar>() -> T {
    let five = cast::<T>(5.0);
    (five + five.sqrt()).sqrt()
}

/// chi = sqrt(2 + sqrt 5), the large fiducial amplitude.
pub fn chi<T: Scalar>() -> T {
    (cast::<T>(2.0) + cast::<T>(5.0).sqrt()).sqrt()
}

// Entry codes for the fixed matrices: (re, im) in units where +-2 means
// +-chi and +-1 means +-1.
type Code = (i8, i8);

const FIDUCIAL_CODES: [[[Code; 4]; 4]; 4] = [
    [
        [(2, 0), (2, 0), (2, 0), (2, 0)],
        [(1, 0), (-1, 0), (1, 0), (-1, 0)],
        [(1, 0), (1, 0), (-1, 0), (-1, 0)],
        [(1, 0), (-1, 0), (-1, 0), (1, 0)],
    ],
    [
        [(1, 0), (1, 0), (1, 0), (1, 0)],
        [(1, 0), (-1, 0), (1, 0), (-1, 0)],
        [(0, 2), (0, 2), (0, -2), (0, -2)],
        [(0, -1), (0, 1), (0, 1), (0, -1)],
    ],
    [
        [(1, 0), (1, 0), (1, 0), (1, 0)],
        [(0, 2), (0, -2), (0, 2), (0, -2)],
        [(0, 1), (0, 1), (0, -1), (0, -1)],
        [(-1, 0), (1, 0), (1, 0), (-1, 0)],
    ],
    [
        [(1, 0), (1, 0), (1, 0), (1, 0)],
        [(0, 1), (0, -1), (0, 1), (0, -1)],
        [(1, 0), (1, 0), (-1, 0), (-1, 0)],
        [(0, -2), (0, 2), (0, 2), (0, -2)],
    ],
];

const MUB_UNITARY_CODES: [[[Code; 4]; 4]; 4] = [
    [
        [(1, 0), (1, 0), (1, 0), (1, 0)],
        [(1, 0), (-1, 0), (1, 0), (-1, 0)],
        [(1, 0), (1, 0), (-1, 0), (-1, 0)],
        [(1, 0), (-1, 0), (-1, 0), (1, 0)],
    ],
    [
        [(1, 0), (1, 0), (1, 0), (1, 0)],
        [(0, 1), (0, -1), (0, 1), (0, -1)],
        [(0, 1), (0, 1), (0, -1), (0, -1)],
        [(-1, 0), (1, 0), (1, 0), (-1, 0)],
    ],
    [
        [(1, 0), (1, 0), (1, 0), (1, 0)],
        [(1, 0), (-1, 0), (1, 0), (-1, 0)],
        [(0, 1), (0, 1), (0, -1), (0, -1)],
        [(0, -1), (0, 1), (0, 1), (0, -1)],
    ],
    [
        [(1, 0), (1, 0), (1, 0), (1, 0)],
        [(0, 1), (0, -1), (0, 1), (0, -1)],
        [(1, 0), (1, 0), (-1, 0), (-1, 0)],
        [(0, -1), (0, 1), (0, 1), (0, -1)],
    ],
];

fn code_value<T: Scalar>(code: i8) -> T {
    match code {
        0 => T::zero(),
        1 => T::one(),
        -1 => -T::one(),
        2 => chi::<T>(),
        -2 => -chi::<T>(),
        _ => unreachable!("unknown entry code"),
    }
}

fn matrix_from_codes<T: Scalar>(codes: &[[Code; 4]; 4], scale: T) -> ComplexMatrix<T> {
    ComplexMatrix::from_fn(4, 4, |i, j| {
        let (re, im) = codes[i][j];
        Complex::new(code_value::<T>(re) * scale, code_value::<T>(im) * scale)
    })
}

/// The 16 fiducial kets, indexed by (matrix, column), both 1-based and in
/// the reading order of the four fixed matrices.
#[derive(Clone, Debug)]
pub struct FiducialSet<T> {
    kets: Vec<Ket<T>>,
}

impl<T: Scalar> FiducialSet<T> {
    pub fn ket(&self, matrix: usize, column: usize) -> &Ket<T> {
        &self.kets[Self::index(matrix, column)]
    }

    /// Flat index for (matrix, column) with both in 1..=4.
    pub fn index(matrix: usize, column: usize) -> usize {
        assert!((1..=4).contains(&matrix) && (1..=4).contains(&column));
        (matrix - 1) * 4 + (column - 1)
    }

    pub fn label(matrix: usize, column: usize) -> String {
        format!("m{matrix}c{column}")
    }

    pub fn kets(&self) -> &[Ket<T>] {
        &self.kets
    }

    pub fn len(&self) -> usize {
        self.kets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kets.is_empty()
    }
}

/// Builds the 16 fiducial kets.
pub fn fiducial_kets<T: Scalar>() -> FiducialSet<T> {
    let scale = T::one() / normalization::<T>();
    let mut kets = Vec::with_capacity(16);
    for codes in &FIDUCIAL_CODES {
        let m = matrix_from_codes::<T>(codes, scale);
        for col in 0..4 {
            let amps = (0..4).map(|row| m[(row, col)]).collect();
            kets.push(Ket::new(amps).expect("fiducial columns are unit vectors"));
        }
    }
    FiducialSet { kets }
}

/// The unitary U_k (k in 1..=4) whose columns are the kets of basis k.
pub fn mub_unitary<T: Scalar>(k: usize) -> ComplexMatrix<T> {
    assert!((1..=4).contains(&k), "MUB index must be 1..=4");
    matrix_from_codes::<T>(&MUB_UNITARY_CODES[k - 1], cast::<T>(0.5))
}

/// Basis k as the columns of U_k.
pub fn basis_from_unitary<T: Scalar>(k: usize) -> Vec<Ket<T>> {
    let u = mub_unitary::<T>(k);
    (0..4)
        .map(|col| {
            let amps = (0..4).map(|row| u[(row, col)]).collect();
            Ket::new(amps).expect("unitary columns are unit vectors")
        })
        .collect()
}

/// The five mutually unbiased bases of dimension 4: computational first,
/// then bases 1..=4.
#[derive(Clone, Debug)]
pub struct MubCollection<T> {
    bases: Vec<Vec<Ket<T>>>,
}

impl<T: Scalar> MubCollection<T> {
    /// Shape and orthonormality are enforced here; mutual unbiasedness is
    /// checked by [`validate_mub`] so that defective collections can be
    /// constructed on purpose and reported on.
    pub fn new(bases: Vec<Vec<Ket<T>>>) -> Result<Self> {
        let dim = bases
            .first()
            .and_then(|b| b.first())
            .map(Ket::dim)
            .ok_or_else(|| Error::InvalidState("empty basis collection".into()))?;
        for (bi, basis) in bases.iter().enumerate() {
            if basis.len() != dim {
                return Err(Error::DimensionMismatch(format!(
                    "basis {bi} has {} kets, expected {dim}",
                    basis.len()
                )));
            }
            for (i, a) in basis.iter().enumerate() {
                if a.dim() != dim {
                    return Err(Error::DimensionMismatch(format!(
                        "basis {bi} ket {i} has dimension {}",
                        a.dim()
                    )));
                }
                for (j, b) in basis.iter().enumerate() {
                    let overlap = a.inner(b).norm();
                    let expect = if i == j { T::one() } else { T::zero() };
                    if (overlap - expect).abs() > T::strict_tol() {
                        return Err(Error::InvalidState(format!(
                            "basis {bi} not orthonormal at pair ({i}, {j})"
                        )));
                    }
                }
            }
        }
        Ok(Self { bases })
    }

    pub fn bases(&self) -> &[Vec<Ket<T>>] {
        &self.bases
    }

    pub fn dim(&self) -> usize {
        self.bases[0].len()
    }
}

/// The complete MUB set built the explicit way: two product bases from the
/// +-1 and +-i single-qubit superpositions, and two maximally entangled
/// bases obtained by applying CZ to product kets.
pub fn mub_bases<T: Scalar>() -> MubCollection<T> {
    let computational: Vec<Ket<T>> = (0..4).map(|i| Ket::computational(4, i)).collect();

    let half = cast::<T>(0.5).sqrt();
    let zero = T::zero();
    let real_pair = |sign: T| {
        Ket::new(vec![
            Complex::new(half, zero),
            Complex::new(sign * half, zero),
        ])
        .unwrap()
    };
    let imag_pair = |sign: T| {
        Ket::new(vec![
            Complex::new(half, zero),
            Complex::new(zero, sign * half),
        ])
        .unwrap()
    };
    let plus_minus = [real_pair(T::one()), real_pair(-T::one())];
    let plus_minus_i = [imag_pair(T::one()), imag_pair(-T::one())];

    let product = |first: &[Ket<T>; 2], second: &[Ket<T>; 2]| -> Vec<Ket<T>> {
        let mut kets = Vec::with_capacity(4);
        for a in first {
            for b in second {
                kets.push(a.tensor(b));
            }
        }
        kets
    };
    let apply_cz = |kets: Vec<Ket<T>>| -> Vec<Ket<T>> {
        let cz = ComplexMatrix::cz();
        kets.into_iter()
            .map(|k| k.apply(&cz).expect("CZ is unitary"))
            .collect()
    };

    let b1 = product(&plus_minus, &plus_minus);
    let b2 = product(&plus_minus_i, &plus_minus_i);
    let b3 = apply_cz(product(&plus_minus_i, &plus_minus));
    let b4 = apply_cz(product(&plus_minus, &plus_minus_i));

    MubCollection::new(vec![computational, b1, b2, b3, b4])
        .expect("constructed bases are orthonormal")
}

/// The SIC POM in dimension 4 (subnormalized fiducial projectors) or
/// dimension 2 (the tetrahedron, assembled as the two-stage composition).
pub fn sic_pom<T: Scalar>(dim: usize) -> Result<Pom<T>> {
    match dim {
        4 => {
            let quarter = cast::<T>(0.25);
            let fiducials = fiducial_kets::<T>();
            let mut effects = Vec::with_capacity(16);
            for m in 1..=4 {
                for c in 1..=4 {
                    let proj = fiducials.ket(m, c).projector().scale_re(quarter);
                    effects.push(Effect::new(proj, FiducialSet::<T>::label(m, c))?);
                }
            }
            Pom::new(effects)
        }
        2 => sequential::compose_two_step(&sequential::two_step_scheme_d2::<T>()),
        other => Err(Error::UnsupportedDimension(other)),
    }
}

/// Checks the defining SIC properties of a POM: d^2 rank-1 effects of
/// trace 1/d, completeness, and equal pairwise fidelity 1/(d+1).
pub fn validate_sic<T: Scalar>(pom: &Pom<T>, tol: T) -> ValidationReport {
    let mut report = ValidationReport::new();
    let tol64 = as_f64(tol);
    let d = pom.dim();
    let expected_len = d * d;

    report.check_bool("outcome-count", pom.len() == expected_len);
    report.check("completeness", as_f64(pom.completeness_residual()), tol64);

    let inv_d = T::one() / T::from(d).unwrap();
    let mut trace_residual = T::zero();
    let mut rank_residual = T::zero();
    for e in pom.effects() {
        trace_residual = trace_residual.max((e.trace_re() - inv_d).abs());
        let eigs = eigen::eigh(e.matrix()).values;
        for &l in &eigs[..eigs.len() - 1] {
            rank_residual = rank_residual.max(l.abs());
        }
    }
    report.check("effect-trace", as_f64(trace_residual), tol64);
    report.check("rank-one", as_f64(rank_residual), tol64);

    let target = T::one() / T::from(d + 1).unwrap();
    let mut fid_residual = T::zero();
    for (i, a) in pom.effects().iter().enumerate() {
        let ta = a.trace_re();
        for b in pom.effects().iter().skip(i + 1) {
            let tb = b.trace_re();
            if ta <= T::min_branch_prob() || tb <= T::min_branch_prob() {
                fid_residual = T::infinity();
                continue;
            }
            let overlap = a.matrix().matmul(b.matrix()).trace().re / (ta * tb);
            fid_residual = fid_residual.max((overlap - target).abs());
        }
    }
    report.check("pairwise-fidelity", as_f64(fid_residual), tol64);
    report
}

/// Checks orthonormality of every basis and the 1/d cross-basis overlap of
/// every unordered basis pair.
pub fn validate_mub<T: Scalar>(collection: &MubCollection<T>, tol: T) -> ValidationReport {
    let mut report = ValidationReport::new();
    let tol64 = as_f64(tol);
    let bases = collection.bases();
    let d = collection.dim();
    let target = T::one() / T::from(d).unwrap();

    let mut gram_residual = T::zero();
    for basis in bases {
        for (i, a) in basis.iter().enumerate() {
            for (j, b) in basis.iter().enumerate() {
                let overlap = a.inner(b).norm();
                let expect = if i == j { T::one() } else { T::zero() };
                gram_residual = gram_residual.max((overlap - expect).abs());
            }
        }
    }
    report.check("orthonormality", as_f64(gram_residual), tol64);

    let mut unbiased_residual = T::zero();
    for (bi, first) in bases.iter().enumerate() {
        for second in bases.iter().skip(bi + 1) {
            for a in first {
                for b in second {
                    let overlap = a.inner(b).norm_sqr();
                    unbiased_residual = unbiased_residual.max((overlap - target).abs());
                }
            }
        }
    }
    report.check("unbiasedness", as_f64(unbiased_residual), tol64);
    report.check_bool("basis-count", bases.len() == d + 1);
    report
}

/// Three real components of the qubit Bloch vector.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlochVector<T> {
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T: Scalar> BlochVector<T> {
    pub fn new(x: T, y: T, z: T) -> Self {
        Self { x, y, z }
    }

    pub fn dot(&self, other: &Self) -> T {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn norm(&self) -> T {
        self.dot(self).sqrt()
    }
}

/// Bloch vector of a qubit state: v_i = Re tr(rho sigma_i).
pub fn bloch_vector<T: Scalar>(rho: &DensityMatrix<T>) -> Result<BlochVector<T>> {
    if rho.dim() != 2 {
        return Err(Error::DimensionMismatch(format!(
            "Bloch vector needs a qubit state, got dimension {}",
            rho.dim()
        )));
    }
    let component = |sigma: ComplexMatrix<T>| -> T { sigma.matmul(rho.matrix()).trace().re };
    Ok(BlochVector::new(
        component(ComplexMatrix::pauli_x()),
        component(ComplexMatrix::pauli_y()),
        component(ComplexMatrix::pauli_z()),
    ))
}

/// Inverse map rho = (I + v . sigma) / 2; rejects |v| > 1 beyond tolerance.
pub fn bloch_to_state<T: Scalar>(v: &BlochVector<T>) -> Result<DensityMatrix<T>> {
    if v.norm() > T::one() + T::strict_tol() {
        return Err(Error::InvalidState(format!(
            "Bloch vector norm {} exceeds 1",
            as_f64(v.norm())
        )));
    }
    let half = cast::<T>(0.5);
    let m = ComplexMatrix::identity(2)
        .add(&ComplexMatrix::pauli_x().scale_re(v.x))
        .add(&ComplexMatrix::pauli_y().scale_re(v.y))
        .add(&ComplexMatrix::pauli_z().scale_re(v.z))
        .scale_re(half);
    DensityMatrix::new(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ket::{fidelity_pure, projector_distance};

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn constants_satisfy_defining_identity() {
        // chi^2 + 3 = N^2, i.e. (2 + sqrt 5) + 3 = 5 + sqrt 5.
        let n: f64 = normalization();
        let x: f64 = chi();
        assert!((x * x + 3.0 - n * n).abs() < 1e-14);
        assert!((n - 2.689_994_0).abs() < 1e-6);
        assert!((x - 2.058_171_0).abs() < 1e-6);
    }

    #[test]
    fn fiducial_sample_columns_match_fixed_entries() {
        let n: f64 = normalization();
        let x: f64 = chi();
        let fid = fiducial_kets::<f64>();

        let first = fid.ket(1, 1);
        let expect = [
            c(x / n, 0.0),
            c(1.0 / n, 0.0),
            c(1.0 / n, 0.0),
            c(1.0 / n, 0.0),
        ];
        for (a, b) in first.amps().iter().zip(expect) {
            assert!((a - b).norm() < 1e-15);
        }

        let m2c3 = fid.ket(2, 3);
        let expect = [
            c(1.0 / n, 0.0),
            c(1.0 / n, 0.0),
            c(0.0, -x / n),
            c(0.0, 1.0 / n),
        ];
        for (a, b) in m2c3.amps().iter().zip(expect) {
            assert!((a - b).norm() < 1e-15);
        }
    }

    #[test]
    fn all_120_fiducial_pairs_have_fidelity_one_fifth() {
        let fid = fiducial_kets::<f64>();
        let mut pairs = 0;
        for i in 0..16 {
            for j in i + 1..16 {
                let f = fidelity_pure(&fid.kets()[i], &fid.kets()[j]).unwrap();
                assert!(
                    (f - 0.2).abs() < 1e-12,
                    "pair ({i}, {j}) fidelity {f} is not 1/5"
                );
                pairs += 1;
            }
        }
        assert_eq!(pairs, 120);
    }

    #[test]
    fn sic_pom_d4_structure() {
        let pom = sic_pom::<f64>(4).unwrap();
        assert_eq!(pom.len(), 16);
        assert!(pom.completeness_residual() < 1e-12);
        for e in pom.effects() {
            assert!((e.trace_re() - 0.25).abs() < 1e-14);
        }
        let report = validate_sic(&pom, 1e-12);
        assert!(report.pass, "{report:?}");
    }

    #[test]
    fn sic_pom_rejects_unsupported_dimension() {
        assert!(sic_pom::<f64>(3).is_err());
    }

    #[test]
    fn validate_sic_flags_rank_violation() {
        let half = Effect::new(ComplexMatrix::<f64>::identity(2).scale_re(0.5), "a").unwrap();
        let pom = Pom::new(vec![half.clone(), half]).unwrap();
        let report = validate_sic(&pom, 1e-10);
        assert!(!report.pass);
        assert!(report.failed_checks().any(|chk| chk.name == "rank-one"));
    }

    #[test]
    fn mub_first_kets_match_explicit_forms() {
        let mub = mub_bases::<f64>();
        let b1 = &mub.bases()[1][0];
        for amp in b1.amps() {
            assert!((amp - c(0.5, 0.0)).norm() < 1e-15);
        }
        // CZ on (1, 1, i, i)/2 flips the last sign.
        let b3 = &mub.bases()[3][0];
        let expect = [c(0.5, 0.0), c(0.5, 0.0), c(0.0, 0.5), c(0.0, -0.5)];
        for (a, b) in b3.amps().iter().zip(expect) {
            assert!((a - b).norm() < 1e-15);
        }
    }

    #[test]
    fn mub_collection_passes_validation() {
        let report = validate_mub(&mub_bases::<f64>(), 1e-12);
        assert!(report.pass, "{report:?}");
    }

    #[test]
    fn repeated_basis_fails_unbiasedness() {
        let mub = mub_bases::<f64>();
        let mut bases = mub.bases().to_vec();
        bases[2] = bases[1].clone();
        let broken = MubCollection::new(bases).unwrap();
        let report = validate_mub(&broken, 1e-12);
        assert!(!report.pass);
        assert!(report.failed_checks().any(|chk| chk.name == "unbiasedness"));
    }

    #[test]
    fn unitaries_are_unitary_and_columns_reproduce_bases() {
        let mub = mub_bases::<f64>();
        for k in 1..=4 {
            let u = mub_unitary::<f64>(k);
            assert!(u.is_unitary(1e-12), "U_{k} not unitary");
            let from_u = basis_from_unitary::<f64>(k);
            // Match each column to a basis ket up to global phase; the
            // built-in ordering happens to be the identity but the test
            // does not rely on that.
            let basis = &mub.bases()[k];
            for col in &from_u {
                let best = basis
                    .iter()
                    .map(|b| projector_distance(col, b))
                    .fold(f64::INFINITY, f64::min);
                assert!(best < 1e-12);
            }
        }
    }

    #[test]
    fn basis_from_unitary_k2_first_column() {
        let kets = basis_from_unitary::<f64>(2);
        let expect = [c(0.5, 0.0), c(0.0, 0.5), c(0.0, 0.5), c(-0.5, 0.0)];
        for (a, b) in kets[0].amps().iter().zip(expect) {
            assert!((a - b).norm() < 1e-15);
        }
    }

    #[test]
    fn entangled_bases_have_maximally_mixed_marginals() {
        let mub = mub_bases::<f64>();
        for k in [3usize, 4] {
            for ket in &mub.bases()[k] {
                // Reduced state of the first factor.
                let amps = ket.amps();
                let mut reduced = [[c(0.0, 0.0); 2]; 2];
                for i in 0..2 {
                    for j in 0..2 {
                        for s in 0..2 {
                            reduced[i][j] += amps[2 * i + s] * amps[2 * j + s].conj();
                        }
                    }
                }
                assert!((reduced[0][0] - c(0.5, 0.0)).norm() < 1e-12);
                assert!((reduced[1][1] - c(0.5, 0.0)).norm() < 1e-12);
                assert!(reduced[0][1].norm() < 1e-12);
            }
        }
    }

    #[test]
    fn bloch_round_trip() {
        let rho = DensityMatrix::<f64>::maximally_mixed(2).unwrap();
        let v = bloch_vector(&rho).unwrap();
        assert!(v.norm() < 1e-14);

        let up = DensityMatrix::from_ket(&Ket::<f64>::computational(2, 0));
        let v = bloch_vector(&up).unwrap();
        assert!((v.z - 1.0).abs() < 1e-14 && v.x.abs() < 1e-14 && v.y.abs() < 1e-14);

        let v = BlochVector::<f64>::new(0.3, -0.4, 0.5);
        let rho = bloch_to_state(&v).unwrap();
        let back = bloch_vector(&rho).unwrap();
        assert!((back.x - v.x).abs() < 1e-14);
        assert!((back.y - v.y).abs() < 1e-14);
        assert!((back.z - v.z).abs() < 1e-14);
    }

    #[test]
    fn bloch_rejects_unphysical_vector() {
        assert!(bloch_to_state(&BlochVector::new(1.0, 0.5, 0.0)).is_err());
    }
}
