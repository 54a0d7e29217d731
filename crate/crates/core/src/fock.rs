//! Truncated multimode Fock space.
//!
//! Every mode holds at most `cutoff` photons, so an `M`-mode basis has
//! `(cutoff + 1)^M` states. Flat indices enumerate occupation vectors
//! lexicographically with the first mode varying slowest. Photon loss never
//! raises any occupation, so choosing the cutoff as the largest single-mode
//! occupation of a code keeps all channel algebra exact; the price is the
//! exponential growth in `M`.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, c, Matrix, Vector, C64, ONE, ZERO};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FockBasis {
    modes: usize,
    cutoff: usize,
}

impl FockBasis {
    pub fn new(modes: usize, cutoff: usize) -> Result<Self> {
        if modes == 0 {
            return Err(Error::InvalidBasis("at least one mode required".into()));
        }
        let dim = (cutoff + 1)
            .checked_pow(modes as u32)
            .ok_or_else(|| Error::InvalidBasis("dimension overflows usize".into()))?;
        if dim > 1 << 16 {
            return Err(Error::InvalidBasis(format!(
                "dimension {dim} too large for dense representation"
            )));
        }
        Ok(Self { modes, cutoff })
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn dimension(&self) -> usize {
        (self.cutoff + 1).pow(self.modes as u32)
    }

    pub fn index_of(&self, occupation: &[usize]) -> Result<usize> {
        if occupation.len() != self.modes || occupation.iter().any(|&n| n > self.cutoff) {
            return Err(Error::OccupationOutOfRange {
                occupation: occupation.to_vec(),
                cutoff: self.cutoff,
            });
        }
        Ok(occupation
            .iter()
            .fold(0, |acc, &n| acc * (self.cutoff + 1) + n))
    }

    pub fn occupation(&self, index: usize) -> Vec<usize> {
        assert!(index < self.dimension(), "index {index} out of range");
        let base = self.cutoff + 1;
        let mut occ = vec![0; self.modes];
        let mut rem = index;
        for slot in occ.iter_mut().rev() {
            *slot = rem % base;
            rem /= base;
        }
        occ
    }

    pub fn total_photons(&self, index: usize) -> usize {
        self.occupation(index).iter().sum()
    }

    /// All occupation vectors in flat-index order.
    pub fn occupations(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        (0..self.dimension()).map(|i| self.occupation(i))
    }

    fn check_mode(&self, mode: usize) -> Result<()> {
        if mode == 0 || mode > self.modes {
            return Err(Error::ModeOutOfRange {
                mode,
                modes: self.modes,
            });
        }
        Ok(())
    }
}

impl fmt::Display for FockBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} mode(s), cutoff {}", self.modes, self.cutoff)
    }
}

/// Dense operator on a Fock basis.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    basis: FockBasis,
    matrix: Matrix,
}

impl Operator {
    pub fn new(basis: FockBasis, matrix: Matrix) -> Result<Self> {
        let dim = basis.dimension();
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: matrix.nrows(),
            });
        }
        Ok(Self { basis, matrix })
    }

    pub fn identity(basis: FockBasis) -> Self {
        let d = basis.dimension();
        Self {
            basis,
            matrix: Matrix::identity(d, d),
        }
    }

    pub fn zeros(basis: FockBasis) -> Self {
        let d = basis.dimension();
        Self {
            basis,
            matrix: Matrix::zeros(d, d),
        }
    }

    pub fn basis(&self) -> FockBasis {
        self.basis
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> Matrix {
        self.matrix
    }

    pub fn dagger(&self) -> Self {
        Self {
            basis: self.basis,
            matrix: self.matrix.adjoint(),
        }
    }

    /// `self · other`
    pub fn compose(&self, other: &Operator) -> Result<Self> {
        self.same_basis(other.basis)?;
        Ok(Self {
            basis: self.basis,
            matrix: &self.matrix * &other.matrix,
        })
    }

    pub fn add(&self, other: &Operator) -> Result<Self> {
        self.same_basis(other.basis)?;
        Ok(Self {
            basis: self.basis,
            matrix: &self.matrix + &other.matrix,
        })
    }

    pub fn sub(&self, other: &Operator) -> Result<Self> {
        self.same_basis(other.basis)?;
        Ok(Self {
            basis: self.basis,
            matrix: &self.matrix - &other.matrix,
        })
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self {
            basis: self.basis,
            matrix: &self.matrix * factor,
        }
    }

    pub fn apply(&self, state: &StateVector) -> Result<StateVector> {
        self.same_basis(state.basis)?;
        Ok(StateVector {
            basis: self.basis,
            amplitudes: &self.matrix * &state.amplitudes,
        })
    }

    pub fn trace(&self) -> C64 {
        linalg::trace(&self.matrix)
    }

    pub fn max_abs_diff(&self, other: &Operator) -> f64 {
        linalg::max_abs_diff(&self.matrix, &other.matrix)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        linalg::hermiticity_residual(&self.matrix) <= tol
    }

    /// `max |U†U - 1|`
    pub fn unitarity_residual(&self) -> f64 {
        let d = self.basis.dimension();
        linalg::max_abs_diff(
            &(self.matrix.adjoint() * &self.matrix),
            &Matrix::identity(d, d),
        )
    }

    /// `max |P² - P|`
    pub fn idempotency_residual(&self) -> f64 {
        linalg::max_abs_diff(&(&self.matrix * &self.matrix), &self.matrix)
    }

    fn same_basis(&self, other: FockBasis) -> Result<()> {
        if self.basis != other {
            return Err(Error::BasisMismatch);
        }
        Ok(())
    }
}

/// Annihilation operator on `mode` (1-based): `|…, n, …⟩ ↦ √n |…, n−1, …⟩`.
pub fn annihilation(basis: FockBasis, mode: usize) -> Result<Operator> {
    basis.check_mode(mode)?;
    let d = basis.dimension();
    let mut m = Matrix::zeros(d, d);
    for col in 0..d {
        let mut occ = basis.occupation(col);
        let n = occ[mode - 1];
        if n > 0 {
            occ[mode - 1] -= 1;
            let row = basis.index_of(&occ)?;
            m[(row, col)] = c((n as f64).sqrt());
        }
    }
    Operator::new(basis, m)
}

pub fn creation(basis: FockBasis, mode: usize) -> Result<Operator> {
    Ok(annihilation(basis, mode)?.dagger())
}

/// Number operator `a_i† a_i` of a single mode.
pub fn mode_number_operator(basis: FockBasis, mode: usize) -> Result<Operator> {
    basis.check_mode(mode)?;
    let d = basis.dimension();
    let diag = Vector::from_iterator(d, (0..d).map(|i| c(basis.occupation(i)[mode - 1] as f64)));
    Operator::new(basis, Matrix::from_diagonal(&diag))
}

/// Total photon number `N = Σ_i a_i† a_i`.
pub fn number_operator(basis: FockBasis) -> Operator {
    function_of_number(basis, |n| n as f64)
}

/// Diagonal operator `f(N)` in the total photon number.
pub fn function_of_number(basis: FockBasis, f: impl Fn(usize) -> f64) -> Operator {
    let d = basis.dimension();
    let diag = Vector::from_iterator(d, (0..d).map(|i| c(f(basis.total_photons(i)))));
    Operator {
        basis,
        matrix: Matrix::from_diagonal(&diag),
    }
}

/// `Σ |s⟩⟨s|` over a set of mutually orthonormal states.
pub fn projector_from_states(states: &[StateVector], tol: f64) -> Result<Operator> {
    let first = states
        .first()
        .ok_or_else(|| Error::InvalidState("empty state list".into()))?;
    let basis = first.basis;
    for (i, a) in states.iter().enumerate() {
        if a.basis != basis {
            return Err(Error::BasisMismatch);
        }
        for (j, b) in states.iter().enumerate().skip(i) {
            let expected = if i == j { ONE } else { ZERO };
            let deviation = (a.inner(b) - expected).norm();
            if deviation > tol {
                return Err(Error::NotOrthonormal {
                    row: i,
                    col: j,
                    deviation,
                });
            }
        }
    }
    let d = basis.dimension();
    let mut m = Matrix::zeros(d, d);
    for s in states {
        m += linalg::outer(&s.amplitudes, &s.amplitudes);
    }
    Operator::new(basis, m)
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    basis: FockBasis,
    amplitudes: Vector,
}

impl StateVector {
    pub fn new(basis: FockBasis, amplitudes: Vector) -> Result<Self> {
        if amplitudes.len() != basis.dimension() {
            return Err(Error::DimensionMismatch {
                expected: basis.dimension(),
                actual: amplitudes.len(),
            });
        }
        Ok(Self { basis, amplitudes })
    }

    /// Number state `|n₁, …, n_M⟩`.
    pub fn fock(basis: FockBasis, occupation: &[usize]) -> Result<Self> {
        Self::from_terms(basis, &[(occupation.to_vec(), ONE)])
    }

    /// `Σ amp |occupation⟩`, not normalised.
    pub fn from_terms(basis: FockBasis, terms: &[(Vec<usize>, C64)]) -> Result<Self> {
        let mut v = Vector::zeros(basis.dimension());
        for (occ, amp) in terms {
            v[basis.index_of(occ)?] += amp;
        }
        Ok(Self {
            basis,
            amplitudes: v,
        })
    }

    pub fn random<R: Rng + ?Sized>(basis: FockBasis, rng: &mut R) -> Self {
        Self {
            basis,
            amplitudes: linalg::random_unit_vector(basis.dimension(), rng),
        }
    }

    pub fn basis(&self) -> FockBasis {
        self.basis
    }

    pub fn amplitudes(&self) -> &Vector {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::InvalidState(
                "cannot normalise the zero vector".into(),
            ));
        }
        Ok(Self {
            basis: self.basis,
            amplitudes: &self.amplitudes / c(n),
        })
    }

    pub fn is_normalized(&self, tol: f64) -> bool {
        (self.norm() - 1.0).abs() <= tol
    }

    /// `⟨self|other⟩`
    pub fn inner(&self, other: &StateVector) -> C64 {
        self.amplitudes.dotc(&other.amplitudes)
    }

    pub fn amplitude(&self, occupation: &[usize]) -> Result<C64> {
        Ok(self.amplitudes[self.basis.index_of(occupation)?])
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self {
            basis: self.basis,
            amplitudes: &self.amplitudes * factor,
        }
    }

    pub fn add(&self, other: &StateVector) -> Result<Self> {
        if self.basis != other.basis {
            return Err(Error::BasisMismatch);
        }
        Ok(Self {
            basis: self.basis,
            amplitudes: &self.amplitudes + &other.amplitudes,
        })
    }

    pub fn max_abs_diff(&self, other: &StateVector) -> f64 {
        linalg::vec_max_abs_diff(&self.amplitudes, &other.amplitudes)
    }
}

/// Density matrix on a Fock basis.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    basis: FockBasis,
    matrix: Matrix,
}

impl DensityMatrix {
    /// Validated construction: unit trace within `1e-10`, Hermitian within
    /// `1e-12`, smallest eigenvalue at least `-1e-10`.
    pub fn new(basis: FockBasis, matrix: Matrix) -> Result<Self> {
        let rho = Self::new_unchecked(basis, matrix)?;
        rho.validate(1e-12, 1e-10)?;
        Ok(rho)
    }

    /// Dimension-checked construction without the state invariants, for
    /// intermediate results.
    pub fn new_unchecked(basis: FockBasis, matrix: Matrix) -> Result<Self> {
        let d = basis.dimension();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                actual: matrix.nrows(),
            });
        }
        Ok(Self { basis, matrix })
    }

    pub fn from_pure(state: &StateVector) -> Self {
        Self {
            basis: state.basis,
            matrix: linalg::outer(&state.amplitudes, &state.amplitudes),
        }
    }

    pub fn fock(basis: FockBasis, occupation: &[usize]) -> Result<Self> {
        Ok(Self::from_pure(&StateVector::fock(basis, occupation)?))
    }

    pub fn random<R: Rng + ?Sized>(basis: FockBasis, rng: &mut R) -> Self {
        Self {
            basis,
            matrix: linalg::random_density(basis.dimension(), rng),
        }
    }

    pub fn validate(&self, herm_tol: f64, tol: f64) -> Result<()> {
        let t = self.trace();
        if (t - ONE).norm() > tol {
            return Err(Error::InvalidState(format!("trace {t}")));
        }
        let h = linalg::hermiticity_residual(&self.matrix);
        if h > herm_tol {
            return Err(Error::InvalidState(format!("hermiticity residual {h:.3e}")));
        }
        let min = self.min_eigenvalue();
        if min < -tol {
            return Err(Error::InvalidState(format!(
                "negative eigenvalue {min:.3e}"
            )));
        }
        Ok(())
    }

    pub fn basis(&self) -> FockBasis {
        self.basis
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> Matrix {
        self.matrix
    }

    pub fn trace(&self) -> C64 {
        linalg::trace(&self.matrix)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let herm = (&self.matrix + self.matrix.adjoint()) * c(0.5);
        linalg::hermitian_eigenvalues(&herm)[0]
    }

    /// `Tr(ρ O)`
    pub fn expectation(&self, op: &Operator) -> Result<C64> {
        if op.basis != self.basis {
            return Err(Error::BasisMismatch);
        }
        Ok(linalg::trace(&(&self.matrix * &op.matrix)))
    }

    pub fn population(&self, occupation: &[usize]) -> Result<f64> {
        let i = self.basis.index_of(occupation)?;
        Ok(self.matrix[(i, i)].re)
    }

    pub fn mean_photon_number(&self) -> f64 {
        (0..self.basis.dimension())
            .map(|i| self.matrix[(i, i)].re * self.basis.total_photons(i) as f64)
            .sum()
    }

    pub fn max_abs_diff(&self, other: &DensityMatrix) -> f64 {
        linalg::max_abs_diff(&self.matrix, &other.matrix)
    }

    /// `ρ ⊗ |0…0⟩⟨0…0|` on `extra` appended vacuum modes of the same cutoff.
    pub fn append_vacuum_modes(&self, extra: usize) -> Result<DensityMatrix> {
        let joint = FockBasis::new(self.basis.modes + extra, self.basis.cutoff)?;
        let env_dim = (self.basis.cutoff + 1).pow(extra as u32);
        let mut vac = Matrix::zeros(env_dim, env_dim);
        vac[(0, 0)] = ONE;
        Ok(DensityMatrix {
            basis: joint,
            matrix: linalg::kron(&self.matrix, &vac),
        })
    }

    /// Trace out every mode after the first `keep` modes.
    pub fn trace_out_trailing_modes(&self, keep: usize) -> Result<DensityMatrix> {
        if keep == 0 || keep > self.basis.modes {
            return Err(Error::ModeOutOfRange {
                mode: keep,
                modes: self.basis.modes,
            });
        }
        let kept = FockBasis::new(keep, self.basis.cutoff)?;
        let env_dim = self.basis.dimension() / kept.dimension();
        let m = linalg::partial_trace(&self.matrix, &[kept.dimension(), env_dim], &[1])?;
        Ok(DensityMatrix {
            basis: kept,
            matrix: m,
        })
    }
}

/// Wire format for states and operators:
/// `{"basis": {"modes", "cutoff"}, "entries": [[re, im], …]}` with entries
/// in row-major order. Joint system–ancilla operators add `ancilla_dim`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixDump {
    pub basis: FockBasis,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ancilla_dim: Option<usize>,
    pub entries: Vec<[f64; 2]>,
}

impl MatrixDump {
    pub fn from_matrix(basis: FockBasis, ancilla_dim: Option<usize>, m: &Matrix) -> Self {
        let mut entries = Vec::with_capacity(m.len());
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                let z = m[(i, j)];
                entries.push([z.re, z.im]);
            }
        }
        Self {
            basis,
            ancilla_dim,
            entries,
        }
    }

    pub fn from_vector(basis: FockBasis, v: &Vector) -> Self {
        Self {
            basis,
            ancilla_dim: None,
            entries: v.iter().map(|z| [z.re, z.im]).collect(),
        }
    }

    pub fn to_matrix(&self) -> Result<Matrix> {
        let d = self.basis.dimension() * self.ancilla_dim.unwrap_or(1);
        if self.entries.len() != d * d {
            return Err(Error::DimensionMismatch {
                expected: d * d,
                actual: self.entries.len(),
            });
        }
        Ok(Matrix::from_row_iterator(
            d,
            d,
            self.entries.iter().map(|[re, im]| C64::new(*re, *im)),
        ))
    }
}

impl From<&Operator> for MatrixDump {
    fn from(op: &Operator) -> Self {
        Self::from_matrix(op.basis, None, &op.matrix)
    }
}

impl From<&DensityMatrix> for MatrixDump {
    fn from(rho: &DensityMatrix) -> Self {
        Self::from_matrix(rho.basis, None, &rho.matrix)
    }
}

impl From<&StateVector> for MatrixDump {
    fn from(s: &StateVector) -> Self {
        Self::from_vector(s.basis, &s.amplitudes)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn basis(m: usize, c: usize) -> FockBasis {
        FockBasis::new(m, c).unwrap()
    }

    #[test]
    fn dimension_and_ordering() {
        let b = basis(3, 3);
        assert_eq!(b.dimension(), 64);
        assert_eq!(b.index_of(&[0, 0, 1]).unwrap(), 1);
        assert_eq!(b.index_of(&[1, 0, 0]).unwrap(), 16);
        assert_eq!(b.occupation(63), vec![3, 3, 3]);
        assert!(b.index_of(&[4, 0, 0]).is_err());
        assert!(b.index_of(&[1, 0]).is_err());
        assert!(FockBasis::new(0, 3).is_err());
    }

    proptest! {
        #[test]
        fn index_round_trips(modes in 1usize..4, cutoff in 0usize..5, seed in 0usize..10_000) {
            let b = basis(modes, cutoff);
            let idx = seed % b.dimension();
            prop_assert_eq!(b.index_of(&b.occupation(idx)).unwrap(), idx);
        }
    }

    #[test]
    fn ladder_examples() {
        let b = basis(1, 3);
        let a = annihilation(b, 1).unwrap();
        let out = a.apply(&StateVector::fock(b, &[1]).unwrap()).unwrap();
        assert_eq!(out, StateVector::fock(b, &[0]).unwrap());
        let out = a.apply(&StateVector::fock(b, &[3]).unwrap()).unwrap();
        assert!((out.amplitude(&[2]).unwrap() - c(3f64.sqrt())).norm() < 1e-15);
        let vac = a.apply(&StateVector::fock(b, &[0]).unwrap()).unwrap();
        assert_eq!(vac.norm(), 0.0);

        let b2 = basis(2, 4);
        let a1 = annihilation(b2, 1).unwrap();
        let out = a1.apply(&StateVector::fock(b2, &[4, 0]).unwrap()).unwrap();
        // √4 by enumeration of matrix elements
        let expected = StateVector::fock(b2, &[3, 0]).unwrap().scale(c(2.0));
        assert!(out.max_abs_diff(&expected) < 1e-15);
        assert!(matches!(
            annihilation(b2, 3),
            Err(Error::ModeOutOfRange { mode: 3, modes: 2 })
        ));
        assert!(annihilation(b2, 0).is_err());
    }

    #[test]
    fn number_operator_examples() {
        let b = basis(3, 3);
        let n = number_operator(b);
        let s = StateVector::fock(b, &[1, 1, 1]).unwrap();
        assert_eq!(n.apply(&s).unwrap(), s.scale(c(3.0)));
        let b1 = basis(1, 3);
        let vac = StateVector::fock(b1, &[0]).unwrap();
        assert_eq!(number_operator(b1).apply(&vac).unwrap().norm(), 0.0);
        let b2 = basis(2, 4);
        let s = StateVector::fock(b2, &[2, 2]).unwrap();
        assert_eq!(number_operator(b2).apply(&s).unwrap(), s.scale(c(4.0)));
        // N = Σ a†a
        let sum = mode_number_operator(b, 1)
            .unwrap()
            .add(&mode_number_operator(b, 2).unwrap())
            .unwrap()
            .add(&mode_number_operator(b, 3).unwrap())
            .unwrap();
        let ad_a = creation(b, 2)
            .unwrap()
            .compose(&annihilation(b, 2).unwrap())
            .unwrap();
        assert!(ad_a.max_abs_diff(&mode_number_operator(b, 2).unwrap()) < 1e-14);
        assert!(sum.max_abs_diff(&n) < 1e-14);
    }

    #[test]
    fn function_of_number_examples() {
        let b = basis(1, 3);
        let id = function_of_number(b, |n| 1f64.sqrt().powi(n as i32));
        assert!(id.max_abs_diff(&Operator::identity(b)) < 1e-15);
        let f = function_of_number(b, |n| 0.81f64.sqrt().powi(n as i32));
        assert!((f.matrix()[(2, 2)].re - 0.81).abs() < 1e-15);
    }

    #[test]
    fn number_function_commutes_past_annihilation() {
        // f(N) a = a f(N-1) with f(n) = η^n
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for &(m, cut) in &[(1, 3), (2, 4), (3, 3)] {
            let b = basis(m, cut);
            let eta: f64 = rng.random_range(0.05..1.0);
            let f = function_of_number(b, |n| eta.powi(n as i32));
            let f_shift = function_of_number(b, |n| eta.powi(n as i32 - 1));
            for mode in 1..=m {
                let a = annihilation(b, mode).unwrap();
                let lhs = f.compose(&a).unwrap();
                let rhs = a.compose(&f_shift).unwrap();
                assert!(lhs.max_abs_diff(&rhs) < 1e-14);
            }
        }
    }

    #[test]
    fn canonical_commutator_below_cutoff() {
        let b = basis(2, 4);
        for mode in 1..=2 {
            let a = annihilation(b, mode).unwrap();
            let ad = a.dagger();
            let comm = a
                .compose(&ad)
                .unwrap()
                .sub(&ad.compose(&a).unwrap())
                .unwrap();
            for i in 0..b.dimension() {
                if b.occupation(i)[mode - 1] == b.cutoff() {
                    continue;
                }
                for j in 0..b.dimension() {
                    let expected = if i == j { ONE } else { ZERO };
                    assert!((comm.matrix()[(i, j)] - expected).norm() <= 1e-12);
                }
            }
        }
    }

    #[test]
    fn projector_examples() {
        let b = basis(1, 3);
        let p = projector_from_states(&[StateVector::fock(b, &[1]).unwrap()], 1e-10).unwrap();
        assert!((p.trace() - ONE).norm() < 1e-15);
        assert!(p.idempotency_residual() < 1e-12);
        assert!(p.is_hermitian(1e-12));

        let s = 0.5f64.sqrt();
        let x = StateVector::from_terms(b, &[(vec![0], c(s)), (vec![1], c(s))]).unwrap();
        let bad = projector_from_states(&[StateVector::fock(b, &[0]).unwrap(), x], 1e-10);
        match bad {
            Err(Error::NotOrthonormal {
                row: 0,
                col: 1,
                deviation,
            }) => {
                assert!((deviation - s).abs() < 1e-12)
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn vacuum_embedding_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let b = basis(2, 2);
        let rho = DensityMatrix::random(b, &mut rng);
        let joint = rho.append_vacuum_modes(2).unwrap();
        assert_eq!(joint.basis().modes(), 4);
        let back = joint.trace_out_trailing_modes(2).unwrap();
        assert!(back.max_abs_diff(&rho) <= 1e-12);
    }

    #[test]
    fn density_validation() {
        let b = basis(1, 2);
        let mut m = Matrix::zeros(3, 3);
        m[(0, 0)] = c(0.5);
        assert!(DensityMatrix::new(b, m.clone()).is_err());
        m[(1, 1)] = c(0.5);
        assert!(DensityMatrix::new(b, m.clone()).is_ok());
        m[(0, 0)] = c(1.5);
        m[(1, 1)] = c(-0.5);
        assert!(DensityMatrix::new(b, m).is_err());
        assert!(DensityMatrix::new(b, Matrix::identity(2, 2)).is_err());
    }

    #[test]
    fn dump_round_trip() {
        let b = basis(1, 2);
        let a = annihilation(b, 1).unwrap();
        let dump = MatrixDump::from(&a);
        let json = serde_json::to_string(&dump).unwrap();
        assert!(
            json.starts_with(r#"{"basis":{"modes":1,"cutoff":2},"entries":[[0.0,0.0],[1.0,0.0]"#)
        );
        let back: MatrixDump = serde_json::from_str(&json).unwrap();
        assert_eq!(back.to_matrix().unwrap(), *a.matrix());
    }
}
