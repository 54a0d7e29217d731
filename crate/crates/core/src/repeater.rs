//! Repeater Hamiltonians and their unitaries.
//!
//! Both architectures are sums of rank-one projectors onto mutually
//! orthonormal vectors of the system ⊗ ancilla space, so every Hamiltonian
//! is itself a projector and the evolution at `t = π` is the reflection
//! `U = exp(iπH) = 1 − 2H`.
//!
//! * Direct: `H = Σ_{k,i} (Ψ₀ₖ⁽ⁱ⁾ + Ψ₁ₖ⁽ⁱ⁾)`,
//!   `|Ψⱼₖ⁽ⁱ⁾⟩ = (|j⟩|k⁽ⁱ⁾⟩ − |j⁽ⁱ⁾⟩|k⟩)/√2`. The error index moves from the
//!   system to the ancilla, which is an abstract `K(M+1)`-level system with
//!   orthonormal labels `(k, i)`; label `(k, 0)` is the fresh state `|k⟩`.
//! * SWAP: `H = Σ_{i=0}^{M} Φ⁽ⁱ⁾`, `|Φ⁽ⁱ⁾⟩ = (|0⁽ⁱ⁾⟩|1⟩ − |1⁽ⁱ⁾⟩|0⟩)/√2` with a
//!   logical-qubit ancilla. On each sector `span{|a⁽ⁱ⁾⟩|b⟩}` the reflection
//!   about the singlet is exactly the swap, so no phases appear in the
//!   swapped output.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::code::{self, CodeSpec, ErrorSpaces};
use crate::error::{Error, Result};
use crate::fock::{DensityMatrix, FockBasis, Operator};
use crate::linalg::{self, c, Matrix, Vector, C64, ONE};
use crate::loss::KrausChannel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum Architecture {
    Direct { k: usize },
    Swap,
}

impl Architecture {
    pub fn name(self) -> &'static str {
        match self {
            Self::Direct { .. } => "direct",
            Self::Swap => "swap",
        }
    }
}

/// Orthonormal ancilla labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AncillaBasis {
    pub architecture: Architecture,
    /// Number of system modes `M`.
    pub modes: usize,
}

impl AncillaBasis {
    pub fn dimension(&self) -> usize {
        match self.architecture {
            Architecture::Direct { k } => k * (self.modes + 1),
            Architecture::Swap => 2,
        }
    }

    /// Index of `|k⁽ⁱ⁾⟩` for `k` in `1..=K`, `i` in `0..=M`.
    pub fn direct_index(&self, k: usize, i: usize) -> usize {
        debug_assert!(matches!(self.architecture, Architecture::Direct { .. }));
        (k - 1) * (self.modes + 1) + i
    }

    pub fn basis_vector(&self, index: usize) -> Vector {
        let mut v = Vector::zeros(self.dimension());
        v[index] = ONE;
        v
    }
}

/// A synthesised repeater: projector Hamiltonian and unitary on
/// system ⊗ ancilla (system index slow).
#[derive(Debug, Clone)]
pub struct RepeaterSpec {
    code: CodeSpec,
    error_spaces: ErrorSpaces,
    ancilla: AncillaBasis,
    hamiltonian: Matrix,
    unitary: Matrix,
    projector_rank: usize,
}

impl RepeaterSpec {
    pub fn code(&self) -> &CodeSpec {
        &self.code
    }

    pub fn error_spaces(&self) -> &ErrorSpaces {
        &self.error_spaces
    }

    pub fn ancilla(&self) -> AncillaBasis {
        self.ancilla
    }

    pub fn architecture(&self) -> Architecture {
        self.ancilla.architecture
    }

    pub fn system_basis(&self) -> FockBasis {
        self.code.basis()
    }

    pub fn joint_dimension(&self) -> usize {
        self.code.basis().dimension() * self.ancilla.dimension()
    }

    pub fn hamiltonian(&self) -> &Matrix {
        &self.hamiltonian
    }

    pub fn unitary(&self) -> &Matrix {
        &self.unitary
    }

    pub fn projector_rank(&self) -> usize {
        self.projector_rank
    }

    /// `max |H² − H|`
    pub fn idempotency_residual(&self) -> f64 {
        linalg::max_abs_diff(&(&self.hamiltonian * &self.hamiltonian), &self.hamiltonian)
    }

    /// `max |U†U − 1|`
    pub fn unitarity_residual(&self) -> f64 {
        let d = self.joint_dimension();
        linalg::max_abs_diff(
            &(self.unitary.adjoint() * &self.unitary),
            &Matrix::identity(d, d),
        )
    }

    /// Largest distance of an eigenvalue of `U` from `{+1, −1}`. `U` is
    /// Hermitian, so its spectrum is real.
    pub fn spectrum_residual(&self) -> f64 {
        linalg::hermitian_eigenvalues(&self.unitary)
            .into_iter()
            .map(|x| (x.abs() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// `|j⁽ⁱ⁾⟩` with `i = 0` meaning the codeword itself.
    fn error_state(&self, j: usize, i: usize) -> &Vector {
        error_state(&self.code, &self.error_spaces, j, i)
    }

    /// Reduced action on the system of one repeater use with a fresh
    /// ancilla. For the direct architecture the ancilla starts in `|1⁽⁰⁾⟩`
    /// and is traced out; for SWAP it starts in the codeword `|0⟩` and the
    /// ancilla, re-encoded into the system's code space, is the output.
    pub fn effective_channel(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if rho.basis() != self.code.basis() {
            return Err(Error::BasisMismatch);
        }
        let ds = self.code.basis().dimension();
        let da = self.ancilla.dimension();
        let fresh = match self.ancilla.architecture {
            Architecture::Direct { .. } => self.ancilla.direct_index(1, 0),
            Architecture::Swap => 0,
        };
        let v = self.ancilla.basis_vector(fresh);
        let joint = linalg::kron(rho.matrix(), &linalg::outer(&v, &v));
        let evolved = &self.unitary * joint * self.unitary.adjoint();
        let out = match self.ancilla.architecture {
            Architecture::Direct { .. } => linalg::partial_trace(&evolved, &[ds, da], &[1])?,
            Architecture::Swap => {
                let logical = linalg::partial_trace(&evolved, &[ds, da], &[0])?;
                let enc = self.code.encoder();
                &enc * logical * enc.adjoint()
            }
        };
        DensityMatrix::new_unchecked(rho.basis(), out)
    }
}

fn error_state<'a>(code: &'a CodeSpec, spaces: &'a ErrorSpaces, j: usize, i: usize) -> &'a Vector {
    if i == 0 {
        code.logical(j).amplitudes()
    } else {
        spaces.space(i).states[j].amplitudes()
    }
}

fn projector_sum(vectors: &[Vector], dim: usize) -> Matrix {
    let mut h = Matrix::zeros(dim, dim);
    for v in vectors {
        h += linalg::outer(v, v);
    }
    h
}

fn finish(
    code: &CodeSpec,
    error_spaces: ErrorSpaces,
    ancilla: AncillaBasis,
    vectors: Vec<Vector>,
) -> Result<RepeaterSpec> {
    let dim = code.basis().dimension() * ancilla.dimension();
    let hamiltonian = projector_sum(&vectors, dim);
    let unitary = unitary_from_projector(&hamiltonian, 1e-10)?;
    Ok(RepeaterSpec {
        code: code.clone(),
        error_spaces,
        ancilla,
        hamiltonian,
        unitary,
        projector_rank: vectors.len(),
    })
}

/// Direct architecture with a `K`-dimensional initial ancilla space; `K = 1`
/// gives the minimal Hamiltonian.
pub fn build_direct(code: &CodeSpec, k: usize) -> Result<RepeaterSpec> {
    if k < 1 {
        return Err(Error::ParameterOutOfRange {
            name: "ancilla K",
            value: k as f64,
            range: ">= 1",
        });
    }
    let spaces = code::error_spaces_for(code)?;
    let ancilla = AncillaBasis {
        architecture: Architecture::Direct { k },
        modes: code.modes(),
    };
    let s = c(0.5f64.sqrt());
    let mut vectors = Vec::with_capacity(2 * k * code.modes());
    for kk in 1..=k {
        let fresh = ancilla.basis_vector(ancilla.direct_index(kk, 0));
        for i in 1..=code.modes() {
            let flagged = ancilla.basis_vector(ancilla.direct_index(kk, i));
            for j in 0..2 {
                let logical = code.logical(j).amplitudes();
                let err = error_state(code, &spaces, j, i);
                let psi = (linalg::kron_vec(logical, &flagged) - linalg::kron_vec(err, &fresh)) * s;
                vectors.push(psi);
            }
        }
    }
    finish(code, spaces, ancilla, vectors)
}

/// SWAP architecture with a logical-qubit ancilla prepared in code space.
pub fn build_swap(code: &CodeSpec) -> Result<RepeaterSpec> {
    let spaces = code::error_spaces_for(code)?;
    let ancilla = AncillaBasis {
        architecture: Architecture::Swap,
        modes: code.modes(),
    };
    let s = c(0.5f64.sqrt());
    let zero = ancilla.basis_vector(0);
    let one = ancilla.basis_vector(1);
    let vectors = (0..=code.modes())
        .map(|i| {
            let e0 = error_state(code, &spaces, 0, i);
            let e1 = error_state(code, &spaces, 1, i);
            (linalg::kron_vec(e0, &one) - linalg::kron_vec(e1, &zero)) * s
        })
        .collect();
    finish(code, spaces, ancilla, vectors)
}

/// `U = 1 − 2H`, the evolution `exp(iπH)` generated by a projector.
pub fn unitary_from_projector(h: &Matrix, tol: f64) -> Result<Matrix> {
    let residual = linalg::max_abs_diff(&(h * h), h);
    if residual > tol {
        return Err(Error::NotIdempotent(residual));
    }
    Ok(Matrix::identity(h.nrows(), h.ncols()) - h * c(2.0))
}

fn random_pair<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vector {
    linalg::random_unit_vector(n, rng)
}

fn combine(coeffs: &Vector, vectors: &[&Vector]) -> Vector {
    let mut out = Vector::zeros(vectors[0].len());
    for (a, v) in coeffs.iter().zip(vectors) {
        out += *v * *a;
    }
    out
}

/// Largest deviation of `U(|ψ⁽ⁱ⁾⟩ ⊗ |φ⟩)` from `|ψ⟩ ⊗ |φ⁽ⁱ⁾⟩` over random
/// `α, β, γ_k` and every error index, including `i = 0` where the expected
/// output is the unchanged input.
pub fn verify_transfer_action<R: Rng + ?Sized>(
    spec: &RepeaterSpec,
    trials: usize,
    rng: &mut R,
) -> Result<f64> {
    let Architecture::Direct { k } = spec.architecture() else {
        return Err(Error::WrongArchitecture { expected: "direct" });
    };
    let anc = spec.ancilla;
    let mut worst = 0.0f64;
    for _ in 0..trials {
        for i in 0..=spec.code.modes() {
            let ab = random_pair(2, rng);
            let gamma = random_pair(k, rng);
            let sys_in = combine(&ab, &[spec.error_state(0, i), spec.error_state(1, i)]);
            let sys_out = combine(&ab, &[spec.error_state(0, 0), spec.error_state(1, 0)]);
            let fresh: Vec<Vector> = (1..=k)
                .map(|kk| anc.basis_vector(anc.direct_index(kk, 0)))
                .collect();
            let flagged: Vec<Vector> = (1..=k)
                .map(|kk| anc.basis_vector(anc.direct_index(kk, i)))
                .collect();
            let phi = combine(&gamma, &fresh.iter().collect::<Vec<_>>());
            let phi_i = combine(&gamma, &flagged.iter().collect::<Vec<_>>());
            let input = linalg::kron_vec(&sys_in, &phi);
            let expected = linalg::kron_vec(&sys_out, &phi_i);
            let output = &spec.unitary * input;
            worst = worst.max(linalg::vec_max_abs_diff(&output, &expected));
        }
    }
    Ok(worst)
}

/// Largest deviation of `U(|ψ⁽ⁱ⁾⟩ ⊗ |φ⟩)` from `|φ⁽ⁱ⁾⟩ ⊗ |ψ⟩` over random
/// logical states and every `i` in `0..=M`.
pub fn verify_swap_action<R: Rng + ?Sized>(
    spec: &RepeaterSpec,
    trials: usize,
    rng: &mut R,
) -> Result<f64> {
    if spec.architecture() != Architecture::Swap {
        return Err(Error::WrongArchitecture { expected: "swap" });
    }
    let zero = spec.ancilla.basis_vector(0);
    let one = spec.ancilla.basis_vector(1);
    let mut worst = 0.0f64;
    for _ in 0..trials {
        for i in 0..=spec.code.modes() {
            let ab = random_pair(2, rng);
            let gamma = random_pair(2, rng);
            let errs = [spec.error_state(0, i), spec.error_state(1, i)];
            let input = linalg::kron_vec(&combine(&ab, &errs), &combine(&gamma, &[&zero, &one]));
            let expected = linalg::kron_vec(&combine(&gamma, &errs), &combine(&ab, &[&zero, &one]));
            let output = &spec.unitary * input;
            worst = worst.max(linalg::vec_max_abs_diff(&output, &expected));
        }
    }
    Ok(worst)
}

/// Dimensions and residuals of a built repeater.
#[derive(Debug, Clone, Serialize)]
pub struct RepeaterReport {
    pub code: String,
    pub architecture: Architecture,
    pub system_dimension: usize,
    pub ancilla_dimension: usize,
    pub joint_dimension: usize,
    pub projector_rank: usize,
    pub expected_rank: usize,
    pub idempotency_residual: f64,
    pub unitarity_residual: f64,
    pub spectrum_residual: f64,
    /// `max |exp(iπH) − U|`
    pub exponential_residual: f64,
    pub action_residual: f64,
    pub trials: usize,
    pub seed: u64,
    pub tolerance: f64,
    pub pass: bool,
}

impl RepeaterSpec {
    /// `2KM` for the direct architecture, `M + 1` for SWAP.
    pub fn expected_rank(&self) -> usize {
        let m = self.code.modes();
        match self.architecture() {
            Architecture::Direct { k } => 2 * k * m,
            Architecture::Swap => m + 1,
        }
    }

    /// Transfer or swap residual, whichever matches the architecture.
    pub fn verify_action<R: Rng + ?Sized>(&self, trials: usize, rng: &mut R) -> Result<f64> {
        match self.architecture() {
            Architecture::Direct { .. } => verify_transfer_action(self, trials, rng),
            Architecture::Swap => verify_swap_action(self, trials, rng),
        }
    }

    pub fn report(&self, trials: usize, seed: u64, tolerance: f64) -> Result<RepeaterReport> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let action_residual = self.verify_action(trials, &mut rng)?;
        let idempotency_residual = self.idempotency_residual();
        let unitarity_residual = self.unitarity_residual();
        let spectrum_residual = self.spectrum_residual();
        let exponential_residual =
            linalg::max_abs_diff(&exp_i_pi(&self.hamiltonian), &self.unitary);
        let worst = [
            action_residual,
            idempotency_residual,
            unitarity_residual,
            spectrum_residual,
            exponential_residual,
        ]
        .into_iter()
        .fold(0.0, f64::max);
        Ok(RepeaterReport {
            code: self.code.name().to_string(),
            architecture: self.architecture(),
            system_dimension: self.code.basis().dimension(),
            ancilla_dimension: self.ancilla.dimension(),
            joint_dimension: self.joint_dimension(),
            projector_rank: self.projector_rank,
            expected_rank: self.expected_rank(),
            idempotency_residual,
            unitarity_residual,
            spectrum_residual,
            exponential_residual,
            action_residual,
            trials,
            seed,
            tolerance,
            pass: self.projector_rank == self.expected_rank() && worst <= tolerance,
        })
    }
}

/// Recovery channel on the system: `R⁽⁰⁾ = 1 − Σ_i P⁽ⁱ⁾` and
/// `R⁽ⁱ⁾ = |0_L⟩⟨0⁽ⁱ⁾| + |1_L⟩⟨1⁽ⁱ⁾|`, labelled `[i]`.
pub fn recovery_channel(code: &CodeSpec) -> Result<KrausChannel> {
    let spaces = code::error_spaces_for(code)?;
    recovery_channel_with(code, &spaces)
}

pub fn recovery_channel_with(code: &CodeSpec, spaces: &ErrorSpaces) -> Result<KrausChannel> {
    let basis = code.basis();
    let d = basis.dimension();
    let mut ops = Vec::with_capacity(code.modes() + 1);
    let r0 = Matrix::identity(d, d) - spaces.total_projector();
    ops.push(Operator::new(basis, r0)?);
    for space in spaces.spaces() {
        let mut r = Matrix::zeros(d, d);
        for j in 0..2 {
            r += linalg::outer(code.logical(j).amplitudes(), space.states[j].amplitudes());
        }
        ops.push(Operator::new(basis, r)?);
    }
    let labels = (0..=code.modes()).map(|i| vec![i]).collect();
    KrausChannel::new(basis, ops, labels)
}

/// Projector onto code space plus all correctable error spaces.
pub fn correctable_projector(code: &CodeSpec, spaces: &ErrorSpaces) -> Matrix {
    code.projector().matrix() + spaces.total_projector()
}

/// Random density matrix supported on code space ⊕ correctable error spaces.
pub fn random_correctable_state<R: Rng + ?Sized>(
    code: &CodeSpec,
    spaces: &ErrorSpaces,
    rng: &mut R,
) -> Result<DensityMatrix> {
    let mut columns: Vec<&Vector> =
        vec![code.logical(0).amplitudes(), code.logical(1).amplitudes()];
    for s in spaces.spaces() {
        columns.extend(s.states.iter().map(|v| v.amplitudes()));
    }
    let n = columns.len();
    let small = linalg::random_density(n, rng);
    let mut frame = Matrix::zeros(code.basis().dimension(), n);
    for (j, v) in columns.iter().enumerate() {
        frame.set_column(j, v);
    }
    DensityMatrix::new_unchecked(code.basis(), &frame * small * frame.adjoint())
}

#[doc(hidden)]
pub fn exp_i_pi(h: &Matrix) -> Matrix {
    linalg::hermitian_function(h, |x| C64::new(0.0, std::f64::consts::PI * x).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::BuiltinCode;
    use crate::fock::StateVector;
    use crate::linalg::ZERO;

    fn codes() -> Vec<CodeSpec> {
        BuiltinCode::ALL
            .into_iter()
            .map(CodeSpec::builtin)
            .collect()
    }

    #[test]
    fn report_is_seeded_and_passes() {
        let code = CodeSpec::builtin(BuiltinCode::TwoMode);
        for spec in [build_swap(&code).unwrap(), build_direct(&code, 2).unwrap()] {
            let a = spec.report(10, 9, 1e-12).unwrap();
            let b = spec.report(10, 9, 1e-12).unwrap();
            assert!(a.pass, "{a:?}");
            assert_eq!(a.projector_rank, a.expected_rank);
            assert_eq!(a.action_residual, b.action_residual);
            assert_eq!(a.joint_dimension, a.system_dimension * a.ancilla_dimension);
        }
        let strict = build_swap(&code).unwrap().report(3, 1, 0.0).unwrap();
        assert_eq!(
            strict.pass,
            strict.action_residual == 0.0
                && strict.exponential_residual == 0.0
                && strict.unitarity_residual == 0.0
                && strict.idempotency_residual == 0.0
                && strict.spectrum_residual == 0.0
        );
    }

    #[test]
    fn direct_dimensions_and_projector() {
        let three = CodeSpec::builtin(BuiltinCode::ThreeMode);
        let spec = build_direct(&three, 1).unwrap();
        assert_eq!(spec.projector_rank(), 6);
        assert_eq!(spec.ancilla().dimension(), 4);
        assert_eq!(spec.joint_dimension(), 256);
        for code in codes() {
            for k in [1, 2] {
                let spec = build_direct(&code, k).unwrap();
                assert_eq!(spec.projector_rank(), 2 * k * code.modes());
                assert!(spec.idempotency_residual() <= 1e-12);
                assert!(spec.unitarity_residual() <= 1e-12);
                let rank = linalg::trace(spec.hamiltonian()).re;
                assert!((rank - spec.projector_rank() as f64).abs() < 1e-12);
            }
        }
        assert!(build_direct(&three, 0).is_err());
    }

    #[test]
    fn swap_dimensions_and_projector() {
        let three = CodeSpec::builtin(BuiltinCode::ThreeMode);
        assert_eq!(build_swap(&three).unwrap().projector_rank(), 4);
        let one = CodeSpec::builtin(BuiltinCode::SingleMode);
        let spec = build_swap(&one).unwrap();
        assert_eq!(spec.joint_dimension(), 8);
        assert_eq!(spec.projector_rank(), 2);
        for code in codes() {
            let spec = build_swap(&code).unwrap();
            assert!(spec.idempotency_residual() <= 1e-12);
            assert!(spec.unitarity_residual() <= 1e-12);
        }
    }

    #[test]
    fn unitary_is_exp_i_pi_h() {
        for code in codes() {
            let spec = build_swap(&code).unwrap();
            let u = exp_i_pi(spec.hamiltonian());
            assert!(linalg::max_abs_diff(&u, spec.unitary()) < 1e-12);
            assert!(spec.spectrum_residual() <= 1e-12);
        }
        let spec = build_direct(&CodeSpec::builtin(BuiltinCode::TwoMode), 1).unwrap();
        assert!(spec.spectrum_residual() <= 1e-12);
    }

    #[test]
    fn unitary_from_projector_examples() {
        let zero = Matrix::zeros(3, 3);
        assert_eq!(
            unitary_from_projector(&zero, 1e-10).unwrap(),
            Matrix::identity(3, 3)
        );
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let v = linalg::random_unit_vector(4, &mut rng);
        let u = unitary_from_projector(&linalg::outer(&v, &v), 1e-10).unwrap();
        assert!(linalg::vec_max_abs_diff(&(&u * &v), &(-&v)) < 1e-14);
        let not_proj = Matrix::identity(2, 2) * c(0.5);
        assert!(matches!(
            unitary_from_projector(&not_proj, 1e-10),
            Err(Error::NotIdempotent(_))
        ));
    }

    #[test]
    fn transfer_single_term() {
        let three = CodeSpec::builtin(BuiltinCode::ThreeMode);
        let spec = build_direct(&three, 1).unwrap();
        let anc = spec.ancilla();
        let input = linalg::kron_vec(
            spec.error_state(0, 1),
            &anc.basis_vector(anc.direct_index(1, 0)),
        );
        let expected = linalg::kron_vec(
            three.logical(0).amplitudes(),
            &anc.basis_vector(anc.direct_index(1, 1)),
        );
        assert!(linalg::vec_max_abs_diff(&(spec.unitary() * input), &expected) < 1e-15);
    }

    #[test]
    fn code_space_untouched_by_direct_repeater() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for code in codes() {
            let spec = build_direct(&code, 2).unwrap();
            let anc = spec.ancilla();
            let psi = combine(
                &linalg::random_unit_vector(2, &mut rng),
                &[code.logical(0).amplitudes(), code.logical(1).amplitudes()],
            );
            let phi = anc.basis_vector(anc.direct_index(2, 0));
            let input = linalg::kron_vec(&psi, &phi);
            assert!(linalg::vec_max_abs_diff(&(spec.unitary() * &input), &input) < 1e-14);
        }
    }

    #[test]
    fn random_actions() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for code in codes() {
            let direct = build_direct(&code, 2).unwrap();
            assert!(verify_transfer_action(&direct, 20, &mut rng).unwrap() <= 1e-12);
            let swap = build_swap(&code).unwrap();
            assert!(verify_swap_action(&swap, 20, &mut rng).unwrap() <= 1e-12);
            assert!(matches!(
                verify_swap_action(&direct, 1, &mut rng),
                Err(Error::WrongArchitecture { expected: "swap" })
            ));
            assert!(verify_transfer_action(&swap, 1, &mut rng).is_err());
        }
    }

    #[test]
    fn swap_of_identical_states_is_trivial() {
        // U(|ψ⟩|ψ⟩) = |ψ⟩|ψ⟩: the input is symmetric, so the reflection fixes it.
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let code = CodeSpec::builtin(BuiltinCode::TwoMode);
        let spec = build_swap(&code).unwrap();
        let ab = linalg::random_unit_vector(2, &mut rng);
        let psi = combine(
            &ab,
            &[code.logical(0).amplitudes(), code.logical(1).amplitudes()],
        );
        let input = linalg::kron_vec(&psi, &ab);
        assert!(linalg::vec_max_abs_diff(&(spec.unitary() * &input), &input) < 1e-14);
        // the antisymmetric combination picks up −1 and is still a swap
        let singlet = (linalg::kron_vec(
            code.logical(0).amplitudes(),
            &spec.ancilla().basis_vector(1),
        ) - linalg::kron_vec(
            code.logical(1).amplitudes(),
            &spec.ancilla().basis_vector(0),
        )) * c(0.5f64.sqrt());
        assert!(linalg::vec_max_abs_diff(&(spec.unitary() * &singlet), &(-&singlet)) < 1e-14);
    }

    #[test]
    fn swap_ancilla_output_is_in_code_space() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let code = CodeSpec::builtin(BuiltinCode::ThreeMode);
        let spec = build_swap(&code).unwrap();
        let spaces = spec.error_spaces().clone();
        for _ in 0..5 {
            let rho = random_correctable_state(&code, &spaces, &mut rng).unwrap();
            let out = spec.effective_channel(&rho).unwrap();
            let p = code.projector().matrix();
            assert!(linalg::max_abs_diff(&(p * out.matrix() * p), out.matrix()) < 1e-12);
        }
    }

    #[test]
    fn uncorrectable_states_fixed_by_direct_unitary() {
        let code = CodeSpec::builtin(BuiltinCode::ThreeMode);
        let spec = build_direct(&code, 1).unwrap();
        let anc = spec.ancilla();
        for occ in [[0, 0, 1], [1, 0, 0], [0, 0, 0]] {
            let s = StateVector::fock(code.basis(), &occ).unwrap();
            let input = linalg::kron_vec(s.amplitudes(), &anc.basis_vector(anc.direct_index(1, 0)));
            assert!(linalg::vec_max_abs_diff(&(spec.unitary() * &input), &input) < 1e-15);
        }
    }

    #[test]
    fn recovery_examples() {
        let one = CodeSpec::builtin(BuiltinCode::SingleMode);
        let rec = recovery_channel(&one).unwrap();
        assert_eq!(rec.len(), 2);
        let two = StateVector::fock(one.basis(), &[2]).unwrap();
        let out = rec.op(&[1]).unwrap().apply(&two).unwrap();
        assert_eq!(out, StateVector::fock(one.basis(), &[3]).unwrap());
        for code in codes() {
            let rec = recovery_channel(&code).unwrap();
            assert!(rec.completeness_residual() <= 1e-10);
            let rho = DensityMatrix::from_pure(code.logical(1));
            let out = rec.apply(&rho).unwrap();
            assert!(out.max_abs_diff(&rho) < 1e-14);
        }
    }

    #[test]
    fn recovery_maps_error_space_isometrically() {
        for code in codes() {
            let spaces = code::error_spaces_for(&code).unwrap();
            let rec = recovery_channel_with(&code, &spaces).unwrap();
            for space in spaces.spaces() {
                let r = rec.op(&[space.mode]).unwrap().matrix();
                // R† R = P⁽ⁱ⁾ and R P⁽ⁱ⁾ R† = P
                assert!(linalg::max_abs_diff(&(r.adjoint() * r), space.projector.matrix()) < 1e-12);
                assert!(
                    linalg::max_abs_diff(&(r * r.adjoint()), code.projector().matrix()) < 1e-12
                );
            }
        }
    }

    #[test]
    fn recovery_equals_dilated_repeaters_on_correctable_support() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        for code in codes() {
            let spaces = code::error_spaces_for(&code).unwrap();
            let rec = recovery_channel_with(&code, &spaces).unwrap();
            let swap = build_swap(&code).unwrap();
            let direct = build_direct(&code, 1).unwrap();
            for _ in 0..5 {
                let rho = random_correctable_state(&code, &spaces, &mut rng).unwrap();
                let expected = rec.apply(&rho).unwrap();
                assert!(
                    swap.effective_channel(&rho)
                        .unwrap()
                        .max_abs_diff(&expected)
                        <= 1e-10
                );
                assert!(
                    direct
                        .effective_channel(&rho)
                        .unwrap()
                        .max_abs_diff(&expected)
                        <= 1e-10
                );
            }
        }
    }

    #[test]
    fn recovery_never_moves_uncorrectable_states_into_code_space() {
        let code = CodeSpec::builtin(BuiltinCode::TwoMode);
        let rec = recovery_channel(&code).unwrap();
        let p = code.projector().matrix();
        for idx in 0..code.basis().dimension() {
            if code.basis().total_photons(idx) > 2 {
                continue;
            }
            let rho = DensityMatrix::fock(code.basis(), &code.basis().occupation(idx)).unwrap();
            let out = rec.apply(&rho).unwrap();
            assert_eq!(linalg::trace(&(p * out.matrix())), ZERO);
        }
    }
}
