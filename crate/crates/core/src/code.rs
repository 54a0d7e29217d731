//! Two-dimensional bosonic codes protecting against single-photon loss.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{self, FockBasis, Operator, StateVector};
use crate::linalg::{self, c, Matrix, C64, ZERO};
use crate::loss::check_transmissivity;

/// The three example codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BuiltinCode {
    /// `|1⟩`, `|3⟩`
    SingleMode,
    /// `(|4,0⟩ + |0,4⟩)/√2`, `|2,2⟩`
    TwoMode,
    /// `|1,1,1⟩`, `(|0,0,3⟩ + |0,3,0⟩ + |3,0,0⟩)/√3`
    ThreeMode,
}

impl BuiltinCode {
    pub const ALL: [BuiltinCode; 3] = [Self::SingleMode, Self::TwoMode, Self::ThreeMode];

    pub fn name(self) -> &'static str {
        match self {
            Self::SingleMode => "single-mode",
            Self::TwoMode => "two-mode",
            Self::ThreeMode => "three-mode",
        }
    }
}

impl fmt::Display for BuiltinCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BuiltinCode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|code| code.name() == s)
            .ok_or_else(|| Error::UnknownCode(s.to_string()))
    }
}

/// Code space spanned by two orthonormal logical codewords.
#[derive(Debug, Clone)]
pub struct CodeSpec {
    name: String,
    basis: FockBasis,
    logical: [StateVector; 2],
    projector: Operator,
}

impl CodeSpec {
    /// Dimension of the protected space.
    pub const DIMENSION: usize = 2;

    pub fn new(
        name: impl Into<String>,
        logical0: StateVector,
        logical1: StateVector,
        tol: f64,
    ) -> Result<Self> {
        if logical0.basis() != logical1.basis() {
            return Err(Error::BasisMismatch);
        }
        let basis = logical0.basis();
        let projector = fock::projector_from_states(&[logical0.clone(), logical1.clone()], tol)?;
        Ok(Self {
            name: name.into(),
            basis,
            logical: [logical0, logical1],
            projector,
        })
    }

    pub fn builtin(code: BuiltinCode) -> Self {
        let build = || -> Result<Self> {
            let (l0, l1) = match code {
                BuiltinCode::SingleMode => {
                    let b = FockBasis::new(1, 3)?;
                    (StateVector::fock(b, &[1])?, StateVector::fock(b, &[3])?)
                }
                BuiltinCode::TwoMode => {
                    let b = FockBasis::new(2, 4)?;
                    let s = c(0.5f64.sqrt());
                    (
                        StateVector::from_terms(b, &[(vec![4, 0], s), (vec![0, 4], s)])?,
                        StateVector::fock(b, &[2, 2])?,
                    )
                }
                BuiltinCode::ThreeMode => {
                    let b = FockBasis::new(3, 3)?;
                    let s = c(1.0 / 3f64.sqrt());
                    (
                        StateVector::fock(b, &[1, 1, 1])?,
                        StateVector::from_terms(
                            b,
                            &[(vec![0, 0, 3], s), (vec![0, 3, 0], s), (vec![3, 0, 0], s)],
                        )?,
                    )
                }
            };
            Self::new(code.name(), l0, l1, 1e-12)
        };
        build().expect("builtin codes are valid")
    }

    /// Built-in code by name.
    pub fn from_name(name: &str) -> Result<Self> {
        Ok(Self::builtin(name.parse()?))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn basis(&self) -> FockBasis {
        self.basis
    }

    pub fn modes(&self) -> usize {
        self.basis.modes()
    }

    pub fn logical(&self, j: usize) -> &StateVector {
        &self.logical[j]
    }

    pub fn logical_states(&self) -> &[StateVector; 2] {
        &self.logical
    }

    pub fn projector(&self) -> &Operator {
        &self.projector
    }

    /// Isometry from the logical qubit into Fock space; columns are the
    /// codewords.
    pub fn encoder(&self) -> Matrix {
        let d = self.basis.dimension();
        let mut v = Matrix::zeros(d, 2);
        v.set_column(0, self.logical[0].amplitudes());
        v.set_column(1, self.logical[1].amplitudes());
        v
    }

    /// Total photon number `n` if the code space satisfies `N P = n P`
    /// within `1e−12`, `None` otherwise.
    pub fn photon_number(&self) -> Option<usize> {
        let n_op = fock::number_operator(self.basis);
        let mean = self.logical[0]
            .inner(&n_op.apply(&self.logical[0]).ok()?)
            .re;
        let n = mean.round();
        let np = n_op.compose(&self.projector).ok()?;
        let residual = linalg::max_abs_diff(np.matrix(), &(self.projector.matrix() * c(n)));
        (residual <= 1e-12).then_some(n as usize)
    }

    pub fn is_number_eigenspace(&self) -> bool {
        self.photon_number().is_some()
    }

    /// Load and validate a code from its JSON description.
    pub fn load(path: impl AsRef<Path>, tol: f64) -> Result<Self> {
        let text = std::fs::read_to_string(path.as_ref())?;
        let file: CodeFile = serde_json::from_str(&text)?;
        let fallback = path
            .as_ref()
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "custom".into());
        file.into_code(&fallback, tol)
    }

    pub fn to_file(&self) -> CodeFile {
        let terms = |s: &StateVector| -> Vec<Amplitude> {
            (0..self.basis.dimension())
                .filter(|&i| s.amplitudes()[i] != ZERO)
                .map(|i| Amplitude {
                    occupation: self.basis.occupation(i),
                    re: s.amplitudes()[i].re,
                    im: s.amplitudes()[i].im,
                })
                .collect()
        };
        CodeFile {
            name: Some(self.name.clone()),
            modes: self.basis.modes(),
            cutoff: self.basis.cutoff(),
            logical0: terms(&self.logical[0]),
            logical1: terms(&self.logical[1]),
        }
    }
}

/// JSON schema for user-supplied codes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CodeFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub modes: usize,
    pub cutoff: usize,
    pub logical0: Vec<Amplitude>,
    pub logical1: Vec<Amplitude>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Amplitude {
    pub occupation: Vec<usize>,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

impl CodeFile {
    pub fn into_code(self, fallback_name: &str, tol: f64) -> Result<CodeSpec> {
        let basis = FockBasis::new(self.modes, self.cutoff)?;
        let build = |terms: &[Amplitude], which: &str| -> Result<StateVector> {
            if terms.is_empty() {
                return Err(Error::InvalidCode(format!("{which} has no amplitudes")));
            }
            let mut pairs = Vec::with_capacity(terms.len());
            for t in terms {
                if t.occupation.len() != self.modes {
                    return Err(Error::InvalidCode(format!(
                        "{which}: occupation {:?} does not have {} modes",
                        t.occupation, self.modes
                    )));
                }
                if t.occupation.iter().any(|&n| n > self.cutoff) {
                    return Err(Error::InvalidCode(format!(
                        "{which}: occupation {:?} exceeds cutoff {}",
                        t.occupation, self.cutoff
                    )));
                }
                pairs.push((t.occupation.clone(), C64::new(t.re, t.im)));
            }
            StateVector::from_terms(basis, &pairs)
        };
        let l0 = build(&self.logical0, "logical0")?;
        let l1 = build(&self.logical1, "logical1")?;
        let name = self.name.unwrap_or_else(|| fallback_name.to_string());
        CodeSpec::new(name, l0, l1, tol)
    }
}

/// Single-photon-loss operators `E_i = √(1−η) √η^N a_i` for every mode,
/// together with the no-loss operator `E₀ = √η^N`.
#[derive(Debug, Clone)]
pub struct ErrorFamily {
    eta: f64,
    no_loss: Operator,
    single_loss: Vec<Operator>,
}

impl ErrorFamily {
    pub fn new(basis: FockBasis, eta: f64) -> Result<Self> {
        check_transmissivity(eta)?;
        let no_loss = fock::function_of_number(basis, |n| eta.sqrt().powi(n as i32));
        let single_loss = (1..=basis.modes())
            .map(|mode| {
                Ok(no_loss
                    .compose(&fock::annihilation(basis, mode)?)?
                    .scale(c((1.0 - eta).sqrt())))
            })
            .collect::<Result<_>>()?;
        Ok(Self {
            eta,
            no_loss,
            single_loss,
        })
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn basis(&self) -> FockBasis {
        self.no_loss.basis()
    }

    pub fn no_loss(&self) -> &Operator {
        &self.no_loss
    }

    /// `E_mode` for `mode` in `1..=M`.
    pub fn single_loss(&self, mode: usize) -> &Operator {
        &self.single_loss[mode - 1]
    }

    /// `(label, operator)` pairs; label 0 is the no-loss operator.
    pub fn operators(&self, include_no_loss: bool) -> Vec<(usize, &Operator)> {
        let head = include_no_loss.then_some((0, &self.no_loss));
        head.into_iter()
            .chain(self.single_loss.iter().enumerate().map(|(i, e)| (i + 1, e)))
            .collect()
    }
}

/// Outcome of testing `P E_i† E_j P = δ_ij c_i P`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KlReport {
    pub code: String,
    pub eta: f64,
    pub include_no_loss: bool,
    /// Error labels in the order checked; 0 is the no-loss operator.
    pub labels: Vec<usize>,
    /// Fitted `c_i = Tr(P E_i† E_i P) / d`.
    pub coefficients: Vec<f64>,
    pub max_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Knill–Laflamme check. The per-error constant is fitted from the trace so
/// the result is a pure residual test.
pub fn kl_check(
    code: &CodeSpec,
    errors: &ErrorFamily,
    include_no_loss: bool,
    tol: f64,
) -> Result<KlReport> {
    if errors.basis() != code.basis {
        return Err(Error::BasisMismatch);
    }
    let p = code.projector.matrix();
    let ops = errors.operators(include_no_loss);
    // E_j P for each error
    let images: Vec<Matrix> = ops.iter().map(|(_, e)| e.matrix() * p).collect();
    let coefficients: Vec<f64> = images
        .iter()
        .map(|ep| linalg::trace(&(ep.adjoint() * ep)).re / CodeSpec::DIMENSION as f64)
        .collect();
    let mut max_residual = 0.0f64;
    for (i, ei) in images.iter().enumerate() {
        for (j, ej) in images.iter().enumerate() {
            let block = ei.adjoint() * ej;
            let expected = if i == j {
                p * c(coefficients[i])
            } else {
                Matrix::zeros(p.nrows(), p.ncols())
            };
            max_residual = max_residual.max(linalg::max_abs_diff(&block, &expected));
        }
    }
    Ok(KlReport {
        code: code.name.clone(),
        eta: errors.eta(),
        include_no_loss,
        labels: ops.iter().map(|(l, _)| *l).collect(),
        coefficients,
        max_residual,
        tolerance: tol,
        pass: max_residual <= tol,
    })
}

/// Probability of losing exactly one photon from each mode,
/// `c_i = (1−η)/d · Tr(P a_i†a_i η^{N−1})`.
pub fn error_probabilities(code: &CodeSpec, eta: f64) -> Result<Vec<f64>> {
    check_transmissivity(eta)?;
    let basis = code.basis;
    let weight = fock::function_of_number(basis, |n| eta.powi(n as i32 - 1));
    let p = code.projector.matrix();
    (1..=basis.modes())
        .map(|mode| {
            let n_i = fock::mode_number_operator(basis, mode)?;
            let tr = linalg::trace(&(p * n_i.matrix() * weight.matrix())).re;
            Ok((1.0 - eta) / CodeSpec::DIMENSION as f64 * tr)
        })
        .collect()
}

/// Image of the code space under the loss of one photon from `mode`.
#[derive(Debug, Clone)]
pub struct ErrorSpace {
    pub mode: usize,
    /// `|0^{(i)}⟩`, `|1^{(i)}⟩`
    pub states: [StateVector; 2],
    pub projector: Operator,
}

#[derive(Debug, Clone)]
pub struct ErrorSpaces {
    spaces: Vec<ErrorSpace>,
}

impl ErrorSpaces {
    pub fn spaces(&self) -> &[ErrorSpace] {
        &self.spaces
    }

    /// Error space of `mode` (1-based).
    pub fn space(&self, mode: usize) -> &ErrorSpace {
        &self.spaces[mode - 1]
    }

    pub fn len(&self) -> usize {
        self.spaces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spaces.is_empty()
    }

    /// `Σ_i P^{(i)}`
    pub fn total_projector(&self) -> Matrix {
        let d = self.spaces[0].projector.basis().dimension();
        self.spaces
            .iter()
            .fold(Matrix::zeros(d, d), |acc, s| acc + s.projector.matrix())
    }
}

/// Transmissivity at which [`error_spaces_for`] evaluates the loss
/// operators. The normalised images do not depend on it for codes whose
/// codeword images are number states or number eigenspaces.
pub const REFERENCE_ETA: f64 = 0.5;

/// Normalised error states `|j^{(i)}⟩ = E_i|j⟩ / ‖E_i|j⟩‖` and their
/// projectors.
///
/// Only the off-diagonal part of the Knill–Laflamme condition is required:
/// the images of the two codewords under all single-loss operators must be
/// mutually orthogonal and orthogonal to the code space. Codes whose
/// codewords lose photons with unequal probability (the single-mode code)
/// are accepted; their distortion shows up in the chain simulation.
pub fn error_spaces(code: &CodeSpec, errors: &ErrorFamily, tol: f64) -> Result<ErrorSpaces> {
    if errors.basis() != code.basis {
        return Err(Error::BasisMismatch);
    }
    let residual = off_diagonal_kl_residual(code, errors);
    if residual > tol {
        return Err(Error::KnillLaflamme(residual));
    }
    let mut spaces = Vec::with_capacity(code.modes());
    let mut all_states = Vec::with_capacity(2 * code.modes() + 2);
    for mode in 1..=code.modes() {
        let e = errors.single_loss(mode);
        let mut pair = Vec::with_capacity(2);
        for j in 0..2 {
            let image = e.apply(&code.logical[j])?;
            if image.norm() <= tol {
                return Err(Error::InvalidCode(format!(
                    "codeword {j} carries no photons in mode {mode}"
                )));
            }
            pair.push(image.normalized()?);
        }
        let states: [StateVector; 2] = [pair[0].clone(), pair[1].clone()];
        let projector = fock::projector_from_states(&states, tol)?;
        all_states.extend(pair);
        spaces.push(ErrorSpace {
            mode,
            states,
            projector,
        });
    }
    // error spaces of different modes and the code space are mutually orthogonal
    all_states.extend(code.logical.iter().cloned());
    fock::projector_from_states(&all_states, tol)
        .map_err(|_| Error::InvalidCode("error spaces overlap the code space".into()))?;
    Ok(ErrorSpaces { spaces })
}

/// Largest `|⟨a|E_i† E_j|b⟩|` over all pairs `(i, a) ≠ (j, b)`.
fn off_diagonal_kl_residual(code: &CodeSpec, errors: &ErrorFamily) -> f64 {
    let images: Vec<(usize, usize, StateVector)> = (1..=code.modes())
        .flat_map(|mode| (0..2).map(move |j| (mode, j)))
        .map(|(mode, j)| {
            let img = errors
                .single_loss(mode)
                .apply(&code.logical[j])
                .expect("same basis");
            (mode, j, img)
        })
        .collect();
    let mut worst = 0.0f64;
    for (x, (mi, ja, a)) in images.iter().enumerate() {
        for (mj, jb, b) in images.iter().skip(x + 1) {
            debug_assert!((mi, ja) != (mj, jb));
            worst = worst.max(a.inner(b).norm());
        }
    }
    worst
}

/// [`error_spaces`] at [`REFERENCE_ETA`] with the default tolerance.
pub fn error_spaces_for(code: &CodeSpec) -> Result<ErrorSpaces> {
    let errors = ErrorFamily::new(code.basis, REFERENCE_ETA)?;
    error_spaces(code, &errors, 1e-10)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ONE;
    use crate::loss::build_loss_channel;

    fn all_codes() -> Vec<CodeSpec> {
        BuiltinCode::ALL
            .into_iter()
            .map(CodeSpec::builtin)
            .collect()
    }

    #[test]
    fn builtin_codewords() {
        let three = CodeSpec::builtin(BuiltinCode::ThreeMode);
        assert_eq!(
            three.logical(0),
            &StateVector::fock(three.basis(), &[1, 1, 1]).unwrap()
        );
        let a = three.logical(1).amplitude(&[3, 0, 0]).unwrap();
        assert!((a.re - 1.0 / 3f64.sqrt()).abs() < 1e-15);
        let two = CodeSpec::builtin(BuiltinCode::TwoMode);
        assert_eq!(
            two.logical(1),
            &StateVector::fock(two.basis(), &[2, 2]).unwrap()
        );
        assert_eq!(two.basis().cutoff(), 4);
        let one = CodeSpec::builtin(BuiltinCode::SingleMode);
        assert_eq!(one.logical(0).inner(one.logical(1)), ZERO);
        for code in all_codes() {
            assert!((code.projector().trace() - c(2.0)).norm() < 1e-12);
            assert!(code.projector().idempotency_residual() < 1e-12);
            for s in code.logical_states() {
                assert!(s.is_normalized(1e-12));
            }
        }
        assert!(matches!(
            CodeSpec::from_name("five-mode"),
            Err(Error::UnknownCode(_))
        ));
        assert_eq!(CodeSpec::from_name("two-mode").unwrap().modes(), 2);
    }

    #[test]
    fn number_eigenspaces() {
        assert_eq!(
            CodeSpec::builtin(BuiltinCode::ThreeMode).photon_number(),
            Some(3)
        );
        assert_eq!(
            CodeSpec::builtin(BuiltinCode::TwoMode).photon_number(),
            Some(4)
        );
        assert_eq!(
            CodeSpec::builtin(BuiltinCode::SingleMode).photon_number(),
            None
        );
    }

    #[test]
    fn kl_single_loss_passes_for_multimode_codes() {
        for code in all_codes().into_iter().skip(1) {
            for eta in [0.1, 0.5, 0.93] {
                let errs = ErrorFamily::new(code.basis(), eta).unwrap();
                let r = kl_check(&code, &errs, false, 1e-10).unwrap();
                assert!(r.pass, "{} at {eta}: {}", code.name(), r.max_residual);
                assert!(r.max_residual <= 1e-12);
                assert_eq!(r.labels, (1..=code.modes()).collect::<Vec<_>>());
            }
        }
    }

    #[test]
    fn single_mode_code_loses_photons_unevenly() {
        // ⟨1|E†E|1⟩ = 1−η but ⟨3|E†E|3⟩ = 3(1−η)η²: the diagonal condition only
        // holds where 3η² = 1.
        let one = CodeSpec::builtin(BuiltinCode::SingleMode);
        for eta in [0.1f64, 0.5, 0.93] {
            let r = kl_check(
                &one,
                &ErrorFamily::new(one.basis(), eta).unwrap(),
                false,
                1e-10,
            )
            .unwrap();
            let expected = (1.0 - eta) * (1.0 - 3.0 * eta * eta).abs() / 2.0;
            assert!((r.max_residual - expected).abs() < 1e-14);
            assert!(!r.pass);
        }
        let eta = (1.0f64 / 3.0).sqrt();
        let r = kl_check(
            &one,
            &ErrorFamily::new(one.basis(), eta).unwrap(),
            false,
            1e-10,
        )
        .unwrap();
        assert!(r.pass);
    }

    #[test]
    fn kl_with_no_loss_operator() {
        let eta: f64 = 0.7;
        let two = CodeSpec::builtin(BuiltinCode::TwoMode);
        let r = kl_check(
            &two,
            &ErrorFamily::new(two.basis(), eta).unwrap(),
            true,
            1e-10,
        )
        .unwrap();
        assert!(r.pass);
        // E₀ acts as √η⁴ on P
        assert!((r.coefficients[0] - eta.powi(4)).abs() < 1e-14);

        let one = CodeSpec::builtin(BuiltinCode::SingleMode);
        let r = kl_check(
            &one,
            &ErrorFamily::new(one.basis(), eta).unwrap(),
            true,
            1e-10,
        )
        .unwrap();
        assert!(!r.pass);
        // P E₀†E₀ P = η|1⟩⟨1| + η³|3⟩⟨3|, fitted c₀ = (η + η³)/2
        assert!((r.max_residual - (eta - eta.powi(3)) / 2.0).abs() < 1e-14);
    }

    #[test]
    fn error_family_matches_loss_channel() {
        for code in all_codes() {
            let b = code.basis();
            let eta = 0.42;
            let errs = ErrorFamily::new(b, eta).unwrap();
            let ch = build_loss_channel(b, eta).unwrap();
            let mut label = vec![0; b.modes()];
            assert!(errs.no_loss().max_abs_diff(ch.op(&label).unwrap()) <= 1e-12);
            for mode in 1..=b.modes() {
                label.iter_mut().for_each(|k| *k = 0);
                label[mode - 1] = 1;
                assert!(errs.single_loss(mode).max_abs_diff(ch.op(&label).unwrap()) <= 1e-12);
            }
        }
    }

    #[test]
    fn error_probability_examples() {
        let three = CodeSpec::builtin(BuiltinCode::ThreeMode);
        for ci in error_probabilities(&three, 0.9).unwrap() {
            assert!((ci - 0.081).abs() < 1e-14);
        }
        let two = CodeSpec::builtin(BuiltinCode::TwoMode);
        for eta in [0.3f64, 0.8] {
            for ci in error_probabilities(&two, eta).unwrap() {
                assert!((ci - 2.0 * (1.0 - eta) * eta.powi(3)).abs() < 1e-14);
            }
        }
        for code in all_codes() {
            assert!(error_probabilities(&code, 1.0)
                .unwrap()
                .iter()
                .all(|&x| x == 0.0));
            assert!(error_probabilities(&code, 0.0).is_err());
        }
    }

    #[test]
    fn error_probabilities_equal_trace_of_error_image() {
        // c_i = Tr(E_i P E_i†) / d
        for code in all_codes() {
            for eta in [0.2, 0.65, 0.99] {
                let errs = ErrorFamily::new(code.basis(), eta).unwrap();
                let cs = error_probabilities(&code, eta).unwrap();
                for (mode, ci) in (1..=code.modes()).zip(cs) {
                    let e = errs.single_loss(mode).matrix();
                    let direct =
                        linalg::trace(&(e * code.projector().matrix() * e.adjoint())).re / 2.0;
                    assert!((ci - direct).abs() <= 1e-12);
                }
            }
        }
    }

    #[test]
    fn error_space_examples() {
        let one = CodeSpec::builtin(BuiltinCode::SingleMode);
        let es = error_spaces_for(&one).unwrap();
        assert_eq!(
            es.space(1).states[0],
            StateVector::fock(one.basis(), &[0]).unwrap()
        );
        assert_eq!(
            es.space(1).states[1],
            StateVector::fock(one.basis(), &[2]).unwrap()
        );

        let three = CodeSpec::builtin(BuiltinCode::ThreeMode);
        let es = error_spaces_for(&three).unwrap();
        let s = &es.space(1).states[0];
        assert!(s.max_abs_diff(&StateVector::fock(three.basis(), &[0, 1, 1]).unwrap()) < 1e-15);
    }

    #[test]
    fn error_spaces_are_orthogonal_and_eta_independent() {
        for code in all_codes() {
            let es = error_spaces_for(&code).unwrap();
            let p = code.projector().matrix();
            let mut states: Vec<&StateVector> = Vec::new();
            for space in es.spaces() {
                assert!(linalg::max_abs(&(p * space.projector.matrix())) <= 1e-10);
                states.extend(space.states.iter());
            }
            for (i, a) in states.iter().enumerate() {
                for (j, b) in states.iter().enumerate() {
                    let expected = if i == j { ONE } else { ZERO };
                    assert!((a.inner(b) - expected).norm() <= 1e-10);
                }
            }
            for eta in [0.05, 0.9] {
                let other =
                    error_spaces(&code, &ErrorFamily::new(code.basis(), eta).unwrap(), 1e-10)
                        .unwrap();
                for (x, y) in es.spaces().iter().zip(other.spaces()) {
                    assert!(x.states[0].max_abs_diff(&y.states[0]) < 1e-12);
                    assert!(x.states[1].max_abs_diff(&y.states[1]) < 1e-12);
                }
            }
        }
    }

    #[test]
    fn error_spaces_reject_non_correctable_code() {
        // |0⟩ and |1⟩ in one mode: losing a photon from |1⟩ lands on |0⟩.
        let b = FockBasis::new(1, 2).unwrap();
        let code = CodeSpec::new(
            "bad",
            StateVector::fock(b, &[0]).unwrap(),
            StateVector::fock(b, &[2]).unwrap(),
            1e-12,
        )
        .unwrap();
        assert!(matches!(
            error_spaces_for(&code),
            Err(Error::InvalidCode(_))
        ));

        // a|2⟩ ∝ |1⟩ lands back in the code space
        let b = FockBasis::new(1, 2).unwrap();
        let code = CodeSpec::new(
            "bad2",
            StateVector::fock(b, &[1]).unwrap(),
            StateVector::fock(b, &[2]).unwrap(),
            1e-12,
        )
        .unwrap();
        assert!(matches!(
            error_spaces_for(&code),
            Err(Error::InvalidCode(_))
        ));

        // a₁|1,1⟩ = |0,1⟩ and a₂|0,2⟩ ∝ |0,1⟩ collide
        let b = FockBasis::new(2, 2).unwrap();
        let code = CodeSpec::new(
            "bad3",
            StateVector::fock(b, &[1, 1]).unwrap(),
            StateVector::fock(b, &[0, 2]).unwrap(),
            1e-12,
        )
        .unwrap();
        assert!(matches!(
            error_spaces_for(&code),
            Err(Error::KnillLaflamme(_))
        ));
    }

    #[test]
    fn code_file_round_trip_and_validation() {
        let three = CodeSpec::builtin(BuiltinCode::ThreeMode);
        let file = three.to_file();
        let json = serde_json::to_string(&file).unwrap();
        let back: CodeFile = serde_json::from_str(&json).unwrap();
        let loaded = back.into_code("x", 1e-12).unwrap();
        assert_eq!(loaded.name(), "three-mode");
        assert!(loaded.projector().max_abs_diff(three.projector()) == 0.0);

        let overlapping = r#"{"modes":1,"cutoff":3,
            "logical0":[{"occupation":[1],"re":1.0}],
            "logical1":[{"occupation":[1],"re":0.1},{"occupation":[3],"re":0.99498743710662}]}"#;
        let f: CodeFile = serde_json::from_str(overlapping).unwrap();
        assert!(matches!(
            f.into_code("o", 1e-12),
            Err(Error::NotOrthonormal { .. })
        ));

        let too_high = r#"{"modes":1,"cutoff":4,
            "logical0":[{"occupation":[1],"re":1.0}],
            "logical1":[{"occupation":[5],"re":1.0}]}"#;
        let f: CodeFile = serde_json::from_str(too_high).unwrap();
        assert!(matches!(
            f.into_code("h", 1e-12),
            Err(Error::InvalidCode(_))
        ));

        let unknown = r#"{"modes":1,"cutoff":4,"extra":1,
            "logical0":[],"logical1":[]}"#;
        assert!(serde_json::from_str::<CodeFile>(unknown).is_err());
    }
}
