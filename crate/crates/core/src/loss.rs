//! Pure-loss bosonic channel.
//!
//! Three equivalent descriptions are provided: the Kraus form used on every
//! production path, the beamsplitter (Stinespring) dilation and the
//! amplitude-damping master equation. They agree at
//! `η = cos²φ = exp(−γt)`; the latter two exist to cross-check the first.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{self, DensityMatrix, FockBasis, Operator};
use crate::linalg::{self, c, Matrix, SparseOp, C64, ZERO};

/// Validates a transmissivity in `(0, 1]`.
pub fn check_transmissivity(eta: f64) -> Result<f64> {
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(Error::ParameterOutOfRange {
            name: "eta",
            value: eta,
            range: "(0, 1]",
        });
    }
    Ok(eta)
}

/// A channel given by a finite list of Kraus operators.
#[derive(Debug, Clone)]
pub struct KrausChannel {
    basis: FockBasis,
    ops: Vec<Operator>,
    labels: Vec<Vec<usize>>,
    sparse: Vec<SparseOp>,
}

impl KrausChannel {
    pub fn new(basis: FockBasis, ops: Vec<Operator>, labels: Vec<Vec<usize>>) -> Result<Self> {
        if ops.len() != labels.len() {
            return Err(Error::DimensionMismatch {
                expected: ops.len(),
                actual: labels.len(),
            });
        }
        if ops.iter().any(|op| op.basis() != basis) {
            return Err(Error::BasisMismatch);
        }
        let sparse = ops
            .iter()
            .map(|op| SparseOp::from_dense(op.matrix()))
            .collect();
        Ok(Self {
            basis,
            ops,
            labels,
            sparse,
        })
    }

    pub fn basis(&self) -> FockBasis {
        self.basis
    }

    pub fn ops(&self) -> &[Operator] {
        &self.ops
    }

    pub fn labels(&self) -> &[Vec<usize>] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    /// Kraus operator carrying `label`, if present.
    pub fn op(&self, label: &[usize]) -> Option<&Operator> {
        self.labels
            .iter()
            .position(|l| l == label)
            .map(|i| &self.ops[i])
    }

    /// `max |Σ A†A − 1|`
    pub fn completeness_residual(&self) -> f64 {
        let d = self.basis.dimension();
        let mut sum = Matrix::zeros(d, d);
        for op in &self.ops {
            sum += op.matrix().adjoint() * op.matrix();
        }
        linalg::max_abs_diff(&sum, &Matrix::identity(d, d))
    }

    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if rho.basis() != self.basis {
            return Err(Error::BasisMismatch);
        }
        DensityMatrix::new_unchecked(self.basis, self.apply_matrix(rho.matrix()))
    }

    /// `Σ A X A†` for an arbitrary (not necessarily Hermitian) square block.
    pub fn apply_matrix(&self, x: &Matrix) -> Matrix {
        let d = self.basis.dimension();
        assert_eq!(x.nrows(), d, "block dimension mismatch");
        let mut out = Matrix::zeros(d, d);
        for op in &self.sparse {
            op.conjugate_add(x, &mut out);
        }
        out
    }

    /// `next ∘ self`: Kraus operators `B_j A_k`, labels concatenated as
    /// `[k…, j…]`. Products that vanish identically are dropped.
    pub fn then(&self, next: &KrausChannel) -> Result<KrausChannel> {
        if next.basis != self.basis {
            return Err(Error::BasisMismatch);
        }
        let mut ops = Vec::new();
        let mut labels = Vec::new();
        for (a, la) in self.ops.iter().zip(&self.labels) {
            for (b, lb) in next.ops.iter().zip(&next.labels) {
                let prod = b.compose(a)?;
                if prod.matrix().iter().all(|z| *z == ZERO) {
                    continue;
                }
                ops.push(prod);
                labels.push(la.iter().chain(lb).copied().collect());
            }
        }
        KrausChannel::new(self.basis, ops, labels)
    }
}

/// Single-mode loss operator `A_k = (1−η)^{k/2}/√k! · √η^N a^k` on a
/// `(cutoff+1)`-dimensional space.
fn single_mode_loss_operator(cutoff: usize, eta: f64, k: usize) -> Matrix {
    let d = cutoff + 1;
    let mut m = Matrix::zeros(d, d);
    let log_fact = |n: usize| (1..=n).map(|j| (j as f64).ln()).sum::<f64>();
    for n in k..d {
        // ⟨n−k| A_k |n⟩ = (1−η)^{k/2} √η^{n−k} √(n! / ((n−k)! k!))
        let binom = (0.5 * (log_fact(n) - log_fact(n - k) - log_fact(k))).exp();
        let value = (1.0 - eta).powf(k as f64 / 2.0) * eta.sqrt().powi((n - k) as i32) * binom;
        m[(n - k, n)] = c(value);
    }
    m
}

/// Multimode pure-loss channel as the tensor product of single-mode Kraus
/// sets. Each operator is labelled by its loss multi-index `(k₁, …, k_M)`.
/// At `η = 1` only the identity survives.
pub fn build_loss_channel(basis: FockBasis, eta: f64) -> Result<KrausChannel> {
    check_transmissivity(eta)?;
    let cutoff = basis.cutoff();
    let max_k = if eta == 1.0 { 0 } else { cutoff };
    let single: Vec<Matrix> = (0..=max_k)
        .map(|k| single_mode_loss_operator(cutoff, eta, k))
        .collect();

    let loss_basis = FockBasis::new(basis.modes(), max_k)?;
    let mut ops = Vec::with_capacity(loss_basis.dimension());
    let mut labels = Vec::with_capacity(loss_basis.dimension());
    for label in loss_basis.occupations() {
        let mut m = Matrix::identity(1, 1);
        for &k in &label {
            m = linalg::kron(&m, &single[k]);
        }
        ops.push(Operator::new(basis, m)?);
        labels.push(label);
    }
    KrausChannel::new(basis, ops, labels)
}

/// Loss channel applied through a beamsplitter with a vacuum environment
/// mode per system mode, `U = exp[iφ(a†b + ab†)]`, environment cutoff equal
/// to the system cutoff.
pub fn stinespring_loss(rho: &DensityMatrix, phi: f64) -> Result<DensityMatrix> {
    stinespring_loss_with_env(rho, phi, rho.basis().cutoff())
}

/// As [`stinespring_loss`] with an explicit environment cutoff, which must
/// be able to hold every photon a mode can lose.
pub fn stinespring_loss_with_env(
    rho: &DensityMatrix,
    phi: f64,
    env_cutoff: usize,
) -> Result<DensityMatrix> {
    let sys = rho.basis();
    if env_cutoff < sys.cutoff() {
        return Err(Error::EnvironmentTooSmall {
            env: env_cutoff,
            system: sys.cutoff(),
        });
    }
    let cutoff = env_cutoff;
    let wide = FockBasis::new(sys.modes(), cutoff)?;
    let mut state = change_cutoff(rho.matrix(), sys, wide);

    // Beamsplitter on one system mode and one environment mode.
    let pair = FockBasis::new(2, cutoff)?;
    let a = fock::annihilation(pair, 1)?;
    let b = fock::annihilation(pair, 2)?;
    let generator = (a.dagger().compose(&b)?.add(&a.compose(&b.dagger())?)?).scale(c(phi));
    let pair_unitary = linalg::hermitian_function(generator.matrix(), |x| C64::new(0.0, x).exp());

    let joint = FockBasis::new(sys.modes() + 1, cutoff)?;
    let env_dim = cutoff + 1;
    for mode in 1..=sys.modes() {
        let u = embed_pair_operator(joint, mode, sys.modes() + 1, &pair_unitary)?;
        let mut vac = Matrix::zeros(env_dim, env_dim);
        vac[(0, 0)] = c(1.0);
        let with_env = linalg::kron(&state, &vac);
        let evolved = u.right_mul_adjoint(&u.left_mul(&with_env));
        state = linalg::partial_trace(&evolved, &[wide.dimension(), env_dim], &[1])?;
    }
    DensityMatrix::new_unchecked(sys, change_cutoff(&state, wide, sys))
}

/// Re-index an operator between two bases with the same number of modes,
/// dropping entries that do not fit the target cutoff.
fn change_cutoff(m: &Matrix, from: FockBasis, to: FockBasis) -> Matrix {
    if from == to {
        return m.clone();
    }
    let map: Vec<Option<usize>> = (0..from.dimension())
        .map(|i| to.index_of(&from.occupation(i)).ok())
        .collect();
    let mut out = Matrix::zeros(to.dimension(), to.dimension());
    for (i, ti) in map.iter().enumerate() {
        for (j, tj) in map.iter().enumerate() {
            if let (Some(ti), Some(tj)) = (ti, tj) {
                out[(*ti, *tj)] = m[(i, j)];
            }
        }
    }
    out
}

/// Lift a two-mode operator (first mode slow) acting on modes `first` and
/// `second` (1-based) of `joint` into a sparse operator on the full space.
fn embed_pair_operator(
    joint: FockBasis,
    first: usize,
    second: usize,
    pair_op: &Matrix,
) -> Result<SparseOp> {
    let base = joint.cutoff() + 1;
    let d = joint.dimension();
    let mut m = Matrix::zeros(d, d);
    for col in 0..d {
        let occ = joint.occupation(col);
        let pair_col = occ[first - 1] * base + occ[second - 1];
        for pair_row in 0..base * base {
            let v = pair_op[(pair_row, pair_col)];
            // eigen-decomposition round-off on entries that are exactly zero
            if v.norm() < 1e-15 {
                continue;
            }
            let mut out = occ.clone();
            out[first - 1] = pair_row / base;
            out[second - 1] = pair_row % base;
            m[(joint.index_of(&out)?, col)] = v;
        }
    }
    Ok(SparseOp::from_dense(&m))
}

/// Parameters of the amplitude-damping master equation
/// `ρ̇ = (γ/2) Σ_i (2 a_i ρ a_i† − {a_i†a_i, ρ})`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LindbladParams {
    pub gamma: f64,
    pub time: f64,
    pub step: f64,
}

impl LindbladParams {
    pub fn new(gamma: f64, time: f64, step: f64) -> Result<Self> {
        if !(gamma >= 0.0 && gamma.is_finite()) {
            return Err(Error::ParameterOutOfRange {
                name: "gamma",
                value: gamma,
                range: "[0, inf)",
            });
        }
        if !(time >= 0.0 && time.is_finite()) {
            return Err(Error::ParameterOutOfRange {
                name: "time",
                value: time,
                range: "[0, inf)",
            });
        }
        if !(step > 0.0 && step.is_finite()) {
            return Err(Error::ParameterOutOfRange {
                name: "step",
                value: step,
                range: "(0, inf)",
            });
        }
        Ok(Self { gamma, time, step })
    }

    /// Unit loss rate, `t = −ln η`, and the default step `γ·step = 1e−3`.
    pub fn for_transmissivity(eta: f64) -> Result<Self> {
        check_transmissivity(eta)?;
        Self::new(1.0, -eta.ln(), 1e-3)
    }
}

/// Fixed-step RK4 integration of the loss master equation. The run is
/// repeated at half the step; if the two results differ by more than
/// `1e−8` anywhere the step is rejected. The finer result is returned.
pub fn lindblad_evolve(rho: &DensityMatrix, params: &LindbladParams) -> Result<DensityMatrix> {
    let basis = rho.basis();
    let jumps: Vec<SparseOp> = (1..=basis.modes())
        .map(|m| fock::annihilation(basis, m).map(|a| SparseOp::from_dense(a.matrix())))
        .collect::<Result<_>>()?;
    let photons: Vec<f64> = (0..basis.dimension())
        .map(|i| basis.total_photons(i) as f64)
        .collect();
    let half_gamma = 0.5 * params.gamma;

    let rhs = |x: &Matrix| -> Matrix {
        let d = x.nrows();
        let mut out = Matrix::zeros(d, d);
        for a in &jumps {
            a.conjugate_add(x, &mut out);
        }
        out *= c(2.0);
        for i in 0..d {
            for j in 0..d {
                out[(i, j)] -= x[(i, j)] * (photons[i] + photons[j]);
            }
        }
        out * c(half_gamma)
    };

    let integrate = |step: f64| -> Matrix {
        let mut x = rho.matrix().clone();
        if params.time == 0.0 || params.gamma == 0.0 {
            return x;
        }
        let n = (params.time / step).ceil().max(1.0) as usize;
        let h = params.time / n as f64;
        for _ in 0..n {
            let k1 = rhs(&x);
            let k2 = rhs(&(&x + &k1 * c(h / 2.0)));
            let k3 = rhs(&(&x + &k2 * c(h / 2.0)));
            let k4 = rhs(&(&x + &k3 * c(h)));
            x += (k1 + k2 * c(2.0) + k3 * c(2.0) + k4) * c(h / 6.0);
        }
        x
    };

    let coarse = integrate(params.step);
    let fine = integrate(params.step / 2.0);
    let change = linalg::max_abs_diff(&coarse, &fine);
    if change > 1e-8 {
        return Err(Error::StepTooLarge(change));
    }
    DensityMatrix::new_unchecked(basis, fine)
}

/// Maximal entrywise disagreement between the channel representations on a
/// seeded battery of random density matrices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceReport {
    pub eta: f64,
    pub modes: usize,
    pub cutoff: usize,
    pub states: usize,
    pub seed: u64,
    pub kraus_vs_stinespring: f64,
    pub kraus_vs_lindblad: f64,
}

pub fn representation_equivalence_report(
    basis: FockBasis,
    eta: f64,
    states: usize,
    seed: u64,
) -> Result<EquivalenceReport> {
    let kraus = build_loss_channel(basis, eta)?;
    let phi = eta.sqrt().acos();
    let params = LindbladParams::for_transmissivity(eta)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut kvs = 0.0f64;
    let mut kvl = 0.0f64;
    for _ in 0..states {
        let rho = DensityMatrix::random(basis, &mut rng);
        let out = kraus.apply(&rho)?;
        kvs = kvs.max(out.max_abs_diff(&stinespring_loss(&rho, phi)?));
        kvl = kvl.max(out.max_abs_diff(&lindblad_evolve(&rho, &params)?));
    }
    Ok(EquivalenceReport {
        eta,
        modes: basis.modes(),
        cutoff: basis.cutoff(),
        states,
        seed,
        kraus_vs_stinespring: kvs,
        kraus_vs_lindblad: kvl,
    })
}
