//! Key rates of repeater chains over lossy fibre.
//!
//! A chain is a sequence of segments of length `L`; each segment applies
//! pure loss at `η = η_c·η_s` (coupling times fibre transmissivity) followed
//! by the recovery channel of the repeater. For codes whose code space has a
//! fixed total photon number the state stays exactly in code space with
//! probability `p_s` per segment; other codes are simulated explicitly and
//! scored with the six-state hashing rate.

use std::f64::consts::LN_2;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::code::{self, CodeSpec};
use crate::error::{Error, Result};
use crate::linalg::{self, c, Matrix, Vector};
use crate::loss::{self, KrausChannel};
use crate::repeater;

/// Fibre attenuation in dB/km.
pub const DEFAULT_ALPHA: f64 = 0.2;
/// Segment ceiling of the finite-distance beat search.
pub const MAX_SEGMENTS: usize = 10_000;
/// Rates at or below this value count as zero.
pub const RATE_FLOOR: f64 = 1e-12;
/// Search interval for the repeater separation in km.
pub const SEPARATION_RANGE: (f64, f64) = (0.1, 50.0);
/// Absolute tolerance of the separation search in km.
pub const SEPARATION_TOL: f64 = 0.01;

/// Secret-key capacity of a bare pure-loss channel, `log₂(1/(1−η))`.
/// Returns `+∞` at `η = 1`.
pub fn repeaterless_bound(eta: f64) -> Result<f64> {
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(Error::ParameterOutOfRange {
            name: "eta",
            value: eta,
            range: "(0, 1]",
        });
    }
    if eta == 1.0 {
        return Ok(f64::INFINITY);
    }
    Ok(-(-eta).ln_1p() / LN_2)
}

/// Transmissivity `10^{−αx/10}` of `x` km of fibre.
pub fn fibre_transmissivity(x_km: f64, alpha: f64) -> f64 {
    10f64.powf(-alpha * x_km / 10.0)
}

/// Repeaterless bound over `x` km of fibre with attenuation `alpha` dB/km.
pub fn repeaterless_bound_km(x_km: f64, alpha: f64) -> Result<f64> {
    check_positive("distance_km", x_km)?;
    check_positive("alpha", alpha)?;
    repeaterless_bound(fibre_transmissivity(x_km, alpha))
}

fn check_positive(name: &'static str, value: f64) -> Result<f64> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(Error::ParameterOutOfRange {
            name,
            value,
            range: "(0, ∞)",
        })
    }
}

/// One chain segment: coupling efficiency, repeater separation and fibre
/// attenuation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SegmentModel {
    eta_c: f64,
    separation_km: f64,
    alpha: f64,
}

impl SegmentModel {
    pub fn new(eta_c: f64, separation_km: f64, alpha: f64) -> Result<Self> {
        if !(eta_c > 0.0 && eta_c <= 1.0) {
            return Err(Error::ParameterOutOfRange {
                name: "eta_c",
                value: eta_c,
                range: "(0, 1]",
            });
        }
        check_positive("separation_km", separation_km)?;
        check_positive("alpha", alpha)?;
        Ok(Self {
            eta_c,
            separation_km,
            alpha,
        })
    }

    pub fn eta_c(&self) -> f64 {
        self.eta_c
    }

    pub fn separation_km(&self) -> f64 {
        self.separation_km
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Fibre transmissivity of one segment.
    pub fn eta_s(&self) -> f64 {
        fibre_transmissivity(self.separation_km, self.alpha)
    }

    /// Total transmissivity of one segment.
    pub fn eta(&self) -> f64 {
        self.eta_c * self.eta_s()
    }

    pub fn distance_km(&self, segments: usize) -> f64 {
        segments as f64 * self.separation_km
    }
}

/// Success probability `η^n + Σ_i c_i(η)` from the single-loss
/// probabilities of a code with total photon number `n`.
pub fn success_probability(code: &CodeSpec, eta: f64) -> Result<f64> {
    let n = code.photon_number().ok_or(Error::NotNumberEigenspace)?;
    let singles: f64 = code::error_probabilities(code, eta)?.iter().sum();
    Ok(eta.powi(n as i32) + singles)
}

/// `p_s(η_c·η_s) > η_s`: the chain rate decays more slowly than the bound.
pub fn asymptotic_beat(code: &CodeSpec, model: &SegmentModel) -> Result<bool> {
    Ok(success_probability(code, model.eta())? > model.eta_s())
}

/// Loss followed by recovery on the system space.
pub fn segment_channel(code: &CodeSpec, model: &SegmentModel) -> Result<KrausChannel> {
    RateContext::new(code.clone())?.segment_channel(model)
}

pub fn simulate_chain(
    code: &CodeSpec,
    model: &SegmentModel,
    segments: usize,
) -> Result<ChainState> {
    RateContext::new(code.clone())?.simulate_chain(model, segments)
}

pub fn chain_rate_per_mode(
    code: &CodeSpec,
    model: &SegmentModel,
    segments: usize,
    per_mode: bool,
) -> Result<f64> {
    RateContext::new(code.clone())?.chain_rate(model, segments, per_mode)
}

/// A code together with its recovery channel, reused across many segment
/// models.
#[derive(Debug, Clone)]
pub struct RateContext {
    code: CodeSpec,
    recovery: KrausChannel,
    photon_number: Option<usize>,
}

impl RateContext {
    pub fn new(code: CodeSpec) -> Result<Self> {
        let recovery = repeater::recovery_channel(&code)?;
        let photon_number = code.photon_number();
        Ok(Self {
            code,
            recovery,
            photon_number,
        })
    }

    pub fn code(&self) -> &CodeSpec {
        &self.code
    }

    pub fn modes(&self) -> usize {
        self.code.modes()
    }

    pub fn photon_number(&self) -> Option<usize> {
        self.photon_number
    }

    pub fn recovery(&self) -> &KrausChannel {
        &self.recovery
    }

    /// `p_s = η^n + n(1−η)η^{n−1}`: the single-loss probabilities of a
    /// number-eigenspace code sum to `(1−η)η^{n−1}·Tr(PN)/2`.
    pub fn success_probability(&self, eta: f64) -> Result<f64> {
        let n = self.photon_number.ok_or(Error::NotNumberEigenspace)?;
        loss::check_transmissivity(eta)?;
        if n == 0 {
            return Ok(1.0);
        }
        let tail = eta.powi(n as i32 - 1);
        Ok(tail * eta + n as f64 * (1.0 - eta) * tail)
    }

    pub fn asymptotic_beat(&self, model: &SegmentModel) -> Result<bool> {
        Ok(self.success_probability(model.eta())? > model.eta_s())
    }

    pub fn segment_channel(&self, model: &SegmentModel) -> Result<KrausChannel> {
        loss::build_loss_channel(self.code.basis(), model.eta())?.then(&self.recovery)
    }

    pub fn simulate_chain(&self, model: &SegmentModel, segments: usize) -> Result<ChainState> {
        let channel = self.segment_channel(model)?;
        let mut state = ChainState::initial(&self.code);
        for _ in 0..segments {
            state.step(&channel)?;
        }
        Ok(state)
    }

    /// Per-segment record of a simulated chain for `n = 1..=segments`.
    pub fn chain_samples(
        &self,
        model: &SegmentModel,
        segments: usize,
        per_mode: bool,
    ) -> Result<Vec<ChainSample>> {
        let channel = self.segment_channel(model)?;
        let mut state = ChainState::initial(&self.code);
        let scale = self.rate_scale(per_mode);
        let mut out = Vec::with_capacity(segments);
        for n in 1..=segments {
            state.step(&channel)?;
            let weight = state.in_code_weight();
            let r = state.six_state_rate();
            out.push(ChainSample {
                segments: n,
                distance_km: model.distance_km(n),
                in_code_weight: weight,
                six_state_rate: r,
                rate_per_mode: weight * r * scale,
            });
        }
        Ok(out)
    }

    /// Key rate after `segments` segments: `p_s^n` for number-eigenspace
    /// codes, `p_in · r_6` from the simulated state otherwise; divided by the
    /// mode count when `per_mode`.
    pub fn chain_rate(&self, model: &SegmentModel, segments: usize, per_mode: bool) -> Result<f64> {
        let scale = self.rate_scale(per_mode);
        if self.photon_number.is_some() {
            let ps = self.success_probability(model.eta())?;
            return Ok(ps.powi(segments as i32) * scale);
        }
        let state = self.simulate_chain(model, segments)?;
        Ok(state.rate() * scale)
    }

    /// Simulated-chain rate regardless of the code family.
    pub fn simulated_chain_rate(
        &self,
        model: &SegmentModel,
        segments: usize,
        per_mode: bool,
    ) -> Result<f64> {
        Ok(self.simulate_chain(model, segments)?.rate() * self.rate_scale(per_mode))
    }

    fn rate_scale(&self, per_mode: bool) -> f64 {
        if per_mode {
            1.0 / self.modes() as f64
        } else {
            1.0
        }
    }

    /// Beat test used by region scans: the asymptotic condition for
    /// number-eigenspace codes, otherwise the existence of a segment count
    /// `n ≤ max_segments` whose per-mode rate exceeds the bound at `nL`.
    pub fn beats(&self, model: &SegmentModel, options: &RegionOptions) -> Result<bool> {
        if self.photon_number.is_some() {
            return self.asymptotic_beat(model);
        }
        let channel = self.segment_channel(model)?;
        let mut state = ChainState::initial(&self.code);
        let scale = self.rate_scale(true);
        for n in 1..=options.max_segments {
            state.step(&channel)?;
            let rate = state.rate() * scale;
            if rate <= options.rate_floor {
                return Ok(false);
            }
            if rate > repeaterless_bound_km(model.distance_km(n), model.alpha())? {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// Largest separation `L*` such that the asymptotic condition holds for
    /// every `L < L*`; `None` if it fails at arbitrarily short separations.
    pub fn max_beating_separation(&self, eta_c: f64, alpha: f64) -> Result<Option<f64>> {
        let beats =
            |l: f64| -> Result<bool> { self.asymptotic_beat(&SegmentModel::new(eta_c, l, alpha)?) };
        let step = 0.01;
        if !beats(step)? {
            return Ok(None);
        }
        let mut lo = step;
        let mut hi = None;
        let mut l = step;
        while l < 1000.0 {
            l += step;
            if beats(l)? {
                lo = l;
            } else {
                hi = Some(l);
                break;
            }
        }
        let Some(mut hi) = hi else {
            return Ok(Some(f64::INFINITY));
        };
        while hi - lo > 1e-10 {
            let mid = 0.5 * (lo + hi);
            if beats(mid)? {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(Some(0.5 * (lo + hi)))
    }
}

/// One row of a simulated chain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChainSample {
    pub segments: usize,
    pub distance_km: f64,
    pub in_code_weight: f64,
    pub six_state_rate: f64,
    pub rate_per_mode: f64,
}

/// Joint state of a reference qubit `A` and the transmitted system `B`,
/// stored as a `2D × 2D` matrix with `A` the slow index.
#[derive(Debug, Clone)]
pub struct ChainState {
    encoder: Matrix,
    matrix: Matrix,
    segments: usize,
}

impl ChainState {
    /// `(|0⟩|0_L⟩ + |1⟩|1_L⟩)/√2`.
    pub fn initial(code: &CodeSpec) -> Self {
        let encoder = code.encoder();
        let d = encoder.nrows();
        let mut psi = Vector::zeros(2 * d);
        for a in 0..2 {
            let column = encoder.column(a);
            for b in 0..d {
                psi[a * d + b] = column[b] * c(0.5f64.sqrt());
            }
        }
        Self {
            encoder,
            matrix: linalg::outer(&psi, &psi),
            segments: 0,
        }
    }

    pub fn segments(&self) -> usize {
        self.segments
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn system_dimension(&self) -> usize {
        self.encoder.nrows()
    }

    pub fn trace(&self) -> f64 {
        linalg::trace(&self.matrix).re
    }

    /// Apply a channel on `B` to each `A`-block.
    pub fn step(&mut self, channel: &KrausChannel) -> Result<()> {
        let d = self.system_dimension();
        if channel.basis().dimension() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                actual: channel.basis().dimension(),
            });
        }
        let mut next = Matrix::zeros(2 * d, 2 * d);
        for a in 0..2 {
            for b in 0..2 {
                let block = self.matrix.view((a * d, b * d), (d, d)).into_owned();
                next.view_mut((a * d, b * d), (d, d))
                    .copy_from(&channel.apply_matrix(&block));
            }
        }
        self.matrix = next;
        self.segments += 1;
        Ok(())
    }

    /// `(1 ⊗ V†) ρ (1 ⊗ V)` with `V` the encoder: the unnormalized two-qubit
    /// state of `A` and the logical qubit in `B`.
    pub fn logical_block(&self) -> Matrix {
        let d = self.system_dimension();
        let mut w = Matrix::zeros(2 * d, 4);
        for a in 0..2 {
            w.view_mut((a * d, 2 * a), (d, 2)).copy_from(&self.encoder);
        }
        w.adjoint() * &self.matrix * w
    }

    /// Probability that `B` is found in code space.
    pub fn in_code_weight(&self) -> f64 {
        linalg::trace(&self.logical_block()).re
    }

    /// Two-qubit state conditioned on `B` being in code space.
    pub fn conditional_state(&self) -> Option<Matrix> {
        let block = self.logical_block();
        let p = linalg::trace(&block).re;
        (p > f64::MIN_POSITIVE).then(|| block / c(p))
    }

    pub fn bell_coefficients(&self) -> Option<[f64; 4]> {
        self.conditional_state().map(|s| bell_coefficients(&s))
    }

    /// Six-state rate of the conditional state, zero if `B` has left code
    /// space entirely.
    pub fn six_state_rate(&self) -> f64 {
        self.bell_coefficients().map(hashing_rate).unwrap_or(0.0)
    }

    /// `p_in · r_6`.
    pub fn rate(&self) -> f64 {
        self.in_code_weight() * self.six_state_rate()
    }
}

/// Bell basis `Φ+, Φ−, Ψ+, Ψ−` in the computational order `|00⟩, |01⟩,
/// |10⟩, |11⟩`.
pub fn bell_basis() -> [Vector; 4] {
    let s = 0.5f64.sqrt();
    let v = |x: [f64; 4]| Vector::from_iterator(4, x.into_iter().map(|a| c(a * s)));
    [
        v([1.0, 0.0, 0.0, 1.0]),
        v([1.0, 0.0, 0.0, -1.0]),
        v([0.0, 1.0, 1.0, 0.0]),
        v([0.0, 1.0, -1.0, 0.0]),
    ]
}

/// Diagonal of a two-qubit state in the Bell basis.
pub fn bell_coefficients(state: &Matrix) -> [f64; 4] {
    assert_eq!(state.shape(), (4, 4), "two-qubit state required");
    bell_basis().map(|b| (b.adjoint() * state * &b)[(0, 0)].re)
}

/// `max(0, 1 − H(λ))` for Bell-diagonal weights `λ`.
pub fn hashing_rate(lambda: [f64; 4]) -> f64 {
    let entropy: f64 = lambda
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.log2())
        .sum();
    (1.0 - entropy).max(0.0)
}

/// Six-state rate of a two-qubit state after Bell twirling.
pub fn six_state_rate(state: &Matrix) -> Result<f64> {
    if state.shape() != (4, 4) {
        return Err(Error::DimensionMismatch {
            expected: 4,
            actual: state.nrows(),
        });
    }
    let tol = 1e-9;
    let herm = linalg::hermiticity_residual(state);
    if herm > tol {
        return Err(Error::InvalidState(format!("not Hermitian ({herm:.3e})")));
    }
    let tr = linalg::trace(state);
    if (tr.re - 1.0).abs() > tol || tr.im.abs() > tol {
        return Err(Error::InvalidState(format!("trace {tr}")));
    }
    let min = linalg::hermitian_eigenvalues(state)[0];
    if min < -tol {
        return Err(Error::InvalidState(format!(
            "negative eigenvalue {min:.3e}"
        )));
    }
    Ok(hashing_rate(bell_coefficients(state)))
}

/// Bell weights of a depolarized Bell pair with error rate `q` in every
/// basis.
pub fn depolarizing_profile(q: f64) -> [f64; 4] {
    [1.0 - 1.5 * q, 0.5 * q, 0.5 * q, 0.5 * q]
}

/// Error rate at which the six-state rate of the depolarizing profile
/// vanishes.
pub fn six_state_threshold() -> f64 {
    let f = |q: f64| 1.0 - entropy4(depolarizing_profile(q));
    let (mut lo, mut hi) = (1e-6, 0.5);
    while hi - lo > 1e-14 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn entropy4(lambda: [f64; 4]) -> f64 {
    lambda
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.log2())
        .sum()
}

/// Evenly spaced values `lo, lo+step, …, ≤ hi`, written `lo:hi:step`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
}

impl Grid {
    const MAX_POINTS: usize = 10_000_000;

    pub fn new(lo: f64, hi: f64, step: f64) -> Result<Self> {
        let grid = Self { lo, hi, step };
        grid.validate()?;
        Ok(grid)
    }

    pub fn single(value: f64) -> Result<Self> {
        Self::new(value, value, 1.0)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lo.is_finite() && self.hi.is_finite() && self.step.is_finite()) {
            return Err(Error::EmptyGrid(format!("non-finite bounds in {self}")));
        }
        if self.step <= 0.0 {
            return Err(Error::EmptyGrid(format!("step must be positive in {self}")));
        }
        if self.hi < self.lo {
            return Err(Error::EmptyGrid(format!("hi below lo in {self}")));
        }
        if self.raw_len() > Self::MAX_POINTS as f64 {
            return Err(Error::EmptyGrid(format!(
                "more than {} points in {self}",
                Self::MAX_POINTS
            )));
        }
        Ok(())
    }

    fn raw_len(&self) -> f64 {
        ((self.hi - self.lo) / self.step + 1e-9).floor() + 1.0
    }

    pub fn len(&self) -> usize {
        self.raw_len() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `lo + i·step`, rounded to 12 decimals and clamped to `hi`.
    pub fn value(&self, i: usize) -> f64 {
        let v = self.lo + i as f64 * self.step;
        ((v * 1e12).round() / 1e12).min(self.hi)
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.value(i)).collect()
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.lo, self.hi, self.step)
    }
}

impl FromStr for Grid {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let num = |t: &str| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::EmptyGrid(format!("cannot parse '{t}' in '{s}'")))
        };
        match parts.as_slice() {
            [v] => Self::single(num(v)?),
            [lo, hi, step] => Self::new(num(lo)?, num(hi)?, num(step)?),
            _ => Err(Error::EmptyGrid(format!("expected lo:hi:step, got '{s}'"))),
        }
    }
}

/// Settings for [`region_scan`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegionOptions {
    /// Worker threads; `None` uses the global pool.
    pub jobs: Option<usize>,
    pub max_segments: usize,
    pub rate_floor: f64,
}

impl Default for RegionOptions {
    fn default() -> Self {
        Self {
            jobs: None,
            max_segments: MAX_SEGMENTS,
            rate_floor: RATE_FLOOR,
        }
    }
}

/// Beat flags over an `(η_c, L)` grid.
#[derive(Debug, Clone, Serialize)]
pub struct RegionResult {
    pub code: String,
    pub alpha: f64,
    pub eta_c: Grid,
    pub separation: Grid,
    /// `true` when flags come from the asymptotic condition, `false` for the
    /// finite-distance search.
    pub asymptotic: bool,
    pub max_segments: usize,
    /// Flags indexed `separation_index · |η_c| + eta_index`.
    pub beats: Vec<bool>,
    /// Smallest beating `η_c` per separation column, refined by bisection.
    pub boundary: Vec<Option<f64>>,
    /// Every column is non-beating below and beating above a single `η_c`.
    pub monotone: bool,
    /// `1 − min η_c` over the refined boundary.
    pub max_tolerable_coupling_loss: Option<f64>,
    /// Separation of the column attaining the minimum.
    pub optimal_separation_km: Option<f64>,
}

impl RegionResult {
    pub fn eta_values(&self) -> Vec<f64> {
        self.eta_c.values()
    }

    pub fn separation_values(&self) -> Vec<f64> {
        self.separation.values()
    }

    pub fn beats_at(&self, eta_index: usize, sep_index: usize) -> bool {
        self.beats[sep_index * self.eta_c.len() + eta_index]
    }

    /// Lowest beating grid point of its column.
    pub fn is_boundary(&self, eta_index: usize, sep_index: usize) -> bool {
        self.beats_at(eta_index, sep_index)
            && (eta_index == 0 || !self.beats_at(eta_index - 1, sep_index))
    }

    pub fn any_beat(&self) -> bool {
        self.beats.iter().any(|&b| b)
    }
}

fn with_pool<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match jobs {
        None => Ok(f()),
        Some(0) => Err(Error::ParameterOutOfRange {
            name: "jobs",
            value: 0.0,
            range: "[1, ∞)",
        }),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::Pool(e.to_string()))?;
            Ok(pool.install(f))
        }
    }
}

/// Evaluate the beat condition on every grid point and refine the boundary
/// of each separation column by bisection in `η_c`.
pub fn region_scan(
    code: &CodeSpec,
    eta_c: Grid,
    separation: Grid,
    alpha: f64,
    options: &RegionOptions,
) -> Result<RegionResult> {
    eta_c.validate()?;
    separation.validate()?;
    check_positive("alpha", alpha)?;
    let ctx = RateContext::new(code.clone())?;
    let etas = eta_c.values();
    let seps = separation.values();
    for &e in &etas {
        SegmentModel::new(e, 1.0, alpha)?;
    }
    for &l in &seps {
        SegmentModel::new(1.0, l, alpha)?;
    }
    let asymptotic = ctx.photon_number().is_some();
    let tol = if asymptotic { 1e-9 } else { 1e-6 };
    let columns: Vec<Result<(Vec<bool>, Option<f64>)>> = with_pool(options.jobs, || {
        seps.par_iter()
            .map(|&l| scan_column(&ctx, &etas, l, alpha, options, tol))
            .collect()
    })?;
    let mut beats = Vec::with_capacity(etas.len() * seps.len());
    let mut boundary = Vec::with_capacity(seps.len());
    let mut monotone = true;
    for column in columns {
        let (flags, edge) = column?;
        monotone &= flags.windows(2).all(|w| w[1] || !w[0]);
        beats.extend(flags);
        boundary.push(edge);
    }
    let mut best: Option<(f64, f64)> = None;
    for (edge, &l) in boundary.iter().zip(&seps) {
        if let Some(e) = *edge {
            if best.is_none_or(|(b, _)| e < b) {
                best = Some((e, l));
            }
        }
    }
    Ok(RegionResult {
        code: code.name().to_string(),
        alpha,
        eta_c,
        separation,
        asymptotic,
        max_segments: options.max_segments,
        beats,
        boundary,
        monotone,
        max_tolerable_coupling_loss: best.map(|(e, _)| 1.0 - e),
        optimal_separation_km: best.map(|(_, l)| l),
    })
}

fn scan_column(
    ctx: &RateContext,
    etas: &[f64],
    separation_km: f64,
    alpha: f64,
    options: &RegionOptions,
    tol: f64,
) -> Result<(Vec<bool>, Option<f64>)> {
    let beats = |e: f64| ctx.beats(&SegmentModel::new(e, separation_km, alpha)?, options);
    let flags = etas
        .iter()
        .map(|&e| beats(e))
        .collect::<Result<Vec<bool>>>()?;
    let edge = match flags.iter().position(|&b| b) {
        None => None,
        Some(0) => Some(etas[0]),
        Some(k) => {
            let (mut lo, mut hi) = (etas[k - 1], etas[k]);
            while hi - lo > tol {
                let mid = 0.5 * (lo + hi);
                if beats(mid)? {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            Some(hi)
        }
    };
    Ok((flags, edge))
}

/// Choice of repeater separation for a rate curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SeparationPolicy {
    Fixed { km: f64 },
    Optimized,
}

/// One sample of a rate curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RatePoint {
    pub distance_km: f64,
    pub segments: usize,
    pub separation_km: f64,
    pub rate_per_mode: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RateCurve {
    pub code: String,
    pub eta_c: f64,
    pub alpha: f64,
    pub per_mode: bool,
    pub separation_km: f64,
    pub separation_optimized: bool,
    pub points: Vec<RatePoint>,
    /// First distance at which the chain rate exceeds the bound,
    /// interpolated in log space between samples.
    pub crossover_km: Option<f64>,
}

/// Maximize `f` on `[lo, hi]` by golden-section search; ties keep the
/// lower sub-interval.
pub fn golden_section_max(
    f: impl Fn(f64) -> Result<f64>,
    lo: f64,
    hi: f64,
    tol: f64,
) -> Result<f64> {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    while b - a > tol {
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2)?;
        }
    }
    Ok(0.5 * (a + b))
}

/// Separation maximizing the rate at `target_km`. For number-eigenspace
/// codes the rate `p_s^{x/L}` is maximal where `ln p_s / L` is, at every
/// distance; other codes are scored by the simulated rate at the segment
/// count closest to the target.
pub fn optimal_separation(
    ctx: &RateContext,
    eta_c: f64,
    alpha: f64,
    target_km: f64,
) -> Result<f64> {
    check_positive("max_km", target_km)?;
    let (lo, hi) = SEPARATION_RANGE;
    if ctx.photon_number().is_some() {
        golden_section_max(
            |l| {
                let model = SegmentModel::new(eta_c, l, alpha)?;
                Ok(ctx.success_probability(model.eta())?.ln() / l)
            },
            lo,
            hi,
            SEPARATION_TOL,
        )
    } else {
        golden_section_max(
            |l| {
                let model = SegmentModel::new(eta_c, l, alpha)?;
                let n = ((target_km / l).round() as usize).max(1);
                ctx.chain_rate(&model, n, true)
            },
            lo,
            hi,
            SEPARATION_TOL,
        )
    }
}

/// Rate per mode and repeaterless bound at `x = nL` for `n = 1, 2, …` up to
/// `max_km`.
pub fn rate_vs_distance(
    code: &CodeSpec,
    eta_c: f64,
    alpha: f64,
    max_km: f64,
    policy: SeparationPolicy,
    per_mode: bool,
) -> Result<RateCurve> {
    check_positive("max_km", max_km)?;
    let ctx = RateContext::new(code.clone())?;
    let separation_km = match policy {
        SeparationPolicy::Fixed { km } => km,
        SeparationPolicy::Optimized => optimal_separation(&ctx, eta_c, alpha, max_km)?,
    };
    let model = SegmentModel::new(eta_c, separation_km, alpha)?;
    let n_max = (max_km / separation_km + 1e-9).floor() as usize;
    let rates: Vec<(usize, f64)> = if ctx.photon_number().is_some() {
        (1..=n_max)
            .map(|n| Ok((n, ctx.chain_rate(&model, n, per_mode)?)))
            .collect::<Result<_>>()?
    } else {
        ctx.chain_samples(&model, n_max, per_mode)?
            .into_iter()
            .map(|s| (s.segments, s.rate_per_mode))
            .collect()
    };
    let points = rates
        .into_iter()
        .map(|(n, rate)| {
            let x = model.distance_km(n);
            Ok(RatePoint {
                distance_km: x,
                segments: n,
                separation_km,
                rate_per_mode: rate,
                bound: repeaterless_bound_km(x, alpha)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let crossover_km = crossover(&points);
    Ok(RateCurve {
        code: code.name().to_string(),
        eta_c,
        alpha,
        per_mode,
        separation_km,
        separation_optimized: matches!(policy, SeparationPolicy::Optimized),
        points,
        crossover_km,
    })
}

fn crossover(points: &[RatePoint]) -> Option<f64> {
    let gap = |p: &RatePoint| p.rate_per_mode.ln() - p.bound.ln();
    let k = points
        .iter()
        .position(|p| p.rate_per_mode > RATE_FLOOR && p.rate_per_mode > p.bound)?;
    if k == 0 || points[k - 1].rate_per_mode <= RATE_FLOOR {
        return Some(points[k].distance_km);
    }
    let (p0, p1) = (&points[k - 1], &points[k]);
    let (g0, g1) = (gap(p0), gap(p1));
    Some(p0.distance_km + (p1.distance_km - p0.distance_km) * g0 / (g0 - g1))
}
