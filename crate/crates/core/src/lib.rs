//! Unitary one-way quantum repeaters for lossy bosonic channels.
//!
//! The crate is organised bottom-up:
//!
//! - [`fock`]: truncated multimode Fock space, ladder operators, states and
//!   density matrices.
//! - [`linalg`]: dense complex helpers (tensor products, partial traces,
//!   Hermitian matrix functions, sparse Kraus application).
//! - [`loss`]: the pure-loss channel in Kraus, beamsplitter and master
//!   equation form.
//! - [`code`]: two-dimensional bosonic codes, single-photon-loss errors and
//!   Knill–Laflamme validation.
//! - [`repeater`]: direct and SWAP repeater Hamiltonians, their unitaries and
//!   the recovery channel.
//! - [`rate`]: repeaterless bound, success probabilities, chain simulation,
//!   six-state key rates, region scans and rate curves.

pub mod code;
pub mod error;
pub mod fock;
pub mod linalg;
pub mod loss;
pub mod rate;
pub mod repeater;

pub use code::{BuiltinCode, CodeSpec, ErrorFamily, ErrorSpaces, KlReport};
pub use error::{Error, Result};
pub use fock::{DensityMatrix, FockBasis, Operator, StateVector};
pub use linalg::{Matrix, Vector, C64};
pub use loss::{EquivalenceReport, KrausChannel, LindbladParams};
pub use rate::{
    ChainSample, ChainState, Grid, RateContext, RateCurve, RatePoint, RegionOptions, RegionResult,
    SegmentModel, SeparationPolicy,
};
pub use repeater::{AncillaBasis, Architecture, RepeaterReport, RepeaterSpec};

/// Crate version, embedded in every CLI output for provenance.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Numerical tolerances shared by the validation routines.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Tolerances {
    /// Exact algebra: projector identities, unitarity, hermiticity.
    pub exact: f64,
    /// Results of accumulated products: channel completeness, traces, KL residuals.
    pub accumulated: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            exact: 1e-12,
            accumulated: 1e-10,
        }
    }
}
