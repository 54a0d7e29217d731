//! Shared fixtures for the benchmarks.

use hamrep::rate::{RegionOptions, DEFAULT_ALPHA};
use hamrep::{BuiltinCode, CodeSpec, Grid, RateContext, SegmentModel};

pub fn code(b: BuiltinCode) -> CodeSpec {
    CodeSpec::builtin(b)
}

pub fn context(b: BuiltinCode) -> RateContext {
    RateContext::new(code(b)).expect("built-in codes are valid")
}

/// A segment with coupling efficiency `eta_c` and separation `km` in
/// standard telecom fibre.
pub fn segment(eta_c: f64, km: f64) -> SegmentModel {
    SegmentModel::new(eta_c, km, DEFAULT_ALPHA).expect("valid segment")
}

/// Coupling-efficiency and separation grids of the full region scan.
pub fn region_grids() -> (Grid, Grid) {
    (
        Grid::new(0.85, 1.0, 0.001).unwrap(),
        Grid::new(0.5, 30.0, 0.1).unwrap(),
    )
}

pub fn serial() -> RegionOptions {
    RegionOptions {
        jobs: Some(1),
        ..Default::default()
    }
}
