//! The reference facility model and penalty settings used throughout the
//! tests, benchmarks and bundled CLI example.

use crate::{PenaltyParams, TransitionModel};

/// Operational rows over `N, V, O, D, C`.
pub const BASELINE_ROWS: [[f64; 5]; 3] = [
    [0.9125, 0.0875, 0.0, 0.0, 0.0],
    [0.0, 0.825, 0.1125, 0.045, 0.0175],
    [0.0, 0.0, 0.75, 0.175, 0.075],
];

/// Probability that an inspection forces closure, per operational state.
pub const BASELINE_P_IC: [f64; 3] = [0.0, 0.3, 1.0];

pub const BASELINE_C: f64 = 5.0;
pub const BASELINE_C_TILDE: f64 = 1.0;

/// Failure penalties of the reference table.
pub const TABLE_D: [f64; 5] = [14.0, 18.0, 22.0, 26.0, 30.0];
/// Optimal inspection periods for `TABLE_D`, without inspection closures.
pub const TABLE_T_BASE: [u64; 5] = [27, 15, 12, 10, 8];
/// Optimal inspection periods for `TABLE_D`, with inspection closures.
pub const TABLE_T_VARIANT: [u64; 5] = [31, 16, 12, 10, 8];
pub const TABLE_ETD: u64 = 19;

pub fn baseline_model() -> TransitionModel {
    TransitionModel::from_operational_rows(BASELINE_ROWS, BASELINE_P_IC)
}

/// `c = 5`, `c_tilde = 1` with the given failure penalty.
///
/// # Panics
/// If `d < 5`.
pub fn baseline_penalties(d: f64) -> PenaltyParams {
    PenaltyParams::new(d, BASELINE_C, BASELINE_C_TILDE).expect("d must be at least c = 5")
}
