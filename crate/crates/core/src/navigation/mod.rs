//! From fringes to position: fringe fitting, dual-beam separation of
//! acceleration and rotation, conversion to inertial units, and planar dead
//! reckoning.

mod dead_reckon;
mod fit;
mod inversion;
mod pipeline;

pub use dead_reckon::{dead_reckon, write_trajectory_csv, ImuSample, NavState};
pub use fit::{fit_fringe, PhaseEstimate, LOW_CONTRAST, MAX_CONTRAST, MIN_FIT_POINTS};
pub use inversion::{
    accel_from_phase, fringe_order_near, required_phase_resolution, rotation_from_phase,
    sensitivity, separate_inertial, unwrap_with_order, wrap_phase, Sensitivity,
};
pub use pipeline::{
    monte_carlo_fits, navigate, predicted_position_sigma, DualBeamEstimate, DualBeamSensor,
    EpochRecord, NavRun, NavRunConfig, TruthProfile, TruthSegment,
};
