//! Physical constants and default scenario values.

/// Reduced Planck constant, J·s (CODATA 2018, exact-derived).
pub const HBAR: f64 = PLANCK / std::f64::consts::TAU;
/// Planck constant, J·s (exact).
pub const PLANCK: f64 = 6.626_070_15e-34;
/// ⁸⁷Rb atomic mass, kg.
pub const RB87_MASS_KG: f64 = 1.4432e-25;

/// Raman laser wavelength (D2 line), m.
pub const LAMBDA_LASER_M: f64 = 780e-9;
/// Longitudinal velocity of the cold atomic beam, m/s.
pub const BEAM_VELOCITY_MPS: f64 = 15.0;
/// Raman beam width, m.
pub const RAMAN_BEAM_WIDTH_M: f64 = 1e-3;
/// Spacing between the three Raman zones, m.
pub const ZONE_SPACING_M: f64 = 9.5e-3;

/// Full PZT travel of the phase plate, m.
pub const PZT_MAX_DISPLACEMENT_M: f64 = 9e-6;
/// Optical phase change produced by the full PZT travel, rad.
pub const PZT_FULL_SCALE_PHASE_RAD: f64 = 30.0;

/// Tilt bound for horizontal Raman alignment, rad.
pub const REQUIRED_TILT_BOUND_RAD: f64 = 312e-6;
/// Tilt reached by the lens/fiber adjustment, rad.
pub const ACHIEVED_TILT_RAD: f64 = 91e-6;
/// Raman resonance linewidth coefficient: Δδ = 2π·0.8/τ.
pub const RAMAN_LINEWIDTH_COEFF: f64 = 0.8;

/// Current modulation of the reference laser for SAS locking, Hz.
pub const SAS_MODULATION_HZ: f64 = 100e3;
/// Offset-lock setpoint after the low-pass filter, Hz.
pub const OFFSET_LOCK_SETPOINT_HZ: f64 = 8e6;
/// LD diode temperature, °C.
pub const LD_TEMPERATURE_C: f64 = 31.0;
/// Bandwidth of the SAS photodiode PD1, Hz.
pub const PD1_BANDWIDTH_HZ: f64 = 10e6;
/// Bandwidth of the fast beat photodiode PhD12, Hz.
pub const PHD12_BANDWIDTH_HZ: f64 = 15e9;
/// AOM drive bridging the repump transition and the locking crossover, Hz.
pub const COOLING_AOM_HZ: f64 = 78.5e6;
/// D2 natural linewidth Γ/2π of ⁸⁷Rb, Hz.
pub const RB87_D2_LINEWIDTH_HZ: f64 = 6.06e6;

/// ⁸⁷Rb 5P₃/₂ hyperfine intervals (external reference data), Hz.
pub const RB87_P32_F0_F1_HZ: f64 = 72.2180e6;
pub const RB87_P32_F1_F2_HZ: f64 = 156.9470e6;
pub const RB87_P32_F2_F3_HZ: f64 = 266.6500e6;
