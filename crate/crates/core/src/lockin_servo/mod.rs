//! Laser frequency stabilization at desk scale: lock-in demodulation of the
//! modulated spectroscopy signal, the FVC error signal of the offset lock, an
//! integral servo closing the loop, and a saturated-absorption lineshape.

mod lockin;
mod sas;
mod servo;

pub use lockin::{demodulate, raw_integral, synthesize, synthesize_with_rng, ModulatedSignal};
pub use sas::{sas_spectrum, Dip, DipKind, SasSpectrum, Transition};
pub use servo::{fvc_error, run_servo, ServoConfig, ServoOutcome, ServoStep, ServoTrajectory};
