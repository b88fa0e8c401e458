//! Desk-scale simulator of a rubidium cold-atom-beam Mach-Zehnder interferometer
//! used as an inertial sensor.
//!
//! The crate is organised bottom-up:
//!
//! - [`atom_optics`]: exact two-level Raman pulse propagator.
//! - [`interferometer`]: π/2–π–π/2 sequence from beam geometry, inertial phases,
//!   fringe scans with binomial detection noise.
//! - [`alignment`]: Raman timing and beam tilt tolerances.
//! - [`navigation`]: fringe fitting, dual-beam inertial separation, dead reckoning.
//! - [`freq_chain`]: line-oriented DSL for RF/optical frequency chains and lock checks.
//! - [`lockin_servo`]: lock-in demodulation, FVC error signal, integral servo and a
//!   saturated-absorption lineshape model.
//!
//! Monte Carlo sweeps go through [`exec::Exec`], which runs on rayon when the
//! `parallel` feature is enabled and falls back to a plain loop otherwise.

pub mod alignment;
pub mod atom_optics;
pub mod constants;
pub mod error;
pub mod exec;
pub mod freq_chain;
pub mod interferometer;
pub mod lockin_servo;
pub mod navigation;
pub mod stats;

pub use error::{Error, Result};
pub use exec::{substream_seed, Exec};
