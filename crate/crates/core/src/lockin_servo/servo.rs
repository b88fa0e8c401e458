use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::constants::OFFSET_LOCK_SETPOINT_HZ;
use crate::error::{ensure, Result};

/// Consecutive in-tolerance steps required to declare lock.
pub const LOCK_STREAK: usize = 10;
/// Consecutive steps of growing |error| that flag the loop as unstable.
pub const DIVERGENCE_STREAK: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ServoConfig {
    pub gain: f64,
    pub setpoint_hz: f64,
    /// FVC conversion, volt-equivalent per Hz.
    pub fvc_slope: f64,
    pub max_steps: usize,
    pub tolerance_hz: f64,
}

impl Default for ServoConfig {
    /// Locks the 8 MHz offset beat with a loop gain of 0.5 per step.
    fn default() -> Self {
        ServoConfig {
            gain: 0.5,
            setpoint_hz: OFFSET_LOCK_SETPOINT_HZ,
            fvc_slope: 1.0,
            max_steps: 10_000,
            tolerance_hz: 1.0,
        }
    }
}

impl ServoConfig {
    pub fn validate(&self) -> Result<()> {
        ensure(self.gain > 0.0 && self.gain.is_finite(), || {
            format!("servo gain must be positive, got {}", self.gain)
        })?;
        ensure(self.tolerance_hz > 0.0, || {
            format!("lock tolerance must be positive, got {}", self.tolerance_hz)
        })?;
        ensure(
            self.setpoint_hz.is_finite() && self.fvc_slope.is_finite(),
            || "non-finite setpoint or FVC slope".to_string(),
        )
    }

    /// Offset voltage that nulls the FVC output at the setpoint.
    pub fn v_offset(&self) -> f64 {
        self.fvc_slope * self.setpoint_hz
    }

    /// Per-step contraction factor of the frequency error is `1 − loop_gain`.
    pub fn loop_gain(&self) -> f64 {
        self.gain * self.fvc_slope
    }
}

/// FVC output after offset compensation; exactly zero at the setpoint.
pub fn fvc_error(freq_hz: f64, cfg: &ServoConfig) -> f64 {
    cfg.fvc_slope * freq_hz - cfg.v_offset()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ServoStep {
    pub step: usize,
    pub freq_hz: f64,
    pub error: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum ServoOutcome {
    /// Locked; `step` is the first step of the in-tolerance streak.
    Converged {
        step: usize,
    },
    MaxSteps,
    Unstable {
        gain: f64,
        loop_gain: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ServoTrajectory {
    pub steps: Vec<ServoStep>,
    pub outcome: ServoOutcome,
}

impl ServoTrajectory {
    pub fn converged(&self) -> bool {
        matches!(self.outcome, ServoOutcome::Converged { .. })
    }

    pub fn final_freq(&self) -> f64 {
        self.steps.last().map_or(f64::NAN, |s| s.freq_hz)
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "step,freq_hz,error")?;
        for s in &self.steps {
            writeln!(w, "{},{},{}", s.step, s.freq_hz, s.error)?;
        }
        Ok(())
    }
}

/// Integral lock of the laser frequency:
/// `f_{k+1} = f_k − gain·error_k + disturbance(k)`.
pub fn run_servo<D>(
    initial_freq_hz: f64,
    mut disturbance: D,
    cfg: &ServoConfig,
) -> Result<ServoTrajectory>
where
    D: FnMut(usize) -> f64,
{
    cfg.validate()?;
    let mut steps = Vec::new();
    let mut freq = initial_freq_hz;
    let mut in_tol = 0usize;
    let mut growing = 0usize;
    let mut last_err = f64::INFINITY;
    for k in 0..cfg.max_steps {
        let error = fvc_error(freq, cfg);
        steps.push(ServoStep {
            step: k,
            freq_hz: freq,
            error,
        });
        if !error.is_finite() {
            growing = DIVERGENCE_STREAK;
        } else if error.abs() > last_err.abs() {
            growing += 1;
        } else {
            growing = 0;
        }
        if growing >= DIVERGENCE_STREAK {
            return Ok(ServoTrajectory {
                steps,
                outcome: ServoOutcome::Unstable {
                    gain: cfg.gain,
                    loop_gain: cfg.loop_gain(),
                },
            });
        }
        last_err = error;
        if (freq - cfg.setpoint_hz).abs() < cfg.tolerance_hz {
            in_tol += 1;
            if in_tol == LOCK_STREAK {
                return Ok(ServoTrajectory {
                    steps,
                    outcome: ServoOutcome::Converged {
                        step: k + 1 - LOCK_STREAK,
                    },
                });
            }
        } else {
            in_tol = 0;
        }
        freq = freq - cfg.gain * error + disturbance(k);
    }
    Ok(ServoTrajectory {
        steps,
        outcome: ServoOutcome::MaxSteps,
    })
}
