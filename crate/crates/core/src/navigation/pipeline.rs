//! Epoch-by-epoch sensing: dual-beam fringe scans → fits → inertial estimates
//! → dead reckoning.

use serde::{Deserialize, Serialize};

use super::dead_reckon::{dead_reckon, ImuSample, NavState};
use super::fit::{fit_fringe, PhaseEstimate};
use super::inversion::{
    accel_from_phase, fringe_order_near, rotation_from_phase, sensitivity, separate_inertial,
    unwrap_with_order, wrap_phase,
};
use crate::error::{ensure, Result};
use crate::exec::{substream_seed, Exec};
use crate::interferometer::{
    accel_phase, pzt_scan, rotation_phase, sagnac_area_from_geometry, Detection, InertialInput,
    InterferometerConfig,
};

/// Piecewise-constant truth input; each segment holds from its start time until
/// the next segment begins. Before the first segment the input is zero.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TruthProfile {
    pub segments: Vec<TruthSegment>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruthSegment {
    pub start_s: f64,
    pub accel_mps2: f64,
    pub rot_radps: f64,
}

impl TruthProfile {
    pub fn constant(accel_mps2: f64, rot_radps: f64) -> Self {
        TruthProfile {
            segments: vec![TruthSegment {
                start_s: 0.0,
                accel_mps2,
                rot_radps,
            }],
        }
    }

    /// `(accel, rot_rate)` at time `t`.
    pub fn at(&self, t: f64) -> (f64, f64) {
        self.segments
            .iter()
            .filter(|s| s.start_s <= t)
            .max_by(|a, b| a.start_s.total_cmp(&b.start_s))
            .map_or((0.0, 0.0), |s| (s.accel_mps2, s.rot_radps))
    }
}

/// Two interferometers sharing geometry with opposite beam directions.
///
/// The laser phase offset `φ₁ − 2φ₂` of each beam is calibrated once with a
/// zero-input scan and subtracted from every later fit.
#[derive(Debug, Clone, PartialEq)]
pub struct DualBeamSensor {
    forward: InterferometerConfig,
    backward: InterferometerConfig,
    displacements: Vec<f64>,
    base_phases: (f64, f64),
    offsets: (f64, f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DualBeamEstimate {
    /// Offset-corrected fringe phases wrapped to `(−π, π]`.
    pub phase_forward: f64,
    pub phase_backward: f64,
    pub fit_forward: PhaseEstimate,
    pub fit_backward: PhaseEstimate,
}

impl DualBeamSensor {
    pub fn new(
        config: InterferometerConfig,
        displacements: Vec<f64>,
        base_phases: (f64, f64),
    ) -> Result<Self> {
        config.validate()?;
        let mut sensor = DualBeamSensor {
            forward: config,
            backward: config.reversed(),
            displacements,
            base_phases,
            offsets: (0.0, 0.0),
        };
        let cal = sensor.measure(0.0, 0.0, Detection::Ideal)?;
        sensor.offsets = (cal.fit_forward.total_phase, cal.fit_backward.total_phase);
        Ok(sensor)
    }

    pub fn forward(&self) -> &InterferometerConfig {
        &self.forward
    }

    pub fn scan_points(&self) -> usize {
        self.displacements.len()
    }

    /// Fits one scan per beam for the given truth input.
    pub fn measure(
        &self,
        accel: f64,
        rot_rate: f64,
        detection: Detection,
    ) -> Result<DualBeamEstimate> {
        let scan_fit = |cfg: &InterferometerConfig, detection| -> Result<PhaseEstimate> {
            let inertial = InertialInput::for_config(cfg, accel, rot_rate);
            let scan = pzt_scan(
                cfg,
                &inertial,
                self.base_phases,
                &self.displacements,
                detection,
                Exec::Sequential,
            )?;
            fit_fringe(&scan)
        };
        let backward_detection = match detection {
            Detection::Ideal => Detection::Ideal,
            Detection::Shot { seed } => Detection::Shot {
                seed: substream_seed(seed, 1),
            },
        };
        let fit_forward = scan_fit(&self.forward, detection)?;
        let fit_backward = scan_fit(&self.backward, backward_detection)?;
        Ok(DualBeamEstimate {
            phase_forward: wrap_phase(fit_forward.total_phase - self.offsets.0),
            phase_backward: wrap_phase(fit_backward.total_phase - self.offsets.1),
            fit_forward,
            fit_backward,
        })
    }

    /// Noise-free inertial phases `(forward, backward)` for a truth input.
    pub fn predicted_phases(&self, accel: f64, rot_rate: f64) -> Result<(f64, f64)> {
        let phase = |cfg: &InterferometerConfig| -> Result<f64> {
            Ok(accel_phase(cfg, accel)?
                + rotation_phase(cfg, rot_rate, sagnac_area_from_geometry(cfg))?)
        };
        Ok((phase(&self.forward)?, phase(&self.backward)?))
    }

    /// `(accel, rot_rate)` from unwrapped beam phases.
    pub fn invert(&self, phase_forward: f64, phase_backward: f64) -> Result<(f64, f64)> {
        let (pa, pr) = separate_inertial(phase_forward, phase_backward);
        Ok((
            accel_from_phase(pa, &self.forward)?,
            rotation_from_phase(pr, &self.forward, sagnac_area_from_geometry(&self.forward))?,
        ))
    }

    /// Predicted one-sigma fringe phase error of a single scan: the shot-noise
    /// limit for all atoms detected across the scan.
    pub fn scan_phase_sigma(&self) -> f64 {
        let c = &self.forward;
        1.0 / (c.contrast * ((c.n_atoms_per_shot as f64) * self.scan_points() as f64).sqrt())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NavRunConfig {
    pub dt_s: f64,
    pub duration_s: f64,
    /// `None` disables detection noise.
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EpochRecord {
    pub time: f64,
    pub truth_accel: f64,
    pub truth_rot_rate: f64,
    pub phase_forward: f64,
    pub phase_backward: f64,
    pub accel: f64,
    pub rot_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NavRun {
    pub epochs: Vec<EpochRecord>,
    pub estimated: Vec<NavState>,
    pub truth: Vec<NavState>,
}

impl NavRun {
    /// Final horizontal position error, m.
    pub fn final_position_error(&self) -> [f64; 2] {
        match (self.estimated.last(), self.truth.last()) {
            (Some(e), Some(t)) => [e.position[0] - t.position[0], e.position[1] - t.position[1]],
            _ => [0.0, 0.0],
        }
    }
}

/// Runs the full sensing and dead-reckoning loop against a truth profile.
///
/// Fringe order is tracked from epoch to epoch, starting from the phase of the
/// initial truth input (known initial alignment). Truth changes larger than
/// half a fringe between epochs are therefore not recoverable.
pub fn navigate(
    sensor: &DualBeamSensor,
    truth: &TruthProfile,
    run: &NavRunConfig,
    exec: Exec,
) -> Result<NavRun> {
    ensure(run.dt_s > 0.0 && run.duration_s >= 0.0, || {
        format!(
            "need dt > 0 and duration ≥ 0, got dt = {}, duration = {}",
            run.dt_s, run.duration_s
        )
    })?;
    let n = (run.duration_s / run.dt_s).round() as usize + 1;
    let times: Vec<f64> = (0..n).map(|k| k as f64 * run.dt_s).collect();

    let fits = exec.try_map(n, |k| {
        let (a, w) = truth.at(times[k]);
        let detection = match run.seed {
            Some(seed) => Detection::Shot {
                seed: substream_seed(seed, k as u64),
            },
            None => Detection::Ideal,
        };
        sensor.measure(a, w, detection)
    })?;

    let (a0, w0) = truth.at(0.0);
    let mut hint = sensor.predicted_phases(a0, w0)?;
    let mut epochs = Vec::with_capacity(n);
    for (k, fit) in fits.iter().enumerate() {
        let pf = unwrap_with_order(
            fit.phase_forward,
            fringe_order_near(fit.phase_forward, hint.0),
        );
        let pb = unwrap_with_order(
            fit.phase_backward,
            fringe_order_near(fit.phase_backward, hint.1),
        );
        hint = (pf, pb);
        let (accel, rot_rate) = sensor.invert(pf, pb)?;
        let (ta, tw) = truth.at(times[k]);
        epochs.push(EpochRecord {
            time: times[k],
            truth_accel: ta,
            truth_rot_rate: tw,
            phase_forward: pf,
            phase_backward: pb,
            accel,
            rot_rate,
        });
    }

    let imu = |accel: f64, rot_rate: f64| ImuSample {
        accel: [accel, 0.0],
        rot_rate,
    };
    let measured: Vec<_> = epochs.iter().map(|e| imu(e.accel, e.rot_rate)).collect();
    let reference: Vec<_> = epochs
        .iter()
        .map(|e| imu(e.truth_accel, e.truth_rot_rate))
        .collect();
    Ok(NavRun {
        estimated: dead_reckon(&measured, run.dt_s, NavState::default())?,
        truth: dead_reckon(&reference, run.dt_s, NavState::default())?,
        epochs,
    })
}

/// Predicted one-sigma along-track position error at the end of a run with
/// white per-epoch acceleration noise, from the linear weights of the
/// trapezoid double integrator.
pub fn predicted_position_sigma(sensor: &DualBeamSensor, run: &NavRunConfig) -> Result<f64> {
    // Each beam phase carries scan_phase_sigma; the acceleration phase is their
    // mean, so its sigma is smaller by √2.
    let phase_sigma = sensor.scan_phase_sigma() / std::f64::consts::SQRT_2;
    let accel_sigma = sensitivity(sensor.forward(), phase_sigma)?.accel_res;
    let n = (run.duration_s / run.dt_s).round() as usize;
    let dt = run.dt_s;
    // v_k = dt·Σ_j c_kj a_j with trapezoid weights; p_n = dt·(Σ_{k=1}^{n-1} v_k + ½ v_n).
    let mut weights = vec![0.0; n + 1];
    for k in 1..=n {
        let m = if k == n { 0.5 } else { 1.0 };
        for (j, w) in weights.iter_mut().enumerate().take(k + 1) {
            let c = if j == 0 || j == k { 0.5 } else { 1.0 };
            *w += m * c * dt * dt;
        }
    }
    Ok(accel_sigma * weights.iter().map(|w| w * w).sum::<f64>().sqrt())
}

/// Fits `seeds` independent noisy scans of the same input.
#[allow(clippy::too_many_arguments)]
pub fn monte_carlo_fits(
    config: &InterferometerConfig,
    inertial: &InertialInput,
    base_phases: (f64, f64),
    displacements: &[f64],
    seeds: usize,
    base_seed: u64,
    exec: Exec,
) -> Result<Vec<PhaseEstimate>> {
    exec.try_map(seeds, |i| {
        let detection = Detection::Shot {
            seed: substream_seed(base_seed, i as u64),
        };
        let scan = pzt_scan(
            config,
            inertial,
            base_phases,
            displacements,
            detection,
            Exec::Sequential,
        )?;
        fit_fringe(&scan)
    })
}
