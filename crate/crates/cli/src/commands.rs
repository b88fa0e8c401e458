use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use atomnav::alignment::{check_alignment, BeamGeometry};
use atomnav::freq_chain::{check_locks, parse_chain};
use atomnav::interferometer::{
    accel_phase, pzt_phase, pzt_scan, pzt_sweep, rotation_phase, Detection, InertialInput,
};
use atomnav::lockin_servo::{demodulate, raw_integral, run_servo, synthesize};
use atomnav::navigation::{
    fit_fringe, navigate, predicted_position_sigma, write_trajectory_csv, DualBeamSensor,
    NavRunConfig,
};
use atomnav::Exec;
use serde::Serialize;
use serde_json::json;

use crate::error::CliError;
use crate::scenario::{LockinMode, Scenario};

pub struct Context {
    pub scenario: Scenario,
    pub out_dir: PathBuf,
    pub json: bool,
    pub exec: Exec,
}

impl Context {
    fn prepare_out(&self) -> Result<(), CliError> {
        fs::create_dir_all(&self.out_dir)
            .map_err(|e| CliError::Io(format!("cannot create {}: {e}", self.out_dir.display())))
    }

    fn write_with<F>(&self, name: &str, f: F) -> Result<PathBuf, CliError>
    where
        F: FnOnce(&mut BufWriter<File>) -> std::io::Result<()>,
    {
        let path = self.out_dir.join(name);
        let io_err = |e: std::io::Error| CliError::Io(format!("{}: {e}", path.display()));
        let mut w = BufWriter::new(File::create(&path).map_err(io_err)?);
        f(&mut w).and_then(|_| w.flush()).map_err(io_err)?;
        Ok(path)
    }

    fn write_json<T: Serialize>(&self, name: &str, value: &T) -> Result<PathBuf, CliError> {
        let text = to_json(value)?;
        self.write_with(name, |w| writeln!(w, "{text}"))
    }

    fn finish<T: Serialize>(
        &self,
        summary_name: &str,
        summary: &T,
        human: &[String],
    ) -> Result<(), CliError> {
        let path = self.write_json(summary_name, summary)?;
        if self.json {
            emit(&to_json(summary)?)?;
        } else {
            for line in human {
                emit(line)?;
            }
            emit(&format!("summary written to {}", path.display()))?;
        }
        Ok(())
    }
}

fn emit(text: &str) -> Result<(), CliError> {
    writeln!(std::io::stdout().lock(), "{text}").map_err(|e| CliError::Io(format!("stdout: {e}")))
}

fn to_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    serde_json::to_string_pretty(value).map_err(|e| CliError::Io(format!("serializing JSON: {e}")))
}

pub fn fringe(ctx: &Context) -> Result<(), CliError> {
    let sc = &ctx.scenario;
    let cfg = sc.interferometer_config()?;
    let (accel, rot_rate) = sc.truth.at(0.0);
    let inertial = InertialInput::for_config(&cfg, accel, rot_rate);
    let displacements = pzt_sweep(sc.scan.points, sc.scan.pzt_max_m);
    let detection = if sc.scan.noise {
        Detection::Shot { seed: sc.scan.seed }
    } else {
        Detection::Ideal
    };
    let base = (sc.scan.phase1_rad, sc.scan.phase2_rad);
    let scan = pzt_scan(&cfg, &inertial, base, &displacements, detection, ctx.exec)?;
    let fit = fit_fringe(&scan)?;

    let phi_a = accel_phase(&cfg, accel)?;
    let phi_rot = rotation_phase(&cfg, rot_rate, inertial.sagnac_area)?;
    let laser = base.0 - 2.0 * base.1;
    let span = pzt_phase(sc.scan.pzt_max_m)? - pzt_phase(0.0)?;

    ctx.prepare_out()?;
    ctx.write_with("fringe_scan.csv", |w| scan.write_csv(w))?;
    let summary = json!({
        "command": "fringe",
        "true_phases": {
            "accel_phase_rad": phi_a,
            "rotation_phase_rad": phi_rot,
            "laser_phase_rad": laser,
            "total_rad": phi_a + phi_rot + laser,
        },
        "commanded_phase_span_rad": span,
        "fit": fit,
        "scenario": sc,
    });
    ctx.finish(
        "fringe_summary.json",
        &summary,
        &[
            format!(
                "fringe scan: {} points over {span} rad commanded phase",
                scan.len()
            ),
            format!(
                "fitted phase {:.9} rad, contrast {:.6}, phase sigma {:.3e} rad",
                fit.total_phase,
                fit.contrast_est,
                fit.phase_std()
            ),
        ],
    )
}

pub fn navigate_cmd(ctx: &Context) -> Result<(), CliError> {
    let sc = &ctx.scenario;
    let cfg = sc.interferometer_config()?;
    let displacements = pzt_sweep(sc.scan.points, sc.scan.pzt_max_m);
    let sensor = DualBeamSensor::new(cfg, displacements, (sc.scan.phase1_rad, sc.scan.phase2_rad))?;
    let run = NavRunConfig {
        dt_s: sc.navigation.dt_s,
        duration_s: sc.navigation.duration_s,
        seed: sc.navigation.noise.then_some(sc.scan.seed),
    };
    let nav = navigate(&sensor, &sc.truth, &run, ctx.exec)?;
    let sigma = predicted_position_sigma(&sensor, &run)?;

    let err = nav.final_position_error();
    let err_mag = err[0].hypot(err[1]);
    let accel_errs: Vec<f64> = nav.epochs.iter().map(|e| e.accel - e.truth_accel).collect();
    let rot_errs: Vec<f64> = nav
        .epochs
        .iter()
        .map(|e| e.rot_rate - e.truth_rot_rate)
        .collect();
    let last = nav.estimated.last().copied().unwrap_or_default();
    let truth_last = nav.truth.last().copied().unwrap_or_default();

    ctx.prepare_out()?;
    ctx.write_with("trajectory.csv", |w| {
        write_trajectory_csv(&nav.estimated, w)
    })?;
    ctx.write_with("truth_trajectory.csv", |w| {
        write_trajectory_csv(&nav.truth, w)
    })?;
    ctx.write_with("epochs.csv", |w| {
        writeln!(w, "t,truth_accel_mps2,accel_mps2,truth_rot_radps,rot_radps,phase_forward_rad,phase_backward_rad")?;
        for e in &nav.epochs {
            writeln!(
                w,
                "{},{},{},{},{},{},{}",
                e.time, e.truth_accel, e.accel, e.truth_rot_rate, e.rot_rate, e.phase_forward, e.phase_backward
            )?;
        }
        Ok(())
    })?;
    let summary = json!({
        "command": "navigate",
        "epochs": nav.epochs.len(),
        "final_position_m": last.position,
        "truth_final_position_m": truth_last.position,
        "final_position_error_m": err,
        "final_position_error_magnitude_m": err_mag,
        "predicted_position_sigma_m": sigma,
        "accel_error_rms_mps2": atomnav::stats::rms(&accel_errs),
        "rot_error_rms_radps": atomnav::stats::rms(&rot_errs),
        "scenario": sc,
    });
    ctx.finish(
        "navigate_summary.json",
        &summary,
        &[
            format!(
                "final position ({:.9}, {:.9}) m, truth ({:.9}, {:.9}) m",
                last.position[0], last.position[1], truth_last.position[0], truth_last.position[1]
            ),
            format!("position error {err_mag:.3e} m, predicted 1-sigma {sigma:.3e} m"),
        ],
    )
}

/// Parses, evaluates and checks a chain file; the report always goes to stdout.
pub fn chain(path: &Path) -> Result<(), CliError> {
    let text =
        fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let chain =
        parse_chain(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let reports =
        check_locks(&chain).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    emit(&to_json(&reports)?)?;
    let failed: Vec<&str> = reports
        .iter()
        .filter(|r| !r.pass)
        .map(|r| r.id.as_str())
        .collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Check(format!(
            "lock checks failed: {}",
            failed.join(", ")
        )))
    }
}

pub fn lockin(ctx: &Context) -> Result<(), CliError> {
    let sc = &ctx.scenario;
    let l = &sc.lockin;
    let mut human = Vec::new();
    let mut demod = None;
    let mut servo = None;
    let mut servo_traj = None;

    if matches!(l.mode, LockinMode::Demod | LockinMode::Both) {
        let sig = synthesize(
            l.s1,
            l.s2,
            l.ref_freq_hz,
            l.noise_rms,
            l.duration_s,
            l.sample_rate_hz,
            l.seed,
        )?;
        let s1_est = demodulate(&sig)?;
        let raw = raw_integral(&sig)?;
        human.push(format!("s1 estimate {s1_est:.12} (raw integral {raw:.12})"));
        demod = Some(json!({
            "samples": sig.samples.len(),
            "periods": sig.periods(),
            "raw_integral": raw,
            "s1_estimate": s1_est,
        }));
        let dt = 1.0 / sig.sample_rate;
        ctx.prepare_out()?;
        ctx.write_with("lockin_signal.csv", |w| {
            writeln!(w, "t_s,signal")?;
            for (i, x) in sig.samples.iter().enumerate() {
                writeln!(w, "{},{x}", i as f64 * dt)?;
            }
            Ok(())
        })?;
    }
    if matches!(l.mode, LockinMode::Servo | LockinMode::Both) {
        let cfg = sc.servo_config();
        let traj = run_servo(l.setpoint_hz + l.initial_offset_hz, |_| 0.0, &cfg)?;
        human.push(format!(
            "servo: {:?}, converged {}, final {} Hz",
            traj.outcome,
            traj.converged(),
            traj.final_freq()
        ));
        servo = Some(json!({
            "outcome": traj.outcome,
            "converged": traj.converged(),
            "steps": traj.steps.len(),
            "final_freq_hz": traj.final_freq(),
        }));
        ctx.prepare_out()?;
        ctx.write_with("servo_trajectory.csv", |w| traj.write_csv(w))?;
        servo_traj = Some(traj);
    }

    let summary = json!({
        "command": "lockin",
        "demodulation": demod,
        "servo": servo,
        "scenario": sc,
    });
    ctx.prepare_out()?;
    ctx.finish("lockin_summary.json", &summary, &human)?;
    match servo_traj {
        Some(t) if !t.converged() => Err(CliError::Check(format!(
            "servo did not lock: {:?}",
            t.outcome
        ))),
        _ => Ok(()),
    }
}

pub fn align(ctx: &Context) -> Result<(), CliError> {
    let sc = &ctx.scenario;
    let cfg = sc.interferometer_config()?;
    let g = BeamGeometry::from_config(&cfg, sc.alignment.tilt_rad)?;
    let report = check_alignment(&g, sc.alignment.safety_factor)?;
    ctx.prepare_out()?;
    let summary = json!({
        "command": "align",
        "report": report,
        "scenario": sc,
    });
    ctx.finish(
        "alignment_report.json",
        &summary,
        &[format!(
            "tilt {:.3e} rad x {} vs bound {:.6e} rad: {}",
            report.tilt_rad,
            report.safety_factor,
            report.max_tilt_rad,
            if report.pass { "pass" } else { "FAIL" }
        )],
    )?;
    if report.pass {
        Ok(())
    } else {
        Err(CliError::Check("tilt exceeds the alignment bound".into()))
    }
}
