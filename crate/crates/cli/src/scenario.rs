//! Scenario documents: one JSON object with optional blocks. Keys carry their
//! unit as a suffix. Missing fields inside a block take the default value and
//! are reported; blocks a subcommand depends on must be present when a config
//! file is given.

use std::path::Path;

use atomnav::constants::{
    ACHIEVED_TILT_RAD, BEAM_VELOCITY_MPS, LAMBDA_LASER_M, OFFSET_LOCK_SETPOINT_HZ,
    PZT_MAX_DISPLACEMENT_M, RAMAN_BEAM_WIDTH_M, RB87_MASS_KG, ZONE_SPACING_M,
};
use atomnav::interferometer::InterferometerConfig;
use atomnav::lockin_servo::ServoConfig;
use atomnav::navigation::{TruthProfile, TruthSegment};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub interferometer: Option<InterferometerBlock>,
    pub truth: Option<TruthBlock>,
    pub scan: Option<ScanBlock>,
    pub navigation: Option<NavigationBlock>,
    pub lockin: Option<LockinBlock>,
    pub alignment: Option<AlignmentBlock>,
    pub output: Option<OutputBlock>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InterferometerBlock {
    pub lambda_laser_m: Option<f64>,
    pub v_z_mps: Option<f64>,
    pub beam_width_m: Option<f64>,
    pub zone_spacing_m: Option<f64>,
    pub atom_mass_kg: Option<f64>,
    pub contrast: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TruthBlock {
    pub accel_mps2: Option<f64>,
    pub rot_radps: Option<f64>,
    pub segments: Option<Vec<TruthSegment>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanBlock {
    pub points: Option<usize>,
    pub pzt_max_m: Option<f64>,
    pub atoms_per_shot: Option<u64>,
    pub seed: Option<u64>,
    pub phase1_rad: Option<f64>,
    pub phase2_rad: Option<f64>,
    pub noise: Option<bool>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NavigationBlock {
    pub dt_s: Option<f64>,
    pub duration_s: Option<f64>,
    pub noise: Option<bool>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LockinBlock {
    pub mode: Option<LockinMode>,
    pub s1: Option<f64>,
    pub s2: Option<f64>,
    pub ref_freq_hz: Option<f64>,
    pub sample_rate_hz: Option<f64>,
    pub duration_s: Option<f64>,
    pub noise_rms: Option<f64>,
    pub seed: Option<u64>,
    pub gain: Option<f64>,
    pub setpoint_hz: Option<f64>,
    pub fvc_slope: Option<f64>,
    pub initial_offset_hz: Option<f64>,
    pub max_steps: Option<usize>,
    pub tolerance_hz: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlignmentBlock {
    pub tilt_rad: Option<f64>,
    pub safety_factor: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputBlock {
    pub dir: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LockinMode {
    Demod,
    Servo,
    Both,
}

/// Every block with all defaults applied; embedded in each JSON output.
#[derive(Debug, Clone, Serialize)]
pub struct Scenario {
    pub interferometer: ResolvedInterferometer,
    pub truth: TruthProfile,
    pub scan: ResolvedScan,
    pub navigation: ResolvedNavigation,
    pub lockin: ResolvedLockin,
    pub alignment: ResolvedAlignment,
    pub output_dir: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ResolvedInterferometer {
    pub lambda_laser_m: f64,
    pub v_z_mps: f64,
    pub beam_width_m: f64,
    pub zone_spacing_m: f64,
    pub atom_mass_kg: f64,
    pub contrast: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ResolvedScan {
    pub points: usize,
    pub pzt_max_m: f64,
    pub atoms_per_shot: u64,
    pub seed: u64,
    pub phase1_rad: f64,
    pub phase2_rad: f64,
    pub noise: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ResolvedNavigation {
    pub dt_s: f64,
    pub duration_s: f64,
    pub noise: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ResolvedLockin {
    pub mode: LockinMode,
    pub s1: f64,
    pub s2: f64,
    pub ref_freq_hz: f64,
    pub sample_rate_hz: f64,
    pub duration_s: f64,
    pub noise_rms: f64,
    pub seed: u64,
    pub gain: f64,
    pub setpoint_hz: f64,
    pub fvc_slope: f64,
    pub initial_offset_hz: f64,
    pub max_steps: usize,
    pub tolerance_hz: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ResolvedAlignment {
    pub tilt_rad: f64,
    pub safety_factor: f64,
}

/// Blocks a subcommand reads.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Block {
    Scan,
    Navigation,
    Lockin,
    Alignment,
}

impl Block {
    fn name(self) -> &'static str {
        match self {
            Block::Scan => "scan",
            Block::Navigation => "navigation",
            Block::Lockin => "lockin",
            Block::Alignment => "alignment",
        }
    }
}

/// Records which fields fell back to defaults.
#[derive(Default)]
struct Defaults {
    applied: Vec<String>,
}

impl Defaults {
    fn take<T: std::fmt::Debug>(
        &mut self,
        block: &str,
        key: &str,
        value: Option<T>,
        default: T,
    ) -> T {
        value.unwrap_or_else(|| {
            self.applied.push(format!("{block}.{key} = {default:?}"));
            default
        })
    }
}

pub struct Loaded {
    pub scenario: Scenario,
    /// Human-readable notes on defaults that were applied.
    pub defaults: Vec<String>,
}

pub fn load(path: Option<&Path>, required: &[Block]) -> Result<Loaded, CliError> {
    let file = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| CliError::Io(format!("cannot read config {}: {e}", p.display())))?;
            let file: ScenarioFile = serde_json::from_str(&text)
                .map_err(|e| CliError::Config(format!("config {}: {e}", p.display())))?;
            for &b in required {
                let present = match b {
                    Block::Scan => file.scan.is_some(),
                    Block::Navigation => file.navigation.is_some(),
                    Block::Lockin => file.lockin.is_some(),
                    Block::Alignment => file.alignment.is_some(),
                };
                if !present {
                    return Err(CliError::Config(format!(
                        "config {} is missing the `{}` block",
                        p.display(),
                        b.name()
                    )));
                }
            }
            file
        }
        None => ScenarioFile::default(),
    };
    resolve(file)
}

fn resolve(file: ScenarioFile) -> Result<Loaded, CliError> {
    let mut d = Defaults::default();

    let i = file.interferometer.unwrap_or_default();
    let interferometer = ResolvedInterferometer {
        lambda_laser_m: d.take(
            "interferometer",
            "lambda_laser_m",
            i.lambda_laser_m,
            LAMBDA_LASER_M,
        ),
        v_z_mps: d.take("interferometer", "v_z_mps", i.v_z_mps, BEAM_VELOCITY_MPS),
        beam_width_m: d.take(
            "interferometer",
            "beam_width_m",
            i.beam_width_m,
            RAMAN_BEAM_WIDTH_M,
        ),
        zone_spacing_m: d.take(
            "interferometer",
            "zone_spacing_m",
            i.zone_spacing_m,
            ZONE_SPACING_M,
        ),
        atom_mass_kg: d.take(
            "interferometer",
            "atom_mass_kg",
            i.atom_mass_kg,
            RB87_MASS_KG,
        ),
        contrast: d.take("interferometer", "contrast", i.contrast, 1.0),
    };

    let t = file.truth.unwrap_or_default();
    let truth = match t.segments {
        Some(segments) => {
            if t.accel_mps2.is_some() || t.rot_radps.is_some() {
                return Err(CliError::Config(
                    "truth: give either constant accel_mps2/rot_radps or segments, not both".into(),
                ));
            }
            if segments.is_empty() {
                return Err(CliError::Config("truth.segments is empty".into()));
            }
            TruthProfile { segments }
        }
        None => TruthProfile::constant(
            d.take("truth", "accel_mps2", t.accel_mps2, 0.0),
            d.take("truth", "rot_radps", t.rot_radps, 0.0),
        ),
    };

    let s = file.scan.unwrap_or_default();
    let scan = ResolvedScan {
        points: d.take("scan", "points", s.points, 32),
        pzt_max_m: d.take("scan", "pzt_max_m", s.pzt_max_m, PZT_MAX_DISPLACEMENT_M),
        atoms_per_shot: d.take("scan", "atoms_per_shot", s.atoms_per_shot, 1_000_000),
        seed: d.take("scan", "seed", s.seed, 1),
        phase1_rad: d.take("scan", "phase1_rad", s.phase1_rad, 0.0),
        phase2_rad: d.take("scan", "phase2_rad", s.phase2_rad, 0.0),
        noise: d.take("scan", "noise", s.noise, true),
    };

    let n = file.navigation.unwrap_or_default();
    let navigation = ResolvedNavigation {
        dt_s: d.take("navigation", "dt_s", n.dt_s, 0.01),
        duration_s: d.take("navigation", "duration_s", n.duration_s, 10.0),
        noise: d.take("navigation", "noise", n.noise, true),
    };

    let l = file.lockin.unwrap_or_default();
    let servo = ServoConfig::default();
    let lockin = ResolvedLockin {
        mode: d.take("lockin", "mode", l.mode, LockinMode::Both),
        s1: d.take("lockin", "s1", l.s1, 0.3),
        s2: d.take("lockin", "s2", l.s2, 0.0),
        ref_freq_hz: d.take("lockin", "ref_freq_hz", l.ref_freq_hz, 100e3),
        sample_rate_hz: d.take("lockin", "sample_rate_hz", l.sample_rate_hz, 10e6),
        duration_s: d.take("lockin", "duration_s", l.duration_s, 1e-3),
        noise_rms: d.take("lockin", "noise_rms", l.noise_rms, 0.0),
        seed: d.take("lockin", "seed", l.seed, 1),
        gain: d.take("lockin", "gain", l.gain, servo.gain),
        setpoint_hz: d.take(
            "lockin",
            "setpoint_hz",
            l.setpoint_hz,
            OFFSET_LOCK_SETPOINT_HZ,
        ),
        fvc_slope: d.take("lockin", "fvc_slope", l.fvc_slope, servo.fvc_slope),
        initial_offset_hz: d.take("lockin", "initial_offset_hz", l.initial_offset_hz, 1e6),
        max_steps: d.take("lockin", "max_steps", l.max_steps, servo.max_steps),
        tolerance_hz: d.take("lockin", "tolerance_hz", l.tolerance_hz, servo.tolerance_hz),
    };

    let a = file.alignment.unwrap_or_default();
    let alignment = ResolvedAlignment {
        tilt_rad: d.take("alignment", "tilt_rad", a.tilt_rad, ACHIEVED_TILT_RAD),
        safety_factor: d.take(
            "alignment",
            "safety_factor",
            a.safety_factor,
            atomnav::alignment::DEFAULT_SAFETY_FACTOR,
        ),
    };

    let o = file.output.unwrap_or_default();
    let output_dir = d.take("output", "dir", o.dir, "out".to_string());

    Ok(Loaded {
        scenario: Scenario {
            interferometer,
            truth,
            scan,
            navigation,
            lockin,
            alignment,
            output_dir,
        },
        defaults: d.applied,
    })
}

impl Scenario {
    /// Interferometer with the scan block's atom number.
    pub fn interferometer_config(&self) -> Result<InterferometerConfig, CliError> {
        let i = &self.interferometer;
        let mut cfg = InterferometerConfig::from_geometry(
            i.lambda_laser_m,
            i.v_z_mps,
            i.beam_width_m,
            i.zone_spacing_m,
        )
        .with_contrast(i.contrast)
        .with_atoms(self.scan.atoms_per_shot);
        cfg.atom_mass = i.atom_mass_kg;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn servo_config(&self) -> ServoConfig {
        let l = &self.lockin;
        ServoConfig {
            gain: l.gain,
            setpoint_hz: l.setpoint_hz,
            fvc_slope: l.fvc_slope,
            max_steps: l.max_steps,
            tolerance_hz: l.tolerance_hz,
        }
    }

    pub fn override_seed(&mut self, seed: u64) {
        self.scan.seed = seed;
        self.lockin.seed = seed;
    }
}
