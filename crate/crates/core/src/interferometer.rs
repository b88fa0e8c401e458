//! Mach-Zehnder π/2–π–π/2 interferometer on a continuous cold atomic beam.
//!
//! The three Raman zones sit `L` apart along the beam, so an atom moving at
//! `v_z` sees pulses separated by `T = L/|v_z|`. The ground-state population at
//! the output is
//!
//! ```text
//! P = ½ [1 + C cos(φ_a + φ_Ω + φ₁ − 2φ₂ + φ₃)]
//! φ_a = −k_eff a T²
//! φ_Ω = 4π A Ω / (λ_dB |v_z|) = 2 m A Ω / ħ
//! ```
//!
//! with `λ_dB = h/(m|v_z|)` the de Broglie wavelength and `A` the signed area
//! enclosed by the two recoil-split arms. Reversing `v_z` flips `A` (and hence
//! `φ_Ω`) but leaves `T` and `φ_a` unchanged.

use std::io::{self, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::atom_optics;
use crate::constants::{
    BEAM_VELOCITY_MPS, HBAR, LAMBDA_LASER_M, PLANCK, PZT_FULL_SCALE_PHASE_RAD,
    PZT_MAX_DISPLACEMENT_M, RAMAN_BEAM_WIDTH_M, RB87_MASS_KG, ZONE_SPACING_M,
};
use crate::error::{ensure, Error, Result};
use crate::exec::Exec;

const EQUAL_INTERVAL_RTOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InterferometerConfig {
    #[serde(rename = "lambda_laser_m")]
    pub lambda_laser: f64,
    #[serde(rename = "k_eff_radpm")]
    pub k_eff: f64,
    /// Signed longitudinal beam velocity.
    #[serde(rename = "v_z_mps")]
    pub v_z: f64,
    #[serde(rename = "beam_width_m")]
    pub d: f64,
    #[serde(rename = "zone_spacing_m")]
    pub l: f64,
    #[serde(rename = "pulse_interval_s")]
    pub t: f64,
    #[serde(rename = "atom_mass_kg")]
    pub atom_mass: f64,
    pub n_atoms_per_shot: u64,
    pub contrast: f64,
}

impl Default for InterferometerConfig {
    fn default() -> Self {
        InterferometerConfig::from_geometry(
            LAMBDA_LASER_M,
            BEAM_VELOCITY_MPS,
            RAMAN_BEAM_WIDTH_M,
            ZONE_SPACING_M,
        )
    }
}

impl InterferometerConfig {
    /// Counter-propagating Raman beams (`k_eff ≅ 2k₁`) and `T = L/|v_z|`; ⁸⁷Rb,
    /// 10⁶ atoms per shot, unit contrast.
    pub fn from_geometry(lambda_laser: f64, v_z: f64, d: f64, l: f64) -> Self {
        InterferometerConfig {
            lambda_laser,
            k_eff: 2.0 * std::f64::consts::TAU / lambda_laser,
            v_z,
            d,
            l,
            t: l / v_z.abs(),
            atom_mass: RB87_MASS_KG,
            n_atoms_per_shot: 1_000_000,
            contrast: 1.0,
        }
    }

    /// Same geometry with the beam running the other way.
    pub fn reversed(&self) -> Self {
        InterferometerConfig {
            v_z: -self.v_z,
            ..*self
        }
    }

    pub fn with_contrast(mut self, contrast: f64) -> Self {
        self.contrast = contrast;
        self
    }

    pub fn with_atoms(mut self, n: u64) -> Self {
        self.n_atoms_per_shot = n;
        self
    }

    /// Changes the zone spacing and recomputes `T`.
    pub fn with_zone_spacing(mut self, l: f64) -> Self {
        self.l = l;
        self.t = l / self.v_z.abs();
        self
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [
            self.lambda_laser,
            self.k_eff,
            self.v_z,
            self.d,
            self.l,
            self.t,
            self.atom_mass,
            self.contrast,
        ]
        .iter()
        .all(|x| x.is_finite());
        ensure(finite, || {
            format!("non-finite interferometer parameter in {self:?}")
        })?;
        ensure(self.t > 0.0, || {
            format!("pulse interval must be positive, got {}", self.t)
        })?;
        ensure(self.contrast > 0.0 && self.contrast <= 1.0, || {
            format!("contrast must lie in (0, 1], got {}", self.contrast)
        })?;
        ensure(self.atom_mass >= 0.0, || {
            format!("atom mass must be non-negative, got {}", self.atom_mass)
        })
    }

    /// `ħ k_eff / m`, m/s.
    pub fn recoil_velocity(&self) -> f64 {
        HBAR * self.k_eff / self.atom_mass
    }

    pub fn de_broglie_wavelength(&self) -> f64 {
        PLANCK / (self.atom_mass * self.v_z.abs())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InertialInput {
    /// Acceleration along `k_eff`, m/s².
    pub accel: f64,
    /// Rotation rate projected on the loop normal, rad/s.
    pub rot_rate: f64,
    /// Signed Sagnac loop area, m².
    pub sagnac_area: f64,
}

impl InertialInput {
    /// Uses the loop area enclosed by the recoil-split arms of `config`.
    pub fn for_config(config: &InterferometerConfig, accel: f64, rot_rate: f64) -> Self {
        InertialInput {
            accel,
            rot_rate,
            sagnac_area: sagnac_area_from_geometry(config),
        }
    }

    pub fn validate(&self) -> Result<()> {
        ensure(
            self.accel.is_finite() && self.rot_rate.is_finite() && self.sagnac_area.is_finite(),
            || format!("non-finite inertial input {self:?}"),
        )
    }
}

/// Laser phases `(φ₁, φ₂, φ₃)` of the three pulses.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct LaserPhases {
    pub phi1: f64,
    pub phi2: f64,
    pub phi3: f64,
}

impl LaserPhases {
    pub fn new(phi1: f64, phi2: f64, phi3: f64) -> Self {
        LaserPhases { phi1, phi2, phi3 }
    }

    /// `φ₁ − 2φ₂ + φ₃`
    pub fn combined(&self) -> f64 {
        self.phi1 - 2.0 * self.phi2 + self.phi3
    }
}

pub fn accel_phase(config: &InterferometerConfig, accel: f64) -> Result<f64> {
    config.validate()?;
    Ok(-config.k_eff * accel * config.t * config.t)
}

pub fn rotation_phase(
    config: &InterferometerConfig,
    rot_rate: f64,
    sagnac_area: f64,
) -> Result<f64> {
    config.validate()?;
    if config.v_z == 0.0 || config.atom_mass == 0.0 {
        return Err(Error::invalid(
            "rotation phase needs non-zero beam velocity and atom mass",
        ));
    }
    let lambda_db = config.de_broglie_wavelength();
    Ok(4.0 * std::f64::consts::PI / (lambda_db * config.v_z.abs()) * sagnac_area * rot_rate)
}

/// Parallelogram enclosed by the two arms over `2T`: the arms separate at the
/// recoil velocity for `T` and recombine over the next `T` while travelling
/// `v_z·T` per interval. Signed with `v_z`.
pub fn sagnac_area_from_geometry(config: &InterferometerConfig) -> f64 {
    config.recoil_velocity() * config.v_z * config.t * config.t
}

/// `k_eff·(x(t₁) − 2x(t₂) + x(t₃))` for a trajectory along `k_eff`.
///
/// This is the raw imprint of the laser phase fronts; for `x = ½at²` it equals
/// `+k_eff a T²`, the negative of [`accel_phase`].
pub fn phase_from_trajectory<F>(
    config: &InterferometerConfig,
    position_at: F,
    pulse_times: (f64, f64, f64),
) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    config.validate()?;
    let (t1, t2, t3) = pulse_times;
    let (d1, d2) = (t2 - t1, t3 - t2);
    let close = |a: f64, b: f64| (a - b).abs() <= EQUAL_INTERVAL_RTOL * a.abs().max(b.abs());
    ensure(d1 > 0.0 && close(d1, d2) && close(d1, config.t), || {
        format!(
            "pulse times must be evenly spaced by T = {} s, got intervals {d1} and {d2}",
            config.t
        )
    })?;
    Ok(config.k_eff * (position_at(t1) - 2.0 * position_at(t2) + position_at(t3)))
}

pub fn fringe_probability(total_phase: f64, contrast: f64) -> f64 {
    0.5 * (1.0 + contrast * total_phase.cos())
}

/// Total interferometer phase entering the cosine.
pub fn total_phase(
    config: &InterferometerConfig,
    inertial: &InertialInput,
    phases: &LaserPhases,
) -> Result<f64> {
    inertial.validate()?;
    Ok(accel_phase(config, inertial.accel)?
        + rotation_phase(config, inertial.rot_rate, inertial.sagnac_area)?
        + phases.combined())
}

/// Transverse starting conditions of an atom for the pulse-level route.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Trajectory {
    /// Position along `k_eff` at the first pulse, m.
    pub x0: f64,
    /// Velocity along `k_eff` at the first pulse, m/s.
    pub v0: f64,
    /// Time of the first pulse, s.
    pub t0: f64,
}

/// Ground-state population from the explicit pulse sequence.
///
/// The atom follows `x(t) = x₀ + v₀(t−t₀) + ½(a − 2Ωv_z)(t−t₀)²`, where the
/// second term of the acceleration is the Coriolis acceleration in the frame
/// rotating with the sensor. Each pulse imprints `φᵢ − k_eff·x(tᵢ)`. Unit
/// contrast. Agrees with [`fringe_probability`] of [`total_phase`] when the
/// inertial input uses [`sagnac_area_from_geometry`].
pub fn pulse_level_population(
    config: &InterferometerConfig,
    accel: f64,
    rot_rate: f64,
    phases: &LaserPhases,
    trajectory: &Trajectory,
) -> Result<f64> {
    config.validate()?;
    let a_total = accel - 2.0 * rot_rate * config.v_z;
    let x = |t: f64| {
        let s = t - trajectory.t0;
        trajectory.x0 + trajectory.v0 * s + 0.5 * a_total * s * s
    };
    let times = [
        trajectory.t0,
        trajectory.t0 + config.t,
        trajectory.t0 + 2.0 * config.t,
    ];
    let imprint = |phi: f64, t: f64| phi - config.k_eff * x(t);
    let state = atom_optics::mach_zehnder(
        imprint(phases.phi1, times[0]),
        imprint(phases.phi2, times[1]),
        imprint(phases.phi3, times[2]),
    )?;
    Ok(state.population_f())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShotOutcome {
    pub probability: f64,
    pub count: u64,
}

/// Binomial detection of `n_atoms_per_shot` atoms with the fringe probability.
pub fn simulate_shot_with_rng<R: Rng + ?Sized>(
    config: &InterferometerConfig,
    inertial: &InertialInput,
    phases: &LaserPhases,
    rng: &mut R,
) -> Result<ShotOutcome> {
    let probability =
        fringe_probability(total_phase(config, inertial, phases)?, config.contrast).clamp(0.0, 1.0);
    let count = Binomial::new(config.n_atoms_per_shot, probability)
        .map_err(|e| Error::invalid(format!("binomial draw: {e}")))?
        .sample(rng);
    Ok(ShotOutcome { probability, count })
}

pub fn simulate_shot(
    config: &InterferometerConfig,
    inertial: &InertialInput,
    phases: &LaserPhases,
    rng_seed: u64,
) -> Result<ShotOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    simulate_shot_with_rng(config, inertial, phases, &mut rng)
}

/// Commanded third-pulse phase offset for a PZT displacement, rad.
pub fn pzt_phase(displacement: f64) -> Result<f64> {
    ensure(
        (0.0..=PZT_MAX_DISPLACEMENT_M).contains(&displacement),
        || format!("PZT displacement {displacement} m outside [0, {PZT_MAX_DISPLACEMENT_M}] m"),
    )?;
    Ok(displacement / PZT_MAX_DISPLACEMENT_M * PZT_FULL_SCALE_PHASE_RAD)
}

/// `n` displacements evenly covering `[0, max]`, both ends included.
pub fn pzt_sweep(n: usize, max: f64) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![0.0],
        _ => (0..n).map(|i| max * i as f64 / (n - 1) as f64).collect(),
    }
}

/// How scan populations are measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Detection {
    /// Exact fringe probability, no counts.
    Ideal,
    /// Binomial atom counting; point `i` draws from ChaCha stream `i` of `seed`.
    Shot { seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FringeScan {
    /// Commanded φ₃ offsets, rad.
    pub phases: Vec<f64>,
    pub populations: Vec<f64>,
    pub counts: Option<Vec<u64>>,
}

impl FringeScan {
    pub fn new(phases: Vec<f64>, populations: Vec<f64>, counts: Option<Vec<u64>>) -> Result<Self> {
        ensure(
            phases.len() == populations.len() && phases.len() >= 3,
            || {
                format!(
                    "scan needs ≥ 3 points with matching columns, got {} phases and {} populations",
                    phases.len(),
                    populations.len()
                )
            },
        )?;
        if let Some(c) = &counts {
            ensure(c.len() == phases.len(), || {
                "count column length mismatch".to_string()
            })?;
        }
        Ok(FringeScan {
            phases,
            populations,
            counts,
        })
    }

    pub fn len(&self) -> usize {
        self.phases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phases.is_empty()
    }

    /// Columns `phase_rad,population,count`; `count` is blank for ideal scans.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "phase_rad,population,count")?;
        for i in 0..self.len() {
            match &self.counts {
                Some(c) => writeln!(w, "{},{},{}", self.phases[i], self.populations[i], c[i])?,
                None => writeln!(w, "{},{},", self.phases[i], self.populations[i])?,
            }
        }
        Ok(())
    }
}

/// Scans the third pulse phase with the PZT-tilted phase plate.
///
/// `base_phases` supplies `(φ₁, φ₂)`; the third pulse phase is the commanded
/// offset for each displacement.
pub fn pzt_scan(
    config: &InterferometerConfig,
    inertial: &InertialInput,
    base_phases: (f64, f64),
    pzt_displacements: &[f64],
    detection: Detection,
    exec: Exec,
) -> Result<FringeScan> {
    config.validate()?;
    let commanded = pzt_displacements
        .iter()
        .map(|&d| pzt_phase(d))
        .collect::<Result<Vec<_>>>()?;
    let n_atoms = config.n_atoms_per_shot;
    let shots = exec.try_map(commanded.len(), |i| {
        let phases = LaserPhases::new(base_phases.0, base_phases.1, commanded[i]);
        match detection {
            Detection::Ideal => {
                let p =
                    fringe_probability(total_phase(config, inertial, &phases)?, config.contrast);
                Ok::<_, Error>((p, None))
            }
            Detection::Shot { seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(i as u64);
                let shot = simulate_shot_with_rng(config, inertial, &phases, &mut rng)?;
                Ok((shot.count as f64 / n_atoms as f64, Some(shot.count)))
            }
        }
    })?;
    let populations = shots.iter().map(|s| s.0).collect();
    let counts = match detection {
        Detection::Ideal => None,
        Detection::Shot { .. } => Some(shots.iter().map(|s| s.1.unwrap_or(0)).collect()),
    };
    FringeScan::new(commanded, populations, counts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn cfg() -> InterferometerConfig {
        InterferometerConfig::default()
    }

    #[test]
    fn default_geometry_values() {
        let c = cfg();
        assert_relative_eq!(c.k_eff, 2.0 * (2.0 * PI / 780e-9), max_relative = 1e-12);
        assert_relative_eq!(c.k_eff, 1.6111e7, max_relative = 1e-4);
        assert_relative_eq!(c.t, 633.333e-6, max_relative = 1e-5);
        assert_relative_eq!(c.recoil_velocity(), 11.77e-3, max_relative = 1e-3);
    }

    #[test]
    fn accel_phase_examples() {
        let c = cfg();
        assert_eq!(accel_phase(&c, 0.0).unwrap(), 0.0);
        // k_eff T² = 1.61107e7 · 4.01111e-7 = 6.46219; × 9.8 = 63.33
        let p = accel_phase(&c, 9.8).unwrap();
        assert_relative_eq!(p, -63.329, max_relative = 1e-4);
        let flipped = InterferometerConfig {
            k_eff: -c.k_eff,
            ..c
        };
        assert_eq!(accel_phase(&flipped, 9.8).unwrap(), -p);
    }

    #[test]
    fn sagnac_area_and_earth_rate_phase() {
        let c = cfg();
        let area = sagnac_area_from_geometry(&c);
        // 11.772 mm/s · 15 m/s · 4.0111e-7 s² = 7.083e-8 m²
        assert_relative_eq!(area, 7.083e-8, max_relative = 1e-3);
        let phi = rotation_phase(&c, 7.29e-5, area).unwrap();
        // 2 m A Ω / ħ = 2·1.4432e-25·7.083e-8·7.29e-5 / 1.05457e-34
        assert_relative_eq!(phi, 0.014133, max_relative = 1e-3);
        let direct = 2.0 * c.atom_mass * area * 7.29e-5 / HBAR;
        assert_relative_eq!(phi, direct, max_relative = 1e-12);
        assert_eq!(rotation_phase(&c, 0.0, area).unwrap(), 0.0);
        assert_relative_eq!(
            rotation_phase(&c, 7.29e-5, 2.0 * area).unwrap(),
            2.0 * phi,
            max_relative = 1e-14
        );
    }

    #[test]
    fn sagnac_area_matches_two_arm_integration() {
        // Integrate the two arms explicitly and take the enclosed polygon area
        // with the shoelace formula.
        let c = cfg();
        let vr = c.recoil_velocity();
        let steps = 2000;
        let dt = 2.0 * c.t / steps as f64;
        let mut upper = Vec::new();
        let mut lower = Vec::new();
        for i in 0..=steps {
            let t = i as f64 * dt;
            let z = c.v_z * t;
            // arm A kicked at t=0, stopped at T; arm B kicked at T, stopped at 2T.
            let xa = if t <= c.t { vr * t } else { vr * c.t };
            let xb = if t <= c.t { 0.0 } else { vr * (t - c.t) };
            upper.push((z, xa));
            lower.push((z, xb));
        }
        let mut poly = upper.clone();
        poly.extend(lower.into_iter().rev());
        let mut twice = 0.0;
        for w in 0..poly.len() {
            let (x1, y1) = poly[w];
            let (x2, y2) = poly[(w + 1) % poly.len()];
            twice += x1 * y2 - x2 * y1;
        }
        let area = (0.5 * twice).abs();
        assert_relative_eq!(
            area,
            sagnac_area_from_geometry(&c).abs(),
            max_relative = 1e-9
        );
    }

    #[test]
    fn area_degenerate_and_scaling() {
        let c = cfg();
        assert_eq!(
            sagnac_area_from_geometry(&InterferometerConfig { k_eff: 0.0, ..c }),
            0.0
        );
        let doubled = c.with_zone_spacing(2.0 * c.l);
        assert_relative_eq!(
            sagnac_area_from_geometry(&doubled),
            4.0 * sagnac_area_from_geometry(&c),
            max_relative = 1e-12
        );
    }

    #[test]
    fn rotation_phase_rejects_singular_config() {
        let c = cfg();
        let no_mass = InterferometerConfig {
            atom_mass: 0.0,
            ..c
        };
        assert!(rotation_phase(&no_mass, 1.0, 1e-8).is_err());
        let stopped = InterferometerConfig { v_z: 0.0, ..c };
        assert!(rotation_phase(&stopped, 1.0, 1e-8).is_err());
    }

    #[test]
    fn trajectory_second_difference() {
        let c = cfg();
        let times = (0.0, c.t, 2.0 * c.t);
        assert_eq!(phase_from_trajectory(&c, |_| 3.0, times).unwrap(), 0.0);
        let lin = phase_from_trajectory(&c, |t| 0.2 * t, times).unwrap();
        assert!(lin.abs() < 1e-9);
        let quad = phase_from_trajectory(&c, |t| 0.5 * 9.8 * t * t, times).unwrap();
        assert_relative_eq!(quad, 63.329, max_relative = 1e-4);
        assert_relative_eq!(quad, -accel_phase(&c, 9.8).unwrap(), max_relative = 1e-9);
        assert!(phase_from_trajectory(&c, |t| t, (0.0, c.t, 2.5 * c.t)).is_err());
        assert!(phase_from_trajectory(&c, |t| t, (0.0, 1e-3, 2e-3)).is_err());
    }

    #[test]
    fn fringe_probability_examples() {
        assert_eq!(fringe_probability(0.0, 1.0), 1.0);
        assert!(fringe_probability(PI, 1.0).abs() < 1e-16);
        assert_relative_eq!(
            fringe_probability(FRAC_PI_2, 0.5),
            0.5,
            max_relative = 1e-15
        );
    }

    #[test]
    fn shot_examples() {
        let c = cfg();
        let still = InertialInput::for_config(&c, 0.0, 0.0);
        let bright = simulate_shot(&c, &still, &LaserPhases::default(), 1).unwrap();
        assert_eq!(bright.probability, 1.0);
        assert_eq!(bright.count, 1_000_000);

        // φ₃ = π puts the output on the dark fringe; cos(π) leaves 1e-33 behind.
        let dark = simulate_shot(&c, &still, &LaserPhases::new(0.0, 0.0, PI), 1).unwrap();
        assert_eq!(dark.count, 0);

        let mid = LaserPhases::new(0.0, 0.0, FRAC_PI_2);
        let a = simulate_shot(&c, &still, &mid, 42).unwrap();
        let b = simulate_shot(&c, &still, &mid, 42).unwrap();
        assert_eq!(a, b);
        assert!(
            (a.count as f64 - 5e5).abs() < 5.0 * 500.0,
            "count {}",
            a.count
        );
    }

    #[test]
    fn pzt_mapping() {
        assert_eq!(pzt_phase(9e-6).unwrap(), 30.0);
        assert_eq!(pzt_phase(0.0).unwrap(), 0.0);
        assert_relative_eq!(pzt_phase(3e-6).unwrap(), 10.0, max_relative = 1e-14);
        assert!(pzt_phase(-1e-9).is_err());
        assert!(pzt_phase(9.1e-6).is_err());
    }

    #[test]
    fn scan_is_deterministic_across_strategies() {
        let c = cfg();
        let inertial = InertialInput::for_config(&c, 0.05, 1e-3);
        let disp = pzt_sweep(33, 9e-6);
        let seq = pzt_scan(
            &c,
            &inertial,
            (0.1, 0.2),
            &disp,
            Detection::Shot { seed: 9 },
            Exec::Sequential,
        )
        .unwrap();
        let par = pzt_scan(
            &c,
            &inertial,
            (0.1, 0.2),
            &disp,
            Detection::Shot { seed: 9 },
            Exec::Parallel,
        )
        .unwrap();
        assert_eq!(seq, par);
        assert_eq!(*seq.phases.last().unwrap(), 30.0);
        let ideal = pzt_scan(
            &c,
            &inertial,
            (0.1, 0.2),
            &disp,
            Detection::Ideal,
            Exec::Sequential,
        )
        .unwrap();
        assert!(ideal.counts.is_none());
        for (p, q) in ideal.populations.iter().zip(&seq.populations) {
            assert!((p - q).abs() < 5.0 * 0.5 / 1000.0);
        }
    }

    #[test]
    fn scan_rejects_out_of_range() {
        let c = cfg();
        let inertial = InertialInput::for_config(&c, 0.0, 0.0);
        let r = pzt_scan(
            &c,
            &inertial,
            (0.0, 0.0),
            &[0.0, 1e-6, 1e-5],
            Detection::Ideal,
            Exec::Sequential,
        );
        assert!(r.is_err());
    }

    #[test]
    fn scan_csv_layout() {
        let scan = FringeScan::new(
            vec![0.0, 1.0, 2.0],
            vec![1.0, 0.5, 0.25],
            Some(vec![4, 2, 1]),
        )
        .unwrap();
        let mut buf = Vec::new();
        scan.write_csv(&mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "phase_rad,population,count\n0,1,4\n1,0.5,2\n2,0.25,1\n"
        );
        assert!(FringeScan::new(vec![0.0, 1.0], vec![1.0, 0.5], None).is_err());
    }

    #[test]
    fn reversing_beam_flips_rotation_only() {
        let c = cfg();
        let r = c.reversed();
        assert_eq!(accel_phase(&c, 0.3).unwrap(), accel_phase(&r, 0.3).unwrap());
        let fwd = rotation_phase(&c, 1e-3, sagnac_area_from_geometry(&c)).unwrap();
        let bwd = rotation_phase(&r, 1e-3, sagnac_area_from_geometry(&r)).unwrap();
        assert_eq!(fwd, -bwd);
    }

    proptest! {
        #[test]
        fn periodic_and_bounded(phi in -100.0..100.0f64, contrast in 0.01..=1.0f64) {
            let p = fringe_probability(phi, contrast);
            prop_assert!((0.0..=1.0).contains(&p));
            prop_assert!((p - fringe_probability(phi + 2.0 * PI, contrast)).abs() < 1e-12);
        }

        #[test]
        fn accel_phase_is_odd(a in -50.0..50.0f64) {
            let c = cfg();
            prop_assert_eq!(accel_phase(&c, -a).unwrap(), -accel_phase(&c, a).unwrap());
        }

        #[test]
        fn pulse_level_route_matches_closed_form(
            a in -2.0..2.0f64,
            omega in -0.05..0.05f64,
            v_z in prop_oneof![-20.0..-5.0f64, 5.0..20.0f64],
            l in 2e-3..2e-2f64,
            p1 in -4.0..4.0f64, p2 in -4.0..4.0f64, p3 in -4.0..4.0f64,
            x0 in -1e-3..1e-3f64, v0 in -0.05..0.05f64, t0 in 0.0..1.0f64,
        ) {
            let c = InterferometerConfig::from_geometry(780e-9, v_z, 1e-3, l);
            let phases = LaserPhases::new(p1, p2, p3);
            let inertial = InertialInput::for_config(&c, a, omega);
            let closed = fringe_probability(total_phase(&c, &inertial, &phases).unwrap(), 1.0);
            let traj = Trajectory { x0, v0, t0 };
            let pulsed = pulse_level_population(&c, a, omega, &phases, &traj).unwrap();
            prop_assert!((closed - pulsed).abs() < 1e-10, "closed {} pulsed {}", closed, pulsed);
        }
    }
}
