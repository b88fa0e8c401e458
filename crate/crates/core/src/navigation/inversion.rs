//! Phase → inertial quantity conversions and dual-beam separation.

use std::f64::consts::{PI, TAU};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::interferometer::{rotation_phase, sagnac_area_from_geometry, InterferometerConfig};

/// Wraps a phase into `(−π, π]`.
pub fn wrap_phase(phase: f64) -> f64 {
    let w = (phase + PI).rem_euclid(TAU) - PI;
    if w == -PI {
        PI
    } else {
        w
    }
}

/// Adds `fringe_order` whole fringes to a wrapped phase.
pub fn unwrap_with_order(wrapped: f64, fringe_order: i64) -> f64 {
    wrap_phase(wrapped) + TAU * fringe_order as f64
}

/// Fringe order that brings `wrapped` closest to `hint`.
pub fn fringe_order_near(wrapped: f64, hint: f64) -> i64 {
    ((hint - wrap_phase(wrapped)) / TAU).round() as i64
}

/// Splits the phases of two beams that differ only in the sign of `v_z`.
///
/// The acceleration phase is even under beam reversal and the Sagnac phase is
/// odd, so half the sum and half the difference isolate them. Returns
/// `(accel_phase, rotation_phase)` referred to the forward beam.
pub fn separate_inertial(phase_forward: f64, phase_backward: f64) -> (f64, f64) {
    (
        0.5 * (phase_forward + phase_backward),
        0.5 * (phase_forward - phase_backward),
    )
}

/// Inverse of [`crate::interferometer::accel_phase`].
pub fn accel_from_phase(phase: f64, config: &InterferometerConfig) -> Result<f64> {
    config.validate()?;
    let scale = config.k_eff * config.t * config.t;
    if scale == 0.0 || !scale.is_finite() {
        return Err(Error::invalid(
            "k_eff·T² is zero; acceleration is unobservable",
        ));
    }
    Ok(-phase / scale)
}

/// Inverse of [`rotation_phase`] for a given loop area.
pub fn rotation_from_phase(
    phase: f64,
    config: &InterferometerConfig,
    sagnac_area: f64,
) -> Result<f64> {
    if sagnac_area == 0.0 {
        return Err(Error::invalid(
            "Sagnac area is zero; rotation is unobservable",
        ));
    }
    Ok(phase / rotation_phase(config, 1.0, sagnac_area)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Sensitivity {
    /// Acceleration change producing `phase_resolution`, m/s².
    pub accel_res: f64,
    /// Rotation change producing `phase_resolution`, rad/s.
    pub rot_res: f64,
    /// Single-shot shot-noise phase resolution `1/(C√N)`, rad.
    pub shot_noise_phase: f64,
}

/// Resolution of the sensor for a given phase resolution, using the loop area
/// of the recoil-split arms.
pub fn sensitivity(config: &InterferometerConfig, phase_resolution: f64) -> Result<Sensitivity> {
    config.validate()?;
    let area = sagnac_area_from_geometry(config);
    let dphi_domega = rotation_phase(config, 1.0, area)?.abs();
    Ok(Sensitivity {
        accel_res: phase_resolution / (config.k_eff * config.t * config.t).abs(),
        rot_res: phase_resolution / dphi_domega,
        shot_noise_phase: 1.0 / (config.contrast * (config.n_atoms_per_shot as f64).sqrt()),
    })
}

/// Phase resolution needed to resolve `accel_res` m/s².
pub fn required_phase_resolution(config: &InterferometerConfig, accel_res: f64) -> f64 {
    accel_res * (config.k_eff * config.t * config.t).abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interferometer::accel_phase;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn cfg() -> InterferometerConfig {
        InterferometerConfig::default()
    }

    #[test]
    fn separation_examples() {
        assert_eq!(separate_inertial(0.7, 0.7), (0.7, 0.0));
        assert_eq!(separate_inertial(0.7, -0.7), (0.0, 0.7));
    }

    #[test]
    fn accel_inverse() {
        let c = cfg();
        assert_relative_eq!(
            accel_from_phase(-63.3, &c).unwrap(),
            9.7954,
            max_relative = 1e-4
        );
        assert_eq!(accel_from_phase(0.0, &c).unwrap(), 0.0);
        let flat = InterferometerConfig { k_eff: 0.0, ..c };
        assert!(accel_from_phase(1.0, &flat).is_err());
    }

    #[test]
    fn rotation_inverse() {
        let c = cfg();
        let area = sagnac_area_from_geometry(&c);
        let phi = rotation_phase(&c, 7.29e-5, area).unwrap();
        assert_relative_eq!(
            rotation_from_phase(phi, &c, area).unwrap(),
            7.29e-5,
            max_relative = 1e-12
        );
        assert_eq!(rotation_from_phase(0.0, &c, area).unwrap(), 0.0);
        assert_relative_eq!(
            rotation_from_phase(0.0141, &c, area).unwrap(),
            7.29e-5,
            max_relative = 3e-3
        );
        assert!(rotation_from_phase(0.1, &c, 0.0).is_err());
    }

    #[test]
    fn sensitivity_examples() {
        let c = cfg();
        let s = sensitivity(&c, 1.0).unwrap();
        // 1 / (1.61107e7 · 4.01111e-7)
        assert_relative_eq!(s.accel_res, 0.15475, max_relative = 1e-4);
        assert_relative_eq!(s.shot_noise_phase, 1e-3, max_relative = 1e-12);
        assert_relative_eq!(
            required_phase_resolution(&c, 1e-7),
            6.46e-7,
            max_relative = 1e-3
        );
        let long = c.with_zone_spacing(2.0 * c.l);
        assert_relative_eq!(
            sensitivity(&long, 1.0).unwrap().accel_res,
            0.25 * s.accel_res,
            max_relative = 1e-12
        );
        // dφ_Ω/dΩ = 2 k_eff v_z T²
        assert_relative_eq!(
            s.rot_res,
            1.0 / (2.0 * c.k_eff * c.v_z * c.t * c.t),
            max_relative = 1e-9
        );
    }

    #[test]
    fn wrapping() {
        assert_eq!(wrap_phase(PI), PI);
        assert_eq!(wrap_phase(-PI), PI);
        assert_relative_eq!(wrap_phase(3.0 * PI + 0.1), -PI + 0.1, max_relative = 1e-12);
        assert_eq!(fringe_order_near(0.5, 0.5 + 4.0 * PI), 2);
        assert_relative_eq!(
            unwrap_with_order(0.5 + TAU, -3),
            0.5 - 3.0 * TAU,
            max_relative = 1e-12
        );
    }

    proptest! {
        #[test]
        fn accel_round_trip(a in -100.0..100.0f64) {
            let c = cfg();
            let back = accel_from_phase(accel_phase(&c, a).unwrap(), &c).unwrap();
            prop_assert!((back - a).abs() <= 1e-12 * a.abs().max(1e-300));
        }
    }
}
