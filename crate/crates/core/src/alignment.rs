//! Raman pulse timing and horizontal tilt tolerance.
//!
//! A tilt `θ` of the Raman beams away from perpendicular adds a Doppler shift
//! `−k_eff v_z sinθ` to the two-photon resonance; it must stay well inside the
//! transit-limited linewidth `Δδ₁₂ ≈ 2π·0.8/τ` with `τ = d/v_z`.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::constants::RAMAN_LINEWIDTH_COEFF;
use crate::error::{ensure, Error, Result};
use crate::interferometer::InterferometerConfig;

/// Margin applied to the tilt bound when none is given.
pub const DEFAULT_SAFETY_FACTOR: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BeamGeometry {
    #[serde(rename = "beam_width_m")]
    pub d: f64,
    #[serde(rename = "v_z_mps")]
    pub v_z: f64,
    #[serde(rename = "k_eff_radpm")]
    pub k_eff: f64,
    #[serde(rename = "tilt_rad")]
    pub tilt: f64,
}

impl BeamGeometry {
    pub fn new(d: f64, v_z: f64, k_eff: f64, tilt: f64) -> Result<Self> {
        let g = BeamGeometry {
            d,
            v_z,
            k_eff,
            tilt,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn from_config(config: &InterferometerConfig, tilt: f64) -> Result<Self> {
        BeamGeometry::new(config.d, config.v_z.abs(), config.k_eff, tilt)
    }

    pub fn validate(&self) -> Result<()> {
        ensure(self.d > 0.0 && self.v_z > 0.0, || {
            format!(
                "beam width and velocity must be positive, got d = {}, v_z = {}",
                self.d, self.v_z
            )
        })?;
        ensure(self.k_eff.is_finite() && self.tilt.is_finite(), || {
            "non-finite k_eff or tilt".to_string()
        })
    }
}

/// `τ = d / v_z`
pub fn pulse_duration(g: &BeamGeometry) -> f64 {
    g.d / g.v_z
}

/// `Δδ₁₂ = 2π · 0.8 · v_z / d`, rad/s.
pub fn raman_linewidth(g: &BeamGeometry) -> f64 {
    TAU * RAMAN_LINEWIDTH_COEFF * g.v_z / g.d
}

/// `−k_eff · v_z · sinθ`, rad/s.
pub fn doppler_shift(g: &BeamGeometry) -> f64 {
    -g.k_eff * g.v_z * g.tilt.sin()
}

/// Tilt at which the Doppler shift equals the Raman linewidth.
pub fn max_tilt(g: &BeamGeometry) -> Result<f64> {
    let kv = g.k_eff * g.v_z;
    if kv == 0.0 {
        return Err(Error::invalid(
            "k_eff·v_z is zero; no Doppler tilt bound exists",
        ));
    }
    let ratio = raman_linewidth(g) / kv.abs();
    ensure(ratio <= 1.0, || {
        format!("linewidth exceeds k_eff·v_z (ratio {ratio}); every tilt is tolerated")
    })?;
    Ok(ratio.asin())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlignmentReport {
    pub tau_s: f64,
    pub linewidth_rad_s: f64,
    pub max_tilt_rad: f64,
    pub tilt_rad: f64,
    pub safety_factor: f64,
    pub pass: bool,
}

/// Passes iff `|θ|·safety_factor ≤ max_tilt`.
pub fn check_alignment(g: &BeamGeometry, safety_factor: f64) -> Result<AlignmentReport> {
    g.validate()?;
    ensure(safety_factor >= 1.0, || {
        format!("safety factor must be ≥ 1, got {safety_factor}")
    })?;
    let bound = max_tilt(g)?;
    Ok(AlignmentReport {
        tau_s: pulse_duration(g),
        linewidth_rad_s: raman_linewidth(g),
        max_tilt_rad: bound,
        tilt_rad: g.tilt,
        safety_factor,
        pass: g.tilt.abs() * safety_factor <= bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::{ACHIEVED_TILT_RAD, REQUIRED_TILT_BOUND_RAD};
    use approx::assert_relative_eq;

    fn geom(tilt: f64) -> BeamGeometry {
        BeamGeometry::from_config(&InterferometerConfig::default(), tilt).unwrap()
    }

    #[test]
    fn duration() {
        let g = geom(0.0);
        assert_relative_eq!(pulse_duration(&g), 66.6667e-6, max_relative = 1e-5);
        let wide = BeamGeometry { d: 2.0 * g.d, ..g };
        assert_relative_eq!(
            pulse_duration(&wide),
            2.0 * pulse_duration(&g),
            max_relative = 1e-15
        );
        let fast = BeamGeometry {
            v_z: 2.0 * g.v_z,
            ..g
        };
        assert_relative_eq!(
            pulse_duration(&fast),
            0.5 * pulse_duration(&g),
            max_relative = 1e-15
        );
    }

    #[test]
    fn linewidth() {
        let g = geom(0.0);
        assert_relative_eq!(raman_linewidth(&g), TAU * 12_000.0, max_relative = 1e-12);
        assert_relative_eq!(raman_linewidth(&g), 7.54e4, max_relative = 1e-3);
        let wide = BeamGeometry { d: 2.0 * g.d, ..g };
        assert_relative_eq!(
            raman_linewidth(&wide),
            0.5 * raman_linewidth(&g),
            max_relative = 1e-15
        );
        assert_relative_eq!(
            pulse_duration(&g) * raman_linewidth(&g),
            TAU * 0.8,
            max_relative = 1e-15
        );
    }

    #[test]
    fn doppler() {
        assert_eq!(doppler_shift(&geom(0.0)), 0.0);
        let g = geom(312e-6);
        assert_relative_eq!(
            doppler_shift(&g).abs(),
            raman_linewidth(&g),
            max_relative = 1e-4
        );
        assert!(doppler_shift(&g) < 0.0);
        for theta in [1e-6, 1e-4, 4e-4] {
            let one = doppler_shift(&geom(theta));
            let two = doppler_shift(&geom(2.0 * theta));
            assert_relative_eq!(two, 2.0 * one, max_relative = 1e-6);
        }
    }

    #[test]
    fn tilt_bound_matches_quoted_value() {
        let bound = max_tilt(&geom(0.0)).unwrap();
        assert!((bound - REQUIRED_TILT_BOUND_RAD).abs() / REQUIRED_TILT_BOUND_RAD < 0.01);
        let g = geom(0.0);
        let narrow = BeamGeometry { d: 0.5 * g.d, ..g };
        assert_relative_eq!(max_tilt(&narrow).unwrap(), 2.0 * bound, max_relative = 1e-6);
        assert!(check_alignment(&geom(ACHIEVED_TILT_RAD), 1.0).unwrap().pass);
    }

    #[test]
    fn bound_is_scale_free() {
        for scale in [0.5, 1.0, 3.0] {
            let g = BeamGeometry {
                d: scale * 1e-3,
                ..geom(0.0)
            };
            let r = max_tilt(&g).unwrap().sin() * g.k_eff * g.v_z / raman_linewidth(&g);
            assert_relative_eq!(r, 1.0, max_relative = 1e-12);
        }
    }

    #[test]
    fn gate() {
        assert!(
            check_alignment(&geom(0.0), DEFAULT_SAFETY_FACTOR)
                .unwrap()
                .pass
        );
        assert!(check_alignment(&geom(312e-6), 1.0).unwrap().pass);
        assert!(!check_alignment(&geom(312e-6), 10.0).unwrap().pass);
        assert!(check_alignment(&geom(0.0), 0.5).is_err());
    }

    #[test]
    fn degenerate_inputs() {
        assert!(BeamGeometry::new(0.0, 15.0, 1e7, 0.0).is_err());
        assert!(BeamGeometry::new(1e-3, 0.0, 1e7, 0.0).is_err());
        let g = BeamGeometry::new(1e-3, 15.0, 0.0, 0.0).unwrap();
        assert!(max_tilt(&g).is_err());
    }

    #[test]
    fn report_json_fields() {
        let r = check_alignment(&geom(1e-5), 10.0).unwrap();
        let v: serde_json::Value = serde_json::to_value(r).unwrap();
        for key in [
            "tau_s",
            "linewidth_rad_s",
            "max_tilt_rad",
            "tilt_rad",
            "pass",
        ] {
            assert!(v.get(key).is_some(), "missing {key}");
        }
    }
}
