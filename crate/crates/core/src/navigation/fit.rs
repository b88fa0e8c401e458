//! Linear least-squares fringe fit.
//!
//! The model `P(φ) = c₀ + (C/2)·cos(φ + Φ)` is rewritten as
//! `c₀ + A·cosφ + B·sinφ` with `A = (C/2)cosΦ`, `B = −(C/2)sinΦ`, which is
//! linear in `(c₀, A, B)` and solved in one shot from the normal equations.

use std::f64::consts::{PI, TAU};

use nalgebra::{Matrix3, Vector3};
use serde::Serialize;

use crate::error::{ensure, Error, Result};
use crate::interferometer::FringeScan;

pub const MIN_FIT_POINTS: usize = 5;
/// Fits below this contrast are flagged.
pub const LOW_CONTRAST: f64 = 0.05;
/// Largest tolerated contrast overshoot; anything above 1 is flagged.
pub const MAX_CONTRAST: f64 = 1.05;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhaseEstimate {
    /// Fringe phase Φ in `[0, 2π)`.
    pub total_phase: f64,
    pub offset: f64,
    pub contrast_est: f64,
    pub residual_rms: f64,
    /// Covariance of `(offset, contrast, phase)` estimated from the residuals.
    pub covariance: [[f64; 3]; 3],
    pub low_contrast: bool,
    pub contrast_overshoot: bool,
}

impl PhaseEstimate {
    pub fn phase_std(&self) -> f64 {
        self.covariance[2][2].sqrt()
    }
}

pub fn fit_fringe(scan: &FringeScan) -> Result<PhaseEstimate> {
    let n = scan.len();
    ensure(n >= MIN_FIT_POINTS, || {
        format!("fringe fit needs at least {MIN_FIT_POINTS} points, got {n}")
    })?;
    let (lo, hi) = scan
        .phases
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &p| {
            (lo.min(p), hi.max(p))
        });
    if hi - lo == 0.0 {
        return Err(Error::invalid(
            "rank-deficient fringe scan: all commanded phases are equal",
        ));
    }
    ensure(hi - lo >= PI, || {
        format!(
            "scan spans {} rad of commanded phase; at least π is required",
            hi - lo
        )
    })?;

    let mut xtx = Matrix3::<f64>::zeros();
    let mut xty = Vector3::<f64>::zeros();
    for (&phi, &y) in scan.phases.iter().zip(&scan.populations) {
        let row = Vector3::new(1.0, phi.cos(), phi.sin());
        xtx += row * row.transpose();
        xty += row * y;
    }
    let inv = xtx
        .try_inverse()
        .filter(|m| m.iter().all(|x| x.is_finite()))
        .ok_or_else(|| Error::invalid("rank-deficient fringe scan design matrix"))?;
    // Reject near-singular designs (e.g. every phase a multiple of 2π apart).
    let cond = xtx.norm() * inv.norm();
    if cond > 1e12 {
        return Err(Error::invalid(format!(
            "rank-deficient fringe scan design (condition number {cond:.3e})"
        )));
    }
    let beta = inv * xty;
    let (c0, a, b) = (beta[0], beta[1], beta[2]);

    // Heteroscedasticity-consistent (sandwich) covariance: detection noise
    // varies along the fringe, so a single pooled variance understates it.
    let mut rss = 0.0;
    let mut meat = Matrix3::<f64>::zeros();
    for (&phi, &y) in scan.phases.iter().zip(&scan.populations) {
        let row = Vector3::new(1.0, phi.cos(), phi.sin());
        let r = y - (c0 + a * phi.cos() + b * phi.sin());
        rss += r * r;
        meat += row * row.transpose() * (r * r);
    }
    let cov_lin = inv * meat * inv * (n as f64 / (n - 3) as f64);

    let r = a.hypot(b);
    let contrast = 2.0 * r;
    let phase = (-b).atan2(a).rem_euclid(TAU);
    // Jacobian of (offset, contrast, phase) with respect to (c0, A, B).
    let jac = if r > 0.0 {
        Matrix3::new(
            1.0,
            0.0,
            0.0, //
            0.0,
            2.0 * a / r,
            2.0 * b / r, //
            0.0,
            b / (r * r),
            -a / (r * r),
        )
    } else {
        Matrix3::new(1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0)
    };
    let cov = jac * cov_lin * jac.transpose();
    let mut covariance = [[0.0; 3]; 3];
    for (i, row) in covariance.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = cov[(i, j)];
        }
    }
    Ok(PhaseEstimate {
        total_phase: if phase >= TAU { 0.0 } else { phase },
        offset: c0,
        contrast_est: contrast,
        residual_rms: (rss / n as f64).sqrt(),
        covariance,
        low_contrast: contrast < LOW_CONTRAST,
        contrast_overshoot: contrast > 1.0 + 1e-9,
    })
}
