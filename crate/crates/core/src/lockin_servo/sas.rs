//! Saturated-absorption lineshape: a Doppler-broadened Gaussian with
//! Lorentzian Lamb dips at each hyperfine transition and at the crossover
//! midpoint of every pair of transitions.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::error::{ensure, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Transition {
    pub center_hz: f64,
    /// Fractional reduction of absorption at the dip center.
    pub depth: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DipKind {
    Transition(usize),
    Crossover(usize, usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Dip {
    pub center_hz: f64,
    pub depth: f64,
    pub kind: DipKind,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SasSpectrum {
    pub detuning_hz: Vec<f64>,
    pub absorption: Vec<f64>,
    pub dips: Vec<Dip>,
}

impl SasSpectrum {
    pub fn crossovers(&self) -> impl Iterator<Item = &Dip> {
        self.dips
            .iter()
            .filter(|d| matches!(d.kind, DipKind::Crossover(..)))
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "detuning_hz,absorption")?;
        for (f, a) in self.detuning_hz.iter().zip(&self.absorption) {
            writeln!(w, "{f},{a}")?;
        }
        Ok(())
    }
}

/// Samples the probe absorption on `points` evenly spaced detunings over
/// `range = (start, stop)`.
///
/// Widths are FWHM. Crossover dips take the mean depth of their two parent
/// transitions. Absorption is normalised to 1 at the Doppler center without
/// dips and clamped at zero.
pub fn sas_spectrum(
    range: (f64, f64),
    points: usize,
    transitions: &[Transition],
    doppler_center_hz: f64,
    doppler_width_hz: f64,
    lamb_dip_width_hz: f64,
) -> Result<SasSpectrum> {
    ensure(doppler_width_hz > 0.0 && lamb_dip_width_hz > 0.0, || {
        format!("widths must be positive, got Doppler {doppler_width_hz} Hz, dip {lamb_dip_width_hz} Hz")
    })?;
    ensure(points >= 2 && range.1 > range.0, || {
        format!("need ≥ 2 points over an increasing range, got {points} over {range:?}")
    })?;

    let mut dips: Vec<Dip> = transitions
        .iter()
        .enumerate()
        .map(|(i, t)| Dip {
            center_hz: t.center_hz,
            depth: t.depth,
            kind: DipKind::Transition(i),
        })
        .collect();
    for i in 0..transitions.len() {
        for j in i + 1..transitions.len() {
            let (a, b) = (transitions[i], transitions[j]);
            dips.push(Dip {
                center_hz: 0.5 * (a.center_hz + b.center_hz),
                depth: 0.5 * (a.depth + b.depth),
                kind: DipKind::Crossover(i, j),
            });
        }
    }

    let sigma = doppler_width_hz / (8.0 * std::f64::consts::LN_2).sqrt();
    let gamma = 0.5 * lamb_dip_width_hz;
    let step = (range.1 - range.0) / (points - 1) as f64;
    let detuning_hz: Vec<f64> = (0..points).map(|i| range.0 + step * i as f64).collect();
    let absorption = detuning_hz
        .iter()
        .map(|&f| {
            let x = (f - doppler_center_hz) / sigma;
            let doppler = (-0.5 * x * x).exp();
            let holes: f64 = dips
                .iter()
                .map(|d| {
                    let u = (f - d.center_hz) / gamma;
                    d.depth / (1.0 + u * u)
                })
                .sum();
            (doppler * (1.0 - holes)).max(0.0)
        })
        .collect();
    Ok(SasSpectrum {
        detuning_hz,
        absorption,
        dips,
    })
}
