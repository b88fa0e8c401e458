use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{ensure, Error, Result};

/// Minimum number of samples [`synthesize`] will produce.
pub const MIN_SAMPLES: usize = 16;

/// Whole-period check tolerance on `N·ν/f_s`.
const PERIOD_TOLERANCE: f64 = 1e-9;

/// Uniformly sampled photodiode signal; sample `i` is taken at `t = i / sample_rate`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModulatedSignal {
    pub sample_rate: f64,
    pub samples: Vec<f64>,
    pub ref_freq: f64,
}

impl ModulatedSignal {
    pub fn new(sample_rate: f64, samples: Vec<f64>, ref_freq: f64) -> Result<Self> {
        let s = ModulatedSignal {
            sample_rate,
            samples,
            ref_freq,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        ensure(self.ref_freq > 0.0 && self.ref_freq.is_finite(), || {
            format!(
                "reference frequency must be positive, got {}",
                self.ref_freq
            )
        })?;
        ensure(self.sample_rate > 2.0 * self.ref_freq, || {
            format!(
                "sample rate {} Hz does not resolve the {} Hz reference (Nyquist)",
                self.sample_rate, self.ref_freq
            )
        })?;
        ensure(!self.samples.is_empty(), || {
            "signal has no samples".to_string()
        })
    }

    pub fn duration(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate
    }

    /// Number of reference periods covered by the record.
    pub fn periods(&self) -> f64 {
        self.samples.len() as f64 * self.ref_freq / self.sample_rate
    }
}

/// `noise + s₁ sin(νt) + s₂ sin(2νt)` with zero-mean Gaussian noise of the
/// given RMS.
#[allow(clippy::too_many_arguments)]
pub fn synthesize(
    s1: f64,
    s2: f64,
    ref_freq: f64,
    noise_rms: f64,
    duration: f64,
    sample_rate: f64,
    rng_seed: u64,
) -> Result<ModulatedSignal> {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    synthesize_with_rng(s1, s2, ref_freq, noise_rms, duration, sample_rate, &mut rng)
}

#[allow(clippy::too_many_arguments)]
pub fn synthesize_with_rng<R: Rng + ?Sized>(
    s1: f64,
    s2: f64,
    ref_freq: f64,
    noise_rms: f64,
    duration: f64,
    sample_rate: f64,
    rng: &mut R,
) -> Result<ModulatedSignal> {
    ensure(noise_rms >= 0.0 && noise_rms.is_finite(), || {
        format!("noise RMS must be non-negative, got {noise_rms}")
    })?;
    let n = (duration * sample_rate).round();
    ensure(n.is_finite() && n >= MIN_SAMPLES as f64, || {
        format!("duration·sample_rate = {n} is below {MIN_SAMPLES} samples")
    })?;
    let n = n as usize;
    let shell = ModulatedSignal {
        sample_rate,
        samples: vec![0.0],
        ref_freq,
    };
    shell.validate()?;
    let noise = Normal::new(0.0, noise_rms).map_err(|e| Error::invalid(e.to_string()))?;
    let w = TAU * ref_freq;
    let samples = (0..n)
        .map(|i| {
            let t = i as f64 / sample_rate;
            let clean = s1 * (w * t).sin() + s2 * (2.0 * w * t).sin();
            if noise_rms > 0.0 {
                clean + noise.sample(rng)
            } else {
                clean
            }
        })
        .collect();
    ModulatedSignal::new(sample_rate, samples, ref_freq)
}

/// `(1/T) Σ signal(tᵢ)·sin(ν tᵢ)·Δt` over whole reference periods, which tends
/// to `½ s₁`.
pub fn raw_integral(sig: &ModulatedSignal) -> Result<f64> {
    sig.validate()?;
    let periods = sig.periods();
    ensure(
        (periods - periods.round()).abs() <= PERIOD_TOLERANCE && periods.round() >= 1.0,
        || format!("record spans {periods} reference periods; a whole number is required"),
    )?;
    let w = TAU * sig.ref_freq;
    let dt = 1.0 / sig.sample_rate;
    let sum: f64 = sig
        .samples
        .iter()
        .enumerate()
        .map(|(i, &x)| x * (w * i as f64 * dt).sin())
        .sum();
    Ok(sum * dt / sig.duration())
}

/// In-phase amplitude `s₁` at the reference frequency: twice the raw lock-in
/// integral.
pub fn demodulate(sig: &ModulatedSignal) -> Result<f64> {
    Ok(2.0 * raw_integral(sig)?)
}
