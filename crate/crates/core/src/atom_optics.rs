//! Two-level Raman pulse propagator.
//!
//! States live in the `(f, e)` basis: `|f, p⟩` and `|e, p + ħk_eff⟩`. Momentum
//! labels are carried implicitly by the internal state; trajectory phases are
//! injected through the pulse laser phase by the interferometer module.
//!
//! Pulses are resonant square pulses. A pulse of Rabi area `θ = Ωτ` and laser
//! phase `φ` acts as
//!
//! ```text
//! U(θ, φ) = [[ cos(θ/2),            -i e^{-iφ} sin(θ/2) ],
//!            [ -i e^{iφ} sin(θ/2),   cos(θ/2)           ]]
//! ```
//!
//! so a π/2 pulse takes `|f⟩` to `(|f⟩ − i e^{iφ}|e⟩)/√2`.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI};
use std::ops::Mul;

use num_complex::Complex64;

use crate::error::{ensure, Error, Result};

/// Tolerance on the input norm accepted by [`apply_pulse`].
pub const NORM_INPUT_TOLERANCE: f64 = 1e-9;

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AtomState {
    pub amp_f: Complex64,
    pub amp_e: Complex64,
}

impl AtomState {
    /// Atom in `|f, p⟩`, the state prepared before the interferometer.
    pub fn ground() -> Self {
        AtomState {
            amp_f: Complex64::new(1.0, 0.0),
            amp_e: Complex64::new(0.0, 0.0),
        }
    }

    pub fn excited() -> Self {
        AtomState {
            amp_f: Complex64::new(0.0, 0.0),
            amp_e: Complex64::new(1.0, 0.0),
        }
    }

    /// Builds a state and rejects it unless it is normalized within
    /// [`NORM_INPUT_TOLERANCE`].
    pub fn new(amp_f: Complex64, amp_e: Complex64) -> Result<Self> {
        let s = AtomState { amp_f, amp_e };
        s.check_normalized()?;
        Ok(s)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amp_f.norm_sqr() + self.amp_e.norm_sqr()
    }

    pub fn population_f(&self) -> f64 {
        self.amp_f.norm_sqr()
    }

    pub fn population_e(&self) -> f64 {
        self.amp_e.norm_sqr()
    }

    fn check_normalized(&self) -> Result<()> {
        let n = self.norm_sqr();
        ensure(
            n.is_finite() && (n - 1.0).abs() <= NORM_INPUT_TOLERANCE,
            || format!("state norm² {n} deviates from 1 by more than {NORM_INPUT_TOLERANCE}"),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PulseKind {
    HalfPi,
    Pi,
    Custom,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RamanPulse {
    /// Pulse area `Ωτ`, rad.
    rabi_phase: f64,
    /// Laser phase `φ`, rad.
    pub laser_phase: f64,
    /// Pulse duration `τ`, s. Informational; the propagator uses only the area.
    pub duration: f64,
    kind: PulseKind,
}

impl RamanPulse {
    /// Beamsplitter pulse, area exactly π/2.
    pub fn half_pi(laser_phase: f64) -> Self {
        RamanPulse {
            rabi_phase: FRAC_PI_2,
            laser_phase,
            duration: 0.0,
            kind: PulseKind::HalfPi,
        }
    }

    /// Mirror pulse, area exactly π.
    pub fn pi(laser_phase: f64) -> Self {
        RamanPulse {
            rabi_phase: PI,
            laser_phase,
            duration: 0.0,
            kind: PulseKind::Pi,
        }
    }

    pub fn custom(rabi_phase: f64, laser_phase: f64) -> Result<Self> {
        ensure(rabi_phase.is_finite() && rabi_phase >= 0.0, || {
            format!("rabi phase must be finite and non-negative, got {rabi_phase}")
        })?;
        Ok(RamanPulse {
            rabi_phase,
            laser_phase,
            duration: 0.0,
            kind: PulseKind::Custom,
        })
    }

    pub fn with_duration(mut self, duration: f64) -> Self {
        self.duration = duration;
        self
    }

    pub fn rabi_phase(&self) -> f64 {
        self.rabi_phase
    }

    pub fn kind(&self) -> PulseKind {
        self.kind
    }
}

/// 2×2 unitary in `(f, e)` order, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseUnitary(pub [[Complex64; 2]; 2]);

impl PulseUnitary {
    pub fn identity() -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        PulseUnitary([[one, zero], [zero, one]])
    }

    pub fn adjoint(&self) -> Self {
        let m = &self.0;
        PulseUnitary([
            [m[0][0].conj(), m[1][0].conj()],
            [m[0][1].conj(), m[1][1].conj()],
        ])
    }

    /// Largest element-wise deviation of `U·U†` from the identity.
    pub fn unitarity_error(&self) -> f64 {
        let p = *self * self.adjoint();
        let id = PulseUnitary::identity();
        let mut worst = 0.0_f64;
        for r in 0..2 {
            for c in 0..2 {
                worst = worst.max((p.0[r][c] - id.0[r][c]).norm());
            }
        }
        worst
    }

    pub fn apply(&self, state: &AtomState) -> AtomState {
        let m = &self.0;
        AtomState {
            amp_f: m[0][0] * state.amp_f + m[0][1] * state.amp_e,
            amp_e: m[1][0] * state.amp_f + m[1][1] * state.amp_e,
        }
    }
}

impl Mul for PulseUnitary {
    type Output = PulseUnitary;

    fn mul(self, rhs: PulseUnitary) -> PulseUnitary {
        let (a, b) = (&self.0, &rhs.0);
        let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
        for (r, row) in out.iter_mut().enumerate() {
            for (c, cell) in row.iter_mut().enumerate() {
                *cell = a[r][0] * b[0][c] + a[r][1] * b[1][c];
            }
        }
        PulseUnitary(out)
    }
}

pub fn pulse_unitary(pulse: &RamanPulse) -> Result<PulseUnitary> {
    if !pulse.rabi_phase.is_finite() || !pulse.laser_phase.is_finite() {
        return Err(Error::invalid(format!(
            "non-finite pulse phase (rabi {}, laser {})",
            pulse.rabi_phase, pulse.laser_phase
        )));
    }
    // Exact values for the labelled pulses; cos(π/2) would leave 6e-17 behind.
    let (s, c) = match pulse.kind {
        PulseKind::HalfPi => (FRAC_1_SQRT_2, FRAC_1_SQRT_2),
        PulseKind::Pi => (1.0, 0.0),
        PulseKind::Custom => (0.5 * pulse.rabi_phase).sin_cos(),
    };
    let phase = Complex64::from_polar(1.0, pulse.laser_phase);
    let cc = Complex64::new(c, 0.0);
    Ok(PulseUnitary([
        [cc, -I * phase.conj() * s],
        [-I * phase * s, cc],
    ]))
}

pub fn apply_pulse(state: &AtomState, pulse: &RamanPulse) -> Result<AtomState> {
    state.check_normalized()?;
    Ok(pulse_unitary(pulse)?.apply(state))
}

/// Product of the pulse unitaries in time order: the first pulse acts first,
/// so it sits rightmost in the product.
pub fn compose_sequence(pulses: &[RamanPulse]) -> Result<PulseUnitary> {
    if pulses.is_empty() {
        return Err(Error::invalid("pulse sequence is empty"));
    }
    pulses.iter().try_fold(PulseUnitary::identity(), |acc, p| {
        Ok(pulse_unitary(p)? * acc)
    })
}

/// π/2(φ₁) – π(φ₂) – π/2(φ₃) applied to `|f⟩`; returns the final state.
pub fn mach_zehnder(phi1: f64, phi2: f64, phi3: f64) -> Result<AtomState> {
    let u = compose_sequence(&[
        RamanPulse::half_pi(phi1),
        RamanPulse::pi(phi2),
        RamanPulse::half_pi(phi3),
    ])?;
    Ok(u.apply(&AtomState::ground()))
}
