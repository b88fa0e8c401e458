//! Planar strapdown dead reckoning.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};

/// One IMU epoch: body-frame specific force and yaw rate.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ImuSample {
    /// Body-frame acceleration `[forward, left]`, m/s².
    pub accel: [f64; 2],
    pub rot_rate: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct NavState {
    pub time: f64,
    pub position: [f64; 2],
    pub velocity: [f64; 2],
    /// Heading of the body x axis from the navigation x axis, rad.
    pub heading: f64,
}

fn rotate(v: [f64; 2], heading: f64) -> [f64; 2] {
    let (s, c) = heading.sin_cos();
    [c * v[0] - s * v[1], s * v[0] + c * v[1]]
}

/// Integrates uniformly sampled IMU data with the trapezoid rule: rate to
/// heading, navigation-frame acceleration to velocity, velocity to position.
///
/// `samples[k]` is taken at `initial.time + k·dt`; the output has one state per
/// sample and starts with `initial`.
pub fn dead_reckon(samples: &[ImuSample], dt: f64, initial: NavState) -> Result<Vec<NavState>> {
    ensure(dt > 0.0 && dt.is_finite(), || {
        format!("dt must be positive, got {dt}")
    })?;
    if let Some(i) = samples
        .iter()
        .position(|s| !(s.accel[0].is_finite() && s.accel[1].is_finite() && s.rot_rate.is_finite()))
    {
        return Err(Error::invalid(format!(
            "non-finite IMU sample at index {i}"
        )));
    }
    let mut out = Vec::with_capacity(samples.len());
    let Some(first) = samples.first() else {
        return Ok(out);
    };
    let mut state = initial;
    let mut acc_nav = rotate(first.accel, state.heading);
    out.push(state);
    for (k, pair) in samples.windows(2).enumerate() {
        let (prev, next) = (pair[0], pair[1]);
        let heading = state.heading + 0.5 * (prev.rot_rate + next.rot_rate) * dt;
        let next_acc = rotate(next.accel, heading);
        let mut velocity = state.velocity;
        let mut position = state.position;
        for axis in 0..2 {
            velocity[axis] += 0.5 * (acc_nav[axis] + next_acc[axis]) * dt;
            position[axis] += 0.5 * (state.velocity[axis] + velocity[axis]) * dt;
        }
        state = NavState {
            time: initial.time + (k + 1) as f64 * dt,
            position,
            velocity,
            heading,
        };
        acc_nav = next_acc;
        out.push(state);
    }
    Ok(out)
}

/// Columns `t,x,y,vx,vy,heading`.
pub fn write_trajectory_csv<W: Write>(states: &[NavState], mut w: W) -> io::Result<()> {
    writeln!(w, "t,x,y,vx,vy,heading")?;
    for s in states {
        writeln!(
            w,
            "{},{},{},{},{},{}",
            s.time, s.position[0], s.position[1], s.velocity[0], s.velocity[1], s.heading
        )?;
    }
    Ok(())
}
