//! Exact switched kinematics of the swarm.
//!
//! Within a step, an active robot moves `arc` along its heading and an
//! inactive one turns by `arc / r_i`. Both motions are closed form, so
//! simulation is exact up to floating point.

use alloc::vec::Vec;

use crate::angle;
use crate::error::{invalid, Result};
use crate::sequence::{ActivationSequence, ControlStep};
use crate::state::{SwarmParams, SwarmState};

/// Default spacing of intra-step samples (length units).
pub const DEFAULT_RESOLUTION: f64 = 0.5;

/// Sampled swarm motion. The first sample is the initial state; samples are
/// taken at every step boundary and, optionally, inside steps.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    samples: Vec<SwarmState>,
}

impl Trajectory {
    pub fn from_samples(samples: Vec<SwarmState>) -> Self {
        assert!(!samples.is_empty(), "trajectory needs at least one sample");
        Trajectory { samples }
    }

    pub fn samples(&self) -> &[SwarmState] {
        &self.samples
    }

    pub fn initial(&self) -> &SwarmState {
        &self.samples[0]
    }

    pub fn final_state(&self) -> &SwarmState {
        self.samples.last().expect("non-empty")
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

fn check_step(state: &SwarmState, cs: &ControlStep, params: &SwarmParams) -> Result<()> {
    if cs.activation.len() != state.n() || params.n() != state.n() {
        return Err(invalid(alloc::format!(
            "activation has {} entries, swarm has {} robots (params say {})",
            cs.activation.len(),
            state.n(),
            params.n()
        )));
    }
    if !(cs.arc >= 0.0 && cs.arc.is_finite()) {
        return Err(invalid("arc must be finite and nonnegative"));
    }
    Ok(())
}

fn advance(state: &mut SwarmState, cs: &ControlStep, arc: f64, params: &SwarmParams) {
    for (i, &active) in cs.activation.iter().enumerate() {
        if active {
            let dir = angle::unit(state.heading(i));
            state.translate_robot(i, dir * arc);
        } else {
            state.rotate_robot(i, arc / params.turning_radius(i));
        }
    }
}

/// Applies one control step.
pub fn step(state: &SwarmState, cs: &ControlStep, params: &SwarmParams) -> Result<SwarmState> {
    check_step(state, cs, params)?;
    let mut next = state.clone();
    advance(&mut next, cs, cs.arc, params);
    Ok(next)
}

/// Net effect of `seq` without recording samples.
pub fn final_state(
    state: &SwarmState,
    seq: &ActivationSequence,
    params: &SwarmParams,
) -> Result<SwarmState> {
    let mut s = state.clone();
    for cs in seq.steps() {
        check_step(&s, cs, params)?;
        advance(&mut s, cs, cs.arc, params);
    }
    Ok(s)
}

/// Simulates `seq` with the default intra-step resolution.
pub fn simulate(
    state: &SwarmState,
    seq: &ActivationSequence,
    params: &SwarmParams,
) -> Result<Trajectory> {
    simulate_with(state, seq, params, Some(DEFAULT_RESOLUTION))
}

/// Simulates `seq`, sampling every step boundary and, when `resolution` is
/// given, every `resolution` length units inside translating steps.
///
/// Step boundaries are computed from the previous boundary with the full arc,
/// so the final state does not depend on the resolution.
pub fn simulate_with(
    state: &SwarmState,
    seq: &ActivationSequence,
    params: &SwarmParams,
    resolution: Option<f64>,
) -> Result<Trajectory> {
    if let Some(res) = resolution {
        if !(res > 0.0) {
            return Err(invalid("resolution must be positive"));
        }
    }
    let mut samples = Vec::with_capacity(seq.len() + 1);
    samples.push(state.clone());
    let mut current = state.clone();
    for cs in seq.steps() {
        check_step(&current, cs, params)?;
        if let Some(res) = resolution {
            if !cs.is_rotation_only() && cs.arc > res {
                let pieces = libm::ceil(cs.arc / res) as usize;
                for k in 1..pieces {
                    let mut sub = current.clone();
                    advance(&mut sub, cs, cs.arc * k as f64 / pieces as f64, params);
                    samples.push(sub);
                }
            }
        }
        advance(&mut current, cs, cs.arc, params);
        samples.push(current.clone());
    }
    Ok(Trajectory { samples })
}

/// Total distance travelled by all pivot points. Pure rotations add nothing.
pub fn path_length(traj: &Trajectory) -> f64 {
    traj.samples
        .windows(2)
        .map(|w| {
            w[0].positions()
                .iter()
                .zip(w[1].positions())
                .map(|(a, b)| (b - a).norm())
                .sum::<f64>()
        })
        .sum()
}

/// Signal time: every step costs `arc / u_nominal`.
pub fn execution_time(seq: &ActivationSequence, params: &SwarmParams) -> f64 {
    seq.total_arc() / params.speed()
}
