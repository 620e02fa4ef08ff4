use alloc::vec::Vec;
use core::f64::consts::PI;

use super::PrimitiveCompiler;
use crate::error::{invalid, Result};
use crate::sequence::ActivationSequence;
use crate::state::SwarmState;

/// Sequence that translates a single robot.
#[derive(Debug, Clone, PartialEq)]
pub struct IsolationPlan {
    pub seq: ActivationSequence,
    /// Group whose translation field carries the robot.
    pub group: usize,
    /// Number of elimination rounds `T`.
    pub rounds: usize,
    /// Net displacement of the isolated robot, `2^T · d`.
    pub displacement: f64,
}

impl PrimitiveCompiler {
    /// Smallest group containing `robot`, ties to the lowest index.
    pub fn isolation_group(&self, robot: usize) -> usize {
        super::library::smallest_group_of(&self.alloc, robot)
    }

    /// Elimination rounds needed to isolate `robot` in its group.
    pub fn isolation_rounds(&self, robot: usize) -> usize {
        let others = self.alloc.members(self.isolation_group(robot)).len() - 1;
        others.div_ceil(2)
    }

    /// Moves only robot `k`, by `2^T · d` along `heading`.
    ///
    /// Robot `k` is first turned to `heading`. Then `S_0 = g(d)` on its group
    /// and, two group mates at a time (ascending index),
    /// `S_t = (S_{t-1}, Rot, S_{t-1})` where `Rot` gives the two mates a net
    /// half turn relative to the start of `S_{t-1}` and leaves `k` alone. A
    /// reversed mate retraces its `S_{t-1}` displacement, and mates eliminated
    /// earlier cancel in both copies regardless of their heading.
    ///
    /// Everyone else's position is restored; their headings are unspecified.
    pub fn isolate_translate(
        &self,
        state: &SwarmState,
        k: usize,
        d: f64,
        heading: f64,
    ) -> Result<IsolationPlan> {
        if !(d > 0.0 && d.is_finite()) {
            return Err(invalid("leg length must be positive"));
        }
        if k >= self.alloc.robots() {
            return Err(invalid(alloc::format!("robot index {} out of range", k + 1)));
        }
        let group = self.isolation_group(k);
        let mates: Vec<usize> = self
            .alloc
            .members(group)
            .into_iter()
            .filter(|&r| r != k)
            .collect();

        let mut body = self.bilateral_translation(group, d)?;
        let mut rounds = 0;
        for pair in mates.chunks(2) {
            let mut targets: Vec<(usize, f64)> = pair
                .iter()
                .map(|&l| (l, PI - body.net_rotation(l, &self.params)))
                .collect();
            targets.push((k, 0.0));
            let rot = self.orientation_control(&targets)?;
            body = body.clone().then(&rot.seq).then(&body);
            rounds += 1;
        }

        let aim = self.orient_absolute(state, &[(k, heading)])?;
        let seq = aim.seq.then(&body);
        Ok(IsolationPlan {
            seq,
            group,
            rounds,
            displacement: d * (1u64 << rounds) as f64,
        })
    }
}
