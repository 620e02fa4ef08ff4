use alloc::vec::Vec;
use core::f64::consts::TAU;

use crate::allocation::GroupAllocation;
use crate::state::SwarmParams;

/// One epoch of the global signal: robots flagged in `activation` translate,
/// every other robot pivots. `arc` is the commanded arc length `u·ΔT`.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlStep {
    pub activation: Vec<bool>,
    pub arc: f64,
}

impl ControlStep {
    pub fn new(activation: Vec<bool>, arc: f64) -> Self {
        debug_assert!(arc >= 0.0, "arc must be nonnegative");
        ControlStep { activation, arc }
    }

    /// Activates group `group` of `alloc` for `arc`.
    pub fn group(alloc: &GroupAllocation, group: usize, arc: f64) -> Self {
        Self::new(alloc.row(group).to_vec(), arc)
    }

    pub fn active_count(&self) -> usize {
        self.activation.iter().filter(|&&a| a).count()
    }

    pub fn is_rotation_only(&self) -> bool {
        self.activation.iter().all(|&a| !a)
    }
}

/// Ordered list of control steps. The empty sequence is the identity.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ActivationSequence {
    steps: Vec<ControlStep>,
}

impl ActivationSequence {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_steps(steps: Vec<ControlStep>) -> Self {
        ActivationSequence { steps }
    }

    /// Appends a step; zero-arc steps are dropped.
    pub fn push(&mut self, step: ControlStep) {
        if step.arc > 0.0 {
            self.steps.push(step);
        }
    }

    pub fn append(&mut self, other: &ActivationSequence) {
        self.steps.extend(other.steps.iter().cloned());
    }

    pub fn then(mut self, other: &ActivationSequence) -> Self {
        self.append(other);
        self
    }

    pub fn steps(&self) -> &[ControlStep] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn total_arc(&self) -> f64 {
        self.steps.iter().map(|s| s.arc).sum()
    }

    /// Net rotation of `robot` under this sequence (unnormalized). Rotations
    /// depend only on the activations, never on the state.
    pub fn net_rotation(&self, robot: usize, params: &SwarmParams) -> f64 {
        let r = params.turning_radius(robot);
        self.steps
            .iter()
            .filter(|s| !s.activation[robot])
            .map(|s| s.arc / r)
            .sum()
    }

    /// Equivalent shorter sequence: adjacent steps with equal activation are
    /// merged, and all-rotate steps drop whole turns when every robot shares
    /// the common radius.
    pub fn simplified(&self, params: &SwarmParams) -> Self {
        let mut out: Vec<ControlStep> = Vec::with_capacity(self.steps.len());
        let full_turn = TAU * params.radius();
        for step in &self.steps {
            match out.last_mut() {
                Some(prev) if prev.activation == step.activation => prev.arc += step.arc,
                _ => out.push(step.clone()),
            }
            if params.is_uniform() {
                if let Some(last) = out.last_mut() {
                    if last.is_rotation_only() {
                        last.arc %= full_turn;
                        if last.arc < 1e-12 * full_turn || full_turn - last.arc < 1e-12 * full_turn
                        {
                            out.pop();
                        }
                    }
                }
            }
        }
        out.retain(|s| s.arc > 0.0);
        ActivationSequence { steps: out }
    }
}

impl FromIterator<ControlStep> for ActivationSequence {
    fn from_iter<I: IntoIterator<Item = ControlStep>>(iter: I) -> Self {
        let mut s = ActivationSequence::new();
        for step in iter {
            s.push(step);
        }
        s
    }
}
