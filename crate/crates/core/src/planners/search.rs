//! Tree search shared by the RRT-style planners.

use alloc::vec::Vec;

use nalgebra::Vector2;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{collision_check, Clock, Scenario};
use crate::dynamics::simulate_with;
use crate::error::Result;
use crate::sequence::ActivationSequence;
use crate::state::SwarmState;

/// Attempts allowed per node of budget before giving up on a tree whose
/// extensions keep colliding.
const ATTEMPTS_PER_NODE: usize = 50;

/// Node and time budget shared by all trees of one plan.
pub(crate) struct Budget<'a> {
    max_nodes: usize,
    max_time_s: f64,
    pub(crate) nodes: usize,
    attempts: usize,
    clock: &'a dyn Clock,
}

impl<'a> Budget<'a> {
    pub(crate) fn new(scn: &Scenario, clock: &'a dyn Clock) -> Self {
        Budget {
            max_nodes: scn.config.max_nodes,
            max_time_s: scn.config.max_time_s,
            nodes: 0,
            attempts: 0,
            clock,
        }
    }

    fn exhausted(&self) -> bool {
        self.nodes >= self.max_nodes
            || self.attempts >= self.max_nodes.saturating_mul(ATTEMPTS_PER_NODE)
            || self.clock.elapsed_s() >= self.max_time_s
    }
}

pub(crate) struct TreeOutcome {
    pub seq: ActivationSequence,
    pub end: SwarmState,
    pub solved: bool,
}

struct Node {
    state: SwarmState,
    parent: Option<usize>,
    seq: ActivationSequence,
}

/// Grows a tree from `root` until every robot in `tracked` is within the goal
/// radius. `steer` proposes candidate edges from a node towards a sample
/// (one point per tracked robot); the collision-free candidate ending closest
/// to the sample is kept.
pub(crate) fn grow<F>(
    scn: &Scenario,
    rng: &mut ChaCha8Rng,
    root: &SwarmState,
    tracked: &[usize],
    budget: &mut Budget<'_>,
    mut steer: F,
) -> Result<TreeOutcome>
where
    F: FnMut(&mut ChaCha8Rng, &SwarmState, &[Vector2<f64>]) -> Result<Vec<ActivationSequence>>,
{
    grow_with(
        scn,
        rng,
        root,
        tracked,
        budget,
        |rng, sample, goals, lo, span| {
            uniform_sample(rng, sample, goals, lo, span, scn.config.goal_bias);
            0
        },
        |rng, state, sample, _| steer(rng, state, sample),
    )
}

/// Goal with probability `goal_bias`, otherwise uniform in the free box.
pub(crate) fn uniform_sample(
    rng: &mut ChaCha8Rng,
    sample: &mut [Vector2<f64>],
    goals: &[Vector2<f64>],
    lo: Vector2<f64>,
    span: Vector2<f64>,
    goal_bias: f64,
) {
    if rng.random::<f64>() < goal_bias {
        sample.copy_from_slice(goals);
    } else {
        for s in sample.iter_mut() {
            *s = lo + Vector2::new(rng.random::<f64>() * span.x, rng.random::<f64>() * span.y);
        }
    }
}

/// [`grow`] with a custom sampler. The sampler fills the sample (one point
/// per tracked robot, given the goals and the free box `lo..lo + span`) and
/// returns a tag that is handed to `steer`.
pub(crate) fn grow_with<S, F>(
    scn: &Scenario,
    rng: &mut ChaCha8Rng,
    root: &SwarmState,
    tracked: &[usize],
    budget: &mut Budget<'_>,
    mut sampler: S,
    mut steer: F,
) -> Result<TreeOutcome>
where
    S: FnMut(&mut ChaCha8Rng, &mut [Vector2<f64>], &[Vector2<f64>], Vector2<f64>, Vector2<f64>) -> usize,
    F: FnMut(&mut ChaCha8Rng, &SwarmState, &[Vector2<f64>], usize) -> Result<Vec<ActivationSequence>>,
{
    let goals: Vec<Vector2<f64>> = tracked.iter().map(|&r| scn.goals[r]).collect();
    let radius = scn.goal_radius;
    let reached = |s: &SwarmState| {
        tracked
            .iter()
            .zip(&goals)
            .all(|(&r, g)| (s.position(r) - g).norm() <= radius)
    };
    let dist2 = |s: &SwarmState, target: &[Vector2<f64>]| -> f64 {
        tracked
            .iter()
            .zip(target)
            .map(|(&r, t)| (s.position(r) - t).norm_squared())
            .sum()
    };

    let mut nodes = alloc::vec![Node {
        state: root.clone(),
        parent: None,
        seq: ActivationSequence::new(),
    }];
    budget.nodes += 1;
    if reached(root) {
        return Ok(path_to(&nodes, 0, true));
    }

    let bounds = scn.env.bounds();
    let margin = scn.env.robot_radius();
    let lo = bounds.min + Vector2::repeat(margin);
    let span = bounds.max - bounds.min - Vector2::repeat(2.0 * margin);
    let mut sample = goals.clone();

    while !budget.exhausted() {
        budget.attempts += 1;
        let tag = sampler(rng, &mut sample, &goals, lo, span);
        let near = (0..nodes.len())
            .map(|i| (i, dist2(&nodes[i].state, &sample)))
            .fold((0, f64::INFINITY), |best, c| if c.1 < best.1 { c } else { best })
            .0;

        let mut best: Option<(f64, SwarmState, ActivationSequence)> = None;
        for seq in steer(rng, &nodes[near].state, &sample, tag)? {
            if seq.is_empty() {
                continue;
            }
            let traj = simulate_with(&nodes[near].state, &seq, &scn.params, Some(scn.config.resolution))?;
            if !collision_check(&traj, &scn.env) {
                continue;
            }
            let end = traj.final_state().clone();
            let d = dist2(&end, &sample);
            if best.as_ref().is_none_or(|b| d < b.0) {
                best = Some((d, end, seq));
            }
        }
        let Some((_, state, seq)) = best else {
            continue;
        };
        let done = reached(&state);
        nodes.push(Node {
            state,
            parent: Some(near),
            seq,
        });
        budget.nodes += 1;
        if done {
            return Ok(path_to(&nodes, nodes.len() - 1, true));
        }
    }

    let closest = (0..nodes.len())
        .map(|i| (i, dist2(&nodes[i].state, &goals)))
        .fold((0, f64::INFINITY), |best, c| if c.1 < best.1 { c } else { best })
        .0;
    Ok(path_to(&nodes, closest, false))
}

fn path_to(nodes: &[Node], mut i: usize, solved: bool) -> TreeOutcome {
    let end = nodes[i].state.clone();
    let mut chain = Vec::new();
    while let Some(p) = nodes[i].parent {
        chain.push(i);
        i = p;
    }
    let mut seq = ActivationSequence::new();
    for &j in chain.iter().rev() {
        seq.append(&nodes[j].seq);
    }
    TreeOutcome { seq, end, solved }
}
