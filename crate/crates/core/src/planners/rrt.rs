//! RRT planners: original, with rotation, pure control, and the two
//! subgroup variants. They differ only in how an edge is steered and which
//! robots the tree tracks.

use alloc::vec::Vec;

use nalgebra::Vector2;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::search::{grow, grow_with, uniform_sample, Budget, TreeOutcome};
use super::{Clock, PlanResult, Scenario, Status};
use crate::error::{invalid, Result};
use crate::primitives::{compile_primitive, Primitive, PrimitiveCompiler};
use crate::sequence::{ActivationSequence, ControlStep};
use crate::state::SwarmState;

/// Robots aimed per extension; any three rotation rows are independent.
const AIM_LIMIT: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RrtMode {
    /// Raw group fields only; nodes carry full poses.
    Original,
    /// Sample a translate group, aim up to three of its members at the
    /// sample, then apply the group's field.
    WithRotation,
}

/// Arc drawn uniformly from `(0, d_max]`.
fn sample_arc(rng: &mut ChaCha8Rng, d_max: f64) -> f64 {
    d_max * (1.0 - rng.random::<f64>())
}

/// Heading from `from` to `to`; keeps `current` when they coincide.
fn heading_to(from: Vector2<f64>, to: Vector2<f64>, current: f64) -> f64 {
    let d = to - from;
    if d.norm_squared() == 0.0 {
        current
    } else {
        libm::atan2(d.y, d.x)
    }
}

fn compiler(scn: &Scenario) -> Result<PrimitiveCompiler> {
    PrimitiveCompiler::new(&scn.params, &scn.alloc)?.with_eps(scn.config.eps)
}

fn finish(
    scn: &Scenario,
    seq: ActivationSequence,
    solved: bool,
    budget: &Budget<'_>,
    clock: &dyn Clock,
) -> Result<PlanResult> {
    let status = if solved { Status::Solved } else { Status::Timeout };
    PlanResult::build(scn, status, seq, budget.nodes, clock)
}

/// Single-tree RRT over all robot positions using the allocation's groups.
pub fn plan_rrt(scn: &Scenario, mode: RrtMode, clock: &dyn Clock) -> Result<PlanResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(scn.seed);
    let mut budget = Budget::new(scn, clock);
    let all: Vec<usize> = (0..scn.params.n()).collect();
    let alloc = &scn.alloc;
    let cfg = &scn.config;
    let out = match mode {
        RrtMode::Original => grow(scn, &mut rng, &scn.starts, &all, &mut budget, |rng, _, _| {
            Ok((0..cfg.extend_candidates)
                .map(|_| {
                    let g = rng.random_range(0..alloc.groups());
                    let arc = sample_arc(rng, cfg.d_max);
                    ActivationSequence::from_steps(alloc::vec![ControlStep::group(alloc, g, arc)])
                })
                .collect())
        })?,
        RrtMode::WithRotation => {
            let c = compiler(scn)?;
            grow(scn, &mut rng, &scn.starts, &all, &mut budget, |rng, state, sample| {
                let g = rng.random_range(0..alloc.rotate_group());
                let mut members = alloc.members(g);
                if members.len() > AIM_LIMIT {
                    members.shuffle(rng);
                    members.truncate(AIM_LIMIT);
                    members.sort_unstable();
                }
                let targets: Vec<(usize, f64)> = members
                    .iter()
                    .map(|&r| (r, heading_to(state.position(r), sample[r], state.heading(r))))
                    .collect();
                let mut seq = c.orient_absolute(state, &targets)?.seq;
                seq.append(&c.raw_field(g, sample_arc(rng, cfg.d_max)));
                Ok(alloc::vec![seq])
            })?
        }
    };
    finish(scn, out.seq, out.solved, &budget, clock)
}

/// One robot at a time: a tree over that robot's position whose edges are
/// single-robot isolation primitives aimed at the sample.
pub fn plan_pure_control(scn: &Scenario, clock: &dyn Clock) -> Result<PlanResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(scn.seed);
    let mut budget = Budget::new(scn, clock);
    let c = compiler(scn)?;
    let d_max = scn.config.d_max;
    let mut state = scn.starts.clone();
    let mut seq = ActivationSequence::new();
    for k in 0..scn.params.n() {
        let rounds = c.isolation_rounds(k);
        let scale = (1u64 << rounds) as f64;
        let out = grow(scn, &mut rng, &state, &[k], &mut budget, |rng, s, sample| {
            let heading = heading_to(s.position(k), sample[0], s.heading(k));
            let leg = sample_arc(rng, d_max) / scale;
            Ok(alloc::vec![c.isolate_translate(s, k, leg, heading)?.seq])
        })?;
        seq.append(&out.seq);
        if !out.solved {
            return finish(scn, seq, false, &budget, clock);
        }
        state = out.end;
    }
    finish(scn, seq, true, &budget, clock)
}

fn compile_cover(scn: &Scenario, subgroups: &[Vec<usize>]) -> Result<Vec<Primitive>> {
    if subgroups.is_empty() {
        return Err(invalid("subgroup planners need at least one subgroup"));
    }
    subgroups
        .iter()
        .map(|s| compile_primitive(s, &scn.alloc))
        .collect()
}

/// Edge from `state` moving the primitive's members towards their sample
/// points. `sample_of(r)` gives robot `r`'s sample.
fn primitive_edge(
    c: &PrimitiveCompiler,
    p: &Primitive,
    rng: &mut ChaCha8Rng,
    d_max: f64,
    state: &SwarmState,
    sample_of: impl Fn(usize) -> Vector2<f64>,
) -> Result<ActivationSequence> {
    let headings: Vec<f64> = p
        .subgroup()
        .iter()
        .map(|&r| heading_to(state.position(r), sample_of(r), state.heading(r)))
        .collect();
    p.compile(c, state, sample_arc(rng, d_max), Some(&headings))
}

/// Robots outside every subgroup never move, so they must start at their
/// goals.
fn uncovered_ok(scn: &Scenario, prims: &[Primitive]) -> bool {
    (0..scn.params.n())
        .filter(|r| !prims.iter().any(|p| p.subgroup().contains(r)))
        .all(|r| (scn.starts.position(r) - scn.goals[r]).norm() <= scn.goal_radius)
}

fn infeasible(scn: &Scenario, clock: &dyn Clock) -> Result<PlanResult> {
    let mut r = PlanResult::build(scn, Status::Infeasible, ActivationSequence::new(), 0, clock)?;
    r.note = "robots outside every subgroup are not at their goals".into();
    Ok(r)
}

/// One tree over all subgroup members; each edge advances one randomly
/// chosen subgroup through its primitive.
pub fn plan_subgroup_parallel(
    scn: &Scenario,
    subgroups: &[Vec<usize>],
    clock: &dyn Clock,
) -> Result<PlanResult> {
    let prims = compile_cover(scn, subgroups)?;
    if !uncovered_ok(scn, &prims) {
        return infeasible(scn, clock);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(scn.seed);
    let mut budget = Budget::new(scn, clock);
    let c = compiler(scn)?;
    let mut tracked: Vec<usize> = prims.iter().flat_map(|p| p.subgroup().iter().copied()).collect();
    tracked.sort_unstable();
    let mut slot = alloc::vec![usize::MAX; scn.params.n()];
    for (i, &r) in tracked.iter().enumerate() {
        slot[r] = i;
    }
    let d_max = scn.config.d_max;
    let goal_bias = scn.config.goal_bias;
    // The sampler picks the subgroup to extend: its members get a free sample
    // and everyone else's coordinate is pinned to the goal, so the nearest
    // node is one where the rest of the swarm has made progress.
    let sampler = |rng: &mut ChaCha8Rng, sample: &mut [Vector2<f64>], goals: &[Vector2<f64>], lo, span| {
        let pick = rng.random_range(0..prims.len());
        uniform_sample(rng, sample, goals, lo, span, goal_bias);
        for (i, &r) in tracked.iter().enumerate() {
            if !prims[pick].subgroup().contains(&r) {
                sample[i] = goals[i];
            }
        }
        pick
    };
    let out: TreeOutcome = grow_with(scn, &mut rng, &scn.starts, &tracked, &mut budget, sampler, |rng, s, sample, pick| {
        Ok(alloc::vec![primitive_edge(&c, &prims[pick], rng, d_max, s, |r| sample[slot[r]])?])
    })?;
    finish(scn, out.seq, out.solved, &budget, clock)
}

/// Plans the subgroups one after another, in the given order, each in its own
/// low-dimensional tree; the plans are concatenated.
pub fn plan_subgroup_sequential(
    scn: &Scenario,
    subgroups: &[Vec<usize>],
    clock: &dyn Clock,
) -> Result<PlanResult> {
    let prims = compile_cover(scn, subgroups)?;
    if !uncovered_ok(scn, &prims) {
        return infeasible(scn, clock);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(scn.seed);
    let mut budget = Budget::new(scn, clock);
    let c = compiler(scn)?;
    let d_max = scn.config.d_max;
    let mut state = scn.starts.clone();
    let mut seq = ActivationSequence::new();
    for p in &prims {
        let tracked = p.subgroup();
        let out = grow(scn, &mut rng, &state, tracked, &mut budget, |rng, s, sample| {
            let at = |r: usize| sample[tracked.iter().position(|&t| t == r).unwrap()];
            Ok(alloc::vec![primitive_edge(&c, p, rng, d_max, s, at)?])
        })?;
        seq.append(&out.seq);
        if !out.solved {
            return finish(scn, seq, false, &budget, clock);
        }
        state = out.end;
    }
    finish(scn, seq, true, &budget, clock)
}
