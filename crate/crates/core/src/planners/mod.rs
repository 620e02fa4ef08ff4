//! Motion planners over the primitive layer.
//!
//! Every planner produces an [`ActivationSequence`] from the scenario's start
//! state. The RRT family grows a tree whose edges are compiled sequences,
//! checks each edge's full trajectory against the environment, and stops
//! when every tracked robot is within `goal_radius` of its goal.

mod env;
mod numopt;
mod rrt;
mod search;

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use nalgebra::Vector2;

use crate::allocation::GroupAllocation;
use crate::dynamics::{execution_time, path_length, simulate_with, Trajectory};
use crate::error::{invalid, Error, Result};
use crate::primitives::DEFAULT_EPS;
use crate::sequence::ActivationSequence;
use crate::state::{SwarmParams, SwarmState};

pub use env::{collision_check, Circle, Environment, Rect};
pub use numopt::{plan_numopt, solve_schedule, NumoptSolution};
pub use rrt::{plan_pure_control, plan_rrt, plan_subgroup_parallel, plan_subgroup_sequential, RrtMode};

/// Source of elapsed wall-clock time, in seconds since the plan started.
/// The core crate has no clock of its own.
pub trait Clock {
    fn elapsed_s(&self) -> f64;
}

/// A clock that never advances; only node budgets apply.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoClock;

impl Clock for NoClock {
    fn elapsed_s(&self) -> f64 {
        0.0
    }
}

impl<F: Fn() -> f64> Clock for F {
    fn elapsed_s(&self) -> f64 {
        self()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PlannerKind {
    NumOpt,
    Rrt,
    RrtRot,
    PureControl,
    SubgroupParallel,
    SubgroupSequential,
}

impl PlannerKind {
    pub const ALL: [PlannerKind; 6] = [
        PlannerKind::NumOpt,
        PlannerKind::Rrt,
        PlannerKind::RrtRot,
        PlannerKind::PureControl,
        PlannerKind::SubgroupParallel,
        PlannerKind::SubgroupSequential,
    ];

    pub fn id(self) -> &'static str {
        match self {
            PlannerKind::NumOpt => "numopt",
            PlannerKind::Rrt => "rrt",
            PlannerKind::RrtRot => "rrt-rot",
            PlannerKind::PureControl => "pure-control",
            PlannerKind::SubgroupParallel => "subgroup-parallel",
            PlannerKind::SubgroupSequential => "subgroup-sequential",
        }
    }
}

impl fmt::Display for PlannerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for PlannerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PlannerKind::ALL
            .into_iter()
            .find(|k| k.id() == s.trim())
            .ok_or_else(|| invalid(alloc::format!("unknown planner '{s}'")))
    }
}

/// Planner knobs. Defaults follow the documented benchmark settings.
#[derive(Debug, Clone, PartialEq)]
pub struct PlannerConfig {
    pub max_nodes: usize,
    pub max_time_s: f64,
    pub goal_bias: f64,
    /// Upper bound of the sampled extension arc.
    pub d_max: f64,
    /// Random (group, arc) pairs tried per extension of the original RRT.
    pub extend_candidates: usize,
    /// Steps in a numerical-optimization schedule.
    pub k_steps: usize,
    pub restarts: usize,
    /// Disjoint robot sets for the subgroup planners (0-based).
    pub subgroups: Vec<Vec<usize>>,
    /// Excursion bound of bilateral rotations.
    pub eps: f64,
    /// Spatial resolution of trajectory subsamples.
    pub resolution: f64,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        PlannerConfig {
            max_nodes: 20_000,
            max_time_s: 300.0,
            goal_bias: 0.1,
            d_max: 2.0,
            extend_candidates: 4,
            k_steps: 35,
            restarts: 10,
            subgroups: Vec::new(),
            eps: DEFAULT_EPS,
            resolution: crate::dynamics::DEFAULT_RESOLUTION,
        }
    }
}

impl PlannerConfig {
    pub fn validate(&self, n: usize) -> Result<()> {
        if self.max_nodes == 0 || !(self.max_time_s > 0.0) {
            return Err(invalid("budgets must be positive"));
        }
        if !(0.0..=1.0).contains(&self.goal_bias) {
            return Err(invalid("goal_bias must lie in [0, 1]"));
        }
        if !(self.d_max > 0.0 && self.d_max.is_finite()) {
            return Err(invalid("d_max must be positive"));
        }
        if self.extend_candidates == 0 || self.k_steps == 0 || self.restarts == 0 {
            return Err(invalid("extend_candidates, k_steps and restarts must be at least 1"));
        }
        if !(self.eps > 0.0) || !(self.resolution > 0.0) {
            return Err(invalid("eps and resolution must be positive"));
        }
        let mut seen = alloc::vec![false; n];
        for sub in &self.subgroups {
            if sub.is_empty() {
                return Err(invalid("empty subgroup"));
            }
            for &r in sub {
                if r >= n {
                    return Err(invalid(alloc::format!("subgroup robot {} out of range", r + 1)));
                }
                if core::mem::replace(&mut seen[r], true) {
                    return Err(invalid(alloc::format!("robot {} is in two subgroups", r + 1)));
                }
            }
        }
        Ok(())
    }
}

/// A planning problem.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub params: SwarmParams,
    pub alloc: GroupAllocation,
    pub starts: SwarmState,
    pub goals: Vec<Vector2<f64>>,
    pub env: Environment,
    pub goal_radius: f64,
    pub seed: u64,
    pub config: PlannerConfig,
}

impl Scenario {
    /// Checks sizes, the goal radius, and that starts and goals are free.
    pub fn validate(&self) -> Result<()> {
        let n = self.params.n();
        if self.alloc.robots() != n || self.starts.n() != n || self.goals.len() != n {
            return Err(Error::Validation(alloc::format!(
                "robot counts disagree: params {n}, allocation {}, starts {}, goals {}",
                self.alloc.robots(),
                self.starts.n(),
                self.goals.len()
            )));
        }
        if !(self.goal_radius > 0.0 && self.goal_radius.is_finite()) {
            return Err(Error::Validation("goal_radius must be positive".into()));
        }
        for (i, p) in self.starts.positions().iter().enumerate() {
            if !self.env.point_free(p) {
                return Err(Error::Validation(alloc::format!("start of R{} is in collision", i + 1)));
            }
        }
        for (i, g) in self.goals.iter().enumerate() {
            if !g.iter().all(|v| v.is_finite()) || !self.env.point_free(g) {
                return Err(Error::Validation(alloc::format!("goal of R{} is in collision", i + 1)));
            }
        }
        let single = Trajectory::from_samples(alloc::vec![self.starts.clone()]);
        if !collision_check(&single, &self.env) {
            return Err(Error::Validation("start robots violate the minimum separation".into()));
        }
        self.config
            .validate(n)
            .map_err(|e| Error::Validation(alloc::format!("{e}")))
    }

    /// Largest distance from a robot to its goal.
    pub fn goal_error(&self, state: &SwarmState) -> f64 {
        state
            .positions()
            .iter()
            .zip(&self.goals)
            .map(|(p, g)| (p - g).norm())
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Status {
    Solved,
    Timeout,
    Infeasible,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Solved => "solved",
            Status::Timeout => "timeout",
            Status::Infeasible => "infeasible",
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Status {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "solved" => Ok(Status::Solved),
            "timeout" => Ok(Status::Timeout),
            "infeasible" => Ok(Status::Infeasible),
            other => Err(invalid(alloc::format!("unknown status '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Metrics {
    pub runtime_s: f64,
    pub rrt_nodes: usize,
    pub path_length: f64,
    pub execution_time: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlanResult {
    pub status: Status,
    pub seq: ActivationSequence,
    pub traj: Trajectory,
    pub metrics: Metrics,
    /// Largest robot-to-goal distance at the end of `seq`.
    pub goal_error: f64,
    /// Free-form note, e.g. the best numerical residual on failure.
    pub note: String,
}

impl PlanResult {
    pub(crate) fn build(
        scn: &Scenario,
        status: Status,
        seq: ActivationSequence,
        nodes: usize,
        clock: &dyn Clock,
    ) -> Result<Self> {
        let traj = simulate_with(&scn.starts, &seq, &scn.params, Some(scn.config.resolution))?;
        Ok(PlanResult {
            status,
            goal_error: scn.goal_error(traj.final_state()),
            metrics: Metrics {
                runtime_s: clock.elapsed_s(),
                rrt_nodes: nodes,
                path_length: path_length(&traj),
                execution_time: execution_time(&seq, &scn.params),
            },
            seq,
            traj,
            note: String::new(),
        })
    }
}

/// Outcome of replaying a sequence against a scenario.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Verification {
    pub reached: bool,
    pub collision_free: bool,
    pub goal_error: f64,
}

impl Verification {
    pub fn passed(&self) -> bool {
        self.reached && self.collision_free
    }
}

/// Re-simulates `seq` from the scenario start and checks goals and
/// collisions, independently of any planner bookkeeping.
pub fn verify_plan(scn: &Scenario, seq: &ActivationSequence) -> Result<Verification> {
    let traj = simulate_with(&scn.starts, seq, &scn.params, Some(scn.config.resolution))?;
    let goal_error = scn.goal_error(traj.final_state());
    Ok(Verification {
        reached: goal_error <= scn.goal_radius,
        collision_free: collision_check(&traj, &scn.env),
        goal_error,
    })
}

/// Runs the planner named by `kind` with the scenario's configuration.
pub fn plan(scn: &Scenario, kind: PlannerKind, clock: &dyn Clock) -> Result<PlanResult> {
    scn.validate()?;
    match kind {
        PlannerKind::NumOpt => plan_numopt(scn, clock),
        PlannerKind::Rrt => plan_rrt(scn, RrtMode::Original, clock),
        PlannerKind::RrtRot => plan_rrt(scn, RrtMode::WithRotation, clock),
        PlannerKind::PureControl => plan_pure_control(scn, clock),
        PlannerKind::SubgroupParallel => plan_subgroup_parallel(scn, &scn.config.subgroups, clock),
        PlannerKind::SubgroupSequential => {
            plan_subgroup_sequential(scn, &scn.config.subgroups, clock)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::allocation::allocate_groups;

    fn scenario(starts: SwarmState, goals: Vec<Vector2<f64>>, seed: u64) -> Scenario {
        let n = starts.n();
        Scenario {
            params: SwarmParams::new(n, 1.0).unwrap(),
            alloc: allocate_groups(n).unwrap(),
            starts,
            goals,
            env: Environment::open_square(20.0).unwrap(),
            goal_radius: 1.0,
            seed,
            config: PlannerConfig::default(),
        }
    }

    fn row(n: usize, x: f64) -> Vec<Vector2<f64>> {
        (0..n).map(|i| Vector2::new(x, 2.0 + 3.0 * i as f64)).collect()
    }

    fn at_rest(n: usize) -> Scenario {
        let starts = SwarmState::new(row(n, 3.0), alloc::vec![0.0; n]).unwrap();
        scenario(starts, row(n, 3.0), 1)
    }

    #[test]
    fn goals_at_starts_solve_immediately() {
        let mut scn = at_rest(6);
        scn.config.subgroups = alloc::vec![alloc::vec![3, 4], alloc::vec![0, 2], alloc::vec![1, 5]];
        for kind in PlannerKind::ALL {
            let r = plan(&scn, kind, &NoClock).unwrap();
            assert_eq!(r.status, Status::Solved, "{kind}");
            assert!(r.seq.is_empty(), "{kind}");
            assert_eq!(r.metrics.path_length, 0.0);
            if matches!(kind, PlannerKind::Rrt | PlannerKind::RrtRot) {
                assert_eq!(r.metrics.rrt_nodes, 1);
            }
        }
    }

    #[test]
    fn numopt_single_step_is_exact() {
        let p = SwarmParams::new(1, 1.0).unwrap();
        let a = allocate_groups(1).unwrap();
        let s = SwarmState::new(alloc::vec![Vector2::new(1.0, 1.0)], alloc::vec![0.0]).unwrap();
        let goal = [Vector2::new(4.5, 1.0)];
        let g = (0..a.groups()).find(|&g| a.contains(g, 0)).unwrap();
        let sol = solve_schedule(&s, &goal, &p, &a, &[g], &[1.0]).unwrap();
        assert!((sol.durations[0] - 3.5).abs() < 1e-9, "{sol:?}");
        assert!(sol.residual < 1e-9);
    }

    #[test]
    fn single_robot_rrt_is_near_straight() {
        for seed in 0..20 {
            let starts = SwarmState::new(alloc::vec![Vector2::new(2.0, 2.0)], alloc::vec![0.0]).unwrap();
            let goal = Vector2::new(15.0, 12.0);
            let scn = scenario(starts, alloc::vec![goal], seed);
            let r = plan(&scn, PlannerKind::RrtRot, &NoClock).unwrap();
            assert_eq!(r.status, Status::Solved);
            let straight = (goal - Vector2::new(2.0, 2.0)).norm();
            assert!(r.metrics.path_length <= 1.5 * straight, "seed {seed}: {}", r.metrics.path_length);
        }
    }

    #[test]
    fn seed_determinism() {
        let starts = SwarmState::new(row(3, 2.0), alloc::vec![0.0, 1.0, 2.0]).unwrap();
        let scn = scenario(starts, row(3, 9.0), 5);
        for kind in [PlannerKind::Rrt, PlannerKind::RrtRot, PlannerKind::PureControl, PlannerKind::NumOpt] {
            let a = plan(&scn, kind, &NoClock).unwrap();
            let b = plan(&scn, kind, &NoClock).unwrap();
            assert_eq!(a, b, "{kind}");
        }
    }

    #[test]
    fn solved_plans_verify() {
        let starts = SwarmState::new(row(3, 2.0), alloc::vec![0.0, 1.0, 2.0]).unwrap();
        let mut scn = scenario(starts, row(3, 9.0), 2);
        scn.config.subgroups = alloc::vec![alloc::vec![0], alloc::vec![1, 2]];
        for kind in PlannerKind::ALL {
            let r = plan(&scn, kind, &NoClock).unwrap();
            if r.status == Status::Solved {
                assert!(verify_plan(&scn, &r.seq).unwrap().passed(), "{kind}");
            }
        }
    }

    #[test]
    fn larger_budget_keeps_solution() {
        let starts = SwarmState::new(row(3, 2.0), alloc::vec![0.0; 3]).unwrap();
        let mut scn = scenario(starts, row(3, 12.0), 3);
        scn.config.max_nodes = 300;
        let small = plan(&scn, PlannerKind::RrtRot, &NoClock).unwrap();
        for nodes in [600, 5000] {
            scn.config.max_nodes = nodes;
            let big = plan(&scn, PlannerKind::RrtRot, &NoClock).unwrap();
            if small.status == Status::Solved {
                assert_eq!(big.status, Status::Solved);
                assert_eq!(big.seq, small.seq);
            }
        }
    }

    #[test]
    fn node_budget_times_out() {
        let starts = SwarmState::new(row(6, 2.0), alloc::vec![0.0; 6]).unwrap();
        let mut scn = scenario(starts, row(6, 16.0), 0);
        scn.goal_radius = 0.05;
        scn.config.max_nodes = 50;
        let r = plan(&scn, PlannerKind::Rrt, &NoClock).unwrap();
        assert_eq!(r.status, Status::Timeout);
        assert!(r.metrics.rrt_nodes <= 50);
    }

    #[test]
    fn uncovered_robot_away_from_goal_is_infeasible() {
        let starts = SwarmState::new(row(3, 2.0), alloc::vec![0.0; 3]).unwrap();
        let mut scn = scenario(starts, row(3, 9.0), 0);
        scn.config.subgroups = alloc::vec![alloc::vec![0]];
        let r = plan(&scn, PlannerKind::SubgroupSequential, &NoClock).unwrap();
        assert_eq!(r.status, Status::Infeasible);
    }

    #[test]
    fn validation_rejects_goal_in_obstacle() {
        let mut scn = at_rest(2);
        scn.env = Environment::new(
            Rect::new(Vector2::zeros(), Vector2::repeat(20.0)).unwrap(),
            alloc::vec![Circle::new(Vector2::new(3.0, 5.0), 1.0).unwrap()],
        )
        .unwrap();
        scn.goals[1] = Vector2::new(3.0, 5.5);
        scn.starts = SwarmState::new(row(2, 8.0), alloc::vec![0.0; 2]).unwrap();
        assert!(matches!(scn.validate(), Err(Error::Validation(_))));
    }

    #[test]
    fn planner_ids_round_trip() {
        for k in PlannerKind::ALL {
            assert_eq!(k.id().parse::<PlannerKind>().unwrap(), k);
        }
        assert!("rrt*".parse::<PlannerKind>().is_err());
    }
}
