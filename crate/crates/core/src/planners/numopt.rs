//! Numerical optimization over a fixed random group schedule.
//!
//! For a schedule `ν_1..ν_K` the final positions are smooth functions of the
//! step durations `t_j >= 0`. We substitute `t = s²` to drop the bound and
//! minimize `Σ w_j s_j²` (with `w_j` the number of translating robots, i.e.
//! path length) subject to reaching the goals, by repeated least-norm steps
//! onto the linearized constraint with an ℓ1 merit line search.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector, Vector2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{collision_check, Clock, PlanResult, Scenario, Status};
use crate::allocation::GroupAllocation;
use crate::dynamics::simulate_with;
use crate::error::{invalid, Result};
use crate::sequence::{ActivationSequence, ControlStep};
use crate::state::{SwarmParams, SwarmState};

/// Largest final position error accepted as reaching the goals.
pub const NUMOPT_TOL: f64 = 1e-3;

/// Small weight on steps with no translating robot, so pure rotations are
/// not free but nearly so.
const ROTATION_WEIGHT: f64 = 0.1;
const MAX_ITER: usize = 400;
/// Initial guesses tried on each sampled schedule.
const STARTS_PER_SCHEDULE: usize = 8;
const POLISH_ITER: usize = 200;

#[derive(Debug, Clone, PartialEq)]
pub struct NumoptSolution {
    /// Group index per step.
    pub schedule: Vec<usize>,
    /// Arc per step, all nonnegative.
    pub durations: Vec<f64>,
    /// Largest final position error.
    pub residual: f64,
}

impl NumoptSolution {
    pub fn sequence(&self, alloc: &GroupAllocation) -> ActivationSequence {
        self.schedule
            .iter()
            .zip(&self.durations)
            .map(|(&g, &t)| ControlStep::group(alloc, g, t))
            .filter(|cs| cs.arc > 0.0)
            .collect()
    }
}

struct Problem<'a> {
    starts: &'a SwarmState,
    goals: &'a [Vector2<f64>],
    params: &'a SwarmParams,
    active: Vec<Vec<bool>>,
}

impl Problem<'_> {
    /// Residual `p(t) - goal` (length 2n) and its Jacobian in `t`.
    fn eval(&self, t: &[f64]) -> (DVector<f64>, DMatrix<f64>) {
        let n = self.starts.n();
        let k = t.len();
        let mut h = DVector::zeros(2 * n);
        let mut jac = DMatrix::zeros(2 * n, k);
        let mut theta = alloc::vec![0.0; k];
        for i in 0..n {
            let r = self.params.turning_radius(i);
            let mut th = self.starts.heading(i);
            let mut p = self.starts.position(i);
            for j in 0..k {
                theta[j] = th;
                if self.active[j][i] {
                    p += Vector2::new(libm::cos(th), libm::sin(th)) * t[j];
                } else {
                    th += t[j] / r;
                }
            }
            let e = p - self.goals[i];
            h[2 * i] = e.x;
            h[2 * i + 1] = e.y;
            let mut perp = Vector2::zeros();
            for j in (0..k).rev() {
                let (s, c) = (libm::sin(theta[j]), libm::cos(theta[j]));
                if self.active[j][i] {
                    jac[(2 * i, j)] = c;
                    jac[(2 * i + 1, j)] = s;
                    perp += Vector2::new(-s, c) * t[j];
                } else {
                    jac[(2 * i, j)] = perp.x / r;
                    jac[(2 * i + 1, j)] = perp.y / r;
                }
            }
        }
        (h, jac)
    }

    fn residual(&self, s: &DVector<f64>) -> DVector<f64> {
        self.eval(&squares(s)).0
    }
}

fn squares(s: &DVector<f64>) -> Vec<f64> {
    s.iter().map(|v| v * v).collect()
}

/// `W⁻¹ Jᵀ (J W⁻¹ Jᵀ + μI)⁻¹ rhs`, the `W`-weighted least-norm solution of
/// `J x = rhs`.
fn least_norm(jac: &DMatrix<f64>, winv: &DVector<f64>, rhs: &DVector<f64>) -> Option<(DVector<f64>, DVector<f64>)> {
    let scaled = DMatrix::from_fn(jac.nrows(), jac.ncols(), |i, j| jac[(i, j)] * winv[j]);
    let m = &scaled * jac.transpose();
    let mut mu = 1e-12 * (1.0 + m.trace() / m.nrows() as f64);
    for _ in 0..12 {
        let mut reg = m.clone();
        for d in 0..reg.nrows() {
            reg[(d, d)] += mu;
        }
        if let Some(ch) = reg.cholesky() {
            let lambda = ch.solve(rhs);
            return Some((scaled.transpose() * &lambda, lambda));
        }
        mu *= 100.0;
    }
    None
}

/// Levenberg-Marquardt on the residual alone, in the underdetermined
/// (least-norm) form `Δ = -Jᵀ (J Jᵀ + λI)⁻¹ h` with adaptive damping.
fn feasibility(prob: &Problem<'_>, s: &mut DVector<f64>, iters: usize) {
    let (mut h, mut jt) = prob.eval(&squares(s));
    let mut lambda = 1e-3;
    for _ in 0..iters {
        if h.amax() < 1e-13 {
            break;
        }
        let js = DMatrix::from_fn(jt.nrows(), jt.ncols(), |i, j| jt[(i, j)] * 2.0 * s[j]);
        let jjt = &js * js.transpose();
        let scale = 1.0 + jjt.trace() / jjt.nrows() as f64;
        let h0 = h.norm_squared();
        let mut improved = false;
        for _ in 0..20 {
            let mut m = jjt.clone();
            for d in 0..m.nrows() {
                m[(d, d)] += lambda * scale;
            }
            let Some(ch) = m.cholesky() else {
                lambda *= 10.0;
                continue;
            };
            let trial = &*s - js.transpose() * ch.solve(&h);
            let (th, tj) = prob.eval(&squares(&trial));
            if th.norm_squared() < h0 {
                *s = trial;
                h = th;
                jt = tj;
                lambda = (lambda * 0.3).max(1e-15);
                improved = true;
                break;
            }
            lambda *= 10.0;
        }
        if !improved {
            break;
        }
    }
}

/// Optimizes the durations of one schedule from the initial guess `init`.
pub fn solve_schedule(
    starts: &SwarmState,
    goals: &[Vector2<f64>],
    params: &SwarmParams,
    alloc: &GroupAllocation,
    schedule: &[usize],
    init: &[f64],
) -> Result<NumoptSolution> {
    if schedule.len() != init.len() || schedule.is_empty() {
        return Err(invalid("schedule and initial durations must be nonempty and match"));
    }
    if goals.len() != starts.n() || alloc.robots() != starts.n() {
        return Err(invalid("goal count must match the swarm"));
    }
    if let Some(&g) = schedule.iter().find(|&&g| g >= alloc.groups()) {
        return Err(invalid(alloc::format!("group G{} out of range", g + 1)));
    }
    let prob = Problem {
        starts,
        goals,
        params,
        active: schedule.iter().map(|&g| alloc.row(g).to_vec()).collect(),
    };
    let w = DVector::from_iterator(
        schedule.len(),
        prob.active
            .iter()
            .map(|a| a.iter().filter(|&&x| x).count() as f64 + ROTATION_WEIGHT),
    );
    let winv = w.map(|v| 1.0 / v);
    let mut s = DVector::from_iterator(init.len(), init.iter().map(|t| libm::sqrt(t.max(0.0))));
    feasibility(&prob, &mut s, POLISH_ITER);
    let cost = |s: &DVector<f64>| s.iter().zip(w.iter()).map(|(v, w)| w * v * v).sum::<f64>();
    let mut rho = 1.0;

    for _ in 0..MAX_ITER {
        let (h, jt) = prob.eval(&squares(&s));
        let js = DMatrix::from_fn(jt.nrows(), jt.ncols(), |i, j| jt[(i, j)] * 2.0 * s[j]);
        let rhs = &js * &s - &h;
        let Some((target, lambda)) = least_norm(&js, &winv, &rhs) else {
            break;
        };
        let dir = target - &s;
        rho = f64::max(rho, 2.2 * lambda.amax() + 1e-6);
        let h1 = h.lp_norm(1);
        let merit0 = cost(&s) + rho * h1;
        let slope = 2.0 * s.component_mul(&w).dot(&dir) - rho * h1;
        let mut alpha = 1.0;
        let mut accepted = false;
        for _ in 0..40 {
            let trial = &s + &dir * alpha;
            let m = cost(&trial) + rho * prob.residual(&trial).lp_norm(1);
            if m <= merit0 + 1e-4 * alpha * slope.min(0.0) {
                s = trial;
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if !accepted || (dir.amax() * alpha < 1e-12 && h.amax() < 1e-12) {
            break;
        }
    }

    feasibility(&prob, &mut s, POLISH_ITER);

    let mut durations = squares(&s);
    let top = durations.iter().cloned().fold(0.0, f64::max);
    for t in durations.iter_mut() {
        if *t < 1e-12 * top.max(1.0) {
            *t = 0.0;
        }
    }
    let (h, _) = prob.eval(&durations);
    let residual = (0..starts.n())
        .map(|i| libm::hypot(h[2 * i], h[2 * i + 1]))
        .fold(0.0, f64::max);
    Ok(NumoptSolution {
        schedule: schedule.to_vec(),
        durations,
        residual,
    })
}

/// Random-schedule numerical optimization with restarts. Collisions are not
/// part of the program; a solution whose trajectory collides is discarded
/// and the next restart is tried.
pub fn plan_numopt(scn: &Scenario, clock: &dyn Clock) -> Result<PlanResult> {
    let cfg = &scn.config;
    if scn.goal_error(&scn.starts) == 0.0 {
        return PlanResult::build(scn, Status::Solved, ActivationSequence::new(), 0, clock);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(scn.seed);
    let n = scn.params.n();
    let k = cfg.k_steps;
    let mean_dist = (0..n)
        .map(|i| (scn.goals[i] - scn.starts.position(i)).norm())
        .sum::<f64>()
        / n as f64;
    // Large enough for the robots to cover their distance and, through the
    // steps where they are idle, to turn around about once.
    let mean_radius = (0..n).map(|i| scn.params.turning_radius(i)).sum::<f64>() / n as f64;
    let groups = scn.alloc.groups() as f64;
    let scale = f64::max(2.0 * mean_dist, core::f64::consts::TAU * mean_radius * groups) / k as f64;
    let mut best: Option<NumoptSolution> = None;
    let mut collided = 0;
    for _ in 0..cfg.restarts {
        if clock.elapsed_s() >= cfg.max_time_s {
            break;
        }
        let schedule: Vec<usize> = (0..k).map(|_| rng.random_range(0..scn.alloc.groups())).collect();
        let mut sol: Option<NumoptSolution> = None;
        for _ in 0..STARTS_PER_SCHEDULE {
            let init: Vec<f64> = (0..k).map(|_| scale * (0.5 + rng.random::<f64>())).collect();
            let cand = solve_schedule(&scn.starts, &scn.goals, &scn.params, &scn.alloc, &schedule, &init)?;
            if sol.as_ref().is_none_or(|s| cand.residual < s.residual) {
                sol = Some(cand);
            }
            if sol.as_ref().is_some_and(|s| s.residual <= NUMOPT_TOL) {
                break;
            }
        }
        let sol = sol.expect("at least one start");
        if sol.residual <= NUMOPT_TOL {
            let seq = sol.sequence(&scn.alloc);
            let traj = simulate_with(&scn.starts, &seq, &scn.params, Some(cfg.resolution))?;
            if collision_check(&traj, &scn.env) {
                return PlanResult::build(scn, Status::Solved, seq, 0, clock);
            }
            collided += 1;
        }
        if best.as_ref().is_none_or(|b| sol.residual < b.residual) {
            best = Some(sol);
        }
    }
    let timed_out = clock.elapsed_s() >= cfg.max_time_s;
    let status = if timed_out { Status::Timeout } else { Status::Infeasible };
    let seq = best.as_ref().map(|b| b.sequence(&scn.alloc)).unwrap_or_default();
    let mut r = PlanResult::build(scn, status, seq, 0, clock)?;
    r.note = alloc::format!(
        "best residual {:.3e}; {} converged schedules collided",
        best.map_or(f64::INFINITY, |b| b.residual),
        collided
    );
    Ok(r)
}
