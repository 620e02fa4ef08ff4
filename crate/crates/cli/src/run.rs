use std::fs;
use std::path::Path;
use std::time::Instant;

use swarmgc_core::dynamics::simulate_with;
use swarmgc_core::planners::{plan, verify_plan, NoClock, PlanResult, PlannerKind, Scenario, Status, Verification};

use crate::error::{CliError, Result};
use crate::plot::{emit_plot, PlotOptions};
use crate::scenario::{load_scenario, write};
use crate::seqio::{load_sequence, save_sequence, write_trajectory_csv};

/// Runs one planner. With `wall_clock` off only node budgets apply and the
/// reported runtime is zero, which makes the whole result reproducible.
pub fn run_planner(scn: &Scenario, kind: PlannerKind, wall_clock: bool) -> Result<PlanResult> {
    if wall_clock {
        let t0 = Instant::now();
        let clock = move || t0.elapsed().as_secs_f64();
        Ok(plan(scn, kind, &clock)?)
    } else {
        Ok(plan(scn, kind, &NoClock)?)
    }
}

pub fn exit_code(status: Status) -> i32 {
    match status {
        Status::Solved => 0,
        Status::Timeout => 2,
        Status::Infeasible => 3,
    }
}

pub const SEQUENCE_FILE: &str = "sequence.txt";
pub const TRAJECTORY_FILE: &str = "trajectory.csv";
pub const PLOT_FILE: &str = "plot.svg";
pub const RESULT_FILE: &str = "result.txt";

/// Writes the sequence, the step-boundary trajectory, a plot and a short
/// result summary into `dir`.
pub fn write_artifacts(dir: &Path, scn: &Scenario, kind: PlannerKind, r: &PlanResult, plot: bool) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    save_sequence(&dir.join(SEQUENCE_FILE), &r.seq, &scn.alloc)?;
    let coarse = simulate_with(&scn.starts, &r.seq, &scn.params, None)?;
    write_trajectory_csv(&dir.join(TRAJECTORY_FILE), &coarse)?;
    if plot {
        emit_plot(&r.traj, &scn.env, Some(&scn.goals), &PlotOptions::default(), &dir.join(PLOT_FILE))?;
    }
    let m = &r.metrics;
    let mut text = format!(
        "planner: {kind}\nseed: {}\nstatus: {}\nruntime_s: {}\nrrt_nodes: {}\npath_length: {}\nexecution_time: {}\ngoal_error: {}\nsteps: {}\n",
        scn.seed, r.status, m.runtime_s, m.rrt_nodes, m.path_length, m.execution_time, r.goal_error, r.seq.len()
    );
    if !r.note.is_empty() {
        text.push_str(&format!("note: {}\n", r.note));
    }
    write(&dir.join(RESULT_FILE), &text)
}

/// Replays a saved sequence from the scenario's start.
pub fn verify_files(scenario: &Path, sequence: &Path) -> Result<Verification> {
    let scn = load_scenario(scenario)?.scenario;
    let seq = load_sequence(sequence, &scn.alloc)?;
    Ok(verify_plan(&scn, &seq)?)
}
