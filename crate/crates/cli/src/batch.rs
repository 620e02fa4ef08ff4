//! Seeded batch experiments and their CSV summaries.

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use swarmgc_core::planners::{PlanResult, PlannerKind, Scenario, Status};

use crate::error::{CliError, Result};
use crate::run::{run_planner, write_artifacts};
use crate::scenario::{load_scenario, read, yaml, ConfigDoc};

pub const RUNS_CSV: &str = "runs.csv";
pub const SUMMARY_CSV: &str = "summary.csv";

/// Batch description file (YAML). `scenario` is relative to the spec file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BatchSpec {
    pub scenario: PathBuf,
    pub planners: Vec<String>,
    pub seeds: Vec<u64>,
    #[serde(default = "one")]
    pub repeat: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    /// Planner knobs applied on top of the scenario's own.
    #[serde(default)]
    pub overrides: ConfigDoc,
    /// Off: node budgets only and zero runtimes, so reruns are byte-identical.
    #[serde(default = "yes")]
    pub wall_clock: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub jobs: Option<usize>,
    #[serde(default = "yes")]
    pub plots: bool,
}

fn one() -> usize {
    1
}

fn yes() -> bool {
    true
}

/// One line of `runs.csv`; the column order is part of the file format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricRow {
    pub planner: String,
    pub seed: u64,
    pub status: String,
    pub runtime_s: f64,
    pub rrt_nodes: usize,
    pub path_length: f64,
    pub execution_time: f64,
}

/// Per-planner aggregate. Runtime and node columns cover every run; path
/// and execution columns cover solved runs only and are empty when none
/// solved.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub planner: String,
    pub runs: usize,
    pub solved: usize,
    pub timeout: usize,
    pub infeasible: usize,
    pub mean_runtime_s: f64,
    pub median_runtime_s: f64,
    pub mean_rrt_nodes: f64,
    pub mean_path_length: Option<f64>,
    pub median_path_length: Option<f64>,
    pub mean_execution_time: Option<f64>,
    pub median_execution_time: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct Batch {
    pub scenario: Scenario,
    pub planners: Vec<PlannerKind>,
    pub seeds: Vec<u64>,
    pub repeat: usize,
    pub wall_clock: bool,
    pub jobs: Option<usize>,
    /// Where per-run artifacts go; none are written when unset.
    pub out: Option<PathBuf>,
    pub plots: bool,
}

#[derive(Debug, Clone)]
pub struct RunRecord {
    pub planner: PlannerKind,
    pub seed: u64,
    pub repeat: usize,
    pub row: MetricRow,
    pub result: Option<PlanResult>,
    pub error: Option<String>,
    /// Artifact directory of this run, if written.
    pub dir: Option<PathBuf>,
}

impl Batch {
    pub fn new(scenario: Scenario, planners: Vec<PlannerKind>, seeds: Vec<u64>) -> Self {
        Batch {
            scenario,
            planners,
            seeds,
            repeat: 1,
            wall_clock: true,
            jobs: None,
            out: None,
            plots: true,
        }
    }

    fn run_dir(&self, kind: PlannerKind, seed: u64, rep: usize) -> Option<PathBuf> {
        let name = if self.repeat > 1 {
            format!("seed-{seed}-rep{rep}")
        } else {
            format!("seed-{seed}")
        };
        self.out.as_ref().map(|o| o.join("runs").join(kind.id()).join(name))
    }

    fn run_cell(&self, kind: PlannerKind, seed: u64, rep: usize) -> RunRecord {
        let mut scn = self.scenario.clone();
        scn.seed = seed;
        let dir = self.run_dir(kind, seed, rep);
        let outcome = run_planner(&scn, kind, self.wall_clock).and_then(|r| {
            if let Some(d) = &dir {
                write_artifacts(d, &scn, kind, &r, self.plots)?;
            }
            Ok(r)
        });
        let (row, result, error) = match outcome {
            Ok(r) => {
                let m = r.metrics;
                let row = MetricRow {
                    planner: kind.id().into(),
                    seed,
                    status: r.status.as_str().into(),
                    runtime_s: m.runtime_s,
                    rrt_nodes: m.rrt_nodes,
                    path_length: m.path_length,
                    execution_time: m.execution_time,
                };
                (row, Some(r), None)
            }
            Err(e) => {
                // recorded, never fatal for the batch
                if let Some(d) = &dir {
                    let _ = fs::create_dir_all(d).and_then(|_| fs::write(d.join("error.txt"), e.to_string()));
                }
                let row = MetricRow {
                    planner: kind.id().into(),
                    seed,
                    status: Status::Infeasible.as_str().into(),
                    runtime_s: 0.0,
                    rrt_nodes: 0,
                    path_length: 0.0,
                    execution_time: 0.0,
                };
                (row, None, Some(e.to_string()))
            }
        };
        RunRecord {
            planner: kind,
            seed,
            repeat: rep,
            row,
            result,
            error,
            dir,
        }
    }

    /// Runs every (planner, seed, repeat) cell, possibly concurrently. Rows
    /// come back in planner, seed, repeat order regardless of scheduling.
    pub fn run(&self) -> Result<Vec<RunRecord>> {
        if self.planners.is_empty() || self.seeds.is_empty() || self.repeat == 0 {
            return Err(CliError::Validation(
                "batch needs at least one planner, one seed and repeat >= 1".into(),
            ));
        }
        let cells: Vec<(PlannerKind, u64, usize)> = self
            .planners
            .iter()
            .flat_map(|&k| {
                self.seeds
                    .iter()
                    .flat_map(move |&s| (0..self.repeat).map(move |r| (k, s, r)))
            })
            .collect();
        let mut pool = rayon::ThreadPoolBuilder::new();
        if let Some(j) = self.jobs {
            pool = pool.num_threads(j.max(1));
        }
        let pool = pool
            .build()
            .map_err(|e| CliError::Validation(format!("thread pool: {e}")))?;
        let records = pool.install(|| {
            cells
                .par_iter()
                .map(|&(k, s, r)| self.run_cell(k, s, r))
                .collect::<Vec<_>>()
        });
        if let Some(out) = &self.out {
            let rows: Vec<MetricRow> = records.iter().map(|r| r.row.clone()).collect();
            write_runs_csv(&out.join(RUNS_CSV), &rows)?;
            write_summary_csv(&out.join(SUMMARY_CSV), &summarize(&rows))?;
        }
        Ok(records)
    }
}

fn mean(v: &[f64]) -> Option<f64> {
    (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
}

pub fn median(v: &[f64]) -> Option<f64> {
    if v.is_empty() {
        return None;
    }
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let k = s.len() / 2;
    Some(if s.len() % 2 == 1 { s[k] } else { (s[k - 1] + s[k]) / 2.0 })
}

/// Aggregates rows per planner, in order of first appearance.
pub fn summarize(rows: &[MetricRow]) -> Vec<SummaryRow> {
    let mut planners: Vec<&str> = Vec::new();
    for r in rows {
        if !planners.contains(&r.planner.as_str()) {
            planners.push(&r.planner);
        }
    }
    planners
        .into_iter()
        .map(|p| {
            let mine: Vec<&MetricRow> = rows.iter().filter(|r| r.planner == p).collect();
            let count = |s: Status| mine.iter().filter(|r| r.status == s.as_str()).count();
            let runtime: Vec<f64> = mine.iter().map(|r| r.runtime_s).collect();
            let nodes: Vec<f64> = mine.iter().map(|r| r.rrt_nodes as f64).collect();
            let solved: Vec<&&MetricRow> = mine.iter().filter(|r| r.status == Status::Solved.as_str()).collect();
            let path: Vec<f64> = solved.iter().map(|r| r.path_length).collect();
            let exec: Vec<f64> = solved.iter().map(|r| r.execution_time).collect();
            SummaryRow {
                planner: p.to_string(),
                runs: mine.len(),
                solved: count(Status::Solved),
                timeout: count(Status::Timeout),
                infeasible: count(Status::Infeasible),
                mean_runtime_s: mean(&runtime).unwrap_or(0.0),
                median_runtime_s: median(&runtime).unwrap_or(0.0),
                mean_rrt_nodes: mean(&nodes).unwrap_or(0.0),
                mean_path_length: mean(&path),
                median_path_length: median(&path),
                mean_execution_time: mean(&exec),
                median_execution_time: median(&exec),
            }
        })
        .collect()
}

fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| CliError::io(parent, e))?;
    }
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

pub fn write_runs_csv(path: &Path, rows: &[MetricRow]) -> Result<()> {
    write_csv(path, rows)
}

pub fn write_summary_csv(path: &Path, rows: &[SummaryRow]) -> Result<()> {
    write_csv(path, rows)
}

pub fn read_runs_csv(path: &Path) -> Result<Vec<MetricRow>> {
    let mut r = csv::Reader::from_path(path)?;
    Ok(r.deserialize().collect::<Result<_, _>>()?)
}

pub fn read_summary_csv(path: &Path) -> Result<Vec<SummaryRow>> {
    let mut r = csv::Reader::from_path(path)?;
    Ok(r.deserialize().collect::<Result<_, _>>()?)
}

/// Loads a batch spec file into a runnable [`Batch`]. `out` overrides the
/// spec's own output directory.
pub fn load_batch(spec_path: &Path, out: Option<&Path>) -> Result<Batch> {
    let spec: BatchSpec = yaml(spec_path, &read(spec_path)?)?;
    let base = spec_path.parent().unwrap_or(Path::new("."));
    let mut scenario = load_scenario(&base.join(&spec.scenario))?.scenario;
    let n = scenario.params.n();
    spec.overrides.apply(n, &mut scenario.config)?;
    scenario.validate()?;
    let planners = spec
        .planners
        .iter()
        .map(|p| p.parse::<PlannerKind>())
        .collect::<Result<Vec<_>, _>>()?;
    let out = out
        .map(Path::to_path_buf)
        .or_else(|| spec.out.as_ref().map(|o| base.join(o)));
    Ok(Batch {
        scenario,
        planners,
        seeds: spec.seeds,
        repeat: spec.repeat,
        wall_clock: spec.wall_clock,
        jobs: spec.jobs,
        out,
        plots: spec.plots,
    })
}

/// Plain-text table of the summary, for the terminal.
pub fn format_summary(rows: &[SummaryRow]) -> String {
    let opt = |v: Option<f64>| v.map_or_else(|| "-".to_string(), |x| format!("{x:.2}"));
    let mut s = format!(
        "{:<20} {:>6} {:>10} {:>12} {:>10} {:>12} {:>12}\n",
        "planner", "solved", "runtime_s", "rrt_nodes", "path", "execution", "unsolved"
    );
    for r in rows {
        s.push_str(&format!(
            "{:<20} {:>6} {:>10.3} {:>12.1} {:>10} {:>12} {:>12}\n",
            r.planner,
            format!("{}/{}", r.solved, r.runs),
            r.mean_runtime_s,
            r.mean_rrt_nodes,
            opt(r.mean_path_length),
            opt(r.mean_execution_time),
            r.runs - r.solved
        ));
    }
    s
}
