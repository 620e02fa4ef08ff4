use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use swarmgc::batch::{format_summary, load_batch, summarize};
use swarmgc::library::{build_library, save_library};
use swarmgc::run::{exit_code, run_planner, verify_files, write_artifacts, SEQUENCE_FILE};
use swarmgc::scenario::{load_scenario, state_to_yaml};
use swarmgc::seqio::{format_sequence, save_sequence};
use swarmgc::{CliError, Result};
use swarmgc_core::dynamics::final_state;
use swarmgc_core::planners::{PlannerKind, Status, Verification};
use swarmgc_core::primitives::{compile_primitive, PrimitiveCompiler, DEFAULT_EPS};
use swarmgc_core::{allocate_groups, execution_time, SwarmParams, SwarmState, Vector2};

#[derive(Parser)]
#[command(name = "swarmgc", version, about = "Group-control planning for global-field microrobot swarms")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Plan one scenario and write sequence, trajectory and plot to --out.
    Plan {
        #[arg(long)]
        scenario: PathBuf,
        /// Planner id; defaults to the one named in the scenario file.
        #[arg(long)]
        planner: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
        /// Replay the written sequence and re-check goals and collisions.
        #[arg(long)]
        verify: bool,
        #[arg(long)]
        no_plot: bool,
    },
    /// Run a batch spec and write runs.csv, summary.csv and per-run artifacts.
    Bench {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Compile the lowest-order primitive for a subgroup.
    Primitive {
        /// One-based robot numbers, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        subgroup: Vec<usize>,
        #[arg(long)]
        n: usize,
        /// Displacement of each subgroup member.
        #[arg(long, default_value_t = 1.0)]
        d: f64,
        #[arg(long, default_value_t = 1.0)]
        r: f64,
        #[arg(long, default_value_t = DEFAULT_EPS)]
        eps: f64,
        /// Sequence file; printed to stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write a one-entry primitive library file.
        #[arg(long)]
        library: Option<PathBuf>,
    },
    /// Replay a saved sequence against a scenario.
    Verify {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        sequence: PathBuf,
    },
    /// Print the canonical group allocation for n robots.
    Allocate {
        #[arg(long)]
        n: usize,
    },
}

fn report(v: &Verification) -> i32 {
    println!(
        "verify: reached={} collision_free={} goal_error={:.6}",
        v.reached, v.collision_free, v.goal_error
    );
    if v.passed() {
        0
    } else {
        1
    }
}

fn run(cli: Cli) -> Result<i32> {
    match cli.cmd {
        Cmd::Plan {
            scenario,
            planner,
            seed,
            out,
            verify,
            no_plot,
        } => {
            let file = load_scenario(&scenario)?;
            let kind = match planner {
                Some(p) => p.parse::<PlannerKind>()?,
                None => file
                    .planner
                    .ok_or_else(|| CliError::Validation("no planner given and none in the scenario".into()))?,
            };
            let mut scn = file.scenario;
            if let Some(s) = seed {
                scn.seed = s;
            }
            let r = run_planner(&scn, kind, true)?;
            write_artifacts(&out, &scn, kind, &r, !no_plot)?;
            let m = r.metrics;
            println!(
                "{kind} seed {}: {} runtime_s={:.3} rrt_nodes={} path_length={:.3} execution_time={:.3} steps={}",
                scn.seed,
                r.status,
                m.runtime_s,
                m.rrt_nodes,
                m.path_length,
                m.execution_time,
                r.seq.len()
            );
            if !r.note.is_empty() {
                println!("note: {}", r.note);
            }
            if verify {
                let code = report(&verify_files(&scenario, &out.join(SEQUENCE_FILE))?);
                if code != 0 && r.status == Status::Solved {
                    return Ok(code);
                }
            }
            Ok(exit_code(r.status))
        }
        Cmd::Bench { spec, out, jobs } => {
            let mut batch = load_batch(&spec, out.as_deref())?;
            if jobs.is_some() {
                batch.jobs = jobs;
            }
            let records = batch.run()?;
            for r in records.iter().filter(|r| r.error.is_some()) {
                eprintln!("warning: {} seed {}: {}", r.planner, r.seed, r.error.as_deref().unwrap_or(""));
            }
            let rows: Vec<_> = records.into_iter().map(|r| r.row).collect();
            print!("{}", format_summary(&summarize(&rows)));
            if let Some(o) = &batch.out {
                println!("wrote {}", o.display());
            }
            Ok(0)
        }
        Cmd::Primitive {
            subgroup,
            n,
            d,
            r,
            eps,
            out,
            library,
        } => {
            if subgroup.iter().any(|&k| k == 0 || k > n) {
                return Err(CliError::Validation(format!("subgroup robots must lie in 1..={n}")));
            }
            let sub: Vec<usize> = subgroup.iter().map(|k| k - 1).collect();
            let params = SwarmParams::new(n, r)?;
            let alloc = allocate_groups(n)?;
            let prim = compile_primitive(&sub, &alloc)?;
            let compiler = PrimitiveCompiler::new(&params, &alloc)?.with_eps(eps)?;
            let start = SwarmState::uniform(n, Vector2::zeros(), 0.0)?;
            let seq = prim.compile(&compiler, &start, d, None)?;
            let end = final_state(&start, &seq, &params)?;
            let stray = (0..n)
                .filter(|i| !sub.contains(i))
                .map(|i| end.position(i).norm())
                .fold(0.0, f64::max);
            eprintln!(
                "{}: order {}, {} steps, execution_time {:.4}, largest stray displacement {:.2e}",
                prim.label(),
                prim.order(),
                seq.len(),
                execution_time(&seq, &params),
                stray
            );
            match out {
                Some(path) => save_sequence(&path, &seq, &alloc)?,
                None => print!("{}", format_sequence(&seq, &alloc)),
            }
            if let Some(path) = library {
                save_library(&path, &build_library(&[sub], &alloc)?)?;
            }
            eprint!("final state:\n{}", state_to_yaml(&end));
            Ok(0)
        }
        Cmd::Verify { scenario, sequence } => Ok(report(&verify_files(&scenario, &sequence)?)),
        Cmd::Allocate { n } => {
            let a = allocate_groups(n)?;
            for (g, row) in a.rows().iter().enumerate() {
                let bits: String = row.iter().map(|&b| if b { '1' } else { '0' }).collect();
                println!("G{} {bits}", g + 1);
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
