use std::fs;
use std::path::Path;

use swarmgc::batch::{read_runs_csv, read_summary_csv, RUNS_CSV, SUMMARY_CSV};
use swarmgc::load_batch;

const SCENARIO: &str = "\
robots: 3
turning_radius: 1.0
starts:
  positions: [[2.0, 2.0], [2.0, 5.0], [2.0, 8.0]]
  orientations: [0.0, 0.0, 0.0]
goals: [[6.0, 2.0], [6.0, 5.0], [6.0, 8.0]]
environment:
  bounds: {min: [0.0, 0.0], max: [10.0, 10.0]}
goal_radius: 1.0
planner:
  max_nodes: 3000
";

fn spec(dir: &Path, wall_clock: bool) -> std::path::PathBuf {
    fs::write(dir.join("s.scn"), SCENARIO).unwrap();
    let p = dir.join("b.bench");
    fs::write(
        &p,
        format!("scenario: s.scn\nplanners: [rrt-rot, pure-control]\nseeds: [1, 2, 3]\nwall_clock: {wall_clock}\nplots: false\n"),
    )
    .unwrap();
    p
}

#[test]
fn rows_and_aggregates_match_the_grid() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let records = load_batch(&spec(dir.path(), true), Some(&out)).unwrap().run().unwrap();
    assert_eq!(records.len(), 6);

    let rows = read_runs_csv(&out.join(RUNS_CSV)).unwrap();
    let order: Vec<(String, u64)> = rows.iter().map(|r| (r.planner.clone(), r.seed)).collect();
    let expected: Vec<(String, u64)> = ["rrt-rot", "pure-control"]
        .iter()
        .flat_map(|p| [1, 2, 3].map(|s| (p.to_string(), s)))
        .collect();
    assert_eq!(order, expected);

    let summary = read_summary_csv(&out.join(SUMMARY_CSV)).unwrap();
    assert_eq!(summary.len(), 2);
    for s in &summary {
        let mine: Vec<_> = rows.iter().filter(|r| r.planner == s.planner).collect();
        assert_eq!(s.runs, 3);
        assert_eq!(s.solved + s.timeout + s.infeasible, 3);
        let nodes = mine.iter().map(|r| r.rrt_nodes as f64).sum::<f64>() / 3.0;
        assert!((s.mean_rrt_nodes - nodes).abs() < 1e-9);
        let solved: Vec<_> = mine.iter().filter(|r| r.status == "solved").collect();
        if !solved.is_empty() {
            let path = solved.iter().map(|r| r.path_length).sum::<f64>() / solved.len() as f64;
            assert!((s.mean_path_length.unwrap() - path).abs() < 1e-9 * path.max(1.0));
        }
        assert!(out.join("runs").join(&s.planner).join("seed-1").join("sequence.txt").exists());
    }
}

#[test]
fn without_wall_clock_reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let spec = spec(dir.path(), false);
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    let mut batch = load_batch(&spec, Some(&a)).unwrap();
    batch.jobs = Some(1);
    batch.run().unwrap();
    let mut batch = load_batch(&spec, Some(&b)).unwrap();
    batch.jobs = Some(3);
    batch.run().unwrap();
    for f in [RUNS_CSV, SUMMARY_CSV] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
}

#[test]
fn unknown_planner_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("s.scn"), SCENARIO).unwrap();
    let p = dir.path().join("b.bench");
    fs::write(&p, "scenario: s.scn\nplanners: [astar]\nseeds: [0]\n").unwrap();
    let err = load_batch(&p, None).unwrap_err();
    assert_eq!(err.exit_code(), 4);
}
