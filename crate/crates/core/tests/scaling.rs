//! Original-mode RRT effort grows faster than linearly with swarm size on an
//! open corridor. From n = 3 on most runs exhaust the node budget, so the
//! larger medians are censored and only lower bounds.

use swarmgc_core::planners::{plan, Environment, NoClock, PlannerConfig, PlannerKind, Rect, Scenario, Status};
use swarmgc_core::{allocate_groups, SwarmParams, SwarmState, Vector2};

const SEEDS: u64 = 7;
const BUDGET: usize = 3000;

fn corridor(n: usize, seed: u64) -> Scenario {
    let column = |x: f64| -> Vec<Vector2<f64>> { (0..n).map(|i| Vector2::new(x, 1.5 + 3.0 * i as f64)).collect() };
    let env = Environment::new(
        Rect::new(Vector2::new(-5.0, -5.0), Vector2::new(15.0, 3.0 * n as f64 + 5.0)).unwrap(),
        vec![],
    )
    .unwrap();
    Scenario {
        params: SwarmParams::new(n, 1.0).unwrap(),
        alloc: allocate_groups(n).unwrap(),
        starts: SwarmState::new(column(0.0), vec![0.0; n]).unwrap(),
        goals: column(4.0),
        env,
        goal_radius: 2.0,
        seed,
        config: PlannerConfig {
            max_nodes: BUDGET,
            ..PlannerConfig::default()
        },
    }
}

fn median_nodes(n: usize) -> f64 {
    let mut nodes: Vec<f64> = (0..SEEDS)
        .map(|s| {
            let r = plan(&corridor(n, s), PlannerKind::Rrt, &NoClock).unwrap();
            assert_ne!(r.status, Status::Infeasible);
            r.metrics.rrt_nodes as f64
        })
        .collect();
    nodes.sort_by(f64::total_cmp);
    nodes[nodes.len() / 2]
}

#[test]
fn node_count_grows_superlinearly() {
    let m: Vec<f64> = [2, 4, 6].map(median_nodes).to_vec();
    eprintln!("median nodes for n = 2, 4, 6: {m:?}");
    assert!(m[0] < BUDGET as f64, "n = 2 should solve: {m:?}");
    // doubling the swarm more than doubles the effort
    assert!(m[1] > 2.0 * m[0], "{m:?}");
    assert!(m[2] >= m[1], "{m:?}");
}
