use std::f64::consts::{PI, TAU};

use proptest::prelude::*;
use swarmgc_core::angle::circular_distance;
use swarmgc_core::dynamics::{final_state, simulate_with};
use swarmgc_core::primitives::{affected_robots, BracketExpr, PrimitiveCompiler};
use swarmgc_core::{
    allocate_groups, min_groups, ActivationSequence, ControlStep, SwarmParams, SwarmState, Vector2,
};

const POS_TOL: f64 = 1e-6;
const ANG_TOL: f64 = 1e-9;

fn state_strategy(n: usize) -> impl Strategy<Value = SwarmState> {
    (
        prop::collection::vec((-10.0..10.0f64, -10.0..10.0f64), n),
        prop::collection::vec(0.0..TAU, n),
    )
        .prop_map(|(p, h)| {
            SwarmState::new(p.into_iter().map(|(x, y)| Vector2::new(x, y)).collect(), h).unwrap()
        })
}

fn sequence_strategy(n: usize) -> impl Strategy<Value = ActivationSequence> {
    let m = min_groups(n).unwrap();
    prop::collection::vec((0..m, 0.0..3.0f64), 0..12).prop_map(move |steps| {
        let a = allocate_groups(n).unwrap();
        steps
            .into_iter()
            .map(|(g, arc)| ControlStep::group(&a, g, arc))
            .collect()
    })
}

fn same_pose(a: &SwarmState, b: &SwarmState) -> bool {
    a.max_position_error(b) < POS_TOL
        && (0..a.n()).all(|i| circular_distance(a.heading(i), b.heading(i)) < ANG_TOL)
}

fn compiler(n: usize, r: f64) -> PrimitiveCompiler {
    PrimitiveCompiler::new(&SwarmParams::new(n, r).unwrap(), &allocate_groups(n).unwrap()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn simulation_is_deterministic(s in state_strategy(6), seq in sequence_strategy(6)) {
        let p = SwarmParams::new(6, 1.0).unwrap();
        let a = simulate_with(&s, &seq, &p, Some(0.5)).unwrap();
        let b = simulate_with(&s, &seq, &p, Some(0.5)).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn rigid_motion_commutes(
        s in state_strategy(6),
        seq in sequence_strategy(6),
        phi in 0.0..TAU,
        dx in -5.0..5.0f64,
        dy in -5.0..5.0f64,
    ) {
        let p = SwarmParams::new(6, 1.3).unwrap();
        let offset = Vector2::new(dx, dy);
        let moved = simulate_with(&s.transformed(phi, offset), &seq, &p, Some(0.5)).unwrap();
        let plain = simulate_with(&s, &seq, &p, Some(0.5)).unwrap();
        prop_assert_eq!(moved.len(), plain.len());
        for (a, b) in moved.samples().iter().zip(plain.samples()) {
            prop_assert!(same_pose(a, &b.transformed(phi, offset)));
        }
    }

    #[test]
    fn composition_is_exact(
        s in state_strategy(6),
        a in sequence_strategy(6),
        b in sequence_strategy(6),
    ) {
        let p = SwarmParams::new(6, 1.0).unwrap();
        let whole = final_state(&s, &a.clone().then(&b), &p).unwrap();
        let split = final_state(&final_state(&s, &a, &p).unwrap(), &b, &p).unwrap();
        prop_assert_eq!(whole, split);
    }

    #[test]
    fn headings_stay_normalized(s in state_strategy(6), seq in sequence_strategy(6)) {
        let p = SwarmParams::new(6, 0.7).unwrap();
        let t = simulate_with(&s, &seq, &p, Some(0.5)).unwrap();
        for sample in t.samples() {
            prop_assert!(sample.headings().iter().all(|h| (0.0..TAU).contains(h)));
        }
    }

    #[test]
    fn rotation_undoes_itself(
        s in state_strategy(6),
        group in 0usize..3,
        theta in -TAU..TAU,
    ) {
        let c = compiler(6, 1.0);
        let p = c.params().clone();
        let there = c.bilateral_rotation(group, theta).unwrap();
        let back = c.bilateral_rotation(group, -theta).unwrap();
        let end = final_state(&s, &there.then(&back), &p).unwrap();
        prop_assert!(same_pose(&end, &s));
    }

    #[test]
    fn translation_undoes_itself(
        s in state_strategy(6),
        group in 0usize..3,
        d in 0.01..4.0f64,
    ) {
        let c = compiler(6, 1.0);
        let p = c.params().clone();
        let there = c.bilateral_translation(group, d).unwrap();
        let back = c.bilateral_translation(group, -d).unwrap();
        let end = final_state(&s, &there.then(&back), &p).unwrap();
        prop_assert!(same_pose(&end, &s));
    }

    #[test]
    fn rotation_members_stay_in_ball(
        s in state_strategy(6),
        group in 0usize..3,
        theta in 0.01..TAU,
        eps in 0.05..1.0f64,
    ) {
        let c = compiler(6, 1.0).with_eps(eps).unwrap();
        let p = c.params().clone();
        let seq = c.bilateral_rotation(group, theta).unwrap();
        let t = simulate_with(&s, &seq, &p, Some(eps / 4.0)).unwrap();
        for r in c.allocation().members(group) {
            for sample in t.samples() {
                prop_assert!((sample.position(r) - s.position(r)).norm() <= eps + 1e-9);
            }
        }
    }

    #[test]
    fn isolation_moves_one_robot(
        n in prop::sample::select(vec![3usize, 6, 14]),
        seed_state in state_strategy(14),
        k_frac in 0.0..1.0f64,
        heading in 0.0..TAU,
        d in 0.05..1.0f64,
    ) {
        let s = SwarmState::new(
            seed_state.positions()[..n].to_vec(),
            seed_state.headings()[..n].to_vec(),
        ).unwrap();
        let k = ((k_frac * n as f64) as usize).min(n - 1);
        let c = compiler(n, 1.0);
        let plan = c.isolate_translate(&s, k, d, heading).unwrap();
        let end = final_state(&s, &plan.seq, c.params()).unwrap();
        let expect = s.position(k) + Vector2::new(heading.cos(), heading.sin()) * plan.displacement;
        prop_assert!((end.position(k) - expect).norm() < POS_TOL);
        for j in (0..n).filter(|&j| j != k) {
            prop_assert!((end.position(j) - s.position(j)).norm() < POS_TOL);
        }
    }
}

#[test]
fn allocation_bound_is_tight() {
    for n in 1..=14usize {
        let m = min_groups(n).unwrap();
        // m - 1 pattern bits give 2^(m-1) - 2 usable patterns
        assert!((1usize << (m - 1)) - 2 >= n, "n={n}");
        assert!((1usize << (m - 2)) - 2 < n, "n={n} fits in fewer groups");
        let a = allocate_groups(n).unwrap();
        assert_eq!(a.groups(), m);
        let mut patterns: Vec<Vec<bool>> = (0..n)
            .map(|r| a.pattern(r)[..m - 1].to_vec())
            .collect();
        for p in &patterns {
            assert!(p.iter().any(|&b| b) && !p.iter().all(|&b| b));
        }
        patterns.sort();
        patterns.dedup();
        assert_eq!(patterns.len(), n);
        assert!(a.row(m - 1).iter().all(|&b| !b));
    }
}

#[test]
fn any_three_rows_are_independent() {
    for n in 3..=14usize {
        let c = compiler(n, 1.0);
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    let plan = c
                        .orientation_control(&[(i, 0.3), (j, PI), (k, 1.7)])
                        .unwrap_or_else(|e| panic!("n={n} ({i},{j},{k}): {e}"));
                    assert!(circular_distance(plan.rotations[i], 0.3) < ANG_TOL);
                    assert!(circular_distance(plan.rotations[j], PI) < ANG_TOL);
                    assert!(circular_distance(plan.rotations[k], 1.7) < ANG_TOL);
                }
            }
        }
    }
}

#[test]
fn first_order_affected_sets_sit_inside_the_group() {
    let a = allocate_groups(6).unwrap();
    for g in 1..=3 {
        for mask in 0..27u32 {
            let coeffs = [mask % 3, mask / 3 % 3, mask / 9];
            let terms: Vec<String> = coeffs
                .iter()
                .enumerate()
                .filter(|(_, &c)| c != 0)
                .map(|(i, &c)| format!("{}h{}", if c == 1 { "+" } else { "-" }, i + 1))
                .collect();
            if terms.is_empty() {
                continue;
            }
            let text = format!("[{},g{g}]", terms.concat().trim_start_matches('+'));
            let expr: BracketExpr = text.parse().unwrap();
            let hit = affected_robots(&expr, &a).unwrap();
            let members = a.members(g - 1);
            assert!(hit.iter().all(|r| members.contains(r)), "{text}: {hit:?}");
        }
    }
}
