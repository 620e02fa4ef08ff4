use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{PI, TAU};

use crate::angle;
use crate::error::{invalid, Error, Result};
use crate::sequence::{ActivationSequence, ControlStep};
use crate::state::SwarmParams;

// Pivot candidates per round: the minimal arc plus this many extra turns, minus one.
const EXTRA_TURNS: usize = 4;

/// Moves only robot `k` using two fields: everybody translates, or
/// everybody pivots. Requires pairwise-distinct turning radii.
///
/// `P_0 = (T(d))`. For every other robot `j` in ascending order,
/// `P = (P, R(a_j), P)` with the pivot arc `a_j` chosen so robot `j` turns by
/// `π` minus what it turned during `P`; the second copy then retraces its
/// first. Robot `k` keeps a net displacement; among pivots that differ by
/// whole turns of robot `j` the one that preserves most of it is used.
pub fn distinct_radius_isolate(params: &SwarmParams, k: usize, d: f64) -> Result<ActivationSequence> {
    let n = params.n();
    if k >= n {
        return Err(invalid(alloc::format!("robot index {} out of range", k + 1)));
    }
    if !(d > 0.0 && d.is_finite()) {
        return Err(invalid("translation length must be positive"));
    }
    let radii: Vec<f64> = (0..n).map(|i| params.turning_radius(i)).collect();
    if n > 1 {
        if params.radius_overrides().is_none() {
            return Err(invalid("distinct-radius isolation needs per-robot radius overrides"));
        }
        for i in 0..n {
            for j in i + 1..n {
                if radii[i] == radii[j] {
                    return Err(Error::DuplicateRadius {
                        first: i,
                        second: j,
                        radius: radii[i],
                    });
                }
            }
        }
    }

    let translate = ControlStep::new(vec![true; n], d);
    let mut seq = ActivationSequence::new();
    seq.push(translate);
    for j in (0..n).filter(|&j| j != k) {
        let turned = seq.net_rotation(j, params);
        let base = angle::normalize(PI - turned) * radii[j];
        // Any extra whole turns of robot j cancel it just as well. Robot k's
        // displacement is scaled by 2|cos(ψ/2)|, ψ its turn between the two
        // copies, so pick the candidate that keeps that factor largest.
        let k_turned = seq.net_rotation(k, params);
        let arc = (0..EXTRA_TURNS)
            .map(|t| base + TAU * t as f64 * radii[j])
            .map(|a| (a, libm::fabs(libm::cos((k_turned + a / radii[k]) / 2.0))))
            .fold((base, -1.0), |best, c| if c.1 > best.1 + 1e-12 { c } else { best })
            .0;
        let mut next = seq.clone();
        next.push(ControlStep::new(vec![false; n], arc));
        next.append(&seq);
        seq = next;
    }
    Ok(seq)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::final_state;
    use crate::state::SwarmState;
    use nalgebra::Vector2;

    #[test]
    fn two_robots_first_returns() {
        let p = SwarmParams::new(2, 1.0)
            .unwrap()
            .with_radius_overrides(vec![1.0, 2.0])
            .unwrap();
        let seq = distinct_radius_isolate(&p, 1, 1.0).unwrap();
        assert_eq!(seq.len(), 3);
        assert!((seq.steps()[1].arc - PI).abs() < 1e-15);
        let s = SwarmState::uniform(2, Vector2::zeros(), 0.0).unwrap();
        let end = final_state(&s, &seq, &p).unwrap();
        assert!(end.position(0).norm() < 1e-12);
        // robot 2 turned π/2 in between: (1, 0) + (0, 1)
        assert!((end.position(1) - Vector2::new(1.0, 1.0)).norm() < 1e-12);
    }

    #[test]
    fn single_robot_is_one_step() {
        let p = SwarmParams::new(1, 1.0).unwrap();
        let seq = distinct_radius_isolate(&p, 0, 2.0).unwrap();
        assert_eq!(seq.len(), 1);
    }

    #[test]
    fn duplicate_radii_named() {
        let p = SwarmParams::new(3, 1.0)
            .unwrap()
            .with_radius_overrides(vec![1.0, 2.0, 1.0])
            .unwrap();
        let err = distinct_radius_isolate(&p, 1, 1.0).unwrap_err();
        assert!(matches!(err, Error::DuplicateRadius { first: 0, second: 2, .. }));
    }

    #[test]
    fn three_robots_only_last_moves() {
        let p = SwarmParams::new(3, 1.0)
            .unwrap()
            .with_radius_overrides(vec![0.8, 1.3, 2.1])
            .unwrap();
        let s = SwarmState::new(
            vec![Vector2::new(1.0, 0.0), Vector2::new(0.0, 4.0), Vector2::new(-2.0, 1.0)],
            vec![0.3, 2.0, 4.0],
        )
        .unwrap();
        let seq = distinct_radius_isolate(&p, 2, 0.5).unwrap();
        let end = final_state(&s, &seq, &p).unwrap();
        assert!((end.position(0) - s.position(0)).norm() < 1e-6);
        assert!((end.position(1) - s.position(1)).norm() < 1e-6);
        assert!((end.position(2) - s.position(2)).norm() > 1e-3);
    }
}
