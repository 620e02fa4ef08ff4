use alloc::vec::Vec;
use core::f64::consts::PI;
use nalgebra::{DMatrix, DVector};

use super::PrimitiveCompiler;
use crate::angle;
use crate::error::{invalid, Error, Result};
use crate::sequence::ActivationSequence;
use crate::state::SwarmState;

/// Output of orientation control.
#[derive(Debug, Clone, PartialEq)]
pub struct OrientationPlan {
    pub seq: ActivationSequence,
    /// Rotation angles fed to `h_1..h_{m-1}, f_m`, each in `[0, 2π)`.
    pub inputs: Vec<f64>,
    /// Net rotation of every robot, in `[0, 2π)`. Untargeted robots turn by
    /// whatever the solution implies.
    pub rotations: Vec<f64>,
}

/// Wraps into `(-π, π]`.
fn wrap_signed(theta: f64) -> f64 {
    let t = angle::normalize(theta);
    if t > PI {
        t - 2.0 * PI
    } else {
        t
    }
}

impl PrimitiveCompiler {
    /// Rows of the rotation system for `robots` that are linearly dependent on
    /// earlier rows.
    pub(crate) fn dependent_rows(&self, robots: &[usize]) -> Vec<usize> {
        let a = self.alloc.rotation_matrix();
        let mut basis: Vec<DVector<f64>> = Vec::new();
        let mut dependent = Vec::new();
        for &r in robots {
            let mut v = DVector::from_vec(a[r].clone());
            for b in &basis {
                let proj = v.dot(b);
                v -= b * proj;
            }
            let norm = v.norm();
            if norm < 1e-9 {
                dependent.push(r);
            } else {
                basis.push(v / norm);
            }
        }
        dependent
    }

    /// Applies the requested relative rotations `(robot, delta)` to the
    /// targeted robots without moving anyone.
    ///
    /// The rotation of robot `j` is `A[j] · u` where `A[j][i] = 1` when `h_i`
    /// turns robot `j` (and always 1 for `f_m`). The targeted rows are solved
    /// for the minimum-norm `u`, each input is shifted into `[0, 2π)` (which
    /// changes every rotation by a whole number of turns), and the result is
    /// emitted as `h_1(u_1) … h_{m-1}(u_{m-1}) f_m(u_m)`.
    pub fn orientation_control(&self, targets: &[(usize, f64)]) -> Result<OrientationPlan> {
        let n = self.alloc.robots();
        let m = self.alloc.groups();
        let robots: Vec<usize> = targets.iter().map(|t| t.0).collect();
        for (i, &r) in robots.iter().enumerate() {
            if r >= n {
                return Err(invalid(alloc::format!("robot index {} out of range", r + 1)));
            }
            if robots[..i].contains(&r) {
                return Err(invalid(alloc::format!("robot R{} targeted twice", r + 1)));
            }
        }
        if targets.len() > m {
            return Err(Error::RankDeficient { robots });
        }
        let dependent = self.dependent_rows(&robots);
        if !dependent.is_empty() {
            return Err(Error::RankDeficient { robots: dependent });
        }

        let full = self.alloc.rotation_matrix();
        let k = targets.len();
        let mut inputs = alloc::vec![0.0; m];
        if k > 0 && targets.iter().any(|t| angle::normalize(t.1) != 0.0) {
            let a = DMatrix::from_fn(k, m, |row, col| full[robots[row]][col]);
            let delta = DVector::from_iterator(k, targets.iter().map(|t| wrap_signed(t.1)));
            let gram = &a * a.transpose();
            let y = gram
                .cholesky()
                .ok_or_else(|| Error::RankDeficient { robots: robots.clone() })?
                .solve(&delta);
            let u = a.transpose() * y;
            for (slot, v) in inputs.iter_mut().zip(u.iter()) {
                *slot = angle::normalize(*v);
            }
        }

        let mut seq = ActivationSequence::new();
        for (group, &u) in inputs.iter().enumerate().take(m - 1) {
            seq.append(&self.bilateral_rotation(group, u)?);
        }
        seq.append(&self.rotate_all(inputs[m - 1]));
        let rotations = full
            .iter()
            .map(|row| angle::normalize(row.iter().zip(&inputs).map(|(a, u)| a * u).sum()))
            .collect();
        Ok(OrientationPlan {
            seq,
            inputs,
            rotations,
        })
    }

    /// Turns each listed robot to an absolute heading, given the current state.
    pub fn orient_absolute(
        &self,
        state: &SwarmState,
        targets: &[(usize, f64)],
    ) -> Result<OrientationPlan> {
        let rel: Vec<(usize, f64)> = targets
            .iter()
            .map(|&(r, h)| (r, h - state.heading(r)))
            .collect();
        self.orientation_control(&rel)
    }

    /// Greedy prefix-preserving subset of `robots` whose rotation rows are
    /// independent (at most `m`). Used to aim as many robots as the rank
    /// allows.
    pub fn aimable(&self, robots: &[usize]) -> Vec<usize> {
        let mut chosen: Vec<usize> = Vec::new();
        for &r in robots {
            if chosen.len() == self.alloc.groups() {
                break;
            }
            chosen.push(r);
            if !self.dependent_rows(&chosen).is_empty() {
                chosen.pop();
            }
        }
        chosen
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::allocation::allocate_groups;
    use crate::dynamics::final_state;
    use crate::state::SwarmParams;
    use nalgebra::Vector2;

    fn compiler(n: usize) -> PrimitiveCompiler {
        let p = SwarmParams::new(n, 1.0).unwrap();
        PrimitiveCompiler::new(&p, &allocate_groups(n).unwrap()).unwrap()
    }

    #[test]
    fn zero_deltas_give_empty_sequence() {
        let c = compiler(6);
        let plan = c.orientation_control(&[(0, 0.0), (2, 0.0), (4, 0.0)]).unwrap();
        assert!(plan.seq.is_empty());
        assert!(plan.inputs.iter().all(|&u| u == 0.0));
    }

    #[test]
    fn three_targets_solved_exactly() {
        let c = compiler(6);
        let s = SwarmState::new(
            (0..6).map(|i| Vector2::new(i as f64, -(i as f64))).collect(),
            (0..6).map(|i| 0.3 * i as f64).collect(),
        )
        .unwrap();
        let plan = c.orientation_control(&[(2, PI), (4, PI), (0, 0.0)]).unwrap();
        let end = final_state(&s, &plan.seq, c.params()).unwrap();
        assert!(end.max_position_error(&s) < 1e-9);
        assert!(angle::circular_distance(end.heading(2), s.heading(2) + PI) < 1e-9);
        assert!(angle::circular_distance(end.heading(4), s.heading(4) + PI) < 1e-9);
        assert!(angle::circular_distance(end.heading(0), s.heading(0)) < 1e-9);
        for j in 0..6 {
            assert!(
                angle::circular_distance(end.heading(j), s.heading(j) + plan.rotations[j]) < 1e-9
            );
        }
    }

    #[test]
    fn rot_for_subgroup_four_five() {
        // Keep robots 4 and 5, flip robot 6: least-norm inputs are h2(π), f4(π).
        let c = compiler(6);
        let plan = c.orientation_control(&[(3, 0.0), (4, 0.0), (5, PI)]).unwrap();
        let expect = [0.0, PI, 0.0, PI];
        for (u, e) in plan.inputs.iter().zip(expect) {
            assert!(angle::circular_distance(*u, e) < 1e-9, "{:?}", plan.inputs);
        }
    }

    #[test]
    fn too_many_targets() {
        let c = compiler(6);
        let t: Vec<(usize, f64)> = (0..5).map(|i| (i, 0.1)).collect();
        assert!(matches!(c.orientation_control(&t), Err(Error::RankDeficient { .. })));
    }

    #[test]
    fn dependent_fourth_row_is_named() {
        // rows: R1 [1,1,0,1], R2 [1,0,1,1], R5 [0,1,0,1], R6 [0,0,1,1];
        // R1 + R6 = R2 + R5
        let c = compiler(6);
        let err = c
            .orientation_control(&[(0, 0.1), (1, 0.2), (4, 0.3), (5, 0.4)])
            .unwrap_err();
        assert_eq!(err, Error::RankDeficient { robots: alloc::vec![5] });
    }

    #[test]
    fn duplicate_target_rejected() {
        let c = compiler(6);
        assert!(matches!(
            c.orientation_control(&[(1, 0.1), (1, 0.2)]),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn aimable_skips_dependent_rows() {
        let c = compiler(6);
        assert_eq!(c.aimable(&[0, 1, 4, 5, 2]), alloc::vec![0, 1, 4, 2]);
    }
}
