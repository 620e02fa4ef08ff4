use core::f64::consts::PI;

use super::PrimitiveCompiler;
use crate::angle;
use crate::error::Result;
use crate::sequence::ActivationSequence;

impl PrimitiveCompiler {
    /// `f_m(theta)`: every robot turns by `theta` in place.
    pub fn rotate_all(&self, theta: f64) -> ActivationSequence {
        let theta = angle::normalize(theta);
        self.raw_field(self.alloc.rotate_group(), theta * self.radius())
    }

    /// `h_i(theta)`: robots outside `G_i` turn by `theta`, members of `G_i`
    /// come back to their exact pose.
    ///
    /// Built from repeated `(f_i(d), f_m(π), f_i(d), f_m(π))`, each turning
    /// non-members by `2d / r`. `d` never exceeds the excursion bound, so
    /// members stay within `eps` of their start. Negative angles wrap to
    /// `2π - |theta|`.
    pub fn bilateral_rotation(&self, group: usize, theta: f64) -> Result<ActivationSequence> {
        self.check_translate_group(group)?;
        let theta = angle::normalize(theta);
        let mut seq = ActivationSequence::new();
        if theta == 0.0 {
            return Ok(seq);
        }
        let r = self.radius();
        let half_arc = theta * r / 2.0;
        let (full, rest) = if self.eps.is_finite() {
            let full = libm::floor(half_arc / self.eps);
            (full as usize, half_arc - full * self.eps)
        } else {
            (0, half_arc)
        };
        let flip = self.raw(self.alloc.rotate_group(), PI * r);
        let mut apply = |d: f64| {
            seq.push(self.raw(group, d));
            seq.push(flip.clone());
            seq.push(self.raw(group, d));
            seq.push(flip.clone());
        };
        for _ in 0..full {
            apply(self.eps);
        }
        if rest > 1e-12 * half_arc {
            apply(rest);
        }
        Ok(seq)
    }

    /// `g_i(d)`: members of `G_i` translate `d` along their headings, every
    /// other robot ends where it started.
    ///
    /// Forward motion is `(f_i(d), h_i(-d/r))`. Backward motion flips the
    /// whole swarm around it: `(f_m(π), g_i(|d|), f_m(π))`.
    pub fn bilateral_translation(&self, group: usize, d: f64) -> Result<ActivationSequence> {
        self.check_translate_group(group)?;
        let mut seq = ActivationSequence::new();
        if d == 0.0 {
            return Ok(seq);
        }
        if d > 0.0 {
            seq.push(self.raw(group, d));
            seq.append(&self.bilateral_rotation(group, -d / self.radius())?);
        } else {
            let flip = self.rotate_all(PI);
            seq.append(&flip);
            seq.append(&self.bilateral_translation(group, -d)?);
            seq.append(&flip);
        }
        Ok(seq)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::allocation::allocate_groups;
    use crate::dynamics::{execution_time, final_state, simulate};
    use crate::state::{SwarmParams, SwarmState};
    use crate::Error;
    use alloc::vec::Vec;
    use nalgebra::Vector2;

    fn setup(r: f64) -> (PrimitiveCompiler, SwarmState) {
        let p = SwarmParams::new(6, r).unwrap();
        let a = allocate_groups(6).unwrap();
        let s = SwarmState::new(
            (0..6).map(|i| Vector2::new(i as f64, 2.0 * i as f64)).collect(),
            (0..6).map(|i| 0.9 * i as f64 + 0.1).collect(),
        )
        .unwrap();
        (PrimitiveCompiler::new(&p, &a).unwrap(), s)
    }

    #[test]
    fn rotate_all_cases() {
        let (c, s) = setup(1.0);
        assert!(c.rotate_all(0.0).is_empty());
        assert!(c.rotate_all(2.0 * PI).is_empty());
        let half = c.rotate_all(PI);
        assert_eq!(half.len(), 1);
        assert!((half.steps()[0].arc - PI).abs() < 1e-15);
        let end = final_state(&s, &half, c.params()).unwrap();
        assert_eq!(end.positions(), s.positions());
        for i in 0..6 {
            assert!(angle::circular_distance(end.heading(i), s.heading(i) + PI) < 1e-12);
        }
    }

    #[test]
    fn h1_rotates_non_members_only() {
        let (c, s) = setup(1.0);
        let phi = 1.3;
        let end = final_state(&s, &c.bilateral_rotation(0, phi).unwrap(), c.params()).unwrap();
        for i in 0..3 {
            assert_eq!(end.position(i), s.position(i));
            assert!(angle::circular_distance(end.heading(i), s.heading(i) + phi) < 1e-9);
        }
        for i in 3..6 {
            assert!((end.position(i) - s.position(i)).norm() < 1e-9);
            assert!(angle::circular_distance(end.heading(i), s.heading(i)) < 1e-9);
        }
    }

    #[test]
    fn single_application_when_eps_is_large() {
        let (c, s) = setup(1.0);
        let c = c.with_eps(10.0).unwrap();
        let seq = c.bilateral_rotation(0, 0.4).unwrap();
        assert_eq!(seq.len(), 4);
        assert!((seq.steps()[0].arc - 0.2).abs() < 1e-15);
        // brute-force replay, one step at a time
        let mut cur = s.clone();
        for st in seq.steps() {
            cur = crate::dynamics::step(&cur, st, c.params()).unwrap();
        }
        for i in 0..3 {
            assert!(angle::circular_distance(cur.heading(i), s.heading(i) + 0.4) < 1e-9);
        }
        for i in 3..6 {
            assert!((cur.position(i) - s.position(i)).norm() < 1e-9);
            assert!(angle::circular_distance(cur.heading(i), s.heading(i)) < 1e-9);
        }
    }

    #[test]
    fn zero_angle_and_bad_group() {
        let (c, _) = setup(1.0);
        assert!(c.bilateral_rotation(1, 0.0).unwrap().is_empty());
        assert!(matches!(c.bilateral_rotation(3, 1.0), Err(Error::InvalidArgument(_))));
        assert!(matches!(c.bilateral_translation(3, 1.0), Err(Error::InvalidArgument(_))));
        assert!(c.bilateral_translation(2, 0.0).unwrap().is_empty());
    }

    #[test]
    fn excursion_stays_in_eps_ball() {
        let (c, s) = setup(0.7);
        let c = c.with_eps(0.3).unwrap();
        let seq = c.bilateral_rotation(1, 5.0).unwrap();
        let traj = simulate(&s, &seq, c.params()).unwrap();
        for m in c.allocation().members(1) {
            for smp in traj.samples() {
                assert!((smp.position(m) - s.position(m)).norm() <= 0.3 + 1e-12);
            }
        }
    }

    #[test]
    fn execution_time_of_single_h() {
        let (c, _) = setup(1.5);
        let c = c.with_eps(100.0).unwrap();
        let theta = 1.0;
        let d = theta * 1.5 / 2.0;
        let seq = c.bilateral_rotation(2, theta).unwrap();
        let expected = 2.0 * d + 2.0 * PI * 1.5;
        assert!((execution_time(&seq, c.params()) - expected).abs() < 1e-12);
    }

    #[test]
    fn g1_moves_group_one() {
        let (c, s) = setup(1.0);
        let d = 0.8;
        let end = final_state(&s, &c.bilateral_translation(0, d).unwrap(), c.params()).unwrap();
        for i in 0..6 {
            let expect = if i >= 3 {
                s.position(i) + angle::unit(s.heading(i)) * d
            } else {
                s.position(i)
            };
            assert!((end.position(i) - expect).norm() < 1e-9, "robot {i}");
            assert!(angle::circular_distance(end.heading(i), s.heading(i)) < 1e-9);
        }
    }

    #[test]
    fn g3_backward() {
        let (c, s) = setup(1.0);
        let end = final_state(&s, &c.bilateral_translation(2, -1.0).unwrap(), c.params()).unwrap();
        let members: Vec<usize> = c.allocation().members(2);
        assert_eq!(members, alloc::vec![0, 2, 4]);
        for i in 0..6 {
            let expect = if members.contains(&i) {
                s.position(i) - angle::unit(s.heading(i))
            } else {
                s.position(i)
            };
            assert!((end.position(i) - expect).norm() < 1e-9, "robot {i}");
            assert!(angle::circular_distance(end.heading(i), s.heading(i)) < 1e-9);
        }
    }

    #[test]
    fn remark_formula_leaves_members_flipped() {
        // (f_m(π), g_i(d), h_i(π)) is the printed backward composite; members
        // end up reversed, which is why the compiler closes with f_m(π) instead.
        let (c, s) = setup(1.0);
        let mut seq = c.rotate_all(PI);
        seq.append(&c.bilateral_translation(0, 1.0).unwrap());
        seq.append(&c.bilateral_rotation(0, PI).unwrap());
        let end = final_state(&s, &seq, c.params()).unwrap();
        assert!(angle::circular_distance(end.heading(3), s.heading(3) + PI) < 1e-9);
    }
}
