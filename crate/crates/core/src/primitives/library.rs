//! Subgroup primitives: the lowest-order construction that net-moves exactly
//! a requested set of robots.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;

use super::bracket::{affected_robots, BracketExpr, Combo, FieldKind, FieldRef};
use super::PrimitiveCompiler;
use crate::allocation::GroupAllocation;
use crate::error::{invalid, Error, Result};
use crate::sequence::ActivationSequence;
use crate::state::SwarmState;

/// How a primitive is executed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Realization {
    /// All members of the group translate: `f_i(d)`.
    Field { group: usize },
    /// `(f_i(d/2), (f_m - H)(π), f_i(d/2))`. The middle rotation reverses
    /// exactly the group members outside the subgroup, so they retrace their
    /// first leg while the subgroup keeps going.
    Bracket { group: usize, rotation: Combo },
    /// Single-robot isolation by recursive elimination.
    Isolation { group: usize, robot: usize },
}

/// A subgroup together with the construction that moves it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Primitive {
    subgroup: Vec<usize>,
    order: usize,
    realization: Realization,
}

/// Smallest translate group containing `robot`, ties to the lowest index.
pub(crate) fn smallest_group_of(alloc: &GroupAllocation, robot: usize) -> usize {
    (0..alloc.rotate_group())
        .filter(|&g| alloc.contains(g, robot))
        .min_by_key(|&g| (alloc.members(g).len(), g))
        .expect("every robot belongs to some translate group")
}

fn normalize_subgroup(subgroup: &[usize], n: usize) -> Result<Vec<usize>> {
    let set: BTreeSet<usize> = subgroup.iter().copied().collect();
    if set.is_empty() {
        return Err(invalid("subgroup is empty"));
    }
    if let Some(&bad) = set.iter().find(|&&r| r >= n) {
        return Err(invalid(alloc::format!("robot index {} out of range", bad + 1)));
    }
    Ok(set.into_iter().collect())
}

/// Checks that `combo` rotates subgroup members by an even multiple and the
/// other members of `group` by exactly one unit, i.e. that it realizes the
/// subgroup through the parity rotation.
fn separates(combo: &Combo, group: usize, subgroup: &[usize], alloc: &GroupAllocation) -> bool {
    alloc.members(group).iter().all(|&r| {
        let c = combo.rotation_coefficient(alloc, r);
        if subgroup.contains(&r) {
            c == 1
        } else {
            c == 0
        }
    })
}

/// Rotation generators `h_1..h_{m-1}, f_m`.
fn rotation_generators(alloc: &GroupAllocation) -> Vec<FieldRef> {
    let mut g: Vec<FieldRef> = (0..alloc.rotate_group()).map(FieldRef::h).collect();
    g.push(FieldRef::f(alloc.rotate_group()));
    g
}

/// All rotation combinations with coefficients in {-1, 0, 1} and exactly
/// `terms` nonzero entries, in a fixed order.
fn combos_with_terms(gens: &[FieldRef], terms: usize) -> Vec<Combo> {
    let k = gens.len();
    let mut out = Vec::new();
    let total = 3usize.pow(k as u32);
    for code in 0..total {
        let mut c = code;
        let mut coeffs = Vec::with_capacity(k);
        for _ in 0..k {
            coeffs.push([0i64, 1, -1][c % 3]);
            c /= 3;
        }
        if coeffs.iter().filter(|&&x| x != 0).count() == terms {
            out.push(Combo::new(coeffs.into_iter().zip(gens.iter().copied())));
        }
    }
    out
}

/// Searches constructions of increasing order for one that moves exactly
/// `subgroup`:
///
/// 1. a raw group `g_i`;
/// 2. a first-order bracket `[h_j, g_i]` (or with `f_m`);
/// 3. a bracket `[H, g_i]` with `H` a {-1, 0, 1} combination of rotation
///    fields, fewest terms first, or single-robot isolation.
///
/// Ties go to the lowest group index.
pub fn compile_primitive(subgroup: &[usize], alloc: &GroupAllocation) -> Result<Primitive> {
    let subgroup = normalize_subgroup(subgroup, alloc.robots())?;
    let groups = alloc.rotate_group();

    for g in 0..groups {
        if alloc.members(g) == subgroup {
            return Ok(Primitive {
                subgroup,
                order: 1,
                realization: Realization::Field { group: g },
            });
        }
    }

    let gens = rotation_generators(alloc);
    for terms in 1..=gens.len() {
        let combos = combos_with_terms(&gens, terms);
        for g in 0..groups {
            if !subgroup.iter().all(|&r| alloc.contains(g, r)) {
                continue;
            }
            for combo in &combos {
                if separates(combo, g, &subgroup, alloc) {
                    let expr = BracketExpr::bracket(
                        BracketExpr::Leaf(combo.clone()),
                        BracketExpr::leaf(FieldRef::g(g)),
                    );
                    return Ok(Primitive {
                        subgroup,
                        order: expr.order(),
                        realization: Realization::Bracket {
                            group: g,
                            rotation: combo.clone(),
                        },
                    });
                }
            }
        }
    }

    if let [robot] = subgroup[..] {
        return Ok(Primitive {
            subgroup,
            order: 3,
            realization: Realization::Isolation {
                group: smallest_group_of(alloc, robot),
                robot,
            },
        });
    }

    Err(Error::NoPrimitive {
        supersets: nearest_supersets(&subgroup, alloc, &gens),
        subgroup,
    })
}

/// Minimal realizable sets that strictly contain `subgroup`.
fn nearest_supersets(subgroup: &[usize], alloc: &GroupAllocation, gens: &[FieldRef]) -> Vec<Vec<usize>> {
    let mut candidates: BTreeSet<Vec<usize>> = BTreeSet::new();
    for g in 0..alloc.rotate_group() {
        candidates.insert(alloc.members(g));
        for terms in 1..=gens.len() {
            for combo in combos_with_terms(gens, terms) {
                let expr = BracketExpr::bracket(
                    BracketExpr::Leaf(combo),
                    BracketExpr::leaf(FieldRef::g(g)),
                );
                if let Ok(set) = affected_robots(&expr, alloc) {
                    candidates.insert(set);
                }
            }
        }
    }
    let sup: Vec<Vec<usize>> = candidates
        .into_iter()
        .filter(|c| c.len() > subgroup.len() && subgroup.iter().all(|r| c.contains(r)))
        .collect();
    sup.iter()
        .filter(|c| {
            !sup.iter()
                .any(|o| o.len() < c.len() && o.iter().all(|r| c.contains(r)))
        })
        .cloned()
        .collect()
}

impl Primitive {
    pub fn subgroup(&self) -> &[usize] {
        &self.subgroup
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn realization(&self) -> &Realization {
        &self.realization
    }

    /// Bracket expression, when the primitive is a bracket or raw field.
    pub fn expr(&self) -> Option<BracketExpr> {
        match &self.realization {
            Realization::Field { group } => Some(BracketExpr::leaf(FieldRef::g(*group))),
            Realization::Bracket { group, rotation } => Some(BracketExpr::bracket(
                BracketExpr::Leaf(rotation.clone()),
                BracketExpr::leaf(FieldRef::g(*group)),
            )),
            Realization::Isolation { .. } => None,
        }
    }

    /// Text label: the bracket expression, or `iso(k)` for isolation.
    pub fn label(&self) -> String {
        match (&self.realization, self.expr()) {
            (_, Some(e)) => e.to_text(),
            (Realization::Isolation { robot, .. }, None) => alloc::format!("iso({})", robot + 1),
            _ => unreachable!(),
        }
    }

    /// Rebuilds a primitive from a library entry and checks that it really
    /// moves `subgroup` under `alloc`.
    pub fn from_label(subgroup: &[usize], label: &str, alloc: &GroupAllocation) -> Result<Self> {
        let subgroup = normalize_subgroup(subgroup, alloc.robots())?;
        let label = label.trim();
        if let Some(inner) = label.strip_prefix("iso(").and_then(|s| s.strip_suffix(')')) {
            let robot: usize = inner
                .trim()
                .parse()
                .map_err(|_| invalid(alloc::format!("bad isolation label '{label}'")))?;
            if robot == 0 || subgroup != [robot - 1] {
                return Err(invalid(alloc::format!(
                    "'{label}' does not match the subgroup"
                )));
            }
            return Ok(Primitive {
                order: 3,
                realization: Realization::Isolation {
                    group: smallest_group_of(alloc, robot - 1),
                    robot: robot - 1,
                },
                subgroup,
            });
        }
        let expr: BracketExpr = label.parse()?;
        if affected_robots(&expr, alloc)? != subgroup {
            return Err(invalid(alloc::format!(
                "'{label}' does not move exactly the listed subgroup"
            )));
        }
        let order = expr.order();
        let realization = match &expr {
            BracketExpr::Leaf(c) => match c.terms() {
                [(1, f)] if f.kind == FieldKind::G => Realization::Field { group: f.group },
                _ => return Err(invalid(alloc::format!("'{label}' is not a translation field"))),
            },
            BracketExpr::Bracket(a, b) => {
                let (rot, g) = match (a.as_ref(), b.as_ref()) {
                    (BracketExpr::Leaf(r), BracketExpr::Leaf(g)) => (r, g),
                    _ => return Err(invalid("only single-level brackets are executable")),
                };
                let group = match g.terms() {
                    [(1, f)] if f.kind == FieldKind::G => f.group,
                    _ => return Err(invalid("bracket must pair a rotation with some g_i")),
                };
                if !separates(rot, group, &subgroup, alloc) {
                    return Err(invalid(alloc::format!(
                        "'{label}' needs coefficients 1 on the subgroup and 0 on other members"
                    )));
                }
                Realization::Bracket {
                    group,
                    rotation: rot.clone(),
                }
            }
        };
        Ok(Primitive {
            subgroup,
            order,
            realization,
        })
    }

    /// Number of `g`/`f` legs executed per call; used for cost estimates.
    pub fn rounds(&self, alloc: &GroupAllocation) -> usize {
        match &self.realization {
            Realization::Isolation { group, .. } => (alloc.members(*group).len() - 1).div_ceil(2),
            _ => 0,
        }
    }

    /// Emits the sequence that moves every subgroup member by `d` (negative
    /// means backward) and returns all other robots to their positions.
    ///
    /// `headings`, when given, lists one absolute target heading per subgroup
    /// member (in subgroup order). Members are turned first, as many as the
    /// rotation rank allows; the rest keep their current heading.
    pub fn compile(
        &self,
        compiler: &PrimitiveCompiler,
        state: &SwarmState,
        d: f64,
        headings: Option<&[f64]>,
    ) -> Result<ActivationSequence> {
        if let Some(h) = headings {
            if h.len() != self.subgroup.len() {
                return Err(invalid("one heading per subgroup member expected"));
            }
        }
        let mut seq = ActivationSequence::new();
        if d == 0.0 {
            return Ok(seq);
        }
        let alloc = compiler.allocation();
        match &self.realization {
            Realization::Isolation { robot, group } => {
                let heading = headings.map_or(state.heading(*robot), |h| h[0]);
                let heading = if d < 0.0 { heading + PI } else { heading };
                let rounds = (alloc.members(*group).len() - 1).div_ceil(2);
                let leg = d.abs() / (1u64 << rounds) as f64;
                return Ok(compiler.isolate_translate(state, *robot, leg, heading)?.seq);
            }
            Realization::Field { .. } | Realization::Bracket { .. } => {}
        }

        if let Some(h) = headings {
            let aim = compiler.aimable(&self.subgroup);
            let targets: Vec<(usize, f64)> = aim
                .iter()
                .map(|&r| {
                    let k = self.subgroup.iter().position(|&s| s == r).unwrap();
                    (r, h[k])
                })
                .collect();
            seq.append(&compiler.orient_absolute(state, &targets)?.seq);
        }

        let flip = compiler.rotate_all(PI);
        if d < 0.0 {
            seq.append(&flip);
        }
        match &self.realization {
            Realization::Field { group } => seq.append(&compiler.raw_field(*group, d.abs())),
            Realization::Bracket { group, rotation } => {
                let leg = compiler.raw_field(*group, d.abs() / 2.0);
                seq.append(&leg);
                seq.append(&parity_rotation(compiler, rotation)?);
                seq.append(&leg);
            }
            Realization::Isolation { .. } => unreachable!(),
        }
        if d < 0.0 {
            seq.append(&flip);
        }
        Ok(seq)
    }
}

/// `(f_m - H)(π)`: each generator turned by `π` times its coefficient, so a
/// robot ends up reversed exactly when its net coefficient is odd.
fn parity_rotation(compiler: &PrimitiveCompiler, rotation: &Combo) -> Result<ActivationSequence> {
    let alloc = compiler.allocation();
    let fm = FieldRef::f(alloc.rotate_group());
    let complement = Combo::new(
        rotation
            .terms()
            .iter()
            .map(|&(c, f)| (-c, f))
            .chain(core::iter::once((1, fm))),
    );
    let mut seq = ActivationSequence::new();
    for &(c, f) in complement.terms() {
        if c % 2 == 0 {
            continue;
        }
        match f.kind {
            FieldKind::H => seq.append(&compiler.bilateral_rotation(f.group, PI)?),
            FieldKind::F if f.group == alloc.rotate_group() => seq.append(&compiler.rotate_all(PI)),
            _ => return Err(invalid(alloc::format!("{f} is not a rotation field"))),
        }
    }
    Ok(seq)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::allocation::allocate_groups;

    fn label_of(sub: &[usize]) -> (String, usize) {
        let a = allocate_groups(6).unwrap();
        let zero: Vec<usize> = sub.iter().map(|r| r - 1).collect();
        let p = compile_primitive(&zero, &a).unwrap();
        (p.label(), p.order())
    }

    #[test]
    fn reference_bracket_primitives() {
        assert_eq!(label_of(&[4, 5, 6]), ("g1".into(), 1));
        assert_eq!(label_of(&[4, 5]), ("[h2,g1]".into(), 2));
        assert_eq!(label_of(&[2, 6]), ("[h3,g2]".into(), 2));
        assert_eq!(label_of(&[1, 3]), ("[h1,g3]".into(), 2));
        assert_eq!(label_of(&[1]), ("[h1+h2-f4,g3]".into(), 3));
        assert_eq!(label_of(&[2]), ("[h1+h3-f4,g2]".into(), 3));
        assert_eq!(label_of(&[3]), ("[f4-h3,g2]".into(), 3));
        assert_eq!(label_of(&[4]), ("[h2+h3-f4,g1]".into(), 3));
        assert_eq!(label_of(&[5]), ("[f4-h3,g1]".into(), 3));
        assert_eq!(label_of(&[6]), ("[f4-h2,g1]".into(), 3));
    }

    #[test]
    fn unrealizable_subgroup_lists_supersets() {
        let a = allocate_groups(6).unwrap();
        // robots 1 and 4 share no translate group
        let err = compile_primitive(&[0, 3], &a).unwrap_err();
        match err {
            Error::NoPrimitive { subgroup, supersets } => {
                assert_eq!(subgroup, alloc::vec![0, 3]);
                assert!(supersets.is_empty());
            }
            e => panic!("unexpected {e:?}"),
        }
        assert!(compile_primitive(&[], &a).is_err());
    }

    #[test]
    fn large_swarm_falls_back_to_isolation() {
        let a = allocate_groups(14).unwrap();
        let p = compile_primitive(&[0], &a).unwrap();
        assert!(matches!(p.realization(), Realization::Isolation { robot: 0, .. }));
        assert_eq!(p.label(), "iso(1)");
        let back = Primitive::from_label(&[0], "iso(1)", &a).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn labels_round_trip() {
        let a = allocate_groups(6).unwrap();
        for sub in [&[3usize, 4][..], &[1], &[3, 4, 5], &[0, 2]] {
            let p = compile_primitive(sub, &a).unwrap();
            assert_eq!(Primitive::from_label(sub, &p.label(), &a).unwrap(), p);
        }
        assert!(Primitive::from_label(&[3, 4], "[h3,g1]", &a).is_err());
    }

    fn check_moves_only(sub: &[usize], d: f64, headings: Option<&[f64]>) {
        use crate::dynamics::final_state;
        use crate::state::SwarmParams;
        use nalgebra::Vector2;
        let params = SwarmParams::new(6, 0.7).unwrap();
        let a = allocate_groups(6).unwrap();
        let c = PrimitiveCompiler::new(&params, &a).unwrap();
        let s = SwarmState::new(
            (0..6).map(|i| Vector2::new(i as f64 * 1.3, (i * i) as f64 * 0.4)).collect(),
            (0..6).map(|i| 0.9 * i as f64 + 0.2).collect(),
        )
        .unwrap();
        let p = compile_primitive(sub, &a).unwrap();
        let seq = p.compile(&c, &s, d, headings).unwrap();
        let end = final_state(&s, &seq, &params).unwrap();
        for r in 0..6 {
            let moved = (end.position(r) - s.position(r)).norm();
            if let Some(k) = sub.iter().position(|&x| x == r) {
                assert!((moved - d.abs()).abs() < 1e-9, "robot {r} moved {moved}");
                if let Some(h) = headings {
                    let dir = end.position(r) - s.position(r);
                    let want = crate::angle::unit(h[k]) * d;
                    if p.subgroup().len() <= 3 {
                        assert!((dir - want).norm() < 1e-9, "robot {r} direction");
                    }
                }
            } else {
                assert!(moved < 1e-9, "robot {r} moved {moved}");
            }
        }
    }

    #[test]
    fn compiled_primitives_move_only_the_subgroup() {
        for sub in [&[3usize, 4][..], &[1, 5], &[0, 2], &[3, 4, 5]] {
            check_moves_only(sub, 1.0, None);
            check_moves_only(sub, -0.6, None);
        }
        for r in 0..6 {
            check_moves_only(&[r], 1.0, None);
            check_moves_only(&[r], -0.5, Some(&[1.0]));
        }
        check_moves_only(&[3, 4], 0.8, Some(&[0.3, 2.0]));
        check_moves_only(&[0, 2], 0.8, Some(&[-1.0, 4.0]));
    }
}
