//! Line-oriented activation sequences and trajectory tables.
//!
//! One step per line: `<group> <arc>` with a one-based group number, or
//! `<bits> <arc>` with the full 0/1 activation (robot 1 first) when the step
//! is not a plain group. `#` starts a comment.

use std::io::Write;
use std::path::Path;

use swarmgc_core::{ActivationSequence, ControlStep, GroupAllocation, Trajectory};

use crate::error::{CliError, Result};
use crate::scenario::{bits, read, write};

fn is_bitstring(token: &str, n: usize) -> bool {
    token.len() == n && token.chars().all(|c| c == '0' || c == '1')
}

/// Formats `seq`; arcs use the shortest representation that parses back to
/// the same `f64`.
pub fn format_sequence(seq: &ActivationSequence, alloc: &GroupAllocation) -> String {
    let n = alloc.robots();
    let mut out = format!("# {} robots, {} groups, {} steps\n", n, alloc.groups(), seq.len());
    for cs in seq.steps() {
        let group = alloc
            .rows()
            .iter()
            .position(|r| r[..] == cs.activation[..])
            .map(|g| (g + 1).to_string())
            .filter(|g| !is_bitstring(g, n));
        let token = group.unwrap_or_else(|| bits(&cs.activation));
        out.push_str(&format!("{token} {:?}\n", cs.arc));
    }
    out
}

pub fn parse_sequence(text: &str, alloc: &GroupAllocation, origin: &Path) -> Result<ActivationSequence> {
    let n = alloc.robots();
    let err = |line: usize, msg: String| CliError::Parse {
        path: origin.to_path_buf(),
        line,
        msg,
    };
    let mut steps = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let [token, arc] = fields[..] else {
            return Err(err(i + 1, format!("expected '<group-or-bits> <arc>', got '{line}'")));
        };
        let arc: f64 = arc
            .parse()
            .map_err(|_| err(i + 1, format!("bad arc '{arc}'")))?;
        if !(arc >= 0.0 && arc.is_finite()) {
            return Err(err(i + 1, format!("arc must be finite and nonnegative, got {arc}")));
        }
        let activation = if is_bitstring(token, n) {
            token.chars().map(|c| c == '1').collect()
        } else {
            let g: usize = token
                .parse()
                .map_err(|_| err(i + 1, format!("'{token}' is neither a group number nor {n} bits")))?;
            if g == 0 || g > alloc.groups() {
                return Err(err(i + 1, format!("group {g} is not in 1..={}", alloc.groups())));
            }
            alloc.row(g - 1).to_vec()
        };
        steps.push(ControlStep::new(activation, arc));
    }
    Ok(ActivationSequence::from_steps(steps))
}

pub fn load_sequence(path: &Path, alloc: &GroupAllocation) -> Result<ActivationSequence> {
    parse_sequence(&read(path)?, alloc, path)
}

pub fn save_sequence(path: &Path, seq: &ActivationSequence, alloc: &GroupAllocation) -> Result<()> {
    write(path, &format_sequence(seq, alloc))
}

/// `sample,robot,x,y,theta`, robots one-based.
pub fn write_trajectory_csv(path: &Path, traj: &Trajectory) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| CliError::io(path, e))?;
    let mut w = std::io::BufWriter::new(file);
    let io = |e| CliError::io(path, e);
    writeln!(w, "sample,robot,x,y,theta").map_err(io)?;
    for (k, s) in traj.samples().iter().enumerate() {
        for i in 0..s.n() {
            let p = s.position(i);
            writeln!(w, "{k},{},{:?},{:?},{:?}", i + 1, p.x, p.y, s.heading(i)).map_err(io)?;
        }
    }
    w.flush().map_err(io)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::path::PathBuf;
    use swarmgc_core::allocate_groups;

    fn origin() -> PathBuf {
        PathBuf::from("t.seq")
    }

    #[test]
    fn groups_and_bitstrings() {
        let a = allocate_groups(6).unwrap();
        let seq = ActivationSequence::from_steps(vec![
            ControlStep::group(&a, 0, 1.5),
            ControlStep::new(vec![true, false, false, false, false, true], 0.25),
            ControlStep::group(&a, 3, std::f64::consts::PI),
        ]);
        let text = format_sequence(&seq, &a);
        assert!(text.contains("\n1 1.5\n"));
        assert!(text.contains("\n100001 0.25\n"));
        assert!(text.contains("\n4 3.141592653589793\n"));
        assert_eq!(parse_sequence(&text, &a, &origin()).unwrap(), seq);
    }

    #[test]
    fn single_robot_group_numbers_are_not_bits() {
        // n = 1: group "1" would read as the activation "1"
        let a = allocate_groups(1).unwrap();
        let seq = ActivationSequence::from_steps(vec![ControlStep::group(&a, 0, 1.0), ControlStep::group(&a, 1, 2.0)]);
        let back = parse_sequence(&format_sequence(&seq, &a), &a, &origin()).unwrap();
        assert_eq!(back, seq);
    }

    #[test]
    fn errors_name_the_line() {
        let a = allocate_groups(6).unwrap();
        let e = parse_sequence("1 0.5\n\n9 1.0\n", &a, &origin()).unwrap_err();
        assert!(e.to_string().contains("t.seq:3"), "{e}");
        let e = parse_sequence("1 -0.5\n", &a, &origin()).unwrap_err();
        assert_eq!(e.exit_code(), 4);
    }

    proptest! {
        #[test]
        fn round_trip(steps in prop::collection::vec((0usize..4, any::<bool>(), 0.0..100.0f64), 0..20)) {
            let a = allocate_groups(6).unwrap();
            let seq = ActivationSequence::from_steps(
                steps
                    .into_iter()
                    .enumerate()
                    .map(|(i, (g, raw, arc))| if raw {
                        ControlStep::new((0..6).map(|j| (i + j) % 3 == 0).collect(), arc)
                    } else {
                        ControlStep::group(&a, g, arc)
                    })
                    .collect(),
            );
            let back = parse_sequence(&format_sequence(&seq, &a), &a, &origin()).unwrap();
            prop_assert_eq!(back, seq);
        }
    }
}
