//! Group allocation.
//!
//! Robot `j` is assigned a bit pattern over the first `m - 1` groups. The
//! pattern is never all-zero (the robot must translate in some group) and
//! never all-one (it must rotate in some group). The last group is the
//! special all-rotate group in which nobody translates.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::Write;

use crate::error::{invalid, Error, Result};

/// Smallest group count `m` such that `n` robots get distinct usable patterns,
/// i.e. `ceil(log2(n + 2)) + 1`.
pub fn min_groups(n: usize) -> Result<usize> {
    if n < 1 {
        return Err(invalid("robot count must be at least 1"));
    }
    let target = n as u128 + 2;
    // ceil(log2(target)) in integer arithmetic
    let bits = 128 - (target - 1).leading_zeros() as usize;
    Ok(bits + 1)
}

/// Membership matrix of `m` groups over `n` robots.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupAllocation {
    rows: Vec<Vec<bool>>,
}

/// Builds the canonical allocation: robot `j` (zero-based) receives the
/// binary pattern `j + 1`, with group 0 as the most significant bit.
pub fn allocate_groups(n: usize) -> Result<GroupAllocation> {
    let m = min_groups(n)?;
    let bits = m - 1;
    let mut rows = vec![vec![false; n]; m];
    for robot in 0..n {
        let pattern = robot as u128 + 1;
        for (group, row) in rows.iter_mut().take(bits).enumerate() {
            row[robot] = (pattern >> (bits - 1 - group)) & 1 == 1;
        }
    }
    Ok(GroupAllocation { rows })
}

impl GroupAllocation {
    /// Validates an arbitrary membership matrix (rows are groups).
    pub fn from_rows(rows: Vec<Vec<bool>>) -> Result<Self> {
        let m = rows.len();
        if m < 2 {
            return Err(Error::Validation(String::from(
                "allocation needs at least one translate group and the all-rotate group",
            )));
        }
        let n = rows[0].len();
        if n == 0 {
            return Err(Error::Validation(String::from("allocation has no robots")));
        }
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Validation(String::from("allocation rows differ in length")));
        }
        if rows[m - 1].iter().any(|&b| b) {
            return Err(Error::Validation(alloc::format!(
                "last group G{m} must be the all-rotate group (all zeros)"
            )));
        }
        let alloc = GroupAllocation { rows };
        let columns: Vec<Vec<bool>> = (0..n).map(|j| alloc.pattern(j)).collect();
        for (j, col) in columns.iter().enumerate() {
            if col.iter().all(|&b| !b) {
                return Err(Error::Validation(alloc::format!(
                    "robot R{} belongs to no translate group",
                    j + 1
                )));
            }
            if col.iter().all(|&b| b) {
                return Err(Error::Validation(alloc::format!(
                    "robot R{} belongs to every translate group and can never rotate",
                    j + 1
                )));
            }
            if let Some(k) = columns[..j].iter().position(|c| c == col) {
                return Err(Error::Validation(alloc::format!(
                    "robots R{} and R{} share the same group pattern",
                    k + 1,
                    j + 1
                )));
            }
        }
        Ok(alloc)
    }

    pub fn robots(&self) -> usize {
        self.rows[0].len()
    }

    pub fn groups(&self) -> usize {
        self.rows.len()
    }

    /// Index of the all-rotate group `G_m`.
    pub fn rotate_group(&self) -> usize {
        self.rows.len() - 1
    }

    pub fn contains(&self, group: usize, robot: usize) -> bool {
        self.rows[group][robot]
    }

    pub fn row(&self, group: usize) -> &[bool] {
        &self.rows[group]
    }

    pub fn rows(&self) -> &[Vec<bool>] {
        &self.rows
    }

    pub fn members(&self, group: usize) -> Vec<usize> {
        (0..self.robots()).filter(|&j| self.rows[group][j]).collect()
    }

    /// Membership of `robot` over the translate groups `0..m-1`.
    pub fn pattern(&self, robot: usize) -> Vec<bool> {
        self.rows[..self.rotate_group()].iter().map(|r| r[robot]).collect()
    }

    /// Rotation matrix of the orientation-control system: entry `(j, i)` is 1
    /// when the rotation field of column `i` turns robot `j`. Columns are
    /// `h_1..h_{m-1}` followed by `f_m`.
    pub fn rotation_matrix(&self) -> Vec<Vec<f64>> {
        let last = self.rotate_group();
        (0..self.robots())
            .map(|j| {
                let mut row: Vec<f64> = (0..last)
                    .map(|i| if self.rows[i][j] { 0.0 } else { 1.0 })
                    .collect();
                row.push(1.0);
                row
            })
            .collect()
    }
}

pub(crate) fn robot_labels(robots: &[usize]) -> String {
    let mut s = String::from("{");
    for (i, r) in robots.iter().enumerate() {
        if i > 0 {
            s.push_str(", ");
        }
        let _ = write!(s, "R{}", r + 1);
    }
    s.push('}');
    s
}
