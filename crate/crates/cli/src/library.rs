//! Primitive library files: which subgroup is moved by which bracket.

use std::path::Path;

use serde::{Deserialize, Serialize};
use swarmgc_core::primitives::{compile_primitive, Primitive};
use swarmgc_core::GroupAllocation;

use crate::error::{CliError, Result};
use crate::scenario::{read, to_yaml, write, yaml};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LibraryEntry {
    /// One-based robot numbers.
    pub subgroup: Vec<usize>,
    pub expr: String,
    pub order: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LibraryDoc {
    pub robots: usize,
    pub primitives: Vec<LibraryEntry>,
}

impl LibraryEntry {
    pub fn from_primitive(p: &Primitive) -> Self {
        LibraryEntry {
            subgroup: p.subgroup().iter().map(|r| r + 1).collect(),
            expr: p.label(),
            order: p.order(),
        }
    }
}

/// Compiles one library entry per subgroup (zero-based robot sets).
pub fn build_library(subgroups: &[Vec<usize>], alloc: &GroupAllocation) -> Result<LibraryDoc> {
    let primitives = subgroups
        .iter()
        .map(|s| Ok(LibraryEntry::from_primitive(&compile_primitive(s, alloc)?)))
        .collect::<Result<_>>()?;
    Ok(LibraryDoc {
        robots: alloc.robots(),
        primitives,
    })
}

/// Rebuilds the primitives of `doc` and checks each listed expression really
/// moves its subgroup at the stated order.
pub fn resolve_library(doc: &LibraryDoc, alloc: &GroupAllocation) -> Result<Vec<Primitive>> {
    if doc.robots != alloc.robots() {
        return Err(CliError::Validation(format!(
            "library is for {} robots, allocation has {}",
            doc.robots,
            alloc.robots()
        )));
    }
    doc.primitives
        .iter()
        .map(|e| {
            if e.subgroup.iter().any(|&r| r == 0 || r > doc.robots) {
                return Err(CliError::Validation(format!("{}: robot out of range", e.expr)));
            }
            let sub: Vec<usize> = e.subgroup.iter().map(|r| r - 1).collect();
            let p = Primitive::from_label(&sub, &e.expr, alloc)?;
            if p.order() != e.order {
                return Err(CliError::Validation(format!(
                    "{} has order {}, file says {}",
                    e.expr,
                    p.order(),
                    e.order
                )));
            }
            Ok(p)
        })
        .collect()
}

pub fn load_library(path: &Path, alloc: &GroupAllocation) -> Result<Vec<Primitive>> {
    let doc: LibraryDoc = yaml(path, &read(path)?)?;
    resolve_library(&doc, alloc)
}

pub fn save_library(path: &Path, doc: &LibraryDoc) -> Result<()> {
    write(path, &to_yaml(doc))
}
