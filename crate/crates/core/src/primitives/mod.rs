//! Compilers from constructive control sequences to activation sequences.
//!
//! The raw fields are `f_i` (group `i` translates, everyone else pivots) and
//! the all-rotate field `f_m`. On top of them this module builds the
//! bilateral rotation fields `h_i`, the bilateral translation fields `g_i`,
//! orientation control, single-robot isolation, and the bracket primitives
//! used by the planners.

mod bracket;
mod distinct_radius;
mod isolation;
mod library;
mod orientation;
mod rotation;

use crate::allocation::GroupAllocation;
use crate::error::{invalid, Result};
use crate::sequence::{ActivationSequence, ControlStep};
use crate::state::SwarmParams;

pub use bracket::{affected_robots, BracketExpr, Combo, FieldKind, FieldRef};
pub use distinct_radius::distinct_radius_isolate;
pub use isolation::IsolationPlan;
pub use library::{compile_primitive, Primitive, Realization};
pub use orientation::OrientationPlan;

/// Default excursion bound for bilateral rotations (length units).
pub const DEFAULT_EPS: f64 = 0.5;

/// Compiles primitives for one swarm with a common turning radius.
#[derive(Debug, Clone)]
pub struct PrimitiveCompiler {
    params: SwarmParams,
    alloc: GroupAllocation,
    eps: f64,
}

impl PrimitiveCompiler {
    pub fn new(params: &SwarmParams, alloc: &GroupAllocation) -> Result<Self> {
        if !params.is_uniform() {
            return Err(invalid(
                "group primitives need a common turning radius; use distinct_radius_isolate",
            ));
        }
        if params.n() != alloc.robots() {
            return Err(invalid(alloc::format!(
                "params describe {} robots, allocation {}",
                params.n(),
                alloc.robots()
            )));
        }
        Ok(PrimitiveCompiler {
            params: params.clone(),
            alloc: alloc.clone(),
            eps: DEFAULT_EPS,
        })
    }

    /// Sets the excursion bound used by bilateral rotations. Infinity lets
    /// every rotation finish in a single back-and-forth.
    pub fn with_eps(mut self, eps: f64) -> Result<Self> {
        if !(eps > 0.0) {
            return Err(invalid("eps must be positive"));
        }
        self.eps = eps;
        Ok(self)
    }

    pub fn params(&self) -> &SwarmParams {
        &self.params
    }

    pub fn allocation(&self) -> &GroupAllocation {
        &self.alloc
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    fn radius(&self) -> f64 {
        self.params.radius()
    }

    fn check_translate_group(&self, group: usize) -> Result<()> {
        if group >= self.alloc.rotate_group() {
            return Err(invalid(alloc::format!(
                "group G{} has no compiled h/g field (valid: G1..G{})",
                group + 1,
                self.alloc.rotate_group()
            )));
        }
        Ok(())
    }

    fn raw(&self, group: usize, arc: f64) -> ControlStep {
        ControlStep::group(&self.alloc, group, arc)
    }

    /// Raw field `f_i(arc)`; `arc` must be nonnegative.
    pub fn raw_field(&self, group: usize, arc: f64) -> ActivationSequence {
        core::iter::once(self.raw(group, arc)).collect()
    }
}
