//! Group-control toolkit for microrobot swarms driven by one global signal.
//!
//! Every robot either translates along its heading (its group is active) or
//! pivots in place at rate `arc / r`. This crate holds the pure parts:
//!
//! - [`allocation`]: group allocation by unique bit patterns.
//! - [`dynamics`]: exact switched kinematics, trajectories and metrics.
//! - [`primitives`]: compilers from bilateral fields, orientation control,
//!   single-robot isolation and Lie-bracket primitives down to executable
//!   [`ActivationSequence`]s.
//! - [`planners`]: numerical optimization and the RRT family.
//!
//! The crate is `no_std` and needs only `alloc`. File formats, the CLI and
//! wall-clock timing live in the `swarmgc` companion crate.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod allocation;
pub mod angle;
pub mod dynamics;
mod error;
pub mod planners;
pub mod primitives;
pub mod sequence;
pub mod state;

pub use allocation::{allocate_groups, min_groups, GroupAllocation};
pub use dynamics::{execution_time, path_length, simulate, simulate_with, step, Trajectory};
pub use error::{Error, Result};
pub use nalgebra::Vector2;
pub use sequence::{ActivationSequence, ControlStep};
pub use state::{SwarmParams, SwarmState};
