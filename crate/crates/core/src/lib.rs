//! Behaviour-driven transition systems (BDDTSs).
//!
//! Scenarios are turned into symbolic transition systems with output guards,
//! made input/output complete by saturation, combined with the disjunctive
//! composition and turned into test cases.

pub mod composition;
pub mod concrete;
pub mod dot;
pub mod error;
pub mod format;
pub mod gen;
pub mod model;
pub mod saturation;
pub mod scenario;
pub mod symbolic;
pub mod terms;

pub use error::{Error, Result};
pub use model::{Bddts, Direction, Gate, Location, Nature, Switch};
