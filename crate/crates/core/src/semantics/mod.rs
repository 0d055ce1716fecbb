//! Concrete two's-complement semantics at a small bit width, and the exhaustive
//! reachability oracle built on it.

mod eval;
mod exec;
mod reach;
mod value;

use alloc::vec::Vec;

pub use eval::eval_expr;
pub(crate) use eval::Code;
pub use exec::{collect_observations, exec_stmt, final_states, Collected, Outcome};
pub use reach::{reachable, reachable_projected, ReachResult};
pub use value::{EvalFault, FaultKind, MachineConfig, State, WidthError};

/// A projected valuation recorded right after a statement with the given origin executed.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Observation {
    pub origin: u32,
    pub values: Vec<i64>,
}
