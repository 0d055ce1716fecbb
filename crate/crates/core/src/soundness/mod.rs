//! Observation inclusion between a program and its transformation, and safety transfer.
//!
//! Both checks are finite: they explore one machine width up to a step bound. A pass is
//! evidence at that width, not a proof for all traces.

pub mod gen;
mod inclusion;

pub use inclusion::{
    certify_safety, certify_safety_with, check_inclusion, check_inclusion_with, replay_witness,
    InclusionStatus, InclusionVerdict, RunStats, SafetyOutcome, SafetyReport, Witness,
};

#[cfg(test)]
mod tests;
