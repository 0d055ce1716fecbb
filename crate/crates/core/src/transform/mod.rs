//! Source-to-source translation, branch normalization and automaton construction.

mod cfa;
mod normalize;
mod options;
mod translate;

pub use cfa::{build_cfa, Cfa, CfaError, Edge};
pub use normalize::branch_normalize;
pub use options::{OptionsError, TransformOptions};
pub use translate::{t_e, t_e_with, t_s, t_s_with, transform_program, transform_program_with};

#[cfg(test)]
mod tests;
