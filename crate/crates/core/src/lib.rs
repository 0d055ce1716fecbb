//! Bitwise branching: a source-to-source transformation that splits bitvector operations
//! into linear-arithmetic paths guarded by linear conditions, with an exact small-width
//! interpreter used to check every rule and whole-program soundness by enumeration.
//!
//! The crate is `no_std` and needs only `alloc`.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod lang;
pub mod rules;
pub mod semantics;
pub mod soundness;
pub mod transform;
