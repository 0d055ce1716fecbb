//! The rule catalog, structural matching and the exhaustive rule checker.

mod catalog;
mod check;
mod matching;

pub use catalog::{
    catalog, BvOp, Catalog, Hole, Mutation, RelClass, Relator, Rule, RuleKind, Site, StaticGuard,
    COMMUTED_SUFFIX,
};
pub use check::{check_rule_correctness, Counterexample, RuleVerdict};
pub use matching::{
    instantiate, match_expr_rules, match_stmt_rules, Delta, RuleInstance, StmtShape,
};

#[cfg(test)]
mod tests;
