use alloc::string::String;
use core::fmt;

use super::catalog::{Hole, Relator, Rule, RuleKind, Site};
use crate::semantics::{Code, FaultKind, MachineConfig};

/// A valuation of the holes under which a rule's claim fails.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub e1: i64,
    pub e2: Option<i64>,
    pub r: Option<i64>,
    /// Weakening rules: the relator assumed between `r` and the bitvector result.
    pub relator: Option<Relator>,
    /// Value of the bitvector expression, `Err` if it faulted.
    pub lhs: Result<i64, FaultKind>,
    /// Rewrite: value of the replacement. Weaken: value of the constraint.
    pub rhs: Result<i64, FaultKind>,
}

impl fmt::Display for Counterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |v: &Result<i64, FaultKind>| match v {
            Ok(v) => alloc::format!("{v}"),
            Err(k) => alloc::format!("fault({k})"),
        };
        write!(f, "e1={}", self.e1)?;
        if let Some(v) = self.e2 {
            write!(f, " e2={v}")?;
        }
        if let Some(v) = self.r {
            write!(f, " r={v}")?;
        }
        match self.relator {
            Some(rel) => write!(
                f,
                " rel={rel} bv={} constraint={}",
                show(&self.lhs),
                show(&self.rhs)
            ),
            None => write!(f, " lhs={} rhs={}", show(&self.lhs), show(&self.rhs)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleVerdict {
    pub rule: String,
    pub width: u32,
    pub pass: bool,
    /// Valuations (times relators, for weakening rules) on which the claim was tested.
    pub cases: u64,
    pub counterexample: Option<Counterexample>,
}

const SLOT_E1: usize = 0;
const SLOT_E2: usize = 1;
const SLOT_R: usize = 2;

fn compile(rule: &Rule, cfg: MachineConfig) -> (Code, Code, Code) {
    let slot = |id: &crate::lang::Ident| {
        Hole::from_ident(id).map(|h| match h {
            Hole::E1 => SLOT_E1,
            Hole::E2 => SLOT_E2,
            Hole::R => SLOT_R,
        })
    };
    (
        Code::compile(&rule.condition, &slot, cfg),
        Code::compile(&rule.pattern(), &slot, cfg),
        Code::compile(&rule.replacement, &slot, cfg),
    )
}

/// Checks a rule's claim on every valuation of its holes at the given width.
///
/// Faulting evaluations count as violations. Weakening rules cost `2^(3w)` evaluations,
/// which is why widths above 8 are impractical.
pub fn check_rule_correctness(rule: &Rule, cfg: MachineConfig) -> RuleVerdict {
    let (cond, bv, repl) = compile(rule, cfg);
    let unary = rule.op.is_unary();
    let e2_values = if unary { 0..=0 } else { cfg.values() };
    let mut verdict = RuleVerdict {
        rule: rule.id.clone(),
        width: cfg.width(),
        pass: true,
        cases: 0,
        counterexample: None,
    };
    let fail = |verdict: &mut RuleVerdict, cex: Counterexample| {
        verdict.pass = false;
        verdict.counterexample = Some(cex);
    };
    let mut vals = [0i64; 3];

    'outer: for v1 in cfg.values() {
        for v2 in e2_values.clone() {
            vals[SLOT_E1] = v1;
            vals[SLOT_E2] = v2;
            let cex = |r, relator, lhs, rhs| Counterexample {
                e1: v1,
                e2: (!unary).then_some(v2),
                r,
                relator,
                lhs,
                rhs,
            };
            match rule.kind {
                RuleKind::Rewrite => {
                    verdict.cases += 1;
                    let c = cond.run(&vals, cfg);
                    if c == Ok(0) {
                        continue;
                    }
                    let lhs = bv.run(&vals, cfg);
                    let rhs = if c.is_ok() { repl.run(&vals, cfg) } else { c };
                    if lhs.is_err() || rhs.is_err() || lhs != rhs {
                        fail(&mut verdict, cex(None, None, lhs, rhs));
                        break 'outer;
                    }
                }
                RuleKind::Weaken => {
                    let relators: &[Relator] = match rule.site {
                        Some(Site::Relation(class)) => class.members(),
                        Some(Site::EqZero) | None => &[Relator::Eq],
                    };
                    let c = cond.run(&vals, cfg);
                    let lhs = bv.run(&vals, cfg);
                    let r_values = match rule.site {
                        Some(Site::EqZero) => 0..=0,
                        _ => cfg.values(),
                    };
                    for vr in r_values {
                        vals[SLOT_R] = vr;
                        for &rel in relators {
                            verdict.cases += 1;
                            let rhs = match (c, lhs) {
                                (Ok(0), _) => continue,
                                (Err(k), _) | (_, Err(k)) => Err(k),
                                (Ok(_), Ok(b)) if !rel.holds(vr, b) => continue,
                                _ => repl.run(&vals, cfg),
                            };
                            if rhs.map_or(true, |v| v == 0) {
                                fail(&mut verdict, cex(Some(vr), Some(rel), lhs, rhs));
                                break 'outer;
                            }
                        }
                    }
                }
            }
        }
    }
    verdict
}
