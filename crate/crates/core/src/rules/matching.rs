use alloc::vec::Vec;

use super::catalog::{BvOp, Catalog, Hole, Relator, Rule, RuleKind, Site, StaticGuard};
use crate::lang::{Expr, Ident, Stmt, StmtKind};

/// Concrete expressions bound to the holes of a rule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Delta {
    pub e1: Expr,
    pub e2: Option<Expr>,
    pub r: Option<Expr>,
}

impl Delta {
    pub fn get(&self, h: Hole) -> Option<&Expr> {
        match h {
            Hole::E1 => Some(&self.e1),
            Hole::E2 => self.e2.as_ref(),
            Hole::R => self.r.as_ref(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleInstance<'c> {
    pub rule: &'c Rule,
    pub delta: Delta,
}

impl RuleInstance<'_> {
    /// `(condition, replacement)` with holes substituted.
    pub fn instantiate(&self) -> (Expr, Expr) {
        instantiate(self)
    }
}

/// A statement that weakening rules can apply to. Holds `r rel (e1 ⊗ e2)` in that
/// orientation; `r := e1 ⊗ e2` uses the relator `:=`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StmtShape {
    pub rel: Relator,
    pub r: Expr,
    pub op: BvOp,
    pub e1: Expr,
    pub e2: Option<Expr>,
    /// For assumptions: the bitvector node was the left operand, so `rel` is mirrored.
    pub mirrored: bool,
}

impl StmtShape {
    /// Candidate shapes of a statement, the right-hand orientation first.
    pub fn of_stmt(s: &Stmt) -> Vec<StmtShape> {
        match &s.kind {
            StmtKind::Assign(x, e) => Self::assign(x, e).into_iter().collect(),
            StmtKind::Assume(c) => Self::relation(c),
            _ => Vec::new(),
        }
    }

    pub fn assign(x: &Ident, e: &Expr) -> Option<StmtShape> {
        let (op, e1, e2) = BvOp::split(e)?;
        Some(StmtShape {
            rel: Relator::Assign,
            r: Expr::Var(x.clone()),
            op,
            e1: e1.clone(),
            e2: e2.cloned(),
            mirrored: false,
        })
    }

    pub fn relation(c: &Expr) -> Vec<StmtShape> {
        let Expr::Binary(op, lhs, rhs) = c else {
            return Vec::new();
        };
        let Some(rel) = Relator::from_binop(*op) else {
            return Vec::new();
        };
        let mut out = Vec::new();
        if let Some((bop, e1, e2)) = BvOp::split(rhs) {
            out.push(StmtShape {
                rel,
                r: (**lhs).clone(),
                op: bop,
                e1: e1.clone(),
                e2: e2.cloned(),
                mirrored: false,
            });
        }
        if let Some((bop, e1, e2)) = BvOp::split(lhs) {
            out.push(StmtShape {
                rel: rel.mirrored(),
                r: (**rhs).clone(),
                op: bop,
                e1: e1.clone(),
                e2: e2.cloned(),
                mirrored: true,
            });
        }
        out
    }

    fn fits(&self, rule: &Rule) -> bool {
        match rule.site {
            Some(Site::Relation(class)) => class.contains(self.rel),
            Some(Site::EqZero) => self.rel == Relator::Eq && self.r == Expr::Lit(0),
            None => false,
        }
    }
}

fn guard_ok(rule: &Rule, delta: &Delta) -> bool {
    match rule.static_guard {
        None => true,
        Some(StaticGuard::IsConst(h)) => matches!(delta.get(h), Some(Expr::Lit(_))),
    }
}

/// Rewrite rules for `op`, in catalog order.
pub fn match_expr_rules<'c>(
    catalog: &'c Catalog,
    op: BvOp,
    e1: &Expr,
    e2: Option<&Expr>,
) -> Vec<RuleInstance<'c>> {
    let delta = Delta {
        e1: e1.clone(),
        e2: e2.cloned(),
        r: None,
    };
    catalog
        .rules()
        .iter()
        .filter(|r| r.kind == RuleKind::Rewrite && r.op == op && guard_ok(r, &delta))
        .map(|rule| RuleInstance {
            rule,
            delta: delta.clone(),
        })
        .collect()
}

/// Weakening rules applicable to `shape`, in catalog order.
pub fn match_stmt_rules<'c>(catalog: &'c Catalog, shape: &StmtShape) -> Vec<RuleInstance<'c>> {
    let delta = Delta {
        e1: shape.e1.clone(),
        e2: shape.e2.clone(),
        r: Some(shape.r.clone()),
    };
    catalog
        .rules()
        .iter()
        .filter(|r| {
            r.kind == RuleKind::Weaken && r.op == shape.op && shape.fits(r) && guard_ok(r, &delta)
        })
        .map(|rule| RuleInstance {
            rule,
            delta: delta.clone(),
        })
        .collect()
}

/// Substitutes the instance's bindings into both templates.
///
/// Panics if a template mentions a hole the instance leaves unbound.
pub fn instantiate(ri: &RuleInstance<'_>) -> (Expr, Expr) {
    let sub = |id: &Ident| {
        Hole::from_ident(id).map(|h| {
            ri.delta
                .get(h)
                .unwrap_or_else(|| panic!("rule {} uses unbound hole {}", ri.rule.id, h.name()))
                .clone()
        })
    };
    (
        ri.rule.condition.substitute(&sub),
        ri.rule.replacement.substitute(&sub),
    )
}
