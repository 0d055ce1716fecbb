use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use super::options::TransformOptions;
use crate::lang::{Block, Expr, Ident, Origin, Program, Stmt, StmtKind};
use crate::rules::{
    match_expr_rules, match_stmt_rules, BvOp, Catalog, Delta, RuleInstance, StmtShape,
};

/// One transformation run. Fresh names are scoped to the run.
pub(crate) struct Translator<'a> {
    catalog: &'a Catalog,
    opts: &'a TransformOptions,
    taken: BTreeSet<Ident>,
    next_fresh: usize,
    pub(crate) temps: Vec<Ident>,
}

impl<'a> Translator<'a> {
    pub(crate) fn new(catalog: &'a Catalog, opts: &'a TransformOptions, decls: &[Ident]) -> Self {
        Translator {
            catalog,
            opts,
            taken: decls.iter().cloned().collect(),
            next_fresh: 0,
            temps: Vec::new(),
        }
    }

    fn fresh(&mut self) -> Ident {
        loop {
            let name = alloc::format!("{}{}", self.opts.fresh_prefix(), self.next_fresh);
            self.next_fresh += 1;
            let id = Ident::new(&name).expect("prefix validated by the options");
            if self.taken.insert(id.clone()) {
                self.temps.push(id.clone());
                return id;
            }
        }
    }

    fn select<'c>(&self, instances: Vec<RuleInstance<'c>>) -> Vec<RuleInstance<'c>> {
        let cap = self.opts.max_nesting().unwrap_or(usize::MAX);
        instances
            .into_iter()
            .filter(|ri| self.opts.is_enabled(&ri.rule.id))
            .take(cap)
            .collect()
    }

    /// Rewrites every bitvector node outside `Opaque` into a guarded conditional.
    pub(crate) fn expr(&self, e: &Expr) -> Expr {
        if let Expr::Opaque(_) = e {
            return e.clone();
        }
        if let Some((op, a, b)) = BvOp::split(e) {
            let a = self.expr(a);
            let b = b.map(|b| self.expr(b));
            let fallback = Expr::opaque(op.build(a.clone(), b.clone()));
            let instances = self.select(match_expr_rules(self.catalog, op, &a, b.as_ref()));
            // first rule outermost
            return instances.iter().rev().fold(fallback, |acc, ri| {
                let (c, r) = ri.instantiate();
                Expr::ite(c, r, acc)
            });
        }
        match e {
            Expr::Unary(op, a) => Expr::unary(*op, self.expr(a)),
            Expr::Binary(op, a, b) => Expr::binary(*op, self.expr(a), self.expr(b)),
            Expr::Ite(c, t, f) => Expr::ite(self.expr(c), self.expr(t), self.expr(f)),
            _ => e.clone(),
        }
    }

    pub(crate) fn block(&mut self, b: &Block) -> Block {
        b.iter().flat_map(|s| self.stmt(s)).collect()
    }

    pub(crate) fn stmt(&mut self, s: &Stmt) -> Block {
        let tag = s.origin.map(|o| o.tag);
        let primary = tag.map(Origin::primary);
        let aux = tag.map(Origin::aux);
        match &s.kind {
            StmtKind::Assign(x, e) => {
                if let Some(out) = self.weaken_assign(x, e, primary, aux) {
                    return out;
                }
                alloc::vec![Stmt::with_origin(
                    StmtKind::Assign(x.clone(), self.expr(e)),
                    s.origin
                )]
            }
            StmtKind::Assume(c) => {
                if let Some(out) = self.weaken_assume(c, primary, aux) {
                    return alloc::vec![out];
                }
                alloc::vec![Stmt::with_origin(StmtKind::Assume(self.expr(c)), s.origin)]
            }
            StmtKind::Havoc(_) | StmtKind::Error => alloc::vec![s.clone()],
            StmtKind::IfCond(c, t, e) => {
                let kind = StmtKind::IfCond(self.expr(c), self.block(t), self.block(e));
                alloc::vec![Stmt::with_origin(kind, s.origin)]
            }
            StmtKind::IfNondet(t, e) => {
                let kind = StmtKind::IfNondet(self.block(t), self.block(e));
                alloc::vec![Stmt::with_origin(kind, s.origin)]
            }
            StmtKind::While(c, body) => {
                let kind = StmtKind::While(self.expr(c), self.block(body));
                alloc::vec![Stmt::with_origin(kind, s.origin)]
            }
        }
    }

    /// `x := e1 ⊗ e2` becomes a guard chain over captured operands.
    fn weaken_assign(
        &mut self,
        x: &Ident,
        e: &Expr,
        primary: Option<Origin>,
        aux: Option<Origin>,
    ) -> Option<Block> {
        let shape = StmtShape::assign(x, e)?;
        let instances = self.select(match_stmt_rules(self.catalog, &shape));
        if instances.is_empty() {
            return None;
        }
        let mut out = Block::new();
        let mut capture = |this: &mut Self, operand: &Expr| {
            let t = this.fresh();
            out.push(Stmt::with_origin(
                StmtKind::Assign(t.clone(), this.expr(operand)),
                aux,
            ));
            Expr::Var(t)
        };
        let t1 = capture(self, &shape.e1);
        let t2 = shape.e2.as_ref().map(|e2| capture(self, e2));
        let delta = Delta {
            e1: t1.clone(),
            e2: t2.clone(),
            r: Some(Expr::Var(x.clone())),
        };

        let fallback = Stmt::with_origin(
            StmtKind::Assign(x.clone(), Expr::opaque(shape.op.build(t1, t2))),
            primary,
        );
        let chain = instances.iter().rev().fold(fallback, |acc, ri| {
            let (cond, constraint) = RuleInstance {
                rule: ri.rule,
                delta: delta.clone(),
            }
            .instantiate();
            let then = alloc::vec![
                Stmt::with_origin(StmtKind::Havoc(x.clone()), aux),
                Stmt::with_origin(StmtKind::Assume(constraint), primary),
            ];
            Stmt::with_origin(StmtKind::IfCond(cond, then, alloc::vec![acc]), aux)
        });
        out.push(chain);
        Some(out)
    }

    /// `assume(r rel e1 ⊗ e2)` (either orientation) becomes a guard chain of assumptions.
    fn weaken_assume(
        &self,
        c: &Expr,
        primary: Option<Origin>,
        aux: Option<Origin>,
    ) -> Option<Stmt> {
        let (shape, instances) = StmtShape::relation(c).into_iter().find_map(|shape| {
            let inst = self.select(match_stmt_rules(self.catalog, &shape));
            (!inst.is_empty()).then_some((shape, inst))
        })?;
        let r = self.expr(&shape.r);
        let e1 = self.expr(&shape.e1);
        let e2 = shape.e2.as_ref().map(|e| self.expr(e));
        let delta = Delta {
            e1: e1.clone(),
            e2: e2.clone(),
            r: Some(r.clone()),
        };

        let Expr::Binary(rel, _, _) = c else {
            unreachable!("relation shapes come from binary nodes")
        };
        let bv = Expr::opaque(shape.op.build(e1, e2));
        let fallback_cond = if shape.mirrored {
            Expr::binary(*rel, bv, r)
        } else {
            Expr::binary(*rel, r, bv)
        };
        let fallback = Stmt::with_origin(StmtKind::Assume(fallback_cond), primary);
        Some(instances.iter().rev().fold(fallback, |acc, ri| {
            let (cond, constraint) = RuleInstance {
                rule: ri.rule,
                delta: delta.clone(),
            }
            .instantiate();
            let then = alloc::vec![Stmt::with_origin(StmtKind::Assume(constraint), primary)];
            Stmt::with_origin(StmtKind::IfCond(cond, then, alloc::vec![acc]), aux)
        }))
    }
}

/// Expression translation with the standard catalog.
pub fn t_e(e: &Expr, opts: &TransformOptions) -> Expr {
    t_e_with(e, opts, &Catalog::standard())
}

pub fn t_e_with(e: &Expr, opts: &TransformOptions, catalog: &Catalog) -> Expr {
    Translator::new(catalog, opts, &[]).expr(e)
}

/// Statement translation with the standard catalog.
///
/// A weakened assignment expands to several statements, so the result is a block.
/// Temporaries are named against `decls` and reported with the block.
pub fn t_s(s: &Stmt, opts: &TransformOptions, decls: &[Ident]) -> (Block, Vec<Ident>) {
    t_s_with(s, opts, decls, &Catalog::standard())
}

pub fn t_s_with(
    s: &Stmt,
    opts: &TransformOptions,
    decls: &[Ident],
    catalog: &Catalog,
) -> (Block, Vec<Ident>) {
    let mut t = Translator::new(catalog, opts, decls);
    let out = t.stmt(s);
    (out, t.temps)
}

/// Translates every statement; temporaries are appended to the declarations.
pub fn transform_program(p: &Program, opts: &TransformOptions) -> Program {
    transform_program_with(p, opts, &Catalog::standard())
}

pub fn transform_program_with(p: &Program, opts: &TransformOptions, catalog: &Catalog) -> Program {
    let mut t = Translator::new(catalog, opts, &p.decls);
    let body = t.block(&p.body);
    let mut decls = p.decls.clone();
    decls.extend(t.temps);
    Program { decls, body }
}
