use crate::lang::{Block, Expr, Origin, Program, Stmt, StmtKind};

/// Replaces every `if (c)` by a nondeterministic choice between `assume(c)` and
/// `assume(!c)` arms. Loops are kept; their bodies are normalized.
pub fn branch_normalize(p: &Program) -> Program {
    Program {
        decls: p.decls.clone(),
        body: block(&p.body),
    }
}

fn block(b: &Block) -> Block {
    b.iter().map(stmt).collect()
}

fn stmt(s: &Stmt) -> Stmt {
    let kind = match &s.kind {
        StmtKind::IfCond(c, t, e) => {
            let aux = s.origin.map(|o| Origin::aux(o.tag));
            let arm = |guard: Expr, body: &Block| {
                let mut out = alloc::vec![Stmt::with_origin(StmtKind::Assume(guard), aux)];
                out.extend(block(body));
                out
            };
            StmtKind::IfNondet(arm(c.clone(), t), arm(Expr::negation(c.clone()), e))
        }
        StmtKind::IfNondet(t, e) => StmtKind::IfNondet(block(t), block(e)),
        StmtKind::While(c, body) => StmtKind::While(c.clone(), block(body)),
        k => k.clone(),
    };
    Stmt::with_origin(kind, s.origin)
}
