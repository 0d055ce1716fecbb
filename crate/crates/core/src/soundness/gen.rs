//! Seeded random programs and expressions.
//!
//! Divisors are nonzero literals and shift amounts are in-range literals, so fault paths
//! stay rare.

use alloc::vec::Vec;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::lang::{BinOp, Block, Expr, Ident, Program, Stmt, StmtKind, UnOp};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GenConfig {
    /// Machine width the generated shift amounts must respect.
    pub width: u32,
    pub max_vars: usize,
    pub max_loops: usize,
    /// Statements per block.
    pub max_block: usize,
    pub max_expr_depth: u32,
    /// Variables that may be havocked, others start from literals.
    pub max_havocs: usize,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            width: 4,
            max_vars: 3,
            max_loops: 2,
            max_block: 4,
            max_expr_depth: 3,
            max_havocs: 2,
        }
    }
}

struct Gen<'a, R> {
    rng: &'a mut R,
    cfg: GenConfig,
    vars: Vec<Ident>,
    loops_left: usize,
}

const BITVECTOR: [BinOp; 5] = [
    BinOp::BitAnd,
    BinOp::BitOr,
    BinOp::BitXor,
    BinOp::Shl,
    BinOp::Shr,
];
const ARITH: [BinOp; 5] = [BinOp::Add, BinOp::Sub, BinOp::Mul, BinOp::Div, BinOp::Mod];
const RELATIONS: [BinOp; 6] = [
    BinOp::Lt,
    BinOp::Le,
    BinOp::Gt,
    BinOp::Ge,
    BinOp::Eq,
    BinOp::Ne,
];

impl<R: Rng> Gen<'_, R> {
    fn pick<T: Copy>(&mut self, xs: &[T]) -> T {
        xs[self.rng.random_range(0..xs.len())]
    }

    fn literal(&mut self) -> Expr {
        Expr::Lit(self.rng.random_range(-3..=3))
    }

    fn var(&mut self) -> Expr {
        let i = self.rng.random_range(0..self.vars.len());
        Expr::Var(self.vars[i].clone())
    }

    fn leaf(&mut self) -> Expr {
        if self.rng.random_bool(0.6) {
            self.var()
        } else {
            self.literal()
        }
    }

    fn shift_amount(&mut self) -> Expr {
        if self.rng.random_bool(0.3) {
            Expr::binary(BinOp::Sub, Expr::Width, Expr::Lit(1))
        } else {
            Expr::Lit(self.rng.random_range(0..i64::from(self.cfg.width)))
        }
    }

    fn nonzero(&mut self) -> Expr {
        let n = self.rng.random_range(1..=3);
        Expr::Lit(if self.rng.random_bool(0.5) { n } else { -n })
    }

    fn binary(&mut self, op: BinOp, depth: u32) -> Expr {
        let a = self.int(depth - 1);
        let b = match op {
            BinOp::Shl | BinOp::Shr => self.shift_amount(),
            BinOp::Div | BinOp::Mod => self.nonzero(),
            _ => self.int(depth - 1),
        };
        Expr::binary(op, a, b)
    }

    /// An integer-valued expression.
    fn int(&mut self, depth: u32) -> Expr {
        if depth == 0 || self.rng.random_bool(0.3) {
            return self.leaf();
        }
        match self.rng.random_range(0..10) {
            0..=4 => {
                let op = self.pick(&BITVECTOR);
                self.binary(op, depth)
            }
            5..=6 => {
                let op = self.pick(&ARITH);
                self.binary(op, depth)
            }
            7 => {
                let op = self.pick(&[UnOp::BitNot, UnOp::Neg]);
                Expr::unary(op, self.int(depth - 1))
            }
            8 => Expr::ite(
                self.cond(depth - 1),
                self.int(depth - 1),
                self.int(depth - 1),
            ),
            _ => self.leaf(),
        }
    }

    /// A truth-valued expression.
    fn cond(&mut self, depth: u32) -> Expr {
        let op = self.pick(&RELATIONS);
        let atom = Expr::binary(op, self.int(depth), self.int(depth.saturating_sub(1)));
        match self.rng.random_range(0..8) {
            0 if depth > 0 => Expr::binary(BinOp::LogAnd, atom, self.cond(depth - 1)),
            1 if depth > 0 => Expr::binary(BinOp::LogOr, atom, self.cond(depth - 1)),
            2 => Expr::negation(atom),
            _ => atom,
        }
    }

    fn block(&mut self, depth: u32) -> Block {
        let n = self.rng.random_range(1..=self.cfg.max_block);
        (0..n).map(|_| self.stmt(depth)).collect()
    }

    fn stmt(&mut self, depth: u32) -> Stmt {
        let d = self.cfg.max_expr_depth;
        let target = |g: &mut Self| {
            let i = g.rng.random_range(0..g.vars.len());
            g.vars[i].clone()
        };
        let kind = match self.rng.random_range(0..20) {
            0..=7 => {
                let x = target(self);
                StmtKind::Assign(x, self.int(d))
            }
            8..=10 => StmtKind::Assume(self.cond(d - 1)),
            11 if depth > 0 => StmtKind::IfCond(
                self.cond(d - 1),
                self.block(depth - 1),
                self.block(depth - 1),
            ),
            12 if depth > 0 => StmtKind::IfNondet(self.block(depth - 1), self.block(depth - 1)),
            13..=14 if depth > 0 && self.loops_left > 0 => {
                self.loops_left -= 1;
                StmtKind::While(self.cond(d - 1), self.block(depth - 1))
            }
            15 if depth > 0 => StmtKind::IfCond(
                self.cond(d - 1),
                alloc::vec![Stmt::new(StmtKind::Error)],
                Block::new(),
            ),
            _ => {
                let x = target(self);
                StmtKind::Assign(x, self.int(d))
            }
        };
        Stmt::new(kind)
    }
}

/// A random scoped program: each variable is initialized by `havoc` or a literal, then a
/// random body follows. Origins are assigned.
pub fn random_program<R: Rng>(rng: &mut R, cfg: &GenConfig) -> Program {
    let nvars = rng.random_range(1..=cfg.max_vars);
    let vars: Vec<Ident> = (0..nvars)
        .map(|i| Ident::new(["a", "b", "c", "d", "e", "f"][i % 6]).expect("fixed names"))
        .collect();
    let mut g = Gen {
        rng,
        cfg: *cfg,
        vars: vars.clone(),
        loops_left: cfg.max_loops,
    };
    let mut body = Block::new();
    let mut havocs = 0;
    for v in &vars {
        if havocs < cfg.max_havocs && g.rng.random_bool(0.6) {
            havocs += 1;
            body.push(Stmt::new(StmtKind::Havoc(v.clone())));
        } else {
            let lit = g.literal();
            body.push(Stmt::new(StmtKind::Assign(v.clone(), lit)));
        }
    }
    body.extend(g.block(2));
    let mut p = Program { decls: vars, body };
    p.assign_origins();
    p
}

/// A random expression over `vars`, drawing from every operator including `opaque`.
pub fn random_expr<R: Rng>(rng: &mut R, vars: &[Ident], depth: u32) -> Expr {
    fn go<R: Rng>(rng: &mut R, vars: &[Ident], depth: u32) -> Expr {
        if depth == 0 || rng.random_bool(0.2) {
            return match rng.random_range(0..6) {
                0 => Expr::BoolLit(rng.random_bool(0.5)),
                1 => Expr::Width,
                2 | 3 if !vars.is_empty() => {
                    Expr::Var(vars[rng.random_range(0..vars.len())].clone())
                }
                _ => Expr::Lit(rng.random_range(-300..=300)),
            };
        }
        match rng.random_range(0..10) {
            0 => {
                let op = [UnOp::Neg, UnOp::LogNot, UnOp::BitNot][rng.random_range(0..3)];
                Expr::unary(op, go(rng, vars, depth - 1))
            }
            1 => Expr::ite(
                go(rng, vars, depth - 1),
                go(rng, vars, depth - 1),
                go(rng, vars, depth - 1),
            ),
            2 => Expr::opaque(go(rng, vars, depth - 1)),
            _ => {
                let op = BinOp::ALL[rng.random_range(0..BinOp::ALL.len())];
                Expr::binary(op, go(rng, vars, depth - 1), go(rng, vars, depth - 1))
            }
        }
    }
    go(rng, vars, depth)
}

/// `count` programs from a fixed seed.
pub fn fuzz_corpus(seed: u64, count: usize, cfg: &GenConfig) -> Vec<Program> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_program(&mut rng, cfg)).collect()
}

/// `count` expressions over `vars` from a fixed seed.
pub fn expr_corpus(seed: u64, count: usize, vars: &[Ident], depth: u32) -> Vec<Expr> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| random_expr(&mut rng, vars, depth))
        .collect()
}
