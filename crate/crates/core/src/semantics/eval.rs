use alloc::boxed::Box;

use super::value::{apply_binary, apply_unary, EvalFault, FaultKind, MachineConfig, State};
use crate::lang::{BinOp, Expr, Ident, UnOp};

/// Evaluates `e` in `sigma`.
///
/// Panics if `e` mentions a variable that `sigma` does not bind.
pub fn eval_expr(e: &Expr, sigma: &State, cfg: MachineConfig) -> Result<i64, EvalFault> {
    eval_in(e, sigma, cfg, None)
}

pub(crate) fn eval_in(
    e: &Expr,
    sigma: &State,
    cfg: MachineConfig,
    location: Option<u32>,
) -> Result<i64, EvalFault> {
    eval_tree(e, sigma, cfg).map_err(|kind| EvalFault { kind, location })
}

fn eval_tree(e: &Expr, sigma: &State, cfg: MachineConfig) -> Result<i64, FaultKind> {
    Ok(match e {
        Expr::Lit(n) => cfg.wrap(*n),
        Expr::BoolLit(b) => i64::from(*b),
        Expr::Width => cfg.wrap(i64::from(cfg.width())),
        Expr::Var(x) => sigma
            .get(x)
            .unwrap_or_else(|| panic!("variable `{x}` is not bound in the state")),
        Expr::Unary(op, a) => apply_unary(*op, eval_tree(a, sigma, cfg)?, cfg),
        Expr::Binary(BinOp::LogAnd, a, b) => {
            i64::from(eval_tree(a, sigma, cfg)? != 0 && eval_tree(b, sigma, cfg)? != 0)
        }
        Expr::Binary(BinOp::LogOr, a, b) => {
            i64::from(eval_tree(a, sigma, cfg)? != 0 || eval_tree(b, sigma, cfg)? != 0)
        }
        Expr::Binary(op, a, b) => {
            let x = eval_tree(a, sigma, cfg)?;
            let y = eval_tree(b, sigma, cfg)?;
            apply_binary(*op, x, y, cfg)?
        }
        Expr::Ite(c, t, f) => {
            if eval_tree(c, sigma, cfg)? != 0 {
                eval_tree(t, sigma, cfg)?
            } else {
                eval_tree(f, sigma, cfg)?
            }
        }
        Expr::Opaque(a) => eval_tree(a, sigma, cfg)?,
    })
}

/// An expression compiled against a fixed variable layout and machine width.
#[derive(Debug, Clone)]
pub(crate) enum Code {
    Const(i64),
    Slot(usize),
    Unary(UnOp, Box<Code>),
    Binary(BinOp, Box<Code>, Box<Code>),
    Ite(Box<Code>, Box<Code>, Box<Code>),
}

impl Code {
    /// Panics if `slot_of` cannot place a variable of `e`.
    pub(crate) fn compile(
        e: &Expr,
        slot_of: &dyn Fn(&Ident) -> Option<usize>,
        cfg: MachineConfig,
    ) -> Code {
        let go = |e: &Expr| Box::new(Code::compile(e, slot_of, cfg));
        match e {
            Expr::Lit(n) => Code::Const(cfg.wrap(*n)),
            Expr::BoolLit(b) => Code::Const(i64::from(*b)),
            Expr::Width => Code::Const(cfg.wrap(i64::from(cfg.width()))),
            Expr::Var(x) => Code::Slot(slot_of(x).unwrap_or_else(|| panic!("no slot for `{x}`"))),
            Expr::Unary(op, a) => Code::Unary(*op, go(a)),
            Expr::Binary(op, a, b) => Code::Binary(*op, go(a), go(b)),
            Expr::Ite(c, t, f) => Code::Ite(go(c), go(t), go(f)),
            Expr::Opaque(a) => Code::compile(a, slot_of, cfg),
        }
    }

    pub(crate) fn run(&self, vals: &[i64], cfg: MachineConfig) -> Result<i64, FaultKind> {
        Ok(match self {
            Code::Const(v) => *v,
            Code::Slot(i) => vals[*i],
            Code::Unary(op, a) => apply_unary(*op, a.run(vals, cfg)?, cfg),
            Code::Binary(BinOp::LogAnd, a, b) => {
                i64::from(a.run(vals, cfg)? != 0 && b.run(vals, cfg)? != 0)
            }
            Code::Binary(BinOp::LogOr, a, b) => {
                i64::from(a.run(vals, cfg)? != 0 || b.run(vals, cfg)? != 0)
            }
            Code::Binary(op, a, b) => {
                let x = a.run(vals, cfg)?;
                let y = b.run(vals, cfg)?;
                apply_binary(*op, x, y, cfg)?
            }
            Code::Ite(c, t, f) => {
                if c.run(vals, cfg)? != 0 {
                    t.run(vals, cfg)?
                } else {
                    f.run(vals, cfg)?
                }
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::parse_expr;

    fn ev(src: &str, sigma: &[(&str, i64)], width: u32) -> Result<i64, EvalFault> {
        let s: State = sigma.iter().copied().collect();
        eval_expr(
            &parse_expr(src).unwrap(),
            &s,
            MachineConfig::new(width).unwrap(),
        )
    }

    #[test]
    fn examples() {
        assert_eq!(ev("5 & 3", &[], 8), Ok(1));
        assert_eq!(ev("x >> (WIDTH - 1)", &[("x", -3)], 4), Ok(-1));
        assert_eq!(ev("7 + 1", &[], 4), Ok(-8));
        assert_eq!(
            ev("x / y", &[("x", 1), ("y", 0)], 4),
            Err(EvalFault {
                kind: FaultKind::DivByZero,
                location: None
            })
        );
    }

    #[test]
    fn short_circuit_and_ite_skip_faults() {
        assert_eq!(ev("0 && 1 / 0", &[], 4), Ok(0));
        assert_eq!(ev("1 || 1 / 0", &[], 4), Ok(1));
        assert_eq!(ev("ite(1, 2, 1 % 0)", &[], 4), Ok(2));
        assert!(ev("ite(0, 2, 1 % 0)", &[], 4).is_err());
    }

    #[test]
    fn width_constant_and_literals_wrap() {
        assert_eq!(ev("WIDTH", &[], 8), Ok(8));
        assert_eq!(ev("WIDTH - 1", &[], 2), Ok(1));
        assert_eq!(ev("200", &[], 8), Ok(-56));
        assert_eq!(ev("~x", &[("x", 5)], 4), Ok(-6));
        assert_eq!(ev("!x", &[("x", 5)], 4), Ok(0));
        assert_eq!(ev("-x", &[("x", -8)], 4), Ok(-8));
    }

    #[test]
    fn opaque_is_transparent() {
        let e = Expr::opaque(parse_expr("x | 1").unwrap());
        let s: State = [("x", 4)].into_iter().collect();
        assert_eq!(eval_expr(&e, &s, MachineConfig::new(4).unwrap()), Ok(5));
    }

    /// Identities that pin down two's complement behavior, checked exhaustively.
    #[test]
    fn twos_complement_identities() {
        let x = Ident::new("x").unwrap();
        let exprs = [
            parse_expr("(x & x) == x").unwrap(),
            parse_expr("(x ^ x) == 0").unwrap(),
            parse_expr("~x == -x - 1").unwrap(),
            parse_expr("(x >> (WIDTH - 1) == 0) == (x >= 0)").unwrap(),
            parse_expr("(x >> (WIDTH - 1) == -1) == (x < 0)").unwrap(),
        ];
        for w in 2..=8 {
            let cfg = MachineConfig::new(w).unwrap();
            for v in cfg.values() {
                let s = State::new().with(&x, v);
                for e in &exprs {
                    assert_eq!(eval_expr(e, &s, cfg), Ok(1), "{e} at x={v}, width {w}");
                }
            }
        }
    }
}
