//! Canonical text form: one statement per line, two-space indentation, minimal parentheses.

use alloc::string::String;
use core::fmt::{self, Write};

use super::ast::{BinOp, Block, Expr, Program, Stmt, StmtKind, UnOp};

const PREC_ITE: u8 = 0;
const PREC_UNARY: u8 = 10;
const PREC_ATOM: u8 = 11;

fn prec(e: &Expr) -> u8 {
    match e {
        Expr::Ite(..) => PREC_ITE,
        Expr::Binary(op, ..) => op.precedence(),
        Expr::Unary(..) => PREC_UNARY,
        _ => PREC_ATOM,
    }
}

fn write_at(out: &mut dyn Write, e: &Expr, min: u8) -> fmt::Result {
    if prec(e) < min {
        out.write_char('(')?;
        write_expr(out, e)?;
        out.write_char(')')
    } else {
        write_expr(out, e)
    }
}

// Operands of `& ^ |` that are themselves a different binary operator are always
// parenthesized, as in `s & (1 - s)`.
fn write_operand(out: &mut dyn Write, parent: BinOp, child: &Expr, min: u8) -> fmt::Result {
    let clarify = matches!(parent, BinOp::BitAnd | BinOp::BitOr | BinOp::BitXor)
        && matches!(child, Expr::Binary(op, ..) if *op != parent);
    write_at(out, child, if clarify { PREC_UNARY } else { min })
}

fn write_expr(out: &mut dyn Write, e: &Expr) -> fmt::Result {
    match e {
        Expr::Lit(n) => write!(out, "{n}"),
        Expr::BoolLit(b) => write!(out, "{b}"),
        Expr::Var(id) => write!(out, "{id}"),
        Expr::Width => out.write_str("WIDTH"),
        // `-3` would re-parse as a negative literal
        Expr::Unary(UnOp::Neg, inner) if matches!(**inner, Expr::Lit(n) if n >= 0) => {
            write!(out, "-(")?;
            write_expr(out, inner)?;
            out.write_char(')')
        }
        Expr::Unary(op, inner) => {
            out.write_str(op.symbol())?;
            write_at(out, inner, PREC_UNARY)
        }
        Expr::Binary(op, l, r) => {
            let p = op.precedence();
            write_operand(out, *op, l, p)?;
            write!(out, " {} ", op.symbol())?;
            write_operand(out, *op, r, p + 1)
        }
        Expr::Ite(c, t, f) => {
            write_at(out, c, 1)?;
            out.write_str(" ? ")?;
            write_at(out, t, 1)?;
            out.write_str(" : ")?;
            write_at(out, f, 1)
        }
        Expr::Opaque(inner) => {
            out.write_str("opaque(")?;
            write_expr(out, inner)?;
            out.write_char(')')
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_expr(f, self)
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct PrintOptions {
    /// Emit origin tags as trailing `// @N` comments.
    pub annotate: bool,
}

struct Printer<'a> {
    out: &'a mut dyn Write,
    opts: PrintOptions,
}

impl Printer<'_> {
    fn indent(&mut self, depth: usize) -> fmt::Result {
        for _ in 0..depth {
            self.out.write_str("  ")?;
        }
        Ok(())
    }

    fn tag(&mut self, s: &Stmt) -> fmt::Result {
        match s.origin {
            Some(o) if self.opts.annotate => {
                write!(
                    self.out,
                    " // @{}{}",
                    o.tag,
                    if o.aux { " aux" } else { "" }
                )
            }
            _ => Ok(()),
        }
    }

    fn block(&mut self, b: &Block, depth: usize) -> fmt::Result {
        b.iter().try_for_each(|s| self.stmt(s, depth))
    }

    fn stmt(&mut self, s: &Stmt, depth: usize) -> fmt::Result {
        self.indent(depth)?;
        match &s.kind {
            StmtKind::Assign(x, e) => {
                write!(self.out, "{x} := {e};")?;
                self.tag(s)?;
            }
            StmtKind::Havoc(x) => {
                write!(self.out, "havoc {x};")?;
                self.tag(s)?;
            }
            StmtKind::Assume(e) => {
                write!(self.out, "assume({e});")?;
                self.tag(s)?;
            }
            StmtKind::Error => {
                self.out.write_str("error;")?;
                self.tag(s)?;
            }
            StmtKind::IfCond(c, t, e) => {
                write!(self.out, "if ({c}) {{")?;
                self.tail(s, t, e, depth)?;
            }
            StmtKind::IfNondet(t, e) => {
                self.out.write_str("if (*) {")?;
                self.tail(s, t, e, depth)?;
            }
            StmtKind::While(c, b) => {
                write!(self.out, "while ({c}) {{")?;
                self.tag(s)?;
                self.out.write_char('\n')?;
                self.block(b, depth + 1)?;
                self.indent(depth)?;
                self.out.write_char('}')?;
            }
        }
        self.out.write_char('\n')
    }

    fn tail(&mut self, s: &Stmt, t: &Block, e: &Block, depth: usize) -> fmt::Result {
        self.tag(s)?;
        self.out.write_char('\n')?;
        self.block(t, depth + 1)?;
        self.indent(depth)?;
        self.out.write_char('}')?;
        if !e.is_empty() {
            self.out.write_str(" else {\n")?;
            self.block(e, depth + 1)?;
            self.indent(depth)?;
            self.out.write_char('}')?;
        }
        Ok(())
    }
}

pub fn write_program(out: &mut dyn Write, p: &Program, opts: PrintOptions) -> fmt::Result {
    for d in &p.decls {
        writeln!(out, "var {d};")?;
    }
    Printer { out, opts }.block(&p.body, 0)
}

pub fn pretty_print(p: &Program) -> String {
    pretty_print_with(p, PrintOptions::default())
}

pub fn pretty_print_with(p: &Program, opts: PrintOptions) -> String {
    let mut s = String::new();
    write_program(&mut s, p, opts).expect("writing to a String cannot fail");
    s
}

/// Single-line rendering of an atomic statement, without the trailing `;`.
pub fn stmt_label(s: &Stmt) -> String {
    match &s.kind {
        StmtKind::Assign(x, e) => alloc::format!("{x} := {e}"),
        StmtKind::Havoc(x) => alloc::format!("havoc {x}"),
        StmtKind::Assume(e) => alloc::format!("assume({e})"),
        StmtKind::Error => String::from("error"),
        StmtKind::IfCond(c, ..) => alloc::format!("if ({c})"),
        StmtKind::IfNondet(..) => String::from("if (*)"),
        StmtKind::While(c, _) => alloc::format!("while ({c})"),
    }
}
