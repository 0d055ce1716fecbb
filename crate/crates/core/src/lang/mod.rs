//! Abstract syntax, text syntax, parser and printer for the bitvector language.

mod ast;
mod parse;
mod print;

pub use ast::{
    free_vars, is_bitfree, is_bitfree_outside_opaque, is_reserved, BinOp, Block, Expr, Ident,
    IdentError, OpClass, Origin, Program, ScopeError, Stmt, StmtKind, UnOp, RESERVED,
};
pub use parse::{parse_expr, parse_expr_in, parse_program, ParseError};
pub use print::{pretty_print, pretty_print_with, stmt_label, write_program, PrintOptions};
