//! Lexer and recursive-descent parser for the text syntax.
//!
//! ```text
//! program := (decl | stmt)*
//! decl    := "var" ident ("," ident)* ";"
//! stmt    := ident ":=" "*" ";" | ident ":=" expr ";" | "havoc" ident ";"
//!          | "assume" expr ";" | "error" ["(" ")"] ";"
//!          | "if" "(" ("*" | expr) ")" block ["else" (block | if-stmt)]
//!          | "while" "(" expr ")" block
//! ```
//!
//! Expression precedence, loosest first: `?:`, `||`, `&&`, relational, `|`, `^`, `&`,
//! `+ -`, `* / %`, `<< >>`, unary. A `-` directly followed by an integer literal folds into
//! a negative literal.

use alloc::boxed::Box;
use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::ast::{
    free_vars, is_reserved, BinOp, Block, Expr, Ident, Program, Stmt, StmtKind, UnOp,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("{line}:{col}: syntax error: {msg}")]
    Syntax { line: u32, col: u32, msg: String },
    #[error("{line}:{col}: undeclared variable `{name}`")]
    Undeclared { line: u32, col: u32, name: String },
    #[error("{line}:{col}: reserved word `{word}` used as an identifier")]
    Reserved { line: u32, col: u32, word: String },
    #[error("{line}:{col}: variable `{name}` declared twice")]
    Duplicate { line: u32, col: u32, name: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Int(i64),
    Word(String),
    Sym(&'static str),
    Eof,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: u32,
    col: u32,
}

// Longest first so that maximal munch works with a linear scan.
const SYMBOLS: &[&str] = &[
    ":=", "<<", ">>", "<=", ">=", "==", "!=", "&&", "||", "+", "-", "*", "/", "%", "&", "|", "^",
    "~", "!", "<", ">", "(", ")", "{", "}", ";", ",", "?", ":",
];

fn lex(src: &str) -> Result<Vec<Token>, ParseError> {
    let bytes = src.as_bytes();
    let mut toks = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1u32, 1u32);
    let err = |line, col, msg: String| ParseError::Syntax { line, col, msg };
    while i < bytes.len() {
        let c = bytes[i];
        if c == b'\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_ascii_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if src[i..].starts_with("//") {
            while i < bytes.len() && bytes[i] != b'\n' {
                i += 1;
            }
            continue;
        }
        if src[i..].starts_with("/*") {
            let (l0, c0) = (line, col);
            i += 2;
            col += 2;
            loop {
                if i >= bytes.len() {
                    return Err(err(l0, c0, "unterminated comment".to_string()));
                }
                if src[i..].starts_with("*/") {
                    i += 2;
                    col += 2;
                    break;
                }
                if bytes[i] == b'\n' {
                    line += 1;
                    col = 1;
                } else {
                    col += 1;
                }
                i += 1;
            }
            continue;
        }
        let (tl, tc) = (line, col);
        let start = i;
        let tok = if c.is_ascii_digit() {
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            if i < bytes.len() && (bytes[i].is_ascii_alphabetic() || bytes[i] == b'_') {
                return Err(err(tl, tc, "malformed number".to_string()));
            }
            let text = &src[start..i];
            let v: i64 = text.parse().map_err(|_| {
                err(
                    tl,
                    tc,
                    alloc::format!("integer literal `{text}` out of range"),
                )
            })?;
            Tok::Int(v)
        } else if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            Tok::Word(src[start..i].to_string())
        } else if let Some(sym) = SYMBOLS.iter().find(|s| src[i..].starts_with(**s)) {
            i += sym.len();
            Tok::Sym(sym)
        } else {
            let ch = src[i..].chars().next().unwrap_or('?');
            return Err(err(tl, tc, alloc::format!("unexpected character `{ch}`")));
        };
        col += (i - start) as u32;
        toks.push(Token {
            tok,
            line: tl,
            col: tc,
        });
    }
    toks.push(Token {
        tok: Tok::Eof,
        line,
        col,
    });
    Ok(toks)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    /// Position of each variable use, for undeclared-variable reporting.
    uses: Vec<(Ident, u32, u32)>,
}

type PResult<T> = Result<T, ParseError>;
/// Declarations with their source line and column.
type Decls = Vec<(Ident, u32, u32)>;

impl Parser {
    fn new(src: &str) -> PResult<Self> {
        Ok(Parser {
            toks: lex(src)?,
            pos: 0,
            uses: Vec::new(),
        })
    }

    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].tok
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, msg: impl Into<String>) -> PResult<T> {
        let t = self.peek();
        Err(ParseError::Syntax {
            line: t.line,
            col: t.col,
            msg: msg.into(),
        })
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(&self.peek().tok, Tok::Sym(x) if *x == s)
    }

    fn is_word(&self, w: &str) -> bool {
        matches!(&self.peek().tok, Tok::Word(x) if x == w)
    }

    fn eat_sym(&mut self, s: &str) -> bool {
        if self.is_sym(s) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect_sym(&mut self, s: &str) -> PResult<()> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            self.error(alloc::format!(
                "expected `{s}`, found {}",
                describe(&self.peek().tok)
            ))
        }
    }

    fn expect_word(&mut self, w: &str) -> PResult<()> {
        if self.is_word(w) {
            self.bump();
            Ok(())
        } else {
            self.error(alloc::format!(
                "expected `{w}`, found {}",
                describe(&self.peek().tok)
            ))
        }
    }

    fn ident(&mut self) -> PResult<(Ident, u32, u32)> {
        let t = self.peek().clone();
        match &t.tok {
            Tok::Word(w) if is_reserved(w) => Err(ParseError::Reserved {
                line: t.line,
                col: t.col,
                word: w.clone(),
            }),
            Tok::Word(w) => {
                self.bump();
                let id = Ident::new(w).map_err(|e| ParseError::Syntax {
                    line: t.line,
                    col: t.col,
                    msg: e.to_string(),
                })?;
                Ok((id, t.line, t.col))
            }
            other => self.error(alloc::format!(
                "expected identifier, found {}",
                describe(other)
            )),
        }
    }

    fn program(&mut self) -> PResult<(Decls, Block)> {
        let mut decls = Vec::new();
        let mut body = Vec::new();
        while self.peek().tok != Tok::Eof {
            if self.is_word("var") {
                self.bump();
                loop {
                    decls.push(self.ident()?);
                    if !self.eat_sym(",") {
                        break;
                    }
                }
                self.expect_sym(";")?;
            } else {
                body.push(self.stmt()?);
            }
        }
        Ok((decls, body))
    }

    fn block(&mut self) -> PResult<Block> {
        self.expect_sym("{")?;
        let mut out = Vec::new();
        while !self.is_sym("}") {
            if self.peek().tok == Tok::Eof {
                return self.error("unexpected end of input, expected `}`");
            }
            if self.is_word("var") {
                return self.error("declarations are only allowed at top level");
            }
            out.push(self.stmt()?);
        }
        self.bump();
        Ok(out)
    }

    fn stmt(&mut self) -> PResult<Stmt> {
        let t = self.peek().clone();
        let kind = match &t.tok {
            Tok::Word(w) if w == "havoc" => {
                self.bump();
                let x = self.use_ident()?;
                self.expect_sym(";")?;
                StmtKind::Havoc(x)
            }
            Tok::Word(w) if w == "assume" => {
                self.bump();
                let e = self.expr()?;
                self.expect_sym(";")?;
                StmtKind::Assume(e)
            }
            Tok::Word(w) if w == "error" => {
                self.bump();
                if self.eat_sym("(") {
                    self.expect_sym(")")?;
                }
                self.expect_sym(";")?;
                StmtKind::Error
            }
            Tok::Word(w) if w == "if" => return self.if_stmt(),
            Tok::Word(w) if w == "while" => {
                self.bump();
                self.expect_sym("(")?;
                let c = self.expr()?;
                self.expect_sym(")")?;
                let body = self.block()?;
                StmtKind::While(c, body)
            }
            Tok::Word(_) => {
                let x = self.use_ident()?;
                self.expect_sym(":=")?;
                if self.is_sym("*") && matches!(self.peek_at(1), Tok::Sym(";")) {
                    self.bump();
                    self.bump();
                    StmtKind::Havoc(x)
                } else {
                    let e = self.expr()?;
                    self.expect_sym(";")?;
                    StmtKind::Assign(x, e)
                }
            }
            other => {
                return self.error(alloc::format!(
                    "expected statement, found {}",
                    describe(other)
                ))
            }
        };
        Ok(Stmt::new(kind))
    }

    fn if_stmt(&mut self) -> PResult<Stmt> {
        self.expect_word("if")?;
        self.expect_sym("(")?;
        let nondet = self.is_sym("*") && matches!(self.peek_at(1), Tok::Sym(")"));
        let cond = if nondet {
            self.bump();
            None
        } else {
            Some(self.expr()?)
        };
        self.expect_sym(")")?;
        let then = self.block()?;
        let els = if self.is_word("else") {
            self.bump();
            if self.is_word("if") {
                alloc::vec![self.if_stmt()?]
            } else {
                self.block()?
            }
        } else {
            Vec::new()
        };
        Ok(Stmt::new(match cond {
            Some(c) => StmtKind::IfCond(c, then, els),
            None => StmtKind::IfNondet(then, els),
        }))
    }

    fn use_ident(&mut self) -> PResult<Ident> {
        let (id, l, c) = self.ident()?;
        self.uses.push((id.clone(), l, c));
        Ok(id)
    }

    fn expr(&mut self) -> PResult<Expr> {
        let c = self.binary(1)?;
        if self.eat_sym("?") {
            let t = self.expr()?;
            self.expect_sym(":")?;
            let e = self.expr()?;
            return Ok(Expr::ite(c, t, e));
        }
        Ok(c)
    }

    fn binop_here(&self) -> Option<BinOp> {
        let Tok::Sym(s) = &self.peek().tok else {
            return None;
        };
        BinOp::ALL.into_iter().find(|op| op.symbol() == *s)
    }

    fn binary(&mut self, min_prec: u8) -> PResult<Expr> {
        let mut lhs = self.unary()?;
        while let Some(op) = self.binop_here() {
            let p = op.precedence();
            if p < min_prec {
                break;
            }
            self.bump();
            let rhs = self.binary(p + 1)?;
            lhs = Expr::binary(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> PResult<Expr> {
        if self.is_sym("-") {
            if let Tok::Int(n) = self.peek_at(1) {
                let n = *n;
                self.bump();
                self.bump();
                return Ok(Expr::Lit(-n));
            }
        }
        let op = if self.is_sym("-") {
            Some(UnOp::Neg)
        } else if self.is_sym("!") {
            Some(UnOp::LogNot)
        } else if self.is_sym("~") {
            Some(UnOp::BitNot)
        } else {
            None
        };
        if let Some(op) = op {
            self.bump();
            return Ok(Expr::unary(op, self.unary()?));
        }
        self.primary()
    }

    fn primary(&mut self) -> PResult<Expr> {
        let t = self.peek().clone();
        match &t.tok {
            Tok::Int(n) => {
                self.bump();
                Ok(Expr::Lit(*n))
            }
            Tok::Sym("(") => {
                self.bump();
                let e = self.expr()?;
                self.expect_sym(")")?;
                Ok(e)
            }
            Tok::Sym("*") => {
                self.error("nondeterministic `*` is only allowed as `x := *;` or `if (*)`")
            }
            Tok::Word(w) => match w.as_str() {
                "true" => {
                    self.bump();
                    Ok(Expr::BoolLit(true))
                }
                "false" => {
                    self.bump();
                    Ok(Expr::BoolLit(false))
                }
                "WIDTH" => {
                    self.bump();
                    Ok(Expr::Width)
                }
                "ite" if matches!(self.peek_at(1), Tok::Sym("(")) => {
                    self.bump();
                    self.bump();
                    let c = self.expr()?;
                    self.expect_sym(",")?;
                    let a = self.expr()?;
                    self.expect_sym(",")?;
                    let b = self.expr()?;
                    self.expect_sym(")")?;
                    Ok(Expr::ite(c, a, b))
                }
                "opaque" if matches!(self.peek_at(1), Tok::Sym("(")) => {
                    self.bump();
                    self.bump();
                    let e = self.expr()?;
                    self.expect_sym(")")?;
                    Ok(Expr::Opaque(Box::new(e)))
                }
                _ => Ok(Expr::Var(self.use_ident()?)),
            },
            other => self.error(alloc::format!(
                "expected expression, found {}",
                describe(other)
            )),
        }
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Int(n) => alloc::format!("integer `{n}`"),
        Tok::Word(w) => alloc::format!("`{w}`"),
        Tok::Sym(s) => alloc::format!("`{s}`"),
        Tok::Eof => "end of input".to_string(),
    }
}

/// Parses a whole program, checks scoping and assigns preorder origin tags.
pub fn parse_program(src: &str) -> Result<Program, ParseError> {
    let mut p = Parser::new(src)?;
    let (decls, body) = p.program()?;
    let mut seen = BTreeSet::new();
    for (d, line, col) in &decls {
        if !seen.insert(d.clone()) {
            return Err(ParseError::Duplicate {
                line: *line,
                col: *col,
                name: d.to_string(),
            });
        }
    }
    if let Some((id, line, col)) = p.uses.iter().find(|(id, ..)| !seen.contains(id)) {
        return Err(ParseError::Undeclared {
            line: *line,
            col: *col,
            name: id.to_string(),
        });
    }
    let mut prog = Program {
        decls: decls.into_iter().map(|(d, ..)| d).collect(),
        body,
    };
    prog.assign_origins();
    Ok(prog)
}

/// Parses a standalone expression. No scoping check is performed.
pub fn parse_expr(src: &str) -> Result<Expr, ParseError> {
    let mut p = Parser::new(src)?;
    let e = p.expr()?;
    if p.peek().tok != Tok::Eof {
        return p.error(alloc::format!(
            "trailing input: {}",
            describe(&p.peek().tok)
        ));
    }
    Ok(e)
}

/// Parses an expression and requires its variables to be among `decls`.
pub fn parse_expr_in(src: &str, decls: &[Ident]) -> Result<Expr, ParseError> {
    let e = parse_expr(src)?;
    if let Some(v) = free_vars(&e).into_iter().find(|v| !decls.contains(v)) {
        return Err(ParseError::Undeclared {
            line: 1,
            col: 1,
            name: v.to_string(),
        });
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn id(s: &str) -> Ident {
        Ident::new(s).unwrap()
    }

    fn v(s: &str) -> Expr {
        Expr::Var(id(s))
    }

    #[test]
    fn parses_bitand_assignment() {
        let p = parse_program("var x; var a; x := x & a;").unwrap();
        assert_eq!(p.decls, vec![id("x"), id("a")]);
        assert_eq!(
            p.body,
            vec![Stmt::new(StmtKind::Assign(
                id("x"),
                Expr::binary(BinOp::BitAnd, v("x"), v("a"))
            ))]
        );
    }

    #[test]
    fn parses_ite_call() {
        let p = parse_program("var s; s := ite(s >= 0, s % 2, s);").unwrap();
        let StmtKind::Assign(_, Expr::Ite(c, t, e)) = &p.body[0].kind else {
            panic!("expected ite assignment");
        };
        assert_eq!(**c, Expr::binary(BinOp::Ge, v("s"), Expr::Lit(0)));
        assert_eq!(**t, Expr::binary(BinOp::Mod, v("s"), Expr::Lit(2)));
        assert_eq!(**e, v("s"));
    }

    #[test]
    fn undeclared_variable_is_reported() {
        let err = parse_program("var x;\nx := y;").unwrap_err();
        assert_eq!(
            err,
            ParseError::Undeclared {
                line: 2,
                col: 6,
                name: "y".into()
            }
        );
    }

    #[test]
    fn reserved_word_misuse() {
        assert!(matches!(
            parse_program("var while;"),
            Err(ParseError::Reserved { .. })
        ));
        assert!(matches!(
            parse_program("var x; havoc WIDTH;"),
            Err(ParseError::Reserved { .. })
        ));
    }

    #[test]
    fn syntax_error_location() {
        let err = parse_program("var x;\n  x := (x + ;").unwrap_err();
        assert!(
            matches!(
                err,
                ParseError::Syntax {
                    line: 2,
                    col: 13,
                    ..
                }
            ),
            "{err:?}"
        );
    }

    #[test]
    fn precedence_table() {
        // shifts bind tighter than multiplication
        assert_eq!(
            parse_expr("a * b << c").unwrap(),
            Expr::binary(BinOp::Mul, v("a"), Expr::binary(BinOp::Shl, v("b"), v("c")))
        );
        // & binds tighter than ^ which binds tighter than |
        assert_eq!(
            parse_expr("a | b ^ c & d").unwrap(),
            Expr::binary(
                BinOp::BitOr,
                v("a"),
                Expr::binary(
                    BinOp::BitXor,
                    v("b"),
                    Expr::binary(BinOp::BitAnd, v("c"), v("d"))
                )
            )
        );
        // bitwise binds tighter than relational
        assert_eq!(
            parse_expr("x & 1 == 0").unwrap(),
            Expr::binary(
                BinOp::Eq,
                Expr::binary(BinOp::BitAnd, v("x"), Expr::Lit(1)),
                Expr::Lit(0)
            )
        );
        assert_eq!(
            parse_expr("a - b - c").unwrap(),
            Expr::binary(BinOp::Sub, Expr::binary(BinOp::Sub, v("a"), v("b")), v("c"))
        );
    }

    #[test]
    fn negative_literal_folding() {
        assert_eq!(parse_expr("-3").unwrap(), Expr::Lit(-3));
        assert_eq!(parse_expr("-x").unwrap(), Expr::unary(UnOp::Neg, v("x")));
        assert_eq!(
            parse_expr("-(3)").unwrap(),
            Expr::unary(UnOp::Neg, Expr::Lit(3))
        );
        assert_eq!(
            parse_expr("x - -1").unwrap(),
            Expr::binary(BinOp::Sub, v("x"), Expr::Lit(-1))
        );
    }

    #[test]
    fn nondet_forms() {
        let p = parse_program("var x; x := *; if (*) { error(); } else { havoc x; }").unwrap();
        assert_eq!(p.body[0].kind, StmtKind::Havoc(id("x")));
        assert!(matches!(p.body[1].kind, StmtKind::IfNondet(..)));
        assert!(parse_program("var x; x := * + 1;").is_err());
        assert!(parse_program("var x; x := 1 + *;").is_err());
    }

    #[test]
    fn origins_are_preorder_indices() {
        let p =
            parse_program("var x; while (x > 0) { x := x - 1; if (x == 2) { error; } } havoc x;")
                .unwrap();
        assert_eq!(p.origin_tags(), vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn else_if_chains_nest() {
        let p = parse_program("var x; if (x == 0) { } else if (x == 1) { error; }").unwrap();
        let StmtKind::IfCond(_, _, els) = &p.body[0].kind else {
            panic!()
        };
        assert!(matches!(els[0].kind, StmtKind::IfCond(..)));
    }

    #[test]
    fn comments_are_skipped() {
        let p = parse_program("// header\nvar x; /* multi\nline */ x := 1; // trailing").unwrap();
        assert_eq!(p.body.len(), 1);
    }
}
