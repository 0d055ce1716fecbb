use alloc::boxed::Box;
use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

/// Words that can never be used as identifiers.
pub const RESERVED: &[&str] = &[
    "var", "havoc", "assume", "error", "if", "else", "while", "ite", "WIDTH", "true", "false",
    "opaque",
];

/// A program variable name.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Ident(String);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum IdentError {
    #[error("identifier is empty")]
    Empty,
    #[error("`{0}` is not a valid identifier")]
    Malformed(String),
    #[error("`{0}` is a reserved word")]
    Reserved(String),
}

impl Ident {
    pub fn new(name: &str) -> Result<Self, IdentError> {
        let mut chars = name.chars();
        let first = chars.next().ok_or(IdentError::Empty)?;
        if !(first.is_ascii_alphabetic() || first == '_')
            || !chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
        {
            return Err(IdentError::Malformed(name.to_string()));
        }
        if is_reserved(name) {
            return Err(IdentError::Reserved(name.to_string()));
        }
        Ok(Ident(name.to_string()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Ident {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

pub fn is_reserved(word: &str) -> bool {
    RESERVED.contains(&word)
}

/// Which family an operator belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OpClass {
    Bitvector,
    Relational,
    /// Arithmetic and logical connectives. `nonlinear` is set for `*`, `/`, `%`.
    Linear {
        nonlinear: bool,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Mod,
    BitAnd,
    BitOr,
    BitXor,
    Shl,
    Shr,
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
    LogAnd,
    LogOr,
}

impl BinOp {
    pub const ALL: [BinOp; 18] = [
        BinOp::Add,
        BinOp::Sub,
        BinOp::Mul,
        BinOp::Div,
        BinOp::Mod,
        BinOp::BitAnd,
        BinOp::BitOr,
        BinOp::BitXor,
        BinOp::Shl,
        BinOp::Shr,
        BinOp::Lt,
        BinOp::Le,
        BinOp::Gt,
        BinOp::Ge,
        BinOp::Eq,
        BinOp::Ne,
        BinOp::LogAnd,
        BinOp::LogOr,
    ];

    pub fn class(self) -> OpClass {
        use BinOp::*;
        match self {
            BitAnd | BitOr | BitXor | Shl | Shr => OpClass::Bitvector,
            Lt | Le | Gt | Ge | Eq | Ne => OpClass::Relational,
            Mul | Div | Mod => OpClass::Linear { nonlinear: true },
            Add | Sub | LogAnd | LogOr => OpClass::Linear { nonlinear: false },
        }
    }

    pub fn is_bitvector(self) -> bool {
        self.class() == OpClass::Bitvector
    }

    pub fn is_relational(self) -> bool {
        self.class() == OpClass::Relational
    }

    pub fn symbol(self) -> &'static str {
        use BinOp::*;
        match self {
            Add => "+",
            Sub => "-",
            Mul => "*",
            Div => "/",
            Mod => "%",
            BitAnd => "&",
            BitOr => "|",
            BitXor => "^",
            Shl => "<<",
            Shr => ">>",
            Lt => "<",
            Le => "<=",
            Gt => ">",
            Ge => ">=",
            Eq => "==",
            Ne => "!=",
            LogAnd => "&&",
            LogOr => "||",
        }
    }

    pub fn name(self) -> &'static str {
        use BinOp::*;
        match self {
            Add => "Add",
            Sub => "Sub",
            Mul => "Mul",
            Div => "Div",
            Mod => "Mod",
            BitAnd => "BitAnd",
            BitOr => "BitOr",
            BitXor => "BitXor",
            Shl => "Shl",
            Shr => "Shr",
            Lt => "Lt",
            Le => "Le",
            Gt => "Gt",
            Ge => "Ge",
            Eq => "Eq",
            Ne => "Ne",
            LogAnd => "LogAnd",
            LogOr => "LogOr",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        BinOp::ALL.into_iter().find(|op| op.name() == name)
    }

    /// Binding strength; larger binds tighter. All binary operators are left-associative.
    pub fn precedence(self) -> u8 {
        use BinOp::*;
        match self {
            LogOr => 1,
            LogAnd => 2,
            Lt | Le | Gt | Ge | Eq | Ne => 3,
            BitOr => 4,
            BitXor => 5,
            BitAnd => 6,
            Add | Sub => 7,
            Mul | Div | Mod => 8,
            Shl | Shr => 9,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum UnOp {
    Neg,
    LogNot,
    BitNot,
}

impl UnOp {
    pub fn symbol(self) -> &'static str {
        match self {
            UnOp::Neg => "-",
            UnOp::LogNot => "!",
            UnOp::BitNot => "~",
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            UnOp::Neg => "Neg",
            UnOp::LogNot => "LogNot",
            UnOp::BitNot => "BitNot",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        [UnOp::Neg, UnOp::LogNot, UnOp::BitNot]
            .into_iter()
            .find(|op| op.name() == name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    Lit(i64),
    BoolLit(bool),
    Var(Ident),
    /// The machine bit width, resolved at evaluation time.
    Width,
    Unary(UnOp, Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Ite(Box<Expr>, Box<Expr>, Box<Expr>),
    /// Residual bitvector operation left behind by the transformer. Transformation passes
    /// never look inside.
    Opaque(Box<Expr>),
}

impl Expr {
    pub fn var(id: &Ident) -> Expr {
        Expr::Var(id.clone())
    }

    pub fn unary(op: UnOp, e: Expr) -> Expr {
        Expr::Unary(op, Box::new(e))
    }

    pub fn binary(op: BinOp, l: Expr, r: Expr) -> Expr {
        Expr::Binary(op, Box::new(l), Box::new(r))
    }

    pub fn ite(c: Expr, t: Expr, e: Expr) -> Expr {
        Expr::Ite(Box::new(c), Box::new(t), Box::new(e))
    }

    pub fn opaque(e: Expr) -> Expr {
        Expr::Opaque(Box::new(e))
    }

    pub fn negation(e: Expr) -> Expr {
        Expr::unary(UnOp::LogNot, e)
    }

    /// Whether the top-level node is a bitvector operator (`& | ^ << >> ~`).
    pub fn is_bitvector_node(&self) -> bool {
        match self {
            Expr::Binary(op, ..) => op.is_bitvector(),
            Expr::Unary(UnOp::BitNot, _) => true,
            _ => false,
        }
    }

    pub fn children(&self) -> impl Iterator<Item = &Expr> {
        let (a, b, c): (Option<&Expr>, Option<&Expr>, Option<&Expr>) = match self {
            Expr::Lit(_) | Expr::BoolLit(_) | Expr::Var(_) | Expr::Width => (None, None, None),
            Expr::Unary(_, e) | Expr::Opaque(e) => (Some(e), None, None),
            Expr::Binary(_, l, r) => (Some(l), Some(r), None),
            Expr::Ite(c, t, e) => (Some(c), Some(t), Some(e)),
        };
        a.into_iter().chain(b).chain(c)
    }

    /// Replaces every `Var` for which `f` returns `Some`.
    pub fn substitute(&self, f: &dyn Fn(&Ident) -> Option<Expr>) -> Expr {
        match self {
            Expr::Var(id) => f(id).unwrap_or_else(|| self.clone()),
            Expr::Lit(_) | Expr::BoolLit(_) | Expr::Width => self.clone(),
            Expr::Unary(op, e) => Expr::unary(*op, e.substitute(f)),
            Expr::Binary(op, l, r) => Expr::binary(*op, l.substitute(f), r.substitute(f)),
            Expr::Ite(c, t, e) => Expr::ite(c.substitute(f), t.substitute(f), e.substitute(f)),
            Expr::Opaque(e) => Expr::opaque(e.substitute(f)),
        }
    }

    /// Removes `Opaque` wrappers, leaving the wrapped expression in place.
    pub fn strip_opaque(&self) -> Expr {
        match self {
            Expr::Opaque(e) => e.strip_opaque(),
            Expr::Lit(_) | Expr::BoolLit(_) | Expr::Var(_) | Expr::Width => self.clone(),
            Expr::Unary(op, e) => Expr::unary(*op, e.strip_opaque()),
            Expr::Binary(op, l, r) => Expr::binary(*op, l.strip_opaque(), r.strip_opaque()),
            Expr::Ite(c, t, e) => Expr::ite(c.strip_opaque(), t.strip_opaque(), e.strip_opaque()),
        }
    }
}

/// Exact set of identifiers occurring in `e`. `Opaque` contents are included.
pub fn free_vars(e: &Expr) -> BTreeSet<Ident> {
    let mut out = BTreeSet::new();
    collect_vars(e, &mut out);
    out
}

fn collect_vars(e: &Expr, out: &mut BTreeSet<Ident>) {
    if let Expr::Var(id) = e {
        out.insert(id.clone());
    }
    for c in e.children() {
        collect_vars(c, out);
    }
}

/// True iff `e` contains no bitvector operator, looking inside `Opaque` as well.
pub fn is_bitfree(e: &Expr) -> bool {
    !e.is_bitvector_node() && e.children().all(is_bitfree)
}

/// True iff every bitvector operator in `e` sits under an `Opaque` wrapper.
pub fn is_bitfree_outside_opaque(e: &Expr) -> bool {
    match e {
        Expr::Opaque(_) => true,
        _ => !e.is_bitvector_node() && e.children().all(is_bitfree_outside_opaque),
    }
}

/// Provenance of a statement: the preorder index of the source statement it derives from.
///
/// `aux` marks bookkeeping statements introduced by a pass (temporaries, guard scaffolding).
/// Only non-aux atomic statements are observation points for the reachability oracle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Origin {
    pub tag: u32,
    pub aux: bool,
}

impl Origin {
    pub fn primary(tag: u32) -> Self {
        Origin { tag, aux: false }
    }

    pub fn aux(tag: u32) -> Self {
        Origin { tag, aux: true }
    }
}

pub type Block = Vec<Stmt>;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum StmtKind {
    Assign(Ident, Expr),
    Havoc(Ident),
    Assume(Expr),
    Error,
    IfCond(Expr, Block, Block),
    IfNondet(Block, Block),
    While(Expr, Block),
}

/// A statement with optional provenance. Equality is structural and ignores `origin`.
#[derive(Debug, Clone, Eq)]
pub struct Stmt {
    pub kind: StmtKind,
    pub origin: Option<Origin>,
}

impl PartialEq for Stmt {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
    }
}

impl core::hash::Hash for Stmt {
    fn hash<H: core::hash::Hasher>(&self, state: &mut H) {
        self.kind.hash(state);
    }
}

impl Stmt {
    pub fn new(kind: StmtKind) -> Self {
        Stmt { kind, origin: None }
    }

    pub fn with_origin(kind: StmtKind, origin: Option<Origin>) -> Self {
        Stmt { kind, origin }
    }

    pub fn is_atomic(&self) -> bool {
        matches!(
            self.kind,
            StmtKind::Assign(..) | StmtKind::Havoc(_) | StmtKind::Assume(_) | StmtKind::Error
        )
    }

    /// Visits this statement and all nested statements in preorder.
    pub fn walk<'a>(&'a self, f: &mut dyn FnMut(&'a Stmt)) {
        f(self);
        match &self.kind {
            StmtKind::IfCond(_, t, e) | StmtKind::IfNondet(t, e) => {
                t.iter().for_each(|s| s.walk(f));
                e.iter().for_each(|s| s.walk(f));
            }
            StmtKind::While(_, b) => b.iter().for_each(|s| s.walk(f)),
            _ => {}
        }
    }

    /// Every expression that appears directly in this statement (not in nested blocks).
    pub fn exprs(&self) -> Vec<&Expr> {
        match &self.kind {
            StmtKind::Assign(_, e)
            | StmtKind::Assume(e)
            | StmtKind::IfCond(e, ..)
            | StmtKind::While(e, _) => alloc::vec![e],
            _ => Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Program {
    pub decls: Vec<Ident>,
    pub body: Block,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ScopeError {
    #[error("variable `{0}` is declared twice")]
    Duplicate(Ident),
    #[error("variable `{0}` is not declared")]
    Undeclared(Ident),
}

impl Program {
    pub fn walk<'a>(&'a self, f: &mut dyn FnMut(&'a Stmt)) {
        self.body.iter().for_each(|s| s.walk(f));
    }

    /// Number of statements, nested ones included.
    pub fn stmt_count(&self) -> usize {
        let mut n = 0;
        self.walk(&mut |_| n += 1);
        n
    }

    /// Checks that decls are unique and every used identifier is declared.
    pub fn check_scoping(&self) -> Result<(), ScopeError> {
        let mut declared = BTreeSet::new();
        for d in &self.decls {
            if !declared.insert(d) {
                return Err(ScopeError::Duplicate(d.clone()));
            }
        }
        let mut err = None;
        self.walk(&mut |s| {
            if err.is_some() {
                return;
            }
            let mut used = BTreeSet::new();
            match &s.kind {
                StmtKind::Assign(x, _) | StmtKind::Havoc(x) => {
                    used.insert(x.clone());
                }
                _ => {}
            }
            for e in s.exprs() {
                used.extend(free_vars(e));
            }
            if let Some(u) = used.into_iter().find(|u| !declared.contains(u)) {
                err = Some(ScopeError::Undeclared(u));
            }
        });
        err.map_or(Ok(()), Err)
    }

    /// Assigns each statement its preorder index as a primary origin.
    pub fn assign_origins(&mut self) {
        fn go(block: &mut Block, next: &mut u32) {
            for s in block {
                s.origin = Some(Origin::primary(*next));
                *next += 1;
                match &mut s.kind {
                    StmtKind::IfCond(_, t, e) | StmtKind::IfNondet(t, e) => {
                        go(t, next);
                        go(e, next);
                    }
                    StmtKind::While(_, b) => go(b, next),
                    _ => {}
                }
            }
        }
        let mut next = 0;
        go(&mut self.body, &mut next);
    }

    /// All origin tags carried by statements, in preorder, duplicates kept.
    pub fn origin_tags(&self) -> Vec<u32> {
        let mut out = Vec::new();
        self.walk(&mut |s| {
            if let Some(o) = s.origin {
                out.push(o.tag);
            }
        });
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::parse_expr;

    fn id(s: &str) -> Ident {
        Ident::new(s).unwrap()
    }

    #[test]
    fn ident_validation() {
        assert!(Ident::new("x_1").is_ok());
        assert!(Ident::new("_bb0").is_ok());
        assert_eq!(Ident::new(""), Err(IdentError::Empty));
        assert!(matches!(Ident::new("1x"), Err(IdentError::Malformed(_))));
        assert!(matches!(Ident::new("a-b"), Err(IdentError::Malformed(_))));
        for w in RESERVED {
            assert!(matches!(Ident::new(w), Err(IdentError::Reserved(_))));
        }
    }

    #[test]
    fn op_classes() {
        let bv: Vec<_> = BinOp::ALL
            .into_iter()
            .filter(|o| o.is_bitvector())
            .collect();
        assert_eq!(
            bv,
            [
                BinOp::BitAnd,
                BinOp::BitOr,
                BinOp::BitXor,
                BinOp::Shl,
                BinOp::Shr
            ]
        );
        assert_eq!(BinOp::Mod.class(), OpClass::Linear { nonlinear: true });
        assert_eq!(BinOp::Add.class(), OpClass::Linear { nonlinear: false });
        assert!(BinOp::Ne.is_relational());
    }

    #[test]
    fn free_vars_cases() {
        assert!(free_vars(&Expr::Lit(5)).is_empty());
        let e = parse_expr("x & (1 - s)").unwrap();
        assert_eq!(free_vars(&e), [id("s"), id("x")].into_iter().collect());
        let op = Expr::opaque(parse_expr("a | b").unwrap());
        assert_eq!(free_vars(&op), [id("a"), id("b")].into_iter().collect());
    }

    #[test]
    fn bitfree_cases() {
        assert!(is_bitfree(&parse_expr("x + 1 <= a").unwrap()));
        assert!(!is_bitfree(&parse_expr("x & a").unwrap()));
        assert!(!is_bitfree(
            &parse_expr("ite(x >= 0, x % 2, x & 1)").unwrap()
        ));
        assert!(!is_bitfree(&parse_expr("~x").unwrap()));
        let wrapped = Expr::opaque(parse_expr("x >> 1").unwrap());
        assert!(!is_bitfree(&wrapped));
        assert!(is_bitfree_outside_opaque(&wrapped));
    }

    #[test]
    fn stmt_equality_ignores_origin() {
        let a = Stmt::with_origin(StmtKind::Error, Some(Origin::primary(3)));
        let b = Stmt::new(StmtKind::Error);
        assert_eq!(a, b);
    }
}
