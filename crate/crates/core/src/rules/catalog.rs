use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::lang::{parse_expr, BinOp, Expr, Ident, UnOp};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RuleKind {
    /// Exact conditional equivalence `C ⇒ e_bv = e_int`.
    Rewrite,
    /// Conditional over-approximation of a relation or assignment by a linear constraint.
    Weaken,
}

/// Relation between a value `r` and a bitvector result. `Assign` stands for `r := e`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Relator {
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Assign,
}

impl Relator {
    pub fn from_binop(op: BinOp) -> Option<Self> {
        Some(match op {
            BinOp::Lt => Relator::Lt,
            BinOp::Le => Relator::Le,
            BinOp::Gt => Relator::Gt,
            BinOp::Ge => Relator::Ge,
            BinOp::Eq => Relator::Eq,
            _ => return None,
        })
    }

    /// The comparison this relator is checked as; `:=` is read as `==`.
    pub fn as_binop(self) -> BinOp {
        match self {
            Relator::Lt => BinOp::Lt,
            Relator::Le => BinOp::Le,
            Relator::Gt => BinOp::Gt,
            Relator::Ge => BinOp::Ge,
            Relator::Eq | Relator::Assign => BinOp::Eq,
        }
    }

    /// `a rel b` iff `b rel.mirrored() a`.
    pub fn mirrored(self) -> Self {
        match self {
            Relator::Lt => Relator::Gt,
            Relator::Le => Relator::Ge,
            Relator::Gt => Relator::Lt,
            Relator::Ge => Relator::Le,
            r => r,
        }
    }

    pub fn holds(self, a: i64, b: i64) -> bool {
        match self {
            Relator::Lt => a < b,
            Relator::Le => a <= b,
            Relator::Gt => a > b,
            Relator::Ge => a >= b,
            Relator::Eq | Relator::Assign => a == b,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Relator::Assign => ":=",
            r => r.as_binop().symbol(),
        }
    }
}

impl fmt::Display for Relator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RelClass {
    OpLe,
    OpGe,
    OpEq,
}

impl RelClass {
    pub fn members(self) -> &'static [Relator] {
        use Relator::*;
        match self {
            RelClass::OpLe => &[Lt, Le, Eq, Assign],
            RelClass::OpGe => &[Gt, Ge, Eq, Assign],
            RelClass::OpEq => &[Eq, Assign],
        }
    }

    pub fn contains(self, r: Relator) -> bool {
        self.members().contains(&r)
    }
}

/// The bitvector operator a rule applies to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BvOp {
    And,
    Or,
    Xor,
    Shl,
    Shr,
    Not,
}

impl BvOp {
    pub fn from_binop(op: BinOp) -> Option<Self> {
        Some(match op {
            BinOp::BitAnd => BvOp::And,
            BinOp::BitOr => BvOp::Or,
            BinOp::BitXor => BvOp::Xor,
            BinOp::Shl => BvOp::Shl,
            BinOp::Shr => BvOp::Shr,
            _ => return None,
        })
    }

    /// Splits a bitvector node into its operator and operands.
    pub fn split(e: &Expr) -> Option<(BvOp, &Expr, Option<&Expr>)> {
        match e {
            Expr::Binary(op, a, b) => BvOp::from_binop(*op).map(|o| (o, &**a, Some(&**b))),
            Expr::Unary(UnOp::BitNot, a) => Some((BvOp::Not, &**a, None)),
            _ => None,
        }
    }

    pub fn is_unary(self) -> bool {
        self == BvOp::Not
    }

    pub fn is_commutative(self) -> bool {
        matches!(self, BvOp::And | BvOp::Or | BvOp::Xor)
    }

    /// Rebuilds `e1 op e2` (or `~e1`).
    pub fn build(self, e1: Expr, e2: Option<Expr>) -> Expr {
        let bin = |op| {
            Expr::binary(
                op,
                e1.clone(),
                e2.clone().expect("binary operator needs two operands"),
            )
        };
        match self {
            BvOp::And => bin(BinOp::BitAnd),
            BvOp::Or => bin(BinOp::BitOr),
            BvOp::Xor => bin(BinOp::BitXor),
            BvOp::Shl => bin(BinOp::Shl),
            BvOp::Shr => bin(BinOp::Shr),
            BvOp::Not => Expr::unary(UnOp::BitNot, e1.clone()),
        }
    }
}

/// Where a weakening rule applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Site {
    /// `r rel (e1 ⊗ e2)` for every relator of the class, including `r := e1 ⊗ e2`.
    Relation(RelClass),
    /// Exactly `(e1 ⊗ e2) == 0`, in assumptions only.
    EqZero,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Hole {
    E1,
    E2,
    R,
}

impl Hole {
    pub fn name(self) -> &'static str {
        match self {
            Hole::E1 => "e1",
            Hole::E2 => "e2",
            Hole::R => "r",
        }
    }

    pub fn ident(self) -> Ident {
        Ident::new(self.name()).expect("hole names are identifiers")
    }

    pub fn from_ident(id: &Ident) -> Option<Self> {
        [Hole::E1, Hole::E2, Hole::R]
            .into_iter()
            .find(|h| h.name() == id.as_str())
    }
}

/// A syntactic side condition checked at match time rather than at run time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StaticGuard {
    IsConst(Hole),
}

/// One catalog entry. Templates are expressions over the holes `e1`, `e2` and `r`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    pub id: String,
    pub kind: RuleKind,
    pub op: BvOp,
    /// `None` for rewrite rules.
    pub site: Option<Site>,
    pub static_guard: Option<StaticGuard>,
    pub condition: Expr,
    /// Rewrite: the integer replacement. Weaken: the constraint over `r`, `e1`, `e2`.
    pub replacement: Expr,
    pub commuted: bool,
}

impl Rule {
    pub fn rel_class(&self) -> Option<RelClass> {
        match self.site {
            Some(Site::Relation(c)) => Some(c),
            _ => None,
        }
    }

    /// The matched bitvector expression `e1 ⊗ e2` over holes.
    pub fn pattern(&self) -> Expr {
        let e2 = (!self.op.is_unary()).then(|| Expr::Var(Hole::E2.ident()));
        self.op.build(Expr::Var(Hole::E1.ident()), e2)
    }

    /// Operand-swapped variant.
    fn commute(&self) -> Rule {
        let swap = |id: &Ident| match Hole::from_ident(id) {
            Some(Hole::E1) => Some(Expr::Var(Hole::E2.ident())),
            Some(Hole::E2) => Some(Expr::Var(Hole::E1.ident())),
            _ => None,
        };
        Rule {
            id: alloc::format!("{}{}", self.id, COMMUTED_SUFFIX),
            condition: self.condition.substitute(&swap),
            replacement: self.replacement.substitute(&swap),
            static_guard: self.static_guard.map(|StaticGuard::IsConst(h)| {
                StaticGuard::IsConst(match h {
                    Hole::E1 => Hole::E2,
                    Hole::E2 => Hole::E1,
                    Hole::R => Hole::R,
                })
            }),
            commuted: true,
            ..self.clone()
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.kind, self.site) {
            (RuleKind::Rewrite, _) => {
                write!(
                    f,
                    "{}: {} ⇒ {} ⇝ {}",
                    self.id,
                    self.condition,
                    self.pattern(),
                    self.replacement
                )
            }
            (RuleKind::Weaken, Some(Site::EqZero)) => write!(
                f,
                "{}: {} ⇒ ({}) == 0 ⇒ {}",
                self.id,
                self.condition,
                self.pattern(),
                self.replacement
            ),
            (RuleKind::Weaken, _) => write!(
                f,
                "{}: {} ⇒ r {:?} {} ⇒ {}",
                self.id,
                self.condition,
                self.rel_class().expect("relation site"),
                self.pattern(),
                self.replacement
            ),
        }
    }
}

/// Suffix appended to the id of a generated operand-swapped variant.
pub const COMMUTED_SUFFIX: &str = "-comm";

struct Row {
    id: &'static str,
    op: BvOp,
    site: Option<Site>,
    guard: Option<StaticGuard>,
    cond: &'static str,
    repl: &'static str,
    /// Condition and replacement are invariant under swapping e1 and e2.
    symmetric: bool,
}

const fn rw(
    id: &'static str,
    op: BvOp,
    cond: &'static str,
    repl: &'static str,
    symmetric: bool,
) -> Row {
    Row {
        id,
        op,
        site: None,
        guard: None,
        cond,
        repl,
        symmetric,
    }
}

const fn wk(
    id: &'static str,
    op: BvOp,
    site: Site,
    cond: &'static str,
    repl: &'static str,
    symmetric: bool,
) -> Row {
    Row {
        id,
        op,
        site: Some(site),
        guard: None,
        cond,
        repl,
        symmetric,
    }
}

use BvOp::{And, Not, Or, Shr, Xor};
use RelClass::{OpEq, OpGe, OpLe};

const REWRITE_ROWS: [Row; 11] = [
    rw("R-And-0", And, "e1 == 0", "0", false),
    rw(
        "R-And-1",
        And,
        "(e1 == 0 || e1 == 1) && e2 == 1",
        "e1",
        false,
    ),
    rw(
        "R-And-LOG",
        And,
        "(e1 == 0 || e1 == 1) && (e2 == 0 || e2 == 1)",
        "e1 && e2",
        true,
    ),
    rw("R-And-LBS", And, "e1 >= 0 && e2 == 1", "e1 % 2", false),
    rw("R-Or-0", Or, "e2 == 0", "e1", false),
    rw("R-Or-1", Or, "(e1 == 0 || e1 == 1) && e2 == 1", "1", false),
    rw("R-Xor-0", Xor, "e2 == 0", "e1", false),
    rw(
        "R-Xor-Eq",
        Xor,
        "e1 == 0 && e2 == 0 || e1 == 1 && e2 == 1",
        "0",
        true,
    ),
    rw(
        "R-Xor-Neq",
        Xor,
        "e1 == 1 && e2 == 0 || e1 == 0 && e2 == 1",
        "1",
        true,
    ),
    rw(
        "R-RightShift-Pos",
        Shr,
        "e1 >= 0 && e2 == WIDTH - 1",
        "0",
        false,
    ),
    rw(
        "R-RightShift-Neg",
        Shr,
        "e1 < 0 && e2 == WIDTH - 1",
        "-1",
        false,
    ),
];

const WEAKEN_ROWS: [Row; 13] = [
    wk(
        "W-And-Pos",
        And,
        Site::Relation(OpLe),
        "e1 >= 0 && e2 >= 0",
        "r <= e1 && r <= e2",
        true,
    ),
    wk(
        "W-And-Neg",
        And,
        Site::Relation(OpLe),
        "e1 < 0 && e2 < 0",
        "r <= e1 && r <= e2 && r < 0",
        true,
    ),
    wk(
        "W-And-Mix",
        And,
        Site::Relation(OpEq),
        "e1 >= 0 && e2 < 0",
        "0 <= r && r <= e1",
        false,
    ),
    wk(
        "R-Or-LOG",
        Or,
        Site::EqZero,
        "(e1 == 0 || e1 == 1) && (e2 == 0 || e2 == 1)",
        "e1 == 0 && e2 == 0",
        true,
    ),
    Row {
        id: "W-Or-Const",
        op: Or,
        site: Some(Site::Relation(OpGe)),
        guard: Some(StaticGuard::IsConst(Hole::E2)),
        cond: "e1 >= 0",
        repl: "r >= e2",
        symmetric: false,
    },
    wk(
        "W-Or-Pos",
        Or,
        Site::Relation(OpGe),
        "e1 >= 0 && e2 >= 0",
        "r >= e1 && r >= e2",
        true,
    ),
    wk(
        "W-Or-Neg",
        Or,
        Site::Relation(OpEq),
        "e1 < 0 && e2 < 0",
        "r >= e1 && r >= e2 && r < 0",
        true,
    ),
    wk(
        "W-Or-Mix",
        Or,
        Site::Relation(OpEq),
        "e1 >= 0 && e2 < 0",
        "e2 <= r && r < 0",
        false,
    ),
    wk(
        "W-XOr-Pos",
        Xor,
        Site::Relation(OpGe),
        "e1 >= 0 && e2 >= 0",
        "r >= 0",
        true,
    ),
    wk(
        "W-XOr-Neg",
        Xor,
        Site::Relation(OpGe),
        "e1 < 0 && e2 < 0",
        "r >= 0",
        true,
    ),
    wk(
        "W-XOr-Mix",
        Xor,
        Site::Relation(OpLe),
        "e1 >= 0 && e2 < 0",
        "r < 0",
        false,
    ),
    wk(
        "W-Cpl-Pos",
        Not,
        Site::Relation(OpLe),
        "e1 >= 0",
        "r < 0",
        true,
    ),
    wk(
        "W-Cpl-Neg",
        Not,
        Site::Relation(OpGe),
        "e1 < 0",
        "r >= 0",
        true,
    ),
];

fn build(row: &Row) -> Rule {
    let parse = |s: &str| parse_expr(s).unwrap_or_else(|e| panic!("bad template `{s}`: {e}"));
    Rule {
        id: row.id.to_string(),
        kind: if row.site.is_some() {
            RuleKind::Weaken
        } else {
            RuleKind::Rewrite
        },
        op: row.op,
        site: row.site,
        static_guard: row.guard,
        condition: parse(row.cond),
        replacement: parse(row.repl),
        commuted: false,
    }
}

/// A deliberately broken catalog entry, used to show the checks are not vacuous.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mutation {
    /// `R-And-1` with its condition replaced by `true`.
    AndOneUnconditional,
    /// `R-Or-1` with replacement `0`.
    OrOneZero,
    /// `W-And-Pos` with its constraint negated.
    AndPosNegated,
}

impl Mutation {
    pub const ALL: [Mutation; 3] = [
        Mutation::AndOneUnconditional,
        Mutation::OrOneZero,
        Mutation::AndPosNegated,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Mutation::AndOneUnconditional => "and1-uncond",
            Mutation::OrOneZero => "or1-zero",
            Mutation::AndPosNegated => "andpos-negated",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Mutation::ALL.into_iter().find(|m| m.name() == s)
    }

    pub fn target(self) -> &'static str {
        match self {
            Mutation::AndOneUnconditional => "R-And-1",
            Mutation::OrOneZero => "R-Or-1",
            Mutation::AndPosNegated => "W-And-Pos",
        }
    }

    fn apply(self, rule: &mut Rule) {
        match self {
            Mutation::AndOneUnconditional => rule.condition = Expr::BoolLit(true),
            Mutation::OrOneZero => rule.replacement = Expr::Lit(0),
            Mutation::AndPosNegated => rule.replacement = Expr::negation(rule.replacement.clone()),
        }
    }
}

/// The ordered rule catalog: table order, each generated commuted variant immediately
/// after its base rule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Catalog {
    rules: Vec<Rule>,
}

impl Catalog {
    pub fn standard() -> Self {
        let mut rules = Vec::new();
        for row in REWRITE_ROWS.iter().chain(WEAKEN_ROWS.iter()) {
            let base = build(row);
            let commuted = (base.op.is_commutative() && !row.symmetric).then(|| base.commute());
            rules.push(base);
            rules.extend(commuted);
        }
        Catalog { rules }
    }

    /// The standard catalog with one base rule broken.
    pub fn mutated(m: Mutation) -> Self {
        let mut c = Self::standard();
        let rule = c
            .rules
            .iter_mut()
            .find(|r| r.id == m.target())
            .expect("mutation target is in the catalog");
        m.apply(rule);
        c
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn get(&self, id: &str) -> Option<&Rule> {
        self.rules.iter().find(|r| r.id == id)
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.rules.iter().map(|r| r.id.as_str())
    }

    /// Rules in table order, without generated variants.
    pub fn base_rules(&self) -> impl Iterator<Item = &Rule> {
        self.rules.iter().filter(|r| !r.commuted)
    }
}

impl Default for Catalog {
    fn default() -> Self {
        Self::standard()
    }
}

/// The standard catalog as a list.
pub fn catalog() -> Vec<Rule> {
    Catalog::standard().rules
}
