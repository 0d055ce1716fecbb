use alloc::vec::Vec;

use super::*;
use crate::lang::{is_bitfree, parse_expr, parse_program, Expr, Ident};

fn ids<'a>(v: &'a [RuleInstance<'_>]) -> Vec<&'a str> {
    v.iter().map(|ri| ri.rule.id.as_str()).collect()
}

fn e(s: &str) -> Expr {
    parse_expr(s).unwrap()
}

#[test]
fn catalog_shape() {
    let c = Catalog::standard();
    let base: Vec<_> = c.base_rules().collect();
    assert_eq!(base.len(), 24);
    assert_eq!(
        base.iter().filter(|r| r.kind == RuleKind::Rewrite).count(),
        11
    );
    assert_eq!(c.rules().len(), 34);
    assert_eq!(catalog().len(), 34);
    assert!(c.get("R-RightShift-Pos-comm").is_none());
    assert!(c.get("W-Cpl-Pos-comm").is_none());
    let and0c = c.get("R-And-0-comm").unwrap();
    assert_eq!(and0c.condition, e("e2 == 0"));
    assert_eq!(and0c.replacement, e("0"));
    let orc = c.get("W-Or-Const-comm").unwrap();
    assert_eq!(orc.static_guard, Some(StaticGuard::IsConst(Hole::E1)));
}

#[test]
fn rel_classes() {
    use Relator::*;
    assert_eq!(RelClass::OpLe.members(), &[Lt, Le, Eq, Assign]);
    assert_eq!(RelClass::OpGe.members(), &[Gt, Ge, Eq, Assign]);
    assert_eq!(RelClass::OpEq.members(), &[Eq, Assign]);
}

#[test]
fn expr_matching() {
    let c = Catalog::standard();
    let got = match_expr_rules(&c, BvOp::And, &e("s"), Some(&e("1 - s")));
    assert_eq!(
        ids(&got),
        [
            "R-And-0",
            "R-And-0-comm",
            "R-And-1",
            "R-And-1-comm",
            "R-And-LOG",
            "R-And-LBS",
            "R-And-LBS-comm"
        ]
    );
    let got = match_expr_rules(&c, BvOp::Shr, &e("x"), Some(&e("WIDTH - 1")));
    assert_eq!(ids(&got), ["R-RightShift-Pos", "R-RightShift-Neg"]);
    let got = match_expr_rules(&c, BvOp::Xor, &e("a"), Some(&e("0")));
    assert_eq!(
        ids(&got),
        ["R-Xor-0", "R-Xor-0-comm", "R-Xor-Eq", "R-Xor-Neq"]
    );
    assert!(match_expr_rules(&c, BvOp::Not, &e("a"), None).is_empty());
    assert!(match_expr_rules(&c, BvOp::Shl, &e("a"), Some(&e("1"))).is_empty());
}

#[test]
fn stmt_matching() {
    let c = Catalog::standard();
    let p = parse_program("var x, a; x := x & a;").unwrap();
    let shapes = StmtShape::of_stmt(&p.body[0]);
    assert_eq!(shapes.len(), 1);
    let got = match_stmt_rules(&c, &shapes[0]);
    assert_eq!(
        ids(&got),
        ["W-And-Pos", "W-And-Neg", "W-And-Mix", "W-And-Mix-comm"]
    );

    let shapes = StmtShape::relation(&e("r <= (a | b)"));
    assert!(match_stmt_rules(&c, &shapes[0]).is_empty());
    let shapes = StmtShape::relation(&e("r >= (a | 3)"));
    assert_eq!(
        ids(&match_stmt_rules(&c, &shapes[0])),
        ["W-Or-Const", "W-Or-Pos"]
    );
    // mirrored orientation: (a | 3) <= r is r >= (a | 3)
    let shapes = StmtShape::relation(&e("(a | 3) <= r"));
    assert_eq!(shapes[0].rel, Relator::Ge);
    assert_eq!(
        ids(&match_stmt_rules(&c, &shapes[0])),
        ["W-Or-Const", "W-Or-Pos"]
    );

    let shapes = StmtShape::relation(&e("(a | b) == 0"));
    let got = match_stmt_rules(&c, &shapes[0]);
    assert!(ids(&got).contains(&"R-Or-LOG"));
    let shapes = StmtShape::relation(&e("(a | b) == 1"));
    assert!(!ids(&match_stmt_rules(&c, &shapes[0])).contains(&"R-Or-LOG"));
    // != is not a relator
    assert!(StmtShape::relation(&e("r != (a & b)")).is_empty());
}

#[test]
fn instantiation() {
    let c = Catalog::standard();
    let lbs = match_expr_rules(&c, BvOp::And, &e("s"), Some(&e("1 - s")))
        .into_iter()
        .find(|ri| ri.rule.id == "R-And-LBS")
        .unwrap();
    assert_eq!(instantiate(&lbs), (e("s >= 0 && (1 - s) == 1"), e("s % 2")));

    let x = Ident::new("x").unwrap();
    let shape = StmtShape::assign(&x, &e("x & a")).unwrap();
    let pos = match_stmt_rules(&c, &shape).into_iter().next().unwrap();
    assert_eq!(
        pos.instantiate(),
        (e("x >= 0 && a >= 0"), e("x <= x && x <= a"))
    );

    let n = Ident::new("r").unwrap();
    let shape = StmtShape::assign(&n, &e("~n")).unwrap();
    let cpl = match_stmt_rules(&c, &shape).into_iter().next().unwrap();
    assert_eq!(cpl.rule.id, "W-Cpl-Pos");
    assert_eq!(cpl.instantiate(), (e("n >= 0"), e("r < 0")));

    let shr = match_expr_rules(&c, BvOp::Shr, &e("x"), Some(&e("WIDTH - 1")));
    assert_eq!(
        instantiate(&shr[0]).0,
        e("x >= 0 && WIDTH - 1 == WIDTH - 1")
    );
    for ri in shr.iter().chain(&[lbs, pos, cpl]) {
        let (a, b) = ri.instantiate();
        assert!(is_bitfree(&a) && is_bitfree(&b));
    }
}

#[test]
fn mutations_touch_only_their_target() {
    let std = Catalog::standard();
    for m in Mutation::ALL {
        assert_eq!(Mutation::from_name(m.name()), Some(m));
        let c = Catalog::mutated(m);
        let changed: Vec<_> = c
            .rules()
            .iter()
            .zip(std.rules())
            .filter(|(a, b)| a != b)
            .map(|(a, _)| a.id.as_str())
            .collect();
        assert_eq!(changed, [m.target()]);
    }
}
