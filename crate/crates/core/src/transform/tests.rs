use alloc::string::String;
use alloc::vec::Vec;

use super::*;
use crate::lang::{
    is_bitfree_outside_opaque, parse_expr, parse_program, pretty_print, Expr, Ident, Program, Stmt,
    StmtKind,
};

fn e(s: &str) -> Expr {
    parse_expr(s).unwrap()
}

fn only(ids: &[&str]) -> TransformOptions {
    TransformOptions::new()
        .with_rules(ids.iter().copied())
        .unwrap()
}

fn prog(src: &str) -> Program {
    parse_program(src).unwrap()
}

/// Undoes T_E on expressions whose source had no `opaque`: every introduced conditional
/// ends in an `opaque` fallback.
fn fallback(e: &Expr) -> Expr {
    fn chain_end(e: &Expr) -> Option<&Expr> {
        match e {
            Expr::Opaque(inner) => Some(inner),
            Expr::Ite(_, _, f) => chain_end(f),
            _ => None,
        }
    }
    if let Some(inner) = chain_end(e) {
        return fallback(inner);
    }
    match e {
        Expr::Unary(op, a) => Expr::unary(*op, fallback(a)),
        Expr::Binary(op, a, b) => Expr::binary(*op, fallback(a), fallback(b)),
        Expr::Ite(c, t, f) => Expr::ite(fallback(c), fallback(t), fallback(f)),
        _ => e.clone(),
    }
}

#[test]
fn worked_example() {
    let got = t_e(&e("s & (1 - s)"), &only(&["R-And-LBS"]));
    assert_eq!(
        got,
        e("s >= 0 && (1 - s) == 1 ? s % 2 : opaque(s & (1 - s))")
    );
    assert_eq!(
        alloc::format!("{got}"),
        "s >= 0 && 1 - s == 1 ? s % 2 : opaque(s & (1 - s))"
    );
}

#[test]
fn first_rule_is_outermost() {
    let got = t_e(&e("s & (1 - s)"), &only(&["R-And-0", "R-And-LBS"]));
    let Expr::Ite(c, _, rest) = &got else {
        panic!("{got}")
    };
    assert_eq!(**c, e("s == 0"));
    assert!(matches!(&**rest, Expr::Ite(c, _, _) if **c == e("s >= 0 && (1 - s) == 1")));
}

#[test]
fn max_nesting_caps_rules_per_site() {
    let opts = TransformOptions::new().with_max_nesting(1);
    let got = t_e(&e("a & b"), &opts);
    assert_eq!(got, e("a == 0 ? 0 : opaque(a & b)"));
    let none = TransformOptions::new().with_max_nesting(0);
    assert_eq!(t_e(&e("a & b"), &none), e("opaque(a & b)"));
}

#[test]
fn unknown_rule_is_rejected() {
    assert_eq!(
        TransformOptions::new().with_rules(["R-And-7"]),
        Err(OptionsError::UnknownRule("R-And-7".into()))
    );
    assert!(TransformOptions::new().with_fresh_prefix("9x").is_err());
}

#[test]
fn bitfree_expressions_are_untouched() {
    let opts = TransformOptions::new();
    for src in [
        "x + 1",
        "a < b && !(c == 2)",
        "ite(a, b, c * 3)",
        "opaque(x & y)",
    ] {
        assert_eq!(t_e(&e(src), &opts), e(src));
    }
}

#[test]
fn expression_translation_is_exact_and_idempotent() {
    let opts = TransformOptions::new();
    for src in [
        "x >> (WIDTH - 1)",
        "x + (s & (1 - s))",
        "~(a | b) ^ (c & 1)",
        "(a & b) << 1",
        "((a ^ b) & c) == 0",
    ] {
        let once = t_e(&e(src), &opts);
        assert_eq!(t_e(&once, &opts), once, "{src}");
        assert_eq!(fallback(&once), e(src), "{src}");
        assert!(is_bitfree_outside_opaque(&once), "{src}");
    }
}

#[test]
fn weakened_assignment() {
    let p = prog("var x, a; x := x & a;");
    let (got, temps) = t_s(&p.body[0], &only(&["W-And-Pos"]), &p.decls);
    let names: Vec<&str> = temps.iter().map(Ident::as_str).collect();
    assert_eq!(names, ["_bb0", "_bb1"]);
    let want = prog(
        "var x, a, _bb0, _bb1; _bb0 := x; _bb1 := a; \
         if (_bb0 >= 0 && _bb1 >= 0) { havoc x; assume(x <= _bb0 && x <= _bb1); } \
         else { x := opaque(_bb0 & _bb1); }",
    );
    assert_eq!(got, want.body);
    // every emitted statement keeps the source origin; only the observable ones are primary
    let mut flags = Vec::new();
    for s in &got {
        s.walk(&mut |s| flags.push((s.origin.unwrap().tag, s.origin.unwrap().aux)));
    }
    assert_eq!(
        flags,
        [
            (0, true),
            (0, true),
            (0, true),
            (0, true),
            (0, false),
            (0, false)
        ]
    );
}

#[test]
fn unmatched_statements_are_kept() {
    let p = prog("var x, y; assume(y == 0); havoc x; x := x << 1; error;");
    let opts = TransformOptions::new();
    assert_eq!(t_s(&p.body[0], &opts, &p.decls).0, [p.body[0].clone()]);
    assert_eq!(t_s(&p.body[1], &opts, &p.decls).0, [p.body[1].clone()]);
    let shl = t_s(&p.body[2], &opts, &p.decls).0;
    assert_eq!(shl, prog("var x; x := opaque(x << 1);").body);
    assert_eq!(t_s(&p.body[3], &opts, &p.decls).0, [p.body[3].clone()]);
}

#[test]
fn weakened_assumption_both_orientations() {
    let opts = only(&["W-Or-Pos"]);
    let p = prog("var r, a, b; assume(r >= (a | b)); assume((a | b) <= r);");
    let want = prog(
        "var r, a, b; if (a >= 0 && b >= 0) { assume(r >= a && r >= b); } else { assume(r >= opaque(a | b)); }",
    );
    assert_eq!(t_s(&p.body[0], &opts, &p.decls).0, want.body);
    let want = prog(
        "var r, a, b; if (a >= 0 && b >= 0) { assume(r >= a && r >= b); } else { assume(opaque(a | b) <= r); }",
    );
    assert_eq!(t_s(&p.body[1], &opts, &p.decls).0, want.body);
    // wrong relator class: no weakening, plain T_E
    let q = prog("var r, a, b; assume(r < (a | b));");
    assert_eq!(
        t_s(&q.body[0], &opts, &q.decls).0,
        prog("var r, a, b; assume(r < opaque(a | b));").body
    );
}

#[test]
fn fresh_names_avoid_declared_ones() {
    let p = prog("var x, _bb0, _bb2; x := x ^ _bb0;");
    let out = transform_program(&p, &only(&["W-XOr-Pos"]));
    let names: Vec<&str> = out.decls.iter().map(Ident::as_str).collect();
    assert_eq!(names, ["x", "_bb0", "_bb2", "_bb1", "_bb3"]);
    assert!(out.check_scoping().is_ok());
}

#[test]
fn bitfree_program_is_identical() {
    let p = prog(
        "var x, y; havoc x; while (x > 0) { x := x - 1; if (*) { y := y + x; } } assume(y != 3);",
    );
    assert_eq!(transform_program(&p, &TransformOptions::new()), p);
}

const EX1: &str = "var r, s, x; havoc x; while (x > 0) { s := x >> (WIDTH - 1); x := x - 1; r := x + (s & (1 - s)); if (r < 0) { error; } }";
const EX2: &str =
    "var a, x; havoc a; assume(a > 0); havoc x; while (x > 0) { a := a - 1; x := x & a; }";

#[test]
fn program_transformation_is_well_formed_and_idempotent() {
    for src in [EX1, EX2] {
        let p = prog(src);
        let t = transform_program(&p, &TransformOptions::new());
        assert!(t.check_scoping().is_ok());
        let reparsed = parse_program(&pretty_print(&t)).unwrap();
        assert_eq!(reparsed, t);
        assert_eq!(transform_program(&t, &TransformOptions::new()), t);
        let mut tags: Vec<u32> = t.origin_tags();
        tags.dedup();
        tags.sort();
        tags.dedup();
        assert_eq!(tags, (0..p.stmt_count() as u32).collect::<Vec<_>>());
        let mut linear = true;
        t.walk(&mut |s| linear &= s.exprs().into_iter().all(is_bitfree_outside_opaque));
        assert!(linear);
    }
}

#[test]
fn example_one_sites_are_transformed() {
    let t = transform_program(&prog(EX1), &TransformOptions::new());
    let text = pretty_print(&t);
    assert!(text.contains("opaque(x >> (WIDTH - 1))"), "{text}");
    assert!(text.contains("opaque(s & (1 - s))"), "{text}");
}

#[test]
fn normalization() {
    let p = prog("var b, x; if (b) { x := 1; } else { x := 2; }");
    let n = branch_normalize(&p);
    let want = prog("var b, x; if (*) { assume(b); x := 1; } else { assume(!b); x := 2; }");
    assert_eq!(n, want);
    assert_eq!(n.body[0].origin, p.body[0].origin);

    let straight = prog("var x; x := 1; havoc x;");
    assert_eq!(branch_normalize(&straight), straight);

    let nested = prog("var a, b; while (a > 0) { if (a) { if (b) { a := 0; } } }");
    let want = prog(
        "var a, b; while (a > 0) { if (*) { assume(a); if (*) { assume(b); a := 0; } else { assume(!b); } } \
         else { assume(!a); } }",
    );
    assert_eq!(branch_normalize(&nested), want);
}

fn labels(p: &Program) -> Vec<String> {
    let mut v = build_cfa(p).unwrap().edge_labels();
    v.sort();
    v
}

#[test]
fn cfa_shapes() {
    let empty = build_cfa(&prog("var x;")).unwrap();
    assert_eq!((empty.locations, empty.edges.len()), (1, 0));

    let one = prog("var x, a; x := x & a;");
    let c = build_cfa(&one).unwrap();
    assert_eq!((c.locations, c.edges.len()), (2, 1));
    assert_eq!(c.edge_labels(), ["x := x & a"]);

    let t = branch_normalize(&transform_program(&one, &only(&["W-And-Pos"])));
    let c = build_cfa(&t).unwrap();
    assert_eq!(
        labels(&t),
        [
            "_bb0 := x",
            "_bb1 := a",
            "assume(!(_bb0 >= 0 && _bb1 >= 0))",
            "assume(_bb0 >= 0 && _bb1 >= 0)",
            "assume(x <= _bb0 && x <= _bb1)",
            "havoc x",
            "x := opaque(_bb0 & _bb1)",
        ]
    );
    // the two arms rejoin
    assert_eq!(c.locations, 7);
    assert!(c.edges.iter().all(|e| e.label.is_atomic()));
    assert!(build_cfa(&transform_program(&one, &only(&["W-And-Pos"]))).is_err());
}

#[test]
fn cfa_loops_and_errors() {
    let p = prog("var x; while (x < 3) { x := x + 1; } if (*) { error; } else { }");
    let c = build_cfa(&p).unwrap();
    let err = c.error.unwrap();
    assert_eq!(c.edges.iter().filter(|e| e.to == err).count(), 1);
    let back = c.edges.iter().find(|edge| {
        edge.label == Stmt::new(StmtKind::Assign(Ident::new("x").unwrap(), e("x + 1")))
    });
    assert_eq!(back.unwrap().to, 0);
    assert_eq!(
        labels(&p),
        [
            "assume(!(x < 3))",
            "assume(true)",
            "assume(x < 3)",
            "error",
            "x := x + 1"
        ]
    );
    let dot = c.to_dot();
    assert!(dot.starts_with("digraph cfa {\n"));
    assert!(dot.contains("[label=\"x := x + 1\"]"));
}
