use super::gen::{expr_corpus, fuzz_corpus, GenConfig};
use super::*;
use crate::lang::{parse_expr, parse_program, pretty_print, Ident, Program};
use crate::rules::{Catalog, Mutation};
use crate::semantics::MachineConfig;
use crate::transform::{t_e, TransformOptions};

fn cfg(w: u32) -> MachineConfig {
    MachineConfig::new(w).unwrap()
}

fn prog(src: &str) -> Program {
    parse_program(src).unwrap()
}

const EX1: &str = "var r, s, x; havoc x; while (x > 0) { s := x >> (WIDTH - 1); x := x - 1; r := x + (s & (1 - s)); if (r < 0) { error; } }";
const EX2: &str =
    "var a, x; havoc a; assume(a > 0); havoc x; while (x > 0) { a := a - 1; x := x & a; }";

#[test]
fn bitfree_program_holds() {
    let p = prog("var x; havoc x; while (x > 0) { x := x - 1; }");
    let v = check_inclusion(&p, &TransformOptions::new(), cfg(4), 10_000);
    assert!(v.holds());
    assert_eq!(v.source.observed, v.transformed.observed);
}

#[test]
fn example_two_holds() {
    let opts = TransformOptions::new().with_rules(["W-And-Pos"]).unwrap();
    for o in [opts, TransformOptions::new()] {
        let v = check_inclusion(&prog(EX2), &o, cfg(4), 100_000);
        assert!(v.holds(), "{v:?}");
    }
}

#[test]
fn unsound_rewrite_is_caught_with_replayable_witness() {
    let p = prog("var a, x; havoc a; x := (a & 3) + 0;");
    let catalog = Catalog::mutated(Mutation::AndOneUnconditional);
    let opts = TransformOptions::new();
    let v = check_inclusion_with(&p, &opts, &catalog, cfg(4), 10_000);
    assert_eq!(v.status, InclusionStatus::Fails);
    let w = v.witness.unwrap();
    assert!(replay_witness(&p, &opts, &catalog, cfg(4), &w));
    assert!(!replay_witness(&p, &opts, &Catalog::standard(), cfg(4), &w));
}

#[test]
fn bound_exhaustion_is_inconclusive() {
    let p = prog(EX2);
    let v = check_inclusion(&p, &TransformOptions::new(), cfg(4), 20);
    assert_eq!(v.status, InclusionStatus::Inconclusive);
}

#[test]
fn safety_classification() {
    let opts = TransformOptions::new();
    let r = certify_safety(&prog(EX1), &opts, cfg(8), 1_000_000);
    assert_eq!(r.outcome, SafetyOutcome::Safe);
    assert_eq!(
        alloc::format!("{r}"),
        "P safe at width 8 (certified via over-approximation)"
    );

    let r = certify_safety(
        &prog("var x; havoc x; if (x > 0) { error; }"),
        &opts,
        cfg(4),
        10_000,
    );
    assert_eq!(r.outcome, SafetyOutcome::TrueAlarm);

    let spurious =
        prog("var a, x, r; havoc a; assume(a >= 0); x := 3; r := x & a; if (r < 0) { error; }");
    let only = TransformOptions::new().with_rules(["W-And-Pos"]).unwrap();
    let r = certify_safety(&spurious, &only, cfg(4), 10_000);
    assert_eq!(r.outcome, SafetyOutcome::SpuriousAlarm);
    // still sound: spurious alarms are not inclusion failures
    assert!(check_inclusion(&spurious, &only, cfg(4), 10_000).holds());
}

#[test]
fn small_fuzz_run() {
    let gen = GenConfig::default();
    let opts = TransformOptions::new();
    let catalog = Catalog::standard();
    let mut holds = 0;
    for p in fuzz_corpus(7, 60, &gen) {
        assert!(p.check_scoping().is_ok());
        let v = check_inclusion(&p, &opts, cfg(4), 10_000);
        if let Some(w) = &v.witness {
            assert!(
                !replay_witness(&p, &opts, &catalog, cfg(4), w),
                "{}\n{v:?}",
                pretty_print(&p)
            );
        }
        assert!(!v.source.error_reached || v.transformed.error_reached || v.transformed.exhausted);
        holds += usize::from(v.holds());
    }
    assert!(holds >= 40, "only {holds} of 60 conclusive");
}

#[test]
fn generator_is_deterministic() {
    let gen = GenConfig::default();
    assert_eq!(fuzz_corpus(3, 10, &gen), fuzz_corpus(3, 10, &gen));
    assert_ne!(fuzz_corpus(3, 10, &gen), fuzz_corpus(4, 10, &gen));
}

#[test]
fn random_expressions_round_trip() {
    let vars: alloc::vec::Vec<Ident> = ["x", "y"].iter().map(|v| Ident::new(v).unwrap()).collect();
    let opts = TransformOptions::new();
    for e in expr_corpus(11, 500, &vars, 5) {
        let text = alloc::format!("{e}");
        assert_eq!(parse_expr(&text).as_ref(), Ok(&e), "{text}");
        let once = t_e(&e, &opts);
        assert_eq!(t_e(&once, &opts), once, "{text}");
    }
}

mod props {
    use proptest::prelude::*;
    use rand::SeedableRng;

    use crate::lang::Ident;
    use crate::semantics::{eval_expr, MachineConfig, State};
    use crate::soundness::gen::random_expr;
    use crate::transform::{t_e, TransformOptions};

    proptest! {
        /// Wherever the source expression evaluates, the translation yields the same value.
        #[test]
        fn expression_translation_is_exact(seed in any::<u64>(), x in -8i64..8, y in -8i64..8, w in 2u32..=8) {
            let vars = [Ident::new("x").unwrap(), Ident::new("y").unwrap()];
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let e = random_expr(&mut rng, &vars, 4);
            let cfg = MachineConfig::new(w).unwrap();
            let s = State::new().with(&vars[0], cfg.wrap(x)).with(&vars[1], cfg.wrap(y));
            if let Ok(v) = eval_expr(&e, &s, cfg) {
                prop_assert_eq!(eval_expr(&t_e(&e, &TransformOptions::new()), &s, cfg), Ok(v));
            }
        }
    }
}
