//! Set-based big-step semantics over the syntax tree.
//!
//! This is the reference route: it shares no control machinery with the compiled
//! breadth-first engine in `reach`, and is used to replay counterexamples.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use super::eval::eval_in;
use super::value::{EvalFault, MachineConfig, State};
use super::Observation;
use crate::lang::{Block, Ident, Program, Stmt, StmtKind};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Outcome {
    State(State),
    /// Some path executed an `error` statement.
    Error,
    Fault(EvalFault),
}

/// All observations of a program, computed by exact fixpoint iteration.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Collected {
    pub observed: BTreeSet<Observation>,
    pub error_reached: bool,
    pub faults: BTreeSet<EvalFault>,
    /// Final states of terminating paths.
    pub finals: BTreeSet<State>,
}

struct Collector<'a> {
    cfg: MachineConfig,
    projection: Option<&'a [Ident]>,
    out: Collected,
}

impl Collector<'_> {
    fn observe(&mut self, s: &Stmt, sigma: &State) {
        if let (Some(proj), Some(o)) = (self.projection, s.origin) {
            if !o.aux {
                self.out.observed.insert(Observation {
                    origin: o.tag,
                    values: sigma.project(proj),
                });
            }
        }
    }

    fn block(&mut self, b: &Block, mut states: BTreeSet<State>) -> BTreeSet<State> {
        for s in b {
            if states.is_empty() {
                break;
            }
            states = self.stmt(s, states);
        }
        states
    }

    fn stmt(&mut self, s: &Stmt, inputs: BTreeSet<State>) -> BTreeSet<State> {
        let loc = s.origin.map(|o| o.tag);
        let cfg = self.cfg;
        let mut out = BTreeSet::new();
        match &s.kind {
            StmtKind::Assign(x, e) => {
                for sigma in inputs {
                    match eval_in(e, &sigma, cfg, loc) {
                        Ok(v) => {
                            let next = sigma.with(x, v);
                            self.observe(s, &next);
                            out.insert(next);
                        }
                        Err(f) => {
                            self.out.faults.insert(f);
                        }
                    }
                }
            }
            StmtKind::Havoc(x) => {
                for sigma in inputs {
                    for v in cfg.values() {
                        let next = sigma.clone().with(x, v);
                        self.observe(s, &next);
                        out.insert(next);
                    }
                }
            }
            StmtKind::Assume(c) => {
                for sigma in inputs {
                    match eval_in(c, &sigma, cfg, loc) {
                        Ok(0) => {}
                        Ok(_) => {
                            self.observe(s, &sigma);
                            out.insert(sigma);
                        }
                        Err(f) => {
                            self.out.faults.insert(f);
                        }
                    }
                }
            }
            StmtKind::Error => {
                if !inputs.is_empty() {
                    self.out.error_reached = true;
                }
            }
            StmtKind::IfCond(c, t, e) => {
                let (mut yes, mut no) = (BTreeSet::new(), BTreeSet::new());
                for sigma in inputs {
                    match eval_in(c, &sigma, cfg, loc) {
                        Ok(0) => {
                            no.insert(sigma);
                        }
                        Ok(_) => {
                            yes.insert(sigma);
                        }
                        Err(f) => {
                            self.out.faults.insert(f);
                        }
                    }
                }
                out = self.block(t, yes);
                out.extend(self.block(e, no));
            }
            StmtKind::IfNondet(t, e) => {
                out = self.block(t, inputs.clone());
                out.extend(self.block(e, inputs));
            }
            StmtKind::While(c, body) => {
                let mut seen = BTreeSet::new();
                let mut frontier = inputs;
                while !frontier.is_empty() {
                    let mut enter = BTreeSet::new();
                    for sigma in frontier {
                        if seen.contains(&sigma) {
                            continue;
                        }
                        match eval_in(c, &sigma, cfg, loc) {
                            Ok(0) => {
                                out.insert(sigma.clone());
                            }
                            Ok(_) => {
                                enter.insert(sigma.clone());
                            }
                            Err(f) => {
                                self.out.faults.insert(f);
                            }
                        }
                        seen.insert(sigma);
                    }
                    frontier = self.block(body, enter);
                    frontier.retain(|s| !seen.contains(s));
                }
            }
        }
        out
    }
}

/// Big-step execution of one statement from one state.
///
/// Loops are run to their exact fixpoint, which always exists because the state space is
/// finite.
pub fn exec_stmt(s: &Stmt, sigma: &State, cfg: MachineConfig) -> BTreeSet<Outcome> {
    let mut c = Collector {
        cfg,
        projection: None,
        out: Collected::default(),
    };
    let states = c.stmt(s, [sigma.clone()].into_iter().collect());
    let mut out: BTreeSet<Outcome> = states.into_iter().map(Outcome::State).collect();
    if c.out.error_reached {
        out.insert(Outcome::Error);
    }
    out.extend(c.out.faults.into_iter().map(Outcome::Fault));
    out
}

/// Collects every observation of `p` from the all-zeros initial state, projected onto
/// `projection`.
pub fn collect_observations(p: &Program, cfg: MachineConfig, projection: &[Ident]) -> Collected {
    let mut c = Collector {
        cfg,
        projection: Some(projection),
        out: Collected::default(),
    };
    let init = State::zeros(&p.decls);
    let finals = c.block(&p.body, [init].into_iter().collect());
    c.out.finals = finals;
    c.out
}

/// The final states reachable by running `p` to completion.
pub fn final_states(p: &Program, cfg: MachineConfig) -> Vec<State> {
    collect_observations(p, cfg, &[])
        .finals
        .into_iter()
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::{parse_expr, parse_program};

    fn cfg(w: u32) -> MachineConfig {
        MachineConfig::new(w).unwrap()
    }

    fn st(pairs: &[(&str, i64)]) -> State {
        pairs.iter().copied().collect()
    }

    #[test]
    fn blocked_assume() {
        let s = Stmt::new(StmtKind::Assume(parse_expr("x > 0").unwrap()));
        assert!(exec_stmt(&s, &st(&[("x", 0)]), cfg(4)).is_empty());
    }

    #[test]
    fn havoc_enumerates_domain() {
        let s = Stmt::new(StmtKind::Havoc(Ident::new("x").unwrap()));
        let got = exec_stmt(&s, &st(&[("x", 0)]), cfg(2));
        let want: BTreeSet<_> = [-2, -1, 0, 1]
            .into_iter()
            .map(|v| Outcome::State(st(&[("x", v)])))
            .collect();
        assert_eq!(got, want);
    }

    #[test]
    fn nondet_branch_with_infeasible_arm() {
        let p = parse_program("var b; if (*) { assume(b); error; } else { assume(!b); }").unwrap();
        let got = exec_stmt(&p.body[0], &st(&[("b", 1)]), cfg(4));
        assert_eq!(got, [Outcome::Error].into_iter().collect());
    }

    #[test]
    fn loop_reaches_fixpoint() {
        let p = parse_program("var x; while (x < 5) { x := x + 1; }").unwrap();
        let got = exec_stmt(&p.body[0], &st(&[("x", 0)]), cfg(4));
        assert_eq!(got, [Outcome::State(st(&[("x", 5)]))].into_iter().collect());
        // nonterminating loop: no final state, but no hang either
        let p = parse_program("var x; while (true) { x := x + 1; }").unwrap();
        assert!(exec_stmt(&p.body[0], &st(&[("x", 0)]), cfg(4)).is_empty());
    }

    #[test]
    fn faults_are_reported() {
        let p = parse_program("var x; x := 1 / x;").unwrap();
        let got = exec_stmt(&p.body[0], &st(&[("x", 0)]), cfg(4));
        assert!(matches!(got.iter().next(), Some(Outcome::Fault(_))));
    }

    #[test]
    fn observations_skip_aux_statements() {
        use crate::lang::Origin;
        let mut p = parse_program("var x; x := 1; x := 2;").unwrap();
        p.body[0].origin = Some(Origin::aux(0));
        let got = collect_observations(&p, cfg(4), &p.decls.clone());
        let tags: Vec<u32> = got.observed.iter().map(|o| o.origin).collect();
        assert_eq!(tags, [1]);
    }
}
