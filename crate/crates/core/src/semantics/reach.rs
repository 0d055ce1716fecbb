//! Breadth-first explicit-state exploration over (location, state) configurations.

use alloc::boxed::Box;
use alloc::collections::{BTreeSet, VecDeque};
use alloc::vec::Vec;

use hashbrown::{HashMap, HashSet};

use super::eval::Code;
use super::value::{EvalFault, MachineConfig};
use super::Observation;
use crate::lang::{Block, Ident, Program, Stmt, StmtKind};

#[derive(Debug, Clone)]
enum Instr {
    Halt,
    Error,
    Assign {
        slot: usize,
        code: Code,
        next: usize,
        obs: Option<u32>,
        loc: Option<u32>,
    },
    Havoc {
        slot: usize,
        next: usize,
        obs: Option<u32>,
    },
    Assume {
        code: Code,
        next: usize,
        obs: Option<u32>,
        loc: Option<u32>,
    },
    Branch {
        code: Code,
        then_pc: usize,
        else_pc: usize,
        loc: Option<u32>,
    },
    Fork {
        left: usize,
        right: usize,
    },
}

struct Compiler<'a> {
    slots: &'a HashMap<Ident, usize>,
    cfg: MachineConfig,
    code: Vec<Instr>,
}

impl Compiler<'_> {
    fn expr(&self, e: &crate::lang::Expr) -> Code {
        Code::compile(e, &|x| self.slots.get(x).copied(), self.cfg)
    }

    fn slot(&self, x: &Ident) -> usize {
        *self
            .slots
            .get(x)
            .unwrap_or_else(|| panic!("variable `{x}` is not declared"))
    }

    fn push(&mut self, i: Instr) -> usize {
        self.code.push(i);
        self.code.len() - 1
    }

    fn block(&mut self, b: &Block, mut cont: usize) -> usize {
        for s in b.iter().rev() {
            cont = self.stmt(s, cont);
        }
        cont
    }

    fn stmt(&mut self, s: &Stmt, next: usize) -> usize {
        let loc = s.origin.map(|o| o.tag);
        let obs = s.origin.filter(|o| !o.aux).map(|o| o.tag);
        match &s.kind {
            StmtKind::Assign(x, e) => {
                let i = Instr::Assign {
                    slot: self.slot(x),
                    code: self.expr(e),
                    next,
                    obs,
                    loc,
                };
                self.push(i)
            }
            StmtKind::Havoc(x) => {
                let i = Instr::Havoc {
                    slot: self.slot(x),
                    next,
                    obs,
                };
                self.push(i)
            }
            StmtKind::Assume(c) => {
                let i = Instr::Assume {
                    code: self.expr(c),
                    next,
                    obs,
                    loc,
                };
                self.push(i)
            }
            StmtKind::Error => self.push(Instr::Error),
            StmtKind::IfCond(c, t, e) => {
                let then_pc = self.block(t, next);
                let else_pc = self.block(e, next);
                let i = Instr::Branch {
                    code: self.expr(c),
                    then_pc,
                    else_pc,
                    loc,
                };
                self.push(i)
            }
            StmtKind::IfNondet(t, e) => {
                let left = self.block(t, next);
                let right = self.block(e, next);
                self.push(Instr::Fork { left, right })
            }
            StmtKind::While(c, body) => {
                let head = self.push(Instr::Halt);
                let body_pc = self.block(body, head);
                self.code[head] = Instr::Branch {
                    code: self.expr(c),
                    then_pc: body_pc,
                    else_pc: next,
                    loc,
                };
                head
            }
        }
    }
}

/// Result of a bounded exploration.
#[derive(Debug, Clone)]
pub struct ReachResult {
    /// Variables that observations are projected onto, in order.
    pub vars: Vec<Ident>,
    pub observed: HashSet<Observation>,
    pub error_reached: bool,
    pub faults: BTreeSet<EvalFault>,
    /// The step bound was hit before the frontier emptied.
    pub exhausted: bool,
    /// Configurations expanded.
    pub steps: usize,
}

impl ReachResult {
    pub fn fault_count(&self) -> usize {
        self.faults.len()
    }

    pub fn observed_count(&self) -> usize {
        self.observed.len()
    }

    /// Observations in a deterministic order.
    pub fn observed_sorted(&self) -> Vec<Observation> {
        let mut v: Vec<_> = self.observed.iter().cloned().collect();
        v.sort();
        v
    }
}

/// Explores `p` from the all-zeros state, projecting observations onto its own decls.
pub fn reachable(p: &Program, cfg: MachineConfig, step_bound: usize) -> ReachResult {
    reachable_projected(p, cfg, step_bound, &p.decls)
}

/// Explores `p` from the all-zeros state, projecting observations onto `projection`.
///
/// Every variable in `projection` must be declared in `p`.
pub fn reachable_projected(
    p: &Program,
    cfg: MachineConfig,
    step_bound: usize,
    projection: &[Ident],
) -> ReachResult {
    let slots: HashMap<Ident, usize> = p
        .decls
        .iter()
        .enumerate()
        .map(|(i, d)| (d.clone(), i))
        .collect();
    let proj: Vec<usize> = projection
        .iter()
        .map(|v| {
            *slots
                .get(v)
                .unwrap_or_else(|| panic!("projected variable `{v}` is not declared"))
        })
        .collect();
    let mut c = Compiler {
        slots: &slots,
        cfg,
        code: alloc::vec![Instr::Halt],
    };
    let entry = c.block(&p.body, 0);
    let code = c.code;

    let mut result = ReachResult {
        vars: projection.to_vec(),
        observed: HashSet::new(),
        error_reached: false,
        faults: BTreeSet::new(),
        exhausted: false,
        steps: 0,
    };
    let project = |vals: &[i64]| proj.iter().map(|&i| vals[i]).collect::<Vec<_>>();

    let mut visited: HashSet<(usize, Box<[i64]>)> = HashSet::new();
    let mut queue = VecDeque::new();
    let init: Box<[i64]> = alloc::vec![0; p.decls.len()].into_boxed_slice();
    visited.insert((entry, init.clone()));
    queue.push_back((entry, init));

    let mut push = |pc: usize, vals: Box<[i64]>, queue: &mut VecDeque<_>| {
        if visited.insert((pc, vals.clone())) {
            queue.push_back((pc, vals));
        }
    };

    while let Some((pc, vals)) = queue.pop_front() {
        if result.steps >= step_bound {
            result.exhausted = true;
            break;
        }
        result.steps += 1;
        match &code[pc] {
            Instr::Halt => {}
            Instr::Error => result.error_reached = true,
            Instr::Assign {
                slot,
                code,
                next,
                obs,
                loc,
            } => match code.run(&vals, cfg) {
                Ok(v) => {
                    let mut nv = vals;
                    nv[*slot] = v;
                    if let Some(tag) = obs {
                        result.observed.insert(Observation {
                            origin: *tag,
                            values: project(&nv),
                        });
                    }
                    push(*next, nv, &mut queue);
                }
                Err(kind) => {
                    result.faults.insert(EvalFault {
                        kind,
                        location: *loc,
                    });
                }
            },
            Instr::Havoc { slot, next, obs } => {
                for v in cfg.values() {
                    let mut nv = vals.clone();
                    nv[*slot] = v;
                    if let Some(tag) = obs {
                        result.observed.insert(Observation {
                            origin: *tag,
                            values: project(&nv),
                        });
                    }
                    push(*next, nv, &mut queue);
                }
            }
            Instr::Assume {
                code,
                next,
                obs,
                loc,
            } => match code.run(&vals, cfg) {
                Ok(0) => {}
                Ok(_) => {
                    if let Some(tag) = obs {
                        result.observed.insert(Observation {
                            origin: *tag,
                            values: project(&vals),
                        });
                    }
                    push(*next, vals, &mut queue);
                }
                Err(kind) => {
                    result.faults.insert(EvalFault {
                        kind,
                        location: *loc,
                    });
                }
            },
            Instr::Branch {
                code,
                then_pc,
                else_pc,
                loc,
            } => match code.run(&vals, cfg) {
                Ok(v) => push(if v != 0 { *then_pc } else { *else_pc }, vals, &mut queue),
                Err(kind) => {
                    result.faults.insert(EvalFault {
                        kind,
                        location: *loc,
                    });
                }
            },
            Instr::Fork { left, right } => {
                push(*left, vals.clone(), &mut queue);
                push(*right, vals, &mut queue);
            }
        }
    }
    result
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::parse_program;
    use crate::semantics::collect_observations;

    fn cfg(w: u32) -> MachineConfig {
        MachineConfig::new(w).unwrap()
    }

    fn reach(src: &str, w: u32, bound: usize) -> ReachResult {
        reachable(&parse_program(src).unwrap(), cfg(w), bound)
    }

    #[test]
    fn assume_false_blocks_error() {
        let r = reach("var x; assume(false); error;", 4, 100);
        assert!(!r.error_reached);
        assert!(!r.exhausted);
    }

    #[test]
    fn havoc_then_guarded_error() {
        let r = reach("var x; havoc x; if (x > 0) { error; } else { }", 4, 100);
        assert!(r.error_reached);
        assert!(!r.exhausted);
        assert_eq!(r.observed_count(), 16);
    }

    #[test]
    fn bound_exhaustion_is_reported() {
        let r = reach("var x; havoc x; while (x != 0) { x := x - 1; }", 8, 50);
        assert!(r.exhausted);
        assert_eq!(r.steps, 50);
    }

    #[test]
    fn faults_are_collected_not_thrown() {
        let r = reach("var x; havoc x; x := 4 / x; error;", 4, 1000);
        assert_eq!(r.fault_count(), 1);
        assert!(r.error_reached);
    }

    #[test]
    fn nonterminating_loop_reaches_fixpoint() {
        let r = reach("var x; while (true) { x := x + 1; }", 4, 10_000);
        assert!(!r.exhausted);
        assert_eq!(r.observed_count(), 16);
    }

    #[test]
    fn matches_reference_semantics() {
        let src = "var x; var y; havoc x; y := x & 3; while (y > 0) { if (*) { y := y - 1; } else { y := y >> 1; } } if (x == y) { error; }";
        let p = parse_program(src).unwrap();
        let r = reachable(&p, cfg(4), 100_000);
        let c = collect_observations(&p, cfg(4), &p.decls);
        assert!(!r.exhausted);
        assert_eq!(r.observed.len(), c.observed.len());
        assert!(c.observed.iter().all(|o| r.observed.contains(o)));
        assert_eq!(r.error_reached, c.error_reached);
    }
}
