use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

use crate::lang::{stmt_label, Block, Expr, Ident, Program, Stmt, StmtKind};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CfaError {
    #[error("program contains `if (c)`; normalize branches first")]
    NotNormalized,
}

/// A labeled edge. The label is always an atomic statement.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub from: usize,
    pub label: Stmt,
    pub to: usize,
}

/// Control-flow automaton. Locations are `0..locations`; `0` is initial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cfa {
    pub locations: usize,
    pub initial: usize,
    /// Target of every `error` edge, if any exists.
    pub error: Option<usize>,
    pub vars: Vec<Ident>,
    pub edges: Vec<Edge>,
}

impl Cfa {
    /// Edge labels as printed statements, in edge order.
    pub fn edge_labels(&self) -> Vec<String> {
        self.edges.iter().map(|e| stmt_label(&e.label)).collect()
    }

    /// Graphviz rendering. Exactly one line per location and per edge.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph cfa {\n");
        for q in 0..self.locations {
            let shape = if Some(q) == self.error {
                "doubleoctagon"
            } else if q == self.initial {
                "doublecircle"
            } else {
                "circle"
            };
            let _ = writeln!(out, "  q{q} [shape={shape}];");
        }
        for e in &self.edges {
            let _ = writeln!(
                out,
                "  q{} -> q{} [label=\"{}\"];",
                e.from,
                e.to,
                escape(&stmt_label(&e.label))
            );
        }
        out.push_str("}\n");
        out
    }
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out
}

struct Builder {
    locations: usize,
    error: Option<usize>,
    edges: Vec<Edge>,
}

impl Builder {
    fn fresh(&mut self) -> usize {
        self.locations += 1;
        self.locations - 1
    }

    fn edge(&mut self, from: usize, label: Stmt, to: usize) {
        self.edges.push(Edge { from, label, to });
    }

    fn epsilon(&mut self, from: usize, to: usize) {
        self.edge(from, Stmt::new(StmtKind::Assume(Expr::BoolLit(true))), to);
    }

    /// Builds `b` starting at `from`, ending at `to` if given. Returns the exit location.
    fn block(&mut self, b: &Block, from: usize, to: Option<usize>) -> Result<usize, CfaError> {
        let Some((last, init)) = b.split_last() else {
            return Ok(match to {
                Some(t) if t != from => {
                    self.epsilon(from, t);
                    t
                }
                _ => from,
            });
        };
        let mut at = from;
        for s in init {
            at = self.stmt(s, at, None)?;
        }
        self.stmt(last, at, to)
    }

    fn stmt(&mut self, s: &Stmt, from: usize, to: Option<usize>) -> Result<usize, CfaError> {
        match &s.kind {
            StmtKind::IfCond(..) => Err(CfaError::NotNormalized),
            StmtKind::Error => {
                let err = match self.error {
                    Some(q) => q,
                    None => {
                        let q = self.fresh();
                        self.error = Some(q);
                        q
                    }
                };
                self.edge(from, s.clone(), err);
                // the continuation is unreachable
                Ok(to.unwrap_or_else(|| self.fresh()))
            }
            StmtKind::Assign(..) | StmtKind::Havoc(_) | StmtKind::Assume(_) => {
                let target = to.unwrap_or_else(|| self.fresh());
                self.edge(from, s.clone(), target);
                Ok(target)
            }
            StmtKind::IfNondet(t, e) => {
                let join = to.unwrap_or_else(|| self.fresh());
                for arm in [t, e] {
                    match arm.first() {
                        Some(first) if first.is_atomic() => {
                            self.block(arm, from, Some(join))?;
                        }
                        Some(_) => {
                            // a loop head must not be shared with the sibling arm
                            let entry = self.fresh();
                            self.epsilon(from, entry);
                            self.block(arm, entry, Some(join))?;
                        }
                        None => self.epsilon(from, join),
                    }
                }
                Ok(join)
            }
            StmtKind::While(c, body) => {
                let head = from;
                let enter = Stmt::with_origin(StmtKind::Assume(c.clone()), s.origin);
                if body.is_empty() {
                    self.edge(head, enter, head);
                } else {
                    let entry = self.fresh();
                    self.edge(head, enter, entry);
                    self.block(body, entry, Some(head))?;
                }
                let exit = to.unwrap_or_else(|| self.fresh());
                self.edge(
                    head,
                    Stmt::with_origin(StmtKind::Assume(Expr::negation(c.clone())), s.origin),
                    exit,
                );
                Ok(exit)
            }
        }
    }
}

/// Builds the automaton of a branch-normalized program.
pub fn build_cfa(p: &Program) -> Result<Cfa, CfaError> {
    let mut b = Builder {
        locations: 1,
        error: None,
        edges: Vec::new(),
    };
    b.block(&p.body, 0, None)?;
    Ok(Cfa {
        locations: b.locations,
        initial: 0,
        error: b.error,
        vars: p.decls.clone(),
        edges: b.edges,
    })
}
