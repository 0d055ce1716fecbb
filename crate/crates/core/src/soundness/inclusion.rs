use alloc::vec::Vec;
use core::fmt;

use crate::lang::{Ident, Program};
use crate::rules::Catalog;
use crate::semantics::{
    collect_observations, reachable, reachable_projected, MachineConfig, Observation, ReachResult,
};
use crate::transform::{transform_program_with, TransformOptions};

/// Evidence that the transformed program misses a behavior of the source.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    /// Observed in the source, absent from the transformed program.
    Observation(Observation),
    /// The source reaches `error`, the transformed program does not.
    ErrorReached,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InclusionStatus {
    Holds,
    Fails,
    /// An exploration hit its step bound and nothing contradicts inclusion so far.
    Inconclusive,
}

/// Outcome of comparing a program with its transformation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InclusionVerdict {
    pub status: InclusionStatus,
    pub witness: Option<Witness>,
    /// Source variables that observations are projected onto.
    pub vars: Vec<Ident>,
    pub source: RunStats,
    pub transformed: RunStats,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RunStats {
    pub observed: usize,
    pub error_reached: bool,
    pub exhausted: bool,
    pub faults: usize,
    pub steps: usize,
}

impl From<&ReachResult> for RunStats {
    fn from(r: &ReachResult) -> Self {
        RunStats {
            observed: r.observed_count(),
            error_reached: r.error_reached,
            exhausted: r.exhausted,
            faults: r.fault_count(),
            steps: r.steps,
        }
    }
}

impl InclusionVerdict {
    pub fn holds(&self) -> bool {
        self.status == InclusionStatus::Holds
    }
}

/// Compares the observations of `p` with those of its transformation with the standard
/// catalog.
pub fn check_inclusion(
    p: &Program,
    opts: &TransformOptions,
    cfg: MachineConfig,
    step_bound: usize,
) -> InclusionVerdict {
    check_inclusion_with(p, opts, &Catalog::standard(), cfg, step_bound)
}

pub fn check_inclusion_with(
    p: &Program,
    opts: &TransformOptions,
    catalog: &Catalog,
    cfg: MachineConfig,
    step_bound: usize,
) -> InclusionVerdict {
    let t = transform_program_with(p, opts, catalog);
    let src = reachable(p, cfg, step_bound);
    let tgt = reachable_projected(&t, cfg, step_bound, &p.decls);

    let witness = if src.error_reached && !tgt.error_reached {
        Some(Witness::ErrorReached)
    } else {
        src.observed_sorted()
            .into_iter()
            .find(|o| !tgt.observed.contains(o))
            .map(Witness::Observation)
    };
    // a witness is only conclusive if the transformed side was explored completely
    let status = match (&witness, src.exhausted, tgt.exhausted) {
        (_, _, true) => InclusionStatus::Inconclusive,
        (Some(_), _, false) => InclusionStatus::Fails,
        (None, true, false) => InclusionStatus::Inconclusive,
        (None, false, false) => InclusionStatus::Holds,
    };
    InclusionVerdict {
        status,
        witness,
        vars: p.decls.clone(),
        source: (&src).into(),
        transformed: (&tgt).into(),
    }
}

/// Confirms a witness with the tree-walking reference semantics, which shares no code with
/// the explorer that produced it.
pub fn replay_witness(
    p: &Program,
    opts: &TransformOptions,
    catalog: &Catalog,
    cfg: MachineConfig,
    witness: &Witness,
) -> bool {
    let t = transform_program_with(p, opts, catalog);
    let src = collect_observations(p, cfg, &p.decls);
    let tgt = collect_observations(&t, cfg, &p.decls);
    match witness {
        Witness::ErrorReached => src.error_reached && !tgt.error_reached,
        Witness::Observation(o) => src.observed.contains(o) && !tgt.observed.contains(o),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SafetyOutcome {
    /// The transformed program cannot reach `error`, so neither can the source.
    Safe,
    /// Both programs reach `error`.
    TrueAlarm,
    /// Only the over-approximation reaches `error`.
    SpuriousAlarm,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SafetyReport {
    pub outcome: SafetyOutcome,
    pub width: u32,
    pub transformed: RunStats,
    /// Only explored when the transformed program raises an alarm.
    pub source: Option<RunStats>,
}

impl fmt::Display for SafetyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let w = self.width;
        match self.outcome {
            SafetyOutcome::Safe => {
                write!(f, "P safe at width {w} (certified via over-approximation)")
            }
            SafetyOutcome::TrueAlarm => write!(f, "true alarm at width {w}: error reachable in P"),
            SafetyOutcome::SpuriousAlarm => {
                write!(
                    f,
                    "spurious alarm at width {w}: error reachable only in the over-approximation"
                )
            }
            SafetyOutcome::Inconclusive => {
                write!(f, "inconclusive at width {w}: step bound reached")
            }
        }
    }
}

/// Decides safety of `p` through its transformation, classifying alarms against `p` itself.
pub fn certify_safety(
    p: &Program,
    opts: &TransformOptions,
    cfg: MachineConfig,
    step_bound: usize,
) -> SafetyReport {
    certify_safety_with(p, opts, &Catalog::standard(), cfg, step_bound)
}

pub fn certify_safety_with(
    p: &Program,
    opts: &TransformOptions,
    catalog: &Catalog,
    cfg: MachineConfig,
    step_bound: usize,
) -> SafetyReport {
    let t = transform_program_with(p, opts, catalog);
    let tgt = reachable_projected(&t, cfg, step_bound, &[]);
    let mut report = SafetyReport {
        outcome: SafetyOutcome::Inconclusive,
        width: cfg.width(),
        transformed: (&tgt).into(),
        source: None,
    };
    if !tgt.error_reached {
        if !tgt.exhausted {
            report.outcome = SafetyOutcome::Safe;
        }
        return report;
    }
    let src = reachable_projected(p, cfg, step_bound, &[]);
    report.source = Some((&src).into());
    report.outcome = match (src.error_reached, src.exhausted) {
        (true, _) => SafetyOutcome::TrueAlarm,
        (false, false) => SafetyOutcome::SpuriousAlarm,
        (false, true) => SafetyOutcome::Inconclusive,
    };
    report
}
