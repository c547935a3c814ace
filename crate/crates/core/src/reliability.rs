//! Reliability properties as decision procedures: resilience, reset and
//! checkpoint recoverability, fault-tolerance classes and augmentation.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::barbs::{scoped_barbs, Barb, ScopeSet};
use crate::curse::CurseSpec;
use crate::equivalence::{Pair, Side, Witness};
use crate::lts::{explore, replay, Bounds, Lts, PathStep, SliceError, StateId};
use crate::semantics::Semantics;
use crate::syntax::{is_initial, System, SystemConfig};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReliabilityError {
    #[error("{0} is not an initial system")]
    NotInitial(String),
    #[error("{0}")]
    Slice(SliceError),
    #[error("base and augmented systems start at different times")]
    TimeMismatch,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Holds,
    Fails,
    Inconclusive,
}

impl Outcome {
    fn of(holds: bool, conclusive: bool) -> Self {
        match (conclusive, holds) {
            (false, _) => Outcome::Inconclusive,
            (true, true) => Outcome::Holds,
            (true, false) => Outcome::Fails,
        }
    }

    pub fn holds(self) -> bool {
        self == Outcome::Holds
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Outcome::Holds => "holds",
            Outcome::Fails => "fails",
            Outcome::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum FaultClass {
    Masking,
    FailSafe,
    NonMasking,
    None,
}

impl fmt::Display for FaultClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FaultClass::Masking => "masking",
            FaultClass::FailSafe => "fail-safe",
            FaultClass::NonMasking => "non-masking",
            FaultClass::None => "none",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TraceStep {
    pub time: u64,
    pub rule: String,
    pub label: String,
    pub state: StateId,
}

/// A run through one explored graph, optionally ending in a barb that
/// the compared system cannot match.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Evidence {
    pub run: String,
    pub steps: Vec<TraceStep>,
    pub end_state: StateId,
    pub end_system: String,
    pub barb: Option<String>,
    #[serde(skip)]
    pub path: Vec<PathStep>,
    #[serde(skip)]
    pub barb_value: Option<Barb>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CrossCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RunStats {
    pub run: String,
    pub states: usize,
    pub edges: usize,
    pub complete: bool,
    pub truncations: Vec<String>,
}

/// A sub-result, e.g. one clause of an augmentation check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Part {
    pub name: String,
    pub outcome: Outcome,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReliabilityVerdict {
    pub property: String,
    pub n: Option<u64>,
    pub outcome: Outcome,
    pub class: Option<FaultClass>,
    pub reason: Option<String>,
    pub witness: Vec<Evidence>,
    pub parts: Vec<Part>,
    pub cross_checks: Vec<CrossCheck>,
    pub explored: Vec<RunStats>,
}

impl ReliabilityVerdict {
    fn new(property: &str, n: Option<u64>) -> Self {
        ReliabilityVerdict {
            property: property.into(),
            n,
            outcome: Outcome::Inconclusive,
            class: None,
            reason: None,
            witness: Vec::new(),
            parts: Vec::new(),
            cross_checks: Vec::new(),
            explored: Vec::new(),
        }
    }

    pub fn cross_checks_pass(&self) -> bool {
        self.cross_checks.iter().all(|c| c.passed)
    }
}

#[derive(Clone, Debug, Default)]
pub struct Options {
    pub bounds: Bounds,
    pub erlang_order: bool,
    pub scope: ScopeSet,
}

/// One system explored under one curse.
#[derive(Clone, Debug)]
pub struct Run {
    pub name: String,
    pub sem: Semantics,
    pub init: System,
    pub lts: Lts,
}

impl Run {
    pub fn explore(
        name: impl Into<String>,
        cfg: &SystemConfig,
        sys: &System,
        curse: &CurseSpec,
        opts: &Options,
    ) -> Self {
        let sem = Semantics::new(curse.clone(), cfg.latency).with_erlang_order(opts.erlang_order);
        let lts = explore(&sem, sys, &opts.bounds);
        Run {
            name: name.into(),
            sem,
            init: sys.clone(),
            lts,
        }
    }

    fn stats(&self) -> RunStats {
        RunStats {
            run: self.name.clone(),
            states: self.lts.len(),
            edges: self.lts.edge_count(),
            complete: self.lts.is_complete(),
            truncations: self.lts.truncations.iter().map(|t| t.to_string()).collect(),
        }
    }

    fn evidence(&self, path: Vec<PathStep>, end: StateId, barb: Option<Barb>) -> Evidence {
        Evidence {
            run: self.name.clone(),
            steps: path
                .iter()
                .map(|st| TraceStep {
                    time: st.time,
                    rule: st.label.rule_name().into(),
                    label: st.label.to_string(),
                    state: st.dst,
                })
                .collect(),
            end_state: end,
            end_system: self.lts.states[end].system.to_string(),
            barb: barb.as_ref().map(|b| b.to_string()),
            path,
            barb_value: barb,
        }
    }

    /// Replays evidence through the semantics; the barb, if any, must be
    /// shown (unhidden) by the final system.
    pub fn replays(&self, ev: &Evidence, scope: &ScopeSet) -> Result<(), String> {
        let end = replay(&self.sem, &self.init, &self.lts, &ev.path).map_err(|e| e.to_string())?;
        if let Some(b) = &ev.barb_value {
            let shown = scoped_barbs(&crate::barbs::barbs_of(&end), scope);
            if !shown.contains(b) {
                return Err(format!("final system does not show {b}"));
            }
        }
        Ok(())
    }
}

fn need_initial(cfg: &SystemConfig, sys: &System, what: &str) -> Result<(), ReliabilityError> {
    if is_initial(sys, cfg) {
        Ok(())
    } else {
        Err(ReliabilityError::NotInitial(what.into()))
    }
}

fn complete(runs: &[&Run]) -> bool {
    runs.iter().all(|r| r.lts.is_complete())
}

fn replay_check(runs: &[&Run], witness: &[Evidence], scope: &ScopeSet) -> Option<CrossCheck> {
    if witness.is_empty() {
        return None;
    }
    let mut problems = Vec::new();
    for ev in witness {
        let run = runs
            .iter()
            .find(|r| r.name == ev.run)
            .expect("evidence names a run");
        if let Err(e) = run.replays(ev, scope) {
            problems.push(format!("{}: {e}", ev.run));
        }
    }
    Some(CrossCheck {
        name: "witness-replay".into(),
        passed: problems.is_empty(),
        detail: if problems.is_empty() {
            "every witness trace replays through the semantics".into()
        } else {
            problems.join("; ")
        },
    })
}

fn pair_evidence(left: &Run, right: &Run, w: &Witness) -> Vec<Evidence> {
    let barb_at = |side| match &w.barb {
        Some((s, b)) if *s == side => Some(b.clone()),
        _ => None,
    };
    vec![
        left.evidence(w.left_trace.clone(), w.left_state, barb_at(Side::Left)),
        right.evidence(w.right_trace.clone(), w.right_state, barb_at(Side::Right)),
    ]
}

/// Copy of the graph without time steps.
fn instant_only(lts: &Lts) -> Lts {
    let mut l = lts.clone();
    for es in &mut l.succ {
        es.retain(|e| !e.is_time());
    }
    l
}

fn explore_both(cfg: &SystemConfig, sys: &System, curse: &CurseSpec, opts: &Options) -> (Run, Run) {
    (
        Run::explore("uncursed", cfg, sys, &CurseSpec::uncursed(), opts),
        Run::explore("cursed", cfg, sys, curse, opts),
    )
}

/// Initial `(sys, curse)` is resilient iff it is weakly barbed bisimilar
/// to the uncursed system.
pub fn check_resilience(
    cfg: &SystemConfig,
    sys: &System,
    curse: &CurseSpec,
    opts: &Options,
) -> Result<ReliabilityVerdict, ReliabilityError> {
    need_initial(cfg, sys, "the system")?;
    let (u, c) = explore_both(cfg, sys, curse, opts);
    let mut v = ReliabilityVerdict::new("resilience", None);
    v.explored = vec![u.stats(), c.stats()];
    let pair = Pair::new(&u.lts, &c.lts, &opts.scope);
    let holds = pair.bisimilar((Side::Left, u.lts.root), (Side::Right, c.lts.root));
    let conclusive = complete(&[&u, &c]);
    v.outcome = Outcome::of(holds, conclusive);
    if !holds {
        v.reason = Some("the cursed and uncursed systems are not weakly barbed bisimilar".into());
        if conclusive {
            v.witness = pair_evidence(&u, &c, &pair.bisim_witness());
        }
    }
    let rec0 = recoverable(&u, &c, &pair, 0)?;
    v.cross_checks.push(CrossCheck {
        name: "resilience-iff-0-recoverable".into(),
        passed: !conclusive || rec0.outcome == v.outcome,
        detail: format!("0-recoverability: {}", rec0.outcome),
    });
    let (ui, ci) = (instant_only(&u.lts), instant_only(&c.lts));
    let at0 = Pair::new(&ui, &ci, &opts.scope);
    let cursed_in_uncursed = at0.similar((Side::Right, ci.root), (Side::Left, ui.root));
    let uncursed_in_cursed = at0.similar((Side::Left, ui.root), (Side::Right, ci.root));
    v.cross_checks.push(CrossCheck {
        name: "time-0-cursed-below-uncursed".into(),
        passed: !conclusive || cursed_in_uncursed,
        detail: format!(
            "instantaneous time-0 simulation: cursed by uncursed {cursed_in_uncursed}, uncursed by cursed {uncursed_in_cursed}"
        ),
    });
    v.cross_checks
        .extend(replay_check(&[&u, &c], &v.witness, &opts.scope));
    Ok(v)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Mark {
    Good,
    /// No instantaneous step left and not recovered.
    BadEnd,
    /// Some maximal instantaneous path through this successor avoids
    /// recovered states.
    BadVia(StateId),
}

fn visit(
    s: StateId,
    lts: &Lts,
    good: &dyn Fn(StateId) -> bool,
    memo: &mut Vec<Option<Mark>>,
) -> Mark {
    if let Some(m) = memo[s] {
        return m;
    }
    let m = if good(s) {
        Mark::Good
    } else {
        let succ: Vec<StateId> = lts.instant_succ(s).map(|e| e.dst).collect();
        if succ.is_empty() {
            Mark::BadEnd
        } else {
            succ.into_iter()
                .find(|&d| visit(d, lts, good, memo) != Mark::Good)
                .map_or(Mark::Good, Mark::BadVia)
        }
    };
    memo[s] = Some(m);
    m
}

struct RecResult {
    outcome: Outcome,
    witness: Vec<Evidence>,
    reason: Option<String>,
}

/// Reset recoverability at time `n`, with `pair` laid out as
/// (uncursed, cursed).
fn recoverable(u: &Run, c: &Run, pair: &Pair, n: u64) -> Result<RecResult, ReliabilityError> {
    let lts = &c.lts;
    let conclusive = complete(&[u, c]);
    let entries = match lts.n_entries(n) {
        Ok(e) => e,
        Err(SliceError::HorizonTooSmall { .. }) => {
            return Ok(RecResult {
                outcome: Outcome::Inconclusive,
                witness: vec![],
                reason: Some(format!("exploration does not reach time {n}")),
            })
        }
        Err(e) => return Err(ReliabilityError::Slice(e)),
    };
    lts.check_slice_acyclic(&entries, n)
        .map_err(ReliabilityError::Slice)?;
    let good = |s: StateId| pair.bisimilar((Side::Left, u.lts.root), (Side::Right, s));
    let mut memo: Vec<Option<Mark>> = vec![None; lts.len()];
    let bad_entry = entries
        .iter()
        .copied()
        .find(|&e| visit(e, lts, &good, &mut memo) != Mark::Good);
    let Some(e) = bad_entry else {
        return Ok(RecResult {
            outcome: Outcome::of(true, conclusive),
            witness: vec![],
            reason: None,
        });
    };
    let mut path = lts
        .trace_to(n, e)
        .map_err(ReliabilityError::Slice)?
        .expect("entries lie in their layer");
    let time = lts.states[lts.root].first_reached + n;
    let mut s = e;
    while let Some(Mark::BadVia(next)) = memo[s] {
        let edge = lts.succ[s]
            .iter()
            .find(|ed| ed.dst == next && !ed.is_time())
            .unwrap();
        path.push(PathStep {
            time,
            label: edge.label.clone(),
            dst: next,
        });
        s = next;
    }
    let barb = {
        let end = pair.weak_barbs(Side::Right, s);
        let root = pair.weak_barbs(Side::Left, u.lts.root);
        end.symmetric_difference(&root)
            .find(|b| pair.strong_barbs(Side::Right, s).contains(b))
            .cloned()
    };
    Ok(RecResult {
        outcome: Outcome::of(false, conclusive),
        witness: if conclusive { vec![c.evidence(path, s, barb)] } else { vec![] },
        reason: Some(format!(
            "a {n}-path reaches a state with only time steps left without passing a state bisimilar to the uncursed initial system"
        )),
    })
}

pub fn check_n_recoverable(
    cfg: &SystemConfig,
    sys: &System,
    curse: &CurseSpec,
    n: u64,
    opts: &Options,
) -> Result<ReliabilityVerdict, ReliabilityError> {
    need_initial(cfg, sys, "the system")?;
    let (u, c) = explore_both(cfg, sys, curse, opts);
    let pair = Pair::new(&u.lts, &c.lts, &opts.scope);
    let r = recoverable(&u, &c, &pair, n)?;
    let mut v = ReliabilityVerdict::new("recoverable", Some(n));
    v.explored = vec![u.stats(), c.stats()];
    v.outcome = r.outcome;
    v.reason = r.reason;
    v.witness = r.witness;
    if n == 0 {
        let holds = pair.bisimilar((Side::Left, u.lts.root), (Side::Right, c.lts.root));
        let res = Outcome::of(holds, complete(&[&u, &c]));
        v.cross_checks.push(CrossCheck {
            name: "resilience-iff-0-recoverable".into(),
            passed: res == v.outcome || res == Outcome::Inconclusive,
            detail: format!("resilience: {res}"),
        });
    }
    v.cross_checks
        .extend(replay_check(&[&u, &c], &v.witness, &opts.scope));
    Ok(v)
}

/// Checkpoint recoverability: whenever the cursed system agrees with the
/// uncursed one up to time `t < n`, every uncursed state at time `t` is
/// matched by some cursed state reached by time `n`.
pub fn check_checkpoint_recoverable(
    cfg: &SystemConfig,
    sys: &System,
    curse: &CurseSpec,
    n: u64,
    opts: &Options,
) -> Result<ReliabilityVerdict, ReliabilityError> {
    need_initial(cfg, sys, "the system")?;
    let (u, c) = explore_both(cfg, sys, curse, opts);
    let mut v = ReliabilityVerdict::new("checkpoint-recoverable", Some(n));
    v.explored = vec![u.stats(), c.stats()];
    let conclusive = complete(&[&u, &c]);
    if n == 0 {
        v.outcome = Outcome::of(true, conclusive);
        return Ok(v);
    }
    let pair = Pair::new(&u.lts, &c.lts, &opts.scope);
    let profile = pair.bisim_profile(u.lts.root, c.lts.root, n - 1);
    let (ul, cl) = match (u.lts.time_layers(n - 1), c.lts.time_layers(n)) {
        (Ok(a), Ok(b)) => (a, b),
        _ => {
            v.reason = Some(format!("exploration does not reach time {n}"));
            return Ok(v);
        }
    };
    let cursed_by_n: BTreeSet<StateId> = cl.iter().flat_map(|l| l.states.iter().copied()).collect();
    let agree: Vec<u64> = (0..n).filter(|&t| profile[t as usize]).collect();
    let mut failure = None;
    'outer: for &t in &agree {
        for &s in &ul[t as usize].states {
            let matched = cursed_by_n
                .iter()
                .any(|&r| pair.bisimilar((Side::Left, s), (Side::Right, r)));
            if !matched {
                failure = Some((t, s));
                break 'outer;
            }
        }
    }
    v.parts.push(Part {
        name: "agreement".into(),
        outcome: Outcome::of(true, conclusive),
        detail: format!(
            "cursed and uncursed agree up to times {:?} (of 0..{n})",
            agree
        ),
    });
    match failure {
        None => v.outcome = Outcome::of(true, conclusive),
        Some((t, s)) => {
            v.outcome = Outcome::of(false, conclusive);
            v.reason = Some(format!(
                "the uncursed state reached at time {t} has no bisimilar cursed state by time {n}"
            ));
            if conclusive {
                let path = u
                    .lts
                    .trace_to(t, s)
                    .map_err(ReliabilityError::Slice)?
                    .unwrap_or_default();
                v.witness.push(u.evidence(path, s, None));
            }
        }
    }
    v.cross_checks
        .extend(replay_check(&[&u, &c], &v.witness, &opts.scope));
    Ok(v)
}

pub fn classify(
    cfg: &SystemConfig,
    sys: &System,
    curse: &CurseSpec,
    opts: &Options,
) -> Result<ReliabilityVerdict, ReliabilityError> {
    need_initial(cfg, sys, "the system")?;
    let (u, c) = explore_both(cfg, sys, curse, opts);
    let mut v = ReliabilityVerdict::new("classify", None);
    v.explored = vec![u.stats(), c.stats()];
    let conclusive = complete(&[&u, &c]);
    let pair = Pair::new(&u.lts, &c.lts, &opts.scope);
    let (ur, cr) = ((Side::Left, u.lts.root), (Side::Right, c.lts.root));
    let bisim = pair.bisimilar(ur, cr);
    let safe = pair.similar(cr, ur);
    let live = pair.similar(ur, cr);
    let class = if bisim {
        FaultClass::Masking
    } else if safe {
        FaultClass::FailSafe
    } else if live {
        FaultClass::NonMasking
    } else {
        FaultClass::None
    };
    for (name, holds) in [
        ("cursed-bisimilar-uncursed", bisim),
        ("cursed-simulated-by-uncursed", safe),
        ("uncursed-simulated-by-cursed", live),
    ] {
        v.parts.push(Part {
            name: name.into(),
            outcome: Outcome::of(holds, conclusive),
            detail: String::new(),
        });
    }
    v.cross_checks.push(CrossCheck {
        name: "bisim-implies-both-simulations".into(),
        passed: !bisim || (safe && live),
        detail: String::new(),
    });
    v.outcome = Outcome::of(true, conclusive);
    v.class = conclusive.then_some(class);
    Ok(v)
}

/// A system with the configuration it was declared under.
#[derive(Clone, Copy)]
pub struct Model<'a> {
    pub config: &'a SystemConfig,
    pub system: &'a System,
}

fn transparency(base: &Run, aug: &Run, scope: &ScopeSet) -> (Outcome, Vec<Evidence>) {
    let pair = Pair::new(&base.lts, &aug.lts, scope);
    let holds = pair.bisimilar((Side::Left, base.lts.root), (Side::Right, aug.lts.root));
    let conclusive = complete(&[base, aug]);
    let w = if !holds && conclusive {
        pair_evidence(base, aug, &pair.bisim_witness())
    } else {
        vec![]
    };
    (Outcome::of(holds, conclusive), w)
}

fn rec_outcome(
    cfg: &SystemConfig,
    sys: &System,
    curse: &CurseSpec,
    n: u64,
    opts: &Options,
    prefix: &str,
) -> Result<RecResult, ReliabilityError> {
    let u = Run::explore(
        format!("{prefix} uncursed"),
        cfg,
        sys,
        &CurseSpec::uncursed(),
        opts,
    );
    let c = Run::explore(format!("{prefix} cursed"), cfg, sys, curse, opts);
    let pair = Pair::new(&u.lts, &c.lts, &opts.scope);
    recoverable(&u, &c, &pair, n)
}

/// Transparency (uncursed base and augmented systems are bisimilar) and
/// improvement (for `curse` and `n`, the augmented system is
/// `n`-recoverable and the base is not).
pub fn check_augmentation(
    base: Model,
    aug: Model,
    curse: &CurseSpec,
    n: u64,
    opts: &Options,
) -> Result<ReliabilityVerdict, ReliabilityError> {
    need_initial(base.config, base.system, "the base system")?;
    need_initial(aug.config, aug.system, "the augmented system")?;
    if base.system.time() != aug.system.time() {
        return Err(ReliabilityError::TimeMismatch);
    }
    let bu = Run::explore(
        "base uncursed",
        base.config,
        base.system,
        &CurseSpec::uncursed(),
        opts,
    );
    let au = Run::explore(
        "augmented uncursed",
        aug.config,
        aug.system,
        &CurseSpec::uncursed(),
        opts,
    );
    let mut v = ReliabilityVerdict::new("augmentation", Some(n));
    let (t, tw) = transparency(&bu, &au, &opts.scope);
    let ar = rec_outcome(aug.config, aug.system, curse, n, opts, "augmented")?;
    let br = rec_outcome(base.config, base.system, curse, n, opts, "base")?;
    let improvement = match (ar.outcome, br.outcome) {
        (Outcome::Holds, Outcome::Fails) => Outcome::Holds,
        (Outcome::Inconclusive, _) | (_, Outcome::Inconclusive) => Outcome::Inconclusive,
        _ => Outcome::Fails,
    };
    v.parts = vec![
        Part {
            name: "transparency".into(),
            outcome: t,
            detail: "uncursed base and augmented systems are bisimilar".into(),
        },
        Part {
            name: "augmented-recoverable".into(),
            outcome: ar.outcome,
            detail: format!("augmented system {n}-recoverable"),
        },
        Part {
            name: "base-recoverable".into(),
            outcome: br.outcome,
            detail: format!("base system {n}-recoverable"),
        },
        Part {
            name: "improvement".into(),
            outcome: improvement,
            detail: "augmented recoverable and base not".into(),
        },
    ];
    v.outcome = match (t, improvement) {
        (Outcome::Holds, Outcome::Holds) => Outcome::Holds,
        (Outcome::Fails, _) | (_, Outcome::Fails) => Outcome::Fails,
        _ => Outcome::Inconclusive,
    };
    if t == Outcome::Fails {
        v.reason = Some("not transparent: uncursed behaviours differ".into());
        v.witness = tw;
    } else if improvement == Outcome::Fails {
        v.reason = Some(format!(
            "no improvement at n = {n}: augmented {}, base {}",
            ar.outcome, br.outcome
        ));
    }
    v.explored = vec![bu.stats(), au.stats()];
    v.cross_checks
        .extend(replay_check(&[&bu, &au], &v.witness, &opts.scope));
    Ok(v)
}

/// For every supplied `(curse, n)`: if the base is `n`-recoverable, so is
/// the augmented system.
pub fn check_preserving(
    base: Model,
    aug: Model,
    cases: &[(String, CurseSpec, u64)],
    opts: &Options,
) -> Result<ReliabilityVerdict, ReliabilityError> {
    need_initial(base.config, base.system, "the base system")?;
    need_initial(aug.config, aug.system, "the augmented system")?;
    let mut v = ReliabilityVerdict::new("preserving", None);
    let mut all = Outcome::Holds;
    for (name, curse, n) in cases {
        let br = rec_outcome(base.config, base.system, curse, *n, opts, "base")?.outcome;
        let ar = rec_outcome(aug.config, aug.system, curse, *n, opts, "augmented")?.outcome;
        let o = match (br, ar) {
            (Outcome::Fails, _) | (_, Outcome::Holds) => Outcome::Holds,
            (Outcome::Holds, Outcome::Fails) => Outcome::Fails,
            _ => Outcome::Inconclusive,
        };
        if o == Outcome::Fails || (o == Outcome::Inconclusive && all == Outcome::Holds) {
            all = o;
        }
        v.parts.push(Part {
            name: format!("{name} n={n}"),
            outcome: o,
            detail: format!("base {br}, augmented {ar}"),
        });
    }
    v.outcome = all;
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::{parse_curse, parse_system, ParsedBundle};

    const ONE: &str = "latency 1;
        node a { !@b x. 0 }
        node b { mu w. recv {x -> 0} after 0 {w} }";

    fn sys() -> ParsedBundle {
        parse_system(ONE).unwrap()
    }

    fn k(s: &str) -> CurseSpec {
        parse_curse(s).unwrap()
    }

    fn rec(b: &ParsedBundle, c: &CurseSpec) -> Vec<Outcome> {
        (0..5)
            .map(|n| {
                check_n_recoverable(&b.config, &b.system, c, n, &Options::default())
                    .unwrap()
                    .outcome
            })
            .collect()
    }

    #[test]
    fn crash_before_sending_is_masked() {
        let b = sys();
        let c = k("curse { node a : down @ [0,0]; }");
        let v = check_resilience(&b.config, &b.system, &c, &Options::default()).unwrap();
        assert_eq!(v.outcome, Outcome::Holds);
        assert!(v.cross_checks_pass());
        assert!(v.witness.is_empty());
        let cl = classify(&b.config, &b.system, &c, &Options::default()).unwrap();
        assert_eq!(cl.class, Some(FaultClass::Masking));
    }

    #[test]
    fn recoverability_is_not_monotone() {
        // once both nodes have finished nothing is bisimilar to the start
        use Outcome::*;
        let b = sys();
        assert_eq!(
            rec(&b, &k("curse { node a : down @ [0,0]; }")),
            [Holds, Holds, Holds, Fails, Fails]
        );
        assert_eq!(
            rec(&b, &k("curse { link a -> b : slow @ [0,1]; }")),
            [Holds, Holds, Holds, Holds, Fails]
        );
    }

    #[test]
    fn lost_message_is_fail_safe() {
        let b = sys();
        let c = k("curse { link a -> b : down @ [0,0]; }");
        let opts = Options::default();
        let v = check_resilience(&b.config, &b.system, &c, &opts).unwrap();
        assert_eq!(v.outcome, Outcome::Fails);
        assert!(v.cross_checks_pass());
        assert!(!v.witness.is_empty());
        assert!(v.witness.iter().any(|e| e.barb.is_some()));
        assert!(rec(&b, &c).iter().all(|o| *o == Outcome::Fails));
        let cl = classify(&b.config, &b.system, &c, &opts).unwrap();
        assert_eq!(cl.class, Some(FaultClass::FailSafe));
    }

    #[test]
    fn uncursed_is_resilient_and_checkpoint_recoverable() {
        let b = sys();
        let opts = Options::default();
        let u = CurseSpec::uncursed();
        assert_eq!(
            check_resilience(&b.config, &b.system, &u, &opts)
                .unwrap()
                .outcome,
            Outcome::Holds
        );
        for n in 0..4 {
            let v = check_checkpoint_recoverable(&b.config, &b.system, &u, n, &opts).unwrap();
            assert_eq!(v.outcome, Outcome::Holds, "n = {n}");
        }
    }

    #[test]
    fn state_bound_makes_checks_inconclusive() {
        let b = sys();
        let opts = Options {
            bounds: Bounds {
                max_states: 2,
                ..Bounds::default()
            },
            ..Options::default()
        };
        let c = k("curse { link a -> b : down @ [0,0]; }");
        let v = check_resilience(&b.config, &b.system, &c, &opts).unwrap();
        assert_eq!(v.outcome, Outcome::Inconclusive);
        assert!(v.explored.iter().any(|s| !s.complete));
    }

    #[test]
    fn non_initial_systems_are_rejected() {
        let b = sys();
        let sem = Semantics::new(CurseSpec::uncursed(), 1);
        let next = sem.successors(&b.system).unwrap().remove(0).1;
        let e = check_resilience(
            &b.config,
            &next,
            &CurseSpec::uncursed(),
            &Options::default(),
        );
        assert!(matches!(e, Err(ReliabilityError::NotInitial(_))));
    }

    #[test]
    fn augmentation_needs_transparency() {
        let base = sys();
        let louder = parse_system(
            "latency 1;
             node a { !@b x. !@b y. 0 }
             node b { mu w. recv {x -> 0} after 0 {w} }",
        )
        .unwrap();
        let c = k("curse { link a -> b : down @ [0,0]; }");
        let v = check_augmentation(
            Model {
                config: &base.config,
                system: &base.system,
            },
            Model {
                config: &louder.config,
                system: &louder.system,
            },
            &c,
            0,
            &Options::default(),
        )
        .unwrap();
        assert_eq!(v.outcome, Outcome::Fails);
        assert_eq!(v.parts[0].name, "transparency");
        assert_eq!(v.parts[0].outcome, Outcome::Fails);
        assert!(!v.witness.is_empty());
    }

    #[test]
    fn self_augmentation_preserves() {
        let b = sys();
        let m = Model {
            config: &b.config,
            system: &b.system,
        };
        let cases = vec![
            ("down".to_string(), k("curse { node a : down @ [0,0]; }"), 2),
            (
                "lost".to_string(),
                k("curse { link a -> b : down @ [0,0]; }"),
                1,
            ),
        ];
        let v = check_preserving(m, m, &cases, &Options::default()).unwrap();
        assert_eq!(v.outcome, Outcome::Holds);
        assert_eq!(v.parts.len(), 2);
    }
}
