//! Bounded exploration of the reachable state graph. Past the curse's
//! stable time, states are keyed by time modulo the curse period, so the
//! graph is finite whenever the processes are.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::barbs::{barbs_of, Barb};
use crate::curse::CurseHorizon;
use crate::semantics::{Semantics, SemanticsError, StepLabel};
use crate::syntax::{Component, System};

pub type StateId = usize;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Bounds {
    /// Absolute time past which states are not expanded; `None` derives it
    /// from the curse horizon.
    pub max_time: Option<u64>,
    pub max_states: usize,
    pub max_mailbox: usize,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds {
            max_time: None,
            max_states: 1_000_000,
            max_mailbox: 16,
        }
    }
}

impl Bounds {
    pub fn resolve(&self, h: CurseHorizon) -> ResolvedBounds {
        ResolvedBounds {
            max_time: self.max_time.unwrap_or(h.stable_time + 4 * h.period + 16),
            max_states: self.max_states,
            max_mailbox: self.max_mailbox,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct ResolvedBounds {
    pub max_time: u64,
    pub max_states: usize,
    pub max_mailbox: usize,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Truncation {
    MaxTime,
    MaxStates,
    MaxMailbox,
    Error(SemanticsError),
}

impl fmt::Display for Truncation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Truncation::MaxTime => f.write_str("time bound reached"),
            Truncation::MaxStates => f.write_str("state bound reached"),
            Truncation::MaxMailbox => f.write_str("mailbox bound reached"),
            Truncation::Error(e) => write!(f, "semantics error: {e}"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct State {
    /// Canonical system with normalized time; this is the state key.
    pub system: System,
    pub barbs: BTreeSet<Barb>,
    /// Absolute time of first discovery.
    pub first_reached: u64,
    pub expanded: bool,
}

#[derive(Clone, Debug)]
pub struct Edge {
    pub label: StepLabel,
    pub dst: StateId,
}

impl Edge {
    pub fn is_time(&self) -> bool {
        self.label.is_time()
    }
}

#[derive(Clone, Debug)]
pub struct Lts {
    pub states: Vec<State>,
    pub succ: Vec<Vec<Edge>>,
    pub root: StateId,
    pub horizon: CurseHorizon,
    pub bounds: ResolvedBounds,
    pub truncations: Vec<Truncation>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SliceError {
    #[error("time {n} is beyond the explored horizon ({max_time})")]
    HorizonTooSmall { n: u64, max_time: u64 },
    #[error("instantaneous cycle at time {time} through state {state}: no maximal path exists")]
    InstantCycle { time: u64, state: StateId },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReplayError {
    #[error("step {index} ({label}) is not enabled")]
    NotEnabled { index: usize, label: String },
    #[error("step {index} reaches a state different from the recorded one")]
    Diverged { index: usize },
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
}

/// A time-unrolled slice: the states reachable at absolute time `k`.
#[derive(Clone, Debug, Default)]
pub struct Layer {
    pub entries: BTreeSet<StateId>,
    pub states: BTreeSet<StateId>,
}

/// One step of a trace through the explored graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathStep {
    pub time: u64,
    pub label: StepLabel,
    pub dst: StateId,
}

/// Per layer: state -> (layer, predecessor, edge index) it was first reached by.
type Preds = HashMap<StateId, (u64, StateId, usize)>;

fn mailbox_too_big(s: &System, max: usize) -> bool {
    s.components()
        .iter()
        .any(|c| matches!(c, Component::Node { mailbox, .. } if mailbox.len() > max))
}

/// Explores from `init`, which must be time-coherent.
pub fn explore(sem: &Semantics, init: &System, bounds: &Bounds) -> Lts {
    let horizon = sem.curse.horizon();
    let rb = bounds.resolve(horizon);
    let mut lts = Lts {
        states: Vec::new(),
        succ: Vec::new(),
        root: 0,
        horizon,
        bounds: rb,
        truncations: Vec::new(),
    };
    let mut index: HashMap<System, StateId> = HashMap::new();
    let t0 = init.time().concrete().unwrap_or(0);
    let root_sys = init.with_time(horizon.normalize(t0));
    lts.add_state(&mut index, root_sys, t0);
    let mut layer = vec![0];
    let mut t = t0;
    let flag = |lts: &mut Lts, tr: Truncation| {
        if !lts.truncations.contains(&tr) {
            lts.truncations.push(tr);
        }
    };
    while !layer.is_empty() {
        let mut queue: VecDeque<StateId> = layer.into_iter().collect();
        let mut next = Vec::new();
        while let Some(s) = queue.pop_front() {
            if lts.states[s].expanded {
                continue;
            }
            if t >= rb.max_time {
                flag(&mut lts, Truncation::MaxTime);
                continue;
            }
            lts.states[s].expanded = true;
            let succs = match sem.successors(&lts.states[s].system) {
                Ok(v) => v,
                Err(e) => {
                    flag(&mut lts, Truncation::Error(e));
                    continue;
                }
            };
            for (label, sys) in succs {
                let is_time = label.is_time();
                let sys = if is_time {
                    let tn = sys.time().concrete().unwrap_or(0);
                    let norm = horizon.normalize(tn);
                    if norm != tn {
                        sys.with_time(norm)
                    } else {
                        sys
                    }
                } else {
                    sys
                };
                if mailbox_too_big(&sys, rb.max_mailbox) {
                    flag(&mut lts, Truncation::MaxMailbox);
                    continue;
                }
                let dst = match index.get(&sys) {
                    Some(&d) => d,
                    None => {
                        if lts.states.len() >= rb.max_states {
                            flag(&mut lts, Truncation::MaxStates);
                            continue;
                        }
                        let d = lts.add_state(&mut index, sys, t + is_time as u64);
                        if is_time {
                            next.push(d);
                        } else {
                            queue.push_back(d);
                        }
                        d
                    }
                };
                lts.succ[s].push(Edge { label, dst });
            }
        }
        layer = next;
        t += 1;
    }
    lts
}

/// Re-runs `steps` through the semantics from `init`, checking each
/// reached system against the recorded state. Returns the final system.
pub fn replay(
    sem: &Semantics,
    init: &System,
    lts: &Lts,
    steps: &[PathStep],
) -> Result<System, ReplayError> {
    let h = sem.curse.horizon();
    let t0 = init.time().concrete().unwrap_or(0);
    let mut cur = init.with_time(h.normalize(t0));
    for (index, st) in steps.iter().enumerate() {
        let next = sem
            .successors(&cur)?
            .into_iter()
            .find(|(l, _)| *l == st.label)
            .ok_or_else(|| ReplayError::NotEnabled {
                index,
                label: st.label.to_string(),
            })?
            .1;
        let next = if st.label.is_time() {
            let t = next.time().concrete().unwrap_or(0);
            next.with_time(h.normalize(t))
        } else {
            next
        };
        if next != lts.states[st.dst].system {
            return Err(ReplayError::Diverged { index });
        }
        cur = next;
    }
    Ok(cur)
}

impl Lts {
    fn add_state(&mut self, index: &mut HashMap<System, StateId>, sys: System, t: u64) -> StateId {
        let id = self.states.len();
        index.insert(sys.clone(), id);
        self.states.push(State {
            barbs: barbs_of(&sys),
            system: sys,
            first_reached: t,
            expanded: false,
        });
        self.succ.push(Vec::new());
        id
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn is_complete(&self) -> bool {
        self.truncations.is_empty()
    }

    pub fn edge_count(&self) -> usize {
        self.succ.iter().map(Vec::len).sum()
    }

    pub fn instant_succ(&self, s: StateId) -> impl Iterator<Item = &Edge> {
        self.succ[s].iter().filter(|e| !e.is_time())
    }

    pub fn time_succ(&self, s: StateId) -> impl Iterator<Item = &Edge> {
        self.succ[s].iter().filter(|e| e.is_time())
    }

    /// States reachable from `from`, including itself.
    pub fn reachable(&self, from: StateId) -> Vec<bool> {
        let mut seen = vec![false; self.len()];
        let mut stack = vec![from];
        seen[from] = true;
        while let Some(s) = stack.pop() {
            for e in &self.succ[s] {
                if !seen[e.dst] {
                    seen[e.dst] = true;
                    stack.push(e.dst);
                }
            }
        }
        seen
    }

    fn check_covers(&self, n: u64) -> Result<(), SliceError> {
        let start = self.states[self.root].first_reached;
        if self.truncations.contains(&Truncation::MaxTime) && n >= self.bounds.max_time.max(start) {
            return Err(SliceError::HorizonTooSmall {
                n,
                max_time: self.bounds.max_time,
            });
        }
        Ok(())
    }

    /// Layers `0..=n` of the time-unrolled graph from the root, with
    /// predecessor links for trace reconstruction.
    fn unroll(&self, n: u64) -> Result<(Vec<Layer>, Vec<Preds>), SliceError> {
        self.check_covers(n)?;
        let mut layers = Vec::with_capacity(n as usize + 1);
        let mut preds: Vec<Preds> = Vec::new();
        let mut entries: BTreeSet<StateId> = [self.root].into();
        let mut entry_pred = HashMap::new();
        for k in 0..=n {
            let mut states = BTreeSet::new();
            let mut pred = entry_pred;
            let mut stack: Vec<StateId> = entries.iter().copied().collect();
            states.extend(entries.iter().copied());
            while let Some(s) = stack.pop() {
                for (i, e) in self.succ[s].iter().enumerate() {
                    if !e.is_time() && states.insert(e.dst) {
                        pred.insert(e.dst, (k, s, i));
                        stack.push(e.dst);
                    }
                }
            }
            let mut next = BTreeSet::new();
            let mut next_pred = HashMap::new();
            for &s in &states {
                for (i, e) in self.succ[s].iter().enumerate() {
                    if e.is_time() && next.insert(e.dst) {
                        next_pred.insert(e.dst, (k, s, i));
                    }
                }
            }
            layers.push(Layer { entries, states });
            preds.push(pred);
            entries = next;
            entry_pred = next_pred;
        }
        Ok((layers, preds))
    }

    /// For every `k <= n`, the states reachable at absolute time `root + k`.
    pub fn time_layers(&self, n: u64) -> Result<Vec<Layer>, SliceError> {
        Ok(self.unroll(n)?.0)
    }

    /// The first states reached at time `n`.
    pub fn n_entries(&self, n: u64) -> Result<BTreeSet<StateId>, SliceError> {
        Ok(self.unroll(n)?.0.pop().unwrap().entries)
    }

    /// A trace from the root to `target`, reaching it at time `n`.
    pub fn trace_to(&self, n: u64, target: StateId) -> Result<Option<Vec<PathStep>>, SliceError> {
        let (layers, preds) = self.unroll(n)?;
        if !layers[n as usize].states.contains(&target) {
            return Ok(None);
        }
        let mut out = Vec::new();
        let (mut k, mut s) = (n, target);
        loop {
            if k == 0 && s == self.root {
                break;
            }
            let (pk, ps, i) = *preds[k as usize]
                .get(&s)
                .expect("every non-root state of a layer has a predecessor");
            let start = self.states[self.root].first_reached;
            out.push(PathStep {
                time: start
                    + if self.succ[ps][i].is_time() {
                        pk + 1
                    } else {
                        pk
                    },
                label: self.succ[ps][i].label.clone(),
                dst: s,
            });
            k = pk;
            s = ps;
        }
        out.reverse();
        Ok(Some(out))
    }

    /// Shortest trace (in steps) from the root to any state satisfying `goal`.
    pub fn shortest_trace(&self, goal: impl Fn(StateId) -> bool) -> Option<Vec<PathStep>> {
        self.shortest_trace_from(self.root, goal)
    }

    pub fn shortest_trace_from(
        &self,
        from: StateId,
        goal: impl Fn(StateId) -> bool,
    ) -> Option<Vec<PathStep>> {
        let mut prev: Vec<Option<(StateId, usize)>> = vec![None; self.len()];
        let mut seen = vec![false; self.len()];
        let mut queue = VecDeque::from([from]);
        seen[from] = true;
        let mut found = None;
        while let Some(s) = queue.pop_front() {
            if goal(s) {
                found = Some(s);
                break;
            }
            for (i, e) in self.succ[s].iter().enumerate() {
                if !seen[e.dst] {
                    seen[e.dst] = true;
                    prev[e.dst] = Some((s, i));
                    queue.push_back(e.dst);
                }
            }
        }
        let mut s = found?;
        let mut rev = Vec::new();
        while let Some((p, i)) = prev[s] {
            rev.push((p, i, s));
            s = p;
        }
        rev.reverse();
        let mut t = self.states[from].first_reached;
        Some(
            rev.into_iter()
                .map(|(p, i, d)| {
                    let e = &self.succ[p][i];
                    if e.is_time() {
                        t += 1;
                    }
                    PathStep {
                        time: t,
                        label: e.label.clone(),
                        dst: d,
                    }
                })
                .collect(),
        )
    }

    /// All maximal instantaneous paths from each `n`-entry, as state
    /// sequences, up to `cap` paths.
    pub fn n_paths(&self, n: u64, cap: usize) -> Result<Vec<Vec<StateId>>, SliceError> {
        let entries = self.n_entries(n)?;
        self.check_slice_acyclic(&entries, n)?;
        let mut out = Vec::new();
        for &e in &entries {
            let mut stack = vec![vec![e]];
            while let Some(path) = stack.pop() {
                if out.len() >= cap {
                    return Ok(out);
                }
                let last = *path.last().unwrap();
                let nexts: Vec<_> = self.instant_succ(last).map(|e| e.dst).collect();
                if nexts.is_empty() {
                    out.push(path);
                } else {
                    for d in nexts.into_iter().rev() {
                        let mut p = path.clone();
                        p.push(d);
                        stack.push(p);
                    }
                }
            }
        }
        Ok(out)
    }

    /// Fails if an instantaneous cycle is reachable from `entries`.
    pub fn check_slice_acyclic(
        &self,
        entries: &BTreeSet<StateId>,
        n: u64,
    ) -> Result<(), SliceError> {
        // 0 = unvisited, 1 = on stack, 2 = done
        let mut mark = vec![0u8; self.len()];
        for &e in entries {
            if mark[e] != 0 {
                continue;
            }
            let mut stack: Vec<(StateId, usize)> = vec![(e, 0)];
            mark[e] = 1;
            while let Some(&mut (s, ref mut i)) = stack.last_mut() {
                let inst: Vec<_> = self.instant_succ(s).map(|e| e.dst).collect();
                if *i < inst.len() {
                    let d = inst[*i];
                    *i += 1;
                    match mark[d] {
                        0 => {
                            mark[d] = 1;
                            stack.push((d, 0));
                        }
                        1 => {
                            return Err(SliceError::InstantCycle {
                                time: self.states[self.root].first_reached + n,
                                state: d,
                            })
                        }
                        _ => {}
                    }
                } else {
                    mark[s] = 2;
                    stack.pop();
                }
            }
        }
        Ok(())
    }

    /// Graphviz rendering: states labelled by key digest and barbs, edges by rule.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph lts {\n  node [shape=box, fontname=monospace];\n");
        for (i, st) in self.states.iter().enumerate() {
            let barbs: Vec<_> = st.barbs.iter().map(|b| b.to_string()).collect();
            let mut attrs = String::new();
            if i == self.root {
                attrs.push_str(", penwidth=2");
            }
            if !st.expanded {
                attrs.push_str(", style=dashed");
            }
            s.push_str(&format!(
                "  s{i} [label=\"s{i} #{:016x}\\nt={}\\n{{{}}}\"{attrs}];\n",
                digest(&st.system),
                st.first_reached,
                escape(&barbs.join(", "))
            ));
        }
        for (i, es) in self.succ.iter().enumerate() {
            for e in es {
                let style = if e.is_time() { ", style=dashed" } else { "" };
                s.push_str(&format!(
                    "  s{i} -> s{} [label=\"{}\"{style}];\n",
                    e.dst,
                    e.label.rule_name()
                ));
            }
        }
        s.push_str("}\n");
        s
    }

    /// JSON rendering carrying the same content as the DOT output.
    pub fn to_json(&self) -> serde_json::Value {
        use serde_json::json;
        let states: Vec<_> = self
            .states
            .iter()
            .enumerate()
            .map(|(i, st)| {
                json!({
                    "id": i,
                    "digest": format!("{:016x}", digest(&st.system)),
                    "key": st.system.to_string(),
                    "first_reached": st.first_reached,
                    "expanded": st.expanded,
                    "barbs": st.barbs.iter().map(|b| b.to_string()).collect::<Vec<_>>(),
                })
            })
            .collect();
        let edges: Vec<_> = self
            .succ
            .iter()
            .enumerate()
            .flat_map(|(i, es)| {
                es.iter().map(move |e| {
                    json!({
                        "src": i,
                        "dst": e.dst,
                        "kind": if e.is_time() { "time" } else { "instant" },
                        "rule": e.label.rule_name(),
                        "label": e.label.to_string(),
                    })
                })
            })
            .collect();
        json!({
            "schema": "greyfail-lts/1",
            "complete": self.is_complete(),
            "truncations": self.truncations.iter().map(|t| t.to_string()).collect::<Vec<_>>(),
            "bounds": {
                "max_time": self.bounds.max_time,
                "max_states": self.bounds.max_states,
                "max_mailbox": self.bounds.max_mailbox,
            },
            "horizon": {
                "stable_time": self.horizon.stable_time,
                "period": self.horizon.period,
            },
            "root": self.root,
            "states": states,
            "edges": edges,
        })
    }
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// FNV-1a over the printed key; stable across runs and platforms.
pub fn digest(s: &System) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for b in s.to_string().bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curse::CurseSpec;
    use crate::dsl::{parse_curse, parse_system};

    fn lts_of(src: &str, curse: &str, bounds: &Bounds) -> Lts {
        let b = parse_system(src).unwrap();
        let c = parse_curse(curse).unwrap();
        let sem = Semantics::new(c, b.config.latency);
        explore(&sem, &b.system, bounds)
    }

    const ONE: &str = "latency 1;
        node a { !@b x. 0 }
        node b { mu w. recv {x -> 0} after 0 {w} }";

    #[test]
    fn one_message_is_finite_and_complete() {
        let l = lts_of(ONE, "curse {}", &Bounds::default());
        assert!(l.is_complete());
        assert_eq!(l.len(), l.succ.len());
        // send, latency tick, schedule, receive; then idle forever
        let layers = l.time_layers(3).unwrap();
        assert_eq!(layers[0].entries, [l.root].into());
        assert!(l.n_entries(1).unwrap().len() == 1);
        let paths = l.n_paths(0, 10).unwrap();
        assert_eq!(paths.len(), 1);
        assert!(paths[0].len() >= 2);
    }

    #[test]
    fn traces_carry_absolute_times() {
        let l = lts_of(ONE, "curse {}", &Bounds::default());
        let target = *l.time_layers(2).unwrap()[2].states.iter().next().unwrap();
        let tr = l.trace_to(2, target).unwrap().unwrap();
        assert_eq!(tr.last().map(|s| s.dst), Some(target));
        assert_eq!(tr.iter().filter(|s| s.label.is_time()).count(), 2);
        let mut last = 0;
        for s in &tr {
            assert!(s.time >= last);
            last = s.time;
        }
        assert_eq!(last, 2);
    }

    #[test]
    fn time_bound_truncates() {
        let loop_ = "latency 1; node a { mu t. sleep. !@a x. t }";
        let b = Bounds {
            max_time: Some(3),
            ..Bounds::default()
        };
        let l = lts_of(loop_, "curse {}", &b);
        assert!(l.truncations.contains(&Truncation::MaxTime));
        assert!(!l.is_complete());
        assert!(matches!(
            l.time_layers(5),
            Err(SliceError::HorizonTooSmall { .. })
        ));
        assert!(l.time_layers(2).is_ok());
    }

    #[test]
    fn mailbox_bound_truncates() {
        let flood = "latency 1; node a { mu t. sleep. !@b x. t } node b { 0 }";
        let b = Bounds {
            max_mailbox: 2,
            ..Bounds::default()
        };
        let l = lts_of(flood, "curse {}", &b);
        assert!(l.truncations.contains(&Truncation::MaxMailbox));
    }

    #[test]
    fn state_bound_truncates() {
        let flood = "latency 1; node a { mu t. sleep. !@b x. t } node b { 0 }";
        let b = Bounds {
            max_states: 5,
            ..Bounds::default()
        };
        let l = lts_of(flood, "curse {}", &b);
        assert!(l.truncations.contains(&Truncation::MaxStates));
        assert!(l.len() <= 5);
    }

    #[test]
    fn periodic_curse_folds_time() {
        let tick = "latency 1; node a { mu t. sleep. t }";
        let l = lts_of(
            tick,
            "curse { node a : slow @ every 2 active 1 offset 0 from 2; }",
            &Bounds::default(),
        );
        assert!(l.is_complete());
        assert!(l.len() <= 2 * (l.horizon.stable_time as usize + l.horizon.period as usize + 1));
    }

    #[test]
    fn explore_is_deterministic() {
        let src = "latency 1;
            node p { recv {order -> !@c item. 0} after 3 {0} }
            node c { !@p order. recv {item -> 0} after 3 {0} }";
        let k = "curse { link p -> c : down @ [1,1]; }";
        let a = lts_of(src, k, &Bounds::default());
        let b = lts_of(src, k, &Bounds::default());
        assert_eq!(a.to_dot(), b.to_dot());
        assert_eq!(a.to_json(), b.to_json());
    }

    #[test]
    fn replay_follows_recorded_steps() {
        let b = parse_system(ONE).unwrap();
        let sem = Semantics::new(CurseSpec::uncursed(), 1);
        let l = explore(&sem, &b.system, &Bounds::default());
        let tr = l
            .shortest_trace(|s| l.succ[s].iter().all(|e| e.is_time()) && s != l.root)
            .unwrap();
        let end = replay(&sem, &b.system, &l, &tr).unwrap();
        assert_eq!(
            digest(&end),
            digest(&l.states[tr.last().unwrap().dst].system)
        );
    }
}
