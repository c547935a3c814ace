//! Weak (time-abstract) barbed simulation and bisimulation between explored
//! graphs, with their time-budgeted "up to n" variants.
//!
//! Every reduction is unobservable, so weak bisimilarity is strong
//! bisimilarity of the reflexive-transitive closure with weak barbs as state
//! labels. States on a common cycle are then indistinguishable, and all
//! plain checks run on the condensation of the two graphs laid side by side.

use std::cell::OnceCell;
use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt;

use fixedbitset::FixedBitSet;
use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};
use serde::Serialize;

use crate::barbs::{scoped_barbs, Barb, ScopeSet};
use crate::lts::{Lts, PathStep, StateId, Truncation};

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Left => "left",
            Side::Right => "right",
        })
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Relation {
    Sim,
    Bisim,
}

/// Evidence for a failed check: a run on each side from the roots, ending
/// where one side shows `barb` and the other can never show it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub left_trace: Vec<PathStep>,
    pub right_trace: Vec<PathStep>,
    pub left_state: StateId,
    pub right_state: StateId,
    /// The unmatched barb and the side exhibiting it.
    pub barb: Option<(Side, Barb)>,
    pub reason: String,
}

#[derive(Clone, Debug)]
pub struct EqVerdict {
    pub relation: Relation,
    pub upto: Option<u64>,
    pub holds: bool,
    /// False when a bound truncated either graph within the compared window.
    pub conclusive: bool,
    pub witness: Option<Witness>,
}

/// Whether the graph's truncations leave the first `n` time units from the
/// root intact (`None`: the whole graph).
pub fn covers(lts: &Lts, n: Option<u64>) -> bool {
    lts.truncations.iter().all(|t| match (t, n) {
        (Truncation::MaxTime, Some(n)) => {
            lts.states[lts.root].first_reached + n < lts.bounds.max_time
        }
        _ => false,
    })
}

struct Classes {
    /// Block of each component, one vector per refinement round.
    rounds: Vec<Vec<usize>>,
}

/// Two explored graphs with scoped barbs interned, as one disjoint union.
/// Left states keep their ids; right state `s` is `left.len() + s`.
pub struct Pair<'a> {
    pub left: &'a Lts,
    pub right: &'a Lts,
    table: Vec<Barb>,
    strong: Vec<FixedBitSet>,
    succ: Vec<Vec<(usize, bool)>>,
    /// Component of each state. Components are numbered sinks first, so
    /// every successor of component `c` is numbered below `c`.
    comp: Vec<usize>,
    dag: Vec<Vec<usize>>,
    weak: Vec<FixedBitSet>,
    classes: OnceCell<Classes>,
    sim: OnceCell<Vec<FixedBitSet>>,
}

impl<'a> Pair<'a> {
    pub fn new(left: &'a Lts, right: &'a Lts, scope: &ScopeSet) -> Self {
        let nl = left.len();
        let n = nl + right.len();
        let mut table = Vec::new();
        let mut index: HashMap<Barb, usize> = HashMap::new();
        let mut scoped = Vec::with_capacity(n);
        for st in left.states.iter().chain(&right.states) {
            let bs = scoped_barbs(&st.barbs, scope);
            for b in &bs {
                if !index.contains_key(b) {
                    index.insert(b.clone(), table.len());
                    table.push(b.clone());
                }
            }
            scoped.push(bs);
        }
        let strong: Vec<FixedBitSet> = scoped
            .iter()
            .map(|bs| {
                let mut s = FixedBitSet::with_capacity(table.len());
                bs.iter().for_each(|b| s.insert(index[b]));
                s
            })
            .collect();
        let mut succ = Vec::with_capacity(n);
        for (lts, off) in [(left, 0), (right, nl)] {
            for es in &lts.succ {
                succ.push(
                    es.iter()
                        .map(|e| (e.dst + off, e.is_time()))
                        .collect::<Vec<_>>(),
                );
            }
        }
        let mut g: DiGraph<(), ()> = DiGraph::with_capacity(n, 0);
        for _ in 0..n {
            g.add_node(());
        }
        for (s, es) in succ.iter().enumerate() {
            for &(d, _) in es {
                g.add_edge(NodeIndex::new(s), NodeIndex::new(d), ());
            }
        }
        let sccs = tarjan_scc(&g);
        let mut comp = vec![0; n];
        for (i, members) in sccs.iter().enumerate() {
            for m in members {
                comp[m.index()] = i;
            }
        }
        let mut dag = vec![Vec::new(); sccs.len()];
        let mut weak = Vec::with_capacity(sccs.len());
        for (i, members) in sccs.iter().enumerate() {
            let mut w = FixedBitSet::with_capacity(table.len());
            let mut ds = BTreeSet::new();
            for m in members {
                w.union_with(&strong[m.index()]);
                for &(d, _) in &succ[m.index()] {
                    if comp[d] != i {
                        debug_assert!(comp[d] < i, "components must be numbered sinks first");
                        ds.insert(comp[d]);
                    }
                }
            }
            for &d in &ds {
                let wd: &FixedBitSet = &weak[d];
                w.union_with(wd);
            }
            dag[i] = ds.into_iter().collect();
            weak.push(w);
        }
        Pair {
            left,
            right,
            table,
            strong,
            succ,
            comp,
            dag,
            weak,
            classes: OnceCell::new(),
            sim: OnceCell::new(),
        }
    }

    pub fn union_id(&self, side: Side, s: StateId) -> usize {
        match side {
            Side::Left => s,
            Side::Right => self.left.len() + s,
        }
    }

    fn local(&self, u: usize) -> (Side, StateId) {
        if u < self.left.len() {
            (Side::Left, u)
        } else {
            (Side::Right, u - self.left.len())
        }
    }

    fn lts(&self, side: Side) -> &Lts {
        match side {
            Side::Left => self.left,
            Side::Right => self.right,
        }
    }

    fn ncomps(&self) -> usize {
        self.dag.len()
    }

    fn barbs_in(&self, set: &FixedBitSet) -> BTreeSet<Barb> {
        set.ones().map(|i| self.table[i].clone()).collect()
    }

    /// Scoped barbs the state can eventually exhibit.
    pub fn weak_barbs(&self, side: Side, s: StateId) -> BTreeSet<Barb> {
        self.barbs_in(&self.weak[self.comp[self.union_id(side, s)]])
    }

    pub fn strong_barbs(&self, side: Side, s: StateId) -> BTreeSet<Barb> {
        self.barbs_in(&self.strong[self.union_id(side, s)])
    }

    /// Components from which some component of `target` is reachable.
    fn pre_star(&self, target: &FixedBitSet) -> FixedBitSet {
        let mut p = FixedBitSet::with_capacity(self.ncomps());
        for c in 0..self.ncomps() {
            if target.contains(c) || self.dag[c].iter().any(|&d| p.contains(d)) {
                p.insert(c);
            }
        }
        p
    }

    /// States from which some state of `target` is reachable.
    fn pre_star_states(&self, target: &FixedBitSet) -> FixedBitSet {
        let mut cs = FixedBitSet::with_capacity(self.ncomps());
        target.ones().for_each(|s| cs.insert(self.comp[s]));
        let p = self.pre_star(&cs);
        let mut out = FixedBitSet::with_capacity(self.comp.len());
        for (s, &c) in self.comp.iter().enumerate() {
            if p.contains(c) {
                out.insert(s);
            }
        }
        out
    }

    fn classes(&self) -> &Classes {
        self.classes.get_or_init(|| {
            let nc = self.ncomps();
            let mut ids: HashMap<&FixedBitSet, usize> = HashMap::new();
            let first: Vec<usize> = (0..nc)
                .map(|c| {
                    let k = ids.len();
                    *ids.entry(&self.weak[c]).or_insert(k)
                })
                .collect();
            let mut count = ids.len();
            let mut rounds = vec![first];
            loop {
                let cur = rounds.last().unwrap();
                let mut reach: Vec<FixedBitSet> = Vec::with_capacity(nc);
                for c in 0..nc {
                    let mut r = FixedBitSet::with_capacity(count);
                    r.insert(cur[c]);
                    for &d in &self.dag[c] {
                        let rd: &FixedBitSet = &reach[d];
                        r.union_with(rd);
                    }
                    reach.push(r);
                }
                let mut sigs: HashMap<(usize, &FixedBitSet), usize> = HashMap::new();
                let next: Vec<usize> = (0..nc)
                    .map(|c| {
                        let k = sigs.len();
                        *sigs.entry((cur[c], &reach[c])).or_insert(k)
                    })
                    .collect();
                let new_count = sigs.len();
                drop(sigs);
                if new_count == count {
                    break;
                }
                count = new_count;
                rounds.push(next);
            }
            Classes { rounds }
        })
    }

    /// Bisimulation class of every state, as a dense id.
    pub fn bisim_class(&self, side: Side, s: StateId) -> usize {
        self.classes().rounds.last().unwrap()[self.comp[self.union_id(side, s)]]
    }

    pub fn bisimilar(&self, a: (Side, StateId), b: (Side, StateId)) -> bool {
        self.bisim_class(a.0, a.1) == self.bisim_class(b.0, b.1)
    }

    /// `rel[c]`: the components simulating component `c`.
    fn sim_rel(&self) -> &Vec<FixedBitSet> {
        self.sim.get_or_init(|| {
            let nc = self.ncomps();
            let mut rel: Vec<FixedBitSet> = Vec::with_capacity(nc);
            for c in 0..nc {
                let mut r = FixedBitSet::with_capacity(nc);
                for d in 0..nc {
                    if self.weak[c].is_subset(&self.weak[d]) {
                        r.insert(d);
                    }
                }
                for &c2 in &self.dag[c] {
                    r.intersect_with(&self.pre_star(&rel[c2]));
                }
                rel.push(r);
            }
            rel
        })
    }

    /// Whether `a` is weakly simulated by `b`.
    pub fn similar(&self, a: (Side, StateId), b: (Side, StateId)) -> bool {
        let ca = self.comp[self.union_id(a.0, a.1)];
        let cb = self.comp[self.union_id(b.0, b.1)];
        self.sim_rel()[ca].contains(cb)
    }

    /// Up-to-`r` simulation for `r = 0..=n`: `levels[r][x]` holds the
    /// components simulating state `x` within budget `r`. Stops early once
    /// a level repeats, since all later levels then coincide.
    fn sim_levels(&self, n: u64) -> Vec<Vec<FixedBitSet>> {
        let ns = self.comp.len();
        let nc = self.ncomps();
        let mut full = FixedBitSet::with_capacity(nc);
        full.insert_range(..);
        let mut levels = vec![vec![full; ns]];
        let r0: Vec<FixedBitSet> = (0..ns)
            .map(|x| {
                let mut r = FixedBitSet::with_capacity(nc);
                for d in 0..nc {
                    if self.strong[x].is_subset(&self.weak[d]) {
                        r.insert(d);
                    }
                }
                r
            })
            .collect();
        for _ in 1..=n {
            let prev = levels.last().unwrap();
            let prev_pre: Vec<FixedBitSet> = prev.iter().map(|s| self.pre_star(s)).collect();
            let mut cur: Vec<FixedBitSet> = prev
                .iter()
                .zip(&r0)
                .map(|(p, r)| {
                    let mut p = p.clone();
                    p.intersect_with(r);
                    p
                })
                .collect();
            loop {
                let pre: Vec<FixedBitSet> = cur.iter().map(|s| self.pre_star(s)).collect();
                let mut changed = false;
                for x in 0..ns {
                    let mut nx = cur[x].clone();
                    for &(d, is_time) in &self.succ[x] {
                        nx.intersect_with(if is_time { &prev_pre[d] } else { &pre[d] });
                    }
                    if nx != cur[x] {
                        cur[x] = nx;
                        changed = true;
                    }
                }
                if !changed {
                    break;
                }
            }
            let same = &cur == prev;
            levels.push(cur);
            if same {
                break;
            }
        }
        levels
    }

    /// Up-to-`r` bisimulation for `r = 0..=n`, as symmetric state relations.
    fn bisim_levels(&self, n: u64) -> Vec<Vec<FixedBitSet>> {
        let ns = self.comp.len();
        let mut full = FixedBitSet::with_capacity(ns);
        full.insert_range(..);
        let mut levels = vec![vec![full; ns]];
        for _ in 1..=n {
            let prev = levels.last().unwrap();
            let prev_pre: Vec<FixedBitSet> = prev.iter().map(|s| self.pre_star_states(s)).collect();
            let mut cur: Vec<FixedBitSet> = (0..ns)
                .map(|x| {
                    let mut r = prev[x].clone();
                    for y in prev[x].ones() {
                        let (cx, cy) = (self.comp[x], self.comp[y]);
                        if !self.strong[x].is_subset(&self.weak[cy])
                            || !self.strong[y].is_subset(&self.weak[cx])
                        {
                            r.set(y, false);
                        }
                    }
                    r
                })
                .collect();
            loop {
                let pre: Vec<FixedBitSet> = cur.iter().map(|s| self.pre_star_states(s)).collect();
                let pick = |d: usize, is_time: bool| if is_time { &prev_pre[d] } else { &pre[d] };
                let mut next = Vec::with_capacity(ns);
                for x in 0..ns {
                    let mut cand = cur[x].clone();
                    for &(d, t) in &self.succ[x] {
                        cand.intersect_with(pick(d, t));
                    }
                    let drop: Vec<usize> = cand
                        .ones()
                        .filter(|&y| !self.succ[y].iter().all(|&(d, t)| pick(d, t).contains(x)))
                        .collect();
                    drop.into_iter().for_each(|y| cand.set(y, false));
                    next.push(cand);
                }
                // keep the relation symmetric
                for x in 0..ns {
                    for y in next[x].ones().collect::<Vec<_>>() {
                        if !next[y].contains(x) {
                            next[x].set(y, false);
                        }
                    }
                }
                if next == cur {
                    break;
                }
                cur = next;
            }
            let same = &cur == prev;
            levels.push(cur);
            if same {
                break;
            }
        }
        levels
    }

    fn level(levels: &[Vec<FixedBitSet>], r: u64) -> &[FixedBitSet] {
        &levels[(r as usize).min(levels.len() - 1)]
    }

    /// Up-to-`n` bisimilarity between one left and one right state.
    pub fn bisimilar_upto(&self, a: StateId, b: StateId, n: u64) -> bool {
        let levels = self.bisim_levels(n);
        Self::level(&levels, n)[a].contains(self.union_id(Side::Right, b))
    }

    /// `out[r]` is whether left `a` and right `b` are bisimilar up to `r`,
    /// for `r = 0..=n`.
    pub fn bisim_profile(&self, a: StateId, b: StateId, n: u64) -> Vec<bool> {
        let levels = self.bisim_levels(n);
        let y = self.union_id(Side::Right, b);
        (0..=n)
            .map(|r| Self::level(&levels, r)[a].contains(y))
            .collect()
    }

    /// Shortest path on one side from `from` to a state satisfying `goal`.
    fn path(&self, from: usize, goal: impl Fn(usize) -> bool) -> (Vec<PathStep>, usize) {
        let (side, s) = self.local(from);
        let off = self.union_id(side, 0);
        let tr = self
            .lts(side)
            .shortest_trace_from(s, |t| goal(t + off))
            .expect("goal state is reachable");
        let end = tr.last().map_or(from, |st| st.dst + off);
        (tr, end)
    }

    fn barb_path(&self, from: usize, barb: usize) -> (Vec<PathStep>, usize) {
        self.path(from, |t| self.strong[t].contains(barb))
    }

    fn first_missing(&self, have: &FixedBitSet, lacks: &FixedBitSet) -> Option<usize> {
        have.ones().find(|&b| !lacks.contains(b))
    }

    fn finish(
        &self,
        mut traces: [Vec<PathStep>; 2],
        mut ends: [usize; 2],
        barb: Option<(usize, usize)>,
        reason: String,
    ) -> Witness {
        let mut found = None;
        if let Some((who, b)) = barb {
            let (tr, end) = self.barb_path(ends[who], b);
            traces[who].extend(tr);
            ends[who] = end;
            let side = if who == 0 { Side::Left } else { Side::Right };
            found = Some((side, self.table[b].clone()));
        }
        let [lt, rt] = traces;
        Witness {
            left_trace: retime(self.left, lt),
            right_trace: retime(self.right, rt),
            left_state: ends[0],
            right_state: ends[1] - self.left.len(),
            barb: found,
            reason,
        }
    }

    /// Why the left root is not simulated by the right root.
    pub fn sim_witness(&self) -> Witness {
        let y = self.union_id(Side::Right, self.right.root);
        let mut x = self.left.root;
        let mut trace = Vec::new();
        let rel = self.sim_rel();
        let cy = self.comp[y];
        loop {
            let cx = self.comp[x];
            if let Some(b) = self.first_missing(&self.weak[cx], &self.weak[cy]) {
                return self.finish(
                    [trace, vec![]],
                    [x, y],
                    Some((0, b)),
                    "the left side shows a barb the right side never shows".into(),
                );
            }
            let bad = self.dag[cx]
                .iter()
                .copied()
                .find(|&c2| !self.pre_star(&rel[c2]).contains(cy))
                .expect("a failed pair has a barb or successor reason");
            let (tr, end) = self.path(x, |t| self.comp[t] == bad);
            trace.extend(tr);
            x = end;
        }
    }

    /// Why the roots are not bisimilar. Each move goes to a pair separated
    /// in an earlier refinement round, so the walk ends at a barb mismatch.
    pub fn bisim_witness(&self) -> Witness {
        let rounds = &self.classes().rounds;
        let mut ends = [self.left.root, self.union_id(Side::Right, self.right.root)];
        let mut traces = [Vec::new(), Vec::new()];
        loop {
            let (cx, cy) = (self.comp[ends[0]], self.comp[ends[1]]);
            let k = rounds
                .iter()
                .position(|r| r[cx] != r[cy])
                .expect("walk stays on separated pairs");
            if k == 0 {
                let barb = match self.first_missing(&self.weak[cx], &self.weak[cy]) {
                    Some(b) => (0, b),
                    None => (
                        1,
                        self.first_missing(&self.weak[cy], &self.weak[cx]).unwrap(),
                    ),
                };
                return self.finish(
                    traces,
                    ends,
                    Some(barb),
                    "one side shows a barb the other side can no longer show".into(),
                );
            }
            let part = &rounds[k - 1];
            let blocks = |from: usize| -> BTreeSet<usize> {
                let (side, s) = self.local(from);
                let off = self.union_id(side, 0);
                self.lts(side)
                    .reachable(s)
                    .iter()
                    .enumerate()
                    .filter(|(_, &r)| r)
                    .map(|(t, _)| part[self.comp[t + off]])
                    .collect()
            };
            let (bx, by) = (blocks(ends[0]), blocks(ends[1]));
            let (who, block) = match bx.difference(&by).next() {
                Some(&b) => (0, b),
                None => (1, *by.difference(&bx).next().expect("signatures differ")),
            };
            let (tr, end) = self.path(ends[who], |t| part[self.comp[t]] == block);
            traces[who].extend(tr);
            ends[who] = end;
        }
    }

    fn upto_witness(&self, levels: &[Vec<FixedBitSet>], n: u64, bisim: bool) -> Witness {
        let mut ends = [self.left.root, self.union_id(Side::Right, self.right.root)];
        let mut traces: [Vec<PathStep>; 2] = [Vec::new(), Vec::new()];
        let mut r = n;
        let mut seen = HashSet::new();
        let related = |x: usize, y: usize, r: u64| -> bool {
            let lv = Self::level(levels, r);
            if bisim {
                lv[x].contains(y)
            } else {
                lv[x].contains(self.comp[y])
            }
        };
        loop {
            if !seen.insert((ends, r)) {
                return self.finish(
                    traces,
                    ends,
                    None,
                    format!("unmatched step within {r} time units of the budget"),
                );
            }
            let [x, y] = ends;
            let (cx, cy) = (self.comp[x], self.comp[y]);
            if let Some(b) = self.first_missing(&self.strong[x], &self.weak[cy]) {
                return self.finish(
                    traces,
                    ends,
                    Some((0, b)),
                    format!("barb unmatched with {r} time units of budget left"),
                );
            }
            if bisim {
                if let Some(b) = self.first_missing(&self.strong[y], &self.weak[cx]) {
                    return self.finish(
                        traces,
                        ends,
                        Some((1, b)),
                        format!("barb unmatched with {r} time units of budget left"),
                    );
                }
            }
            let reach_y = self.pre_target(y);
            let reach_x = self.pre_target(x);
            let mut moved = false;
            for (who, from, other_reach) in [(0usize, x, &reach_y), (1, y, &reach_x)] {
                if who == 1 && !bisim {
                    break;
                }
                for &(d, t) in &self.succ[from] {
                    let rr = r - t as u64;
                    let matched = other_reach.iter().any(|&o| {
                        if who == 0 {
                            related(d, o, rr)
                        } else {
                            related(o, d, rr)
                        }
                    });
                    if !matched {
                        let (side, s) = self.local(from);
                        let lts = self.lts(side);
                        let e = lts.succ[s]
                            .iter()
                            .find(|e| e.dst + self.union_id(side, 0) == d)
                            .unwrap();
                        traces[who].push(PathStep {
                            time: 0,
                            label: e.label.clone(),
                            dst: e.dst,
                        });
                        ends[who] = d;
                        r = rr;
                        moved = true;
                        break;
                    }
                }
                if moved {
                    break;
                }
            }
            if !moved || r == 0 {
                return self.finish(traces, ends, None, "unmatched step".into());
            }
        }
    }

    /// States reachable from `u` on its own side.
    fn pre_target(&self, u: usize) -> Vec<usize> {
        let (side, s) = self.local(u);
        let off = self.union_id(side, 0);
        self.lts(side)
            .reachable(s)
            .iter()
            .enumerate()
            .filter(|(_, &r)| r)
            .map(|(t, _)| t + off)
            .collect()
    }
}

/// Recomputes absolute times along a trace starting at the root.
fn retime(lts: &Lts, steps: Vec<PathStep>) -> Vec<PathStep> {
    let mut t = lts.states[lts.root].first_reached;
    steps
        .into_iter()
        .map(|mut st| {
            if st.label.is_time() {
                t += 1;
            }
            st.time = t;
            st
        })
        .collect()
}

fn verdict(relation: Relation, upto: Option<u64>, left: &Lts, right: &Lts) -> EqVerdict {
    EqVerdict {
        relation,
        upto,
        holds: false,
        conclusive: covers(left, upto) && covers(right, upto),
        witness: None,
    }
}

/// `left ≲ right`.
pub fn weak_sim(left: &Lts, right: &Lts, scope: &ScopeSet) -> EqVerdict {
    let p = Pair::new(left, right, scope);
    let mut v = verdict(Relation::Sim, None, left, right);
    v.holds = p.similar((Side::Left, left.root), (Side::Right, right.root));
    if !v.holds {
        v.witness = Some(p.sim_witness());
    }
    v
}

/// `left ≈ right`.
pub fn weak_bisim(left: &Lts, right: &Lts, scope: &ScopeSet) -> EqVerdict {
    let p = Pair::new(left, right, scope);
    let mut v = verdict(Relation::Bisim, None, left, right);
    v.holds = p.bisimilar((Side::Left, left.root), (Side::Right, right.root));
    if !v.holds {
        v.witness = Some(p.bisim_witness());
    }
    v
}

pub fn weak_sim_upto(left: &Lts, right: &Lts, n: u64, scope: &ScopeSet) -> EqVerdict {
    let p = Pair::new(left, right, scope);
    let levels = p.sim_levels(n);
    let mut v = verdict(Relation::Sim, Some(n), left, right);
    let y = p.comp[p.union_id(Side::Right, right.root)];
    v.holds = Pair::level(&levels, n)[left.root].contains(y);
    if !v.holds {
        v.witness = Some(p.upto_witness(&levels, n, false));
    }
    v
}

pub fn weak_bisim_upto(left: &Lts, right: &Lts, n: u64, scope: &ScopeSet) -> EqVerdict {
    let p = Pair::new(left, right, scope);
    let levels = p.bisim_levels(n);
    let mut v = verdict(Relation::Bisim, Some(n), left, right);
    v.holds = Pair::level(&levels, n)[left.root].contains(p.union_id(Side::Right, right.root));
    if !v.holds {
        v.witness = Some(p.upto_witness(&levels, n, true));
    }
    v
}

/// The largest `r <= n` with `left ≈^r right`.
pub fn bisim_budget(left: &Lts, right: &Lts, n: u64, scope: &ScopeSet) -> u64 {
    let p = Pair::new(left, right, scope);
    let levels = p.bisim_levels(n);
    let y = p.union_id(Side::Right, right.root);
    (0..=n)
        .take_while(|&r| Pair::level(&levels, r)[left.root].contains(y))
        .last()
        .unwrap_or(0)
}

/// Whether some state reachable from `from` shows `b` unhidden.
pub fn weakly_shows(lts: &Lts, from: StateId, b: &Barb, scope: &ScopeSet) -> bool {
    let mut seen = vec![false; lts.len()];
    let mut q = VecDeque::from([from]);
    seen[from] = true;
    while let Some(s) = q.pop_front() {
        if !scope.hides(b) && lts.states[s].barbs.contains(b) {
            return true;
        }
        for e in &lts.succ[s] {
            if !seen[e.dst] {
                seen[e.dst] = true;
                q.push_back(e.dst);
            }
        }
    }
    false
}
