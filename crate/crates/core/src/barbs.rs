//! Observables: barbs of systems and scope sets hiding some of them.

use std::collections::BTreeSet;
use std::fmt;

use crate::matching::matches;
use crate::syntax::{Component, Message, NodeId, Pattern, Process, System, Value};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Barb {
    /// `!n m`: a message for `n` is offered or floating.
    Out(NodeId, Message),
    /// `?n p`: node `n` is ready to receive on `p`.
    In(NodeId, Pattern),
}

fn tuple_text(items: Vec<String>) -> String {
    if items.len() == 1 {
        items.into_iter().next().unwrap()
    } else {
        format!("({})", items.join(", "))
    }
}

impl fmt::Display for Barb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Barb::Out(n, m) => {
                let items = m.0.iter().map(|v| v.to_string()).collect();
                write!(f, "!{n} {}", tuple_text(items))
            }
            Barb::In(n, p) => {
                let s = p.to_string();
                let inner = s.trim_start_matches('(').trim_end_matches(')');
                let items = inner.split(", ").map(str::to_string).collect();
                write!(f, "?{n} {}", tuple_text(items))
            }
        }
    }
}

/// Ready actions; `save.P` offers nothing until the checkpoint is taken.
fn ready(node: &NodeId, p: &Process, out: &mut BTreeSet<Barb>) {
    match p {
        Process::Send(branches) => {
            for b in branches.iter() {
                if let Value::Node(target) = &b.target {
                    if b.msg.is_ground() {
                        out.insert(Barb::Out(target.clone(), b.msg.clone()));
                    }
                }
            }
        }
        Process::Recv(r) => {
            for b in &r.branches {
                out.insert(Barb::In(node.clone(), b.pattern.clone()));
            }
        }
        Process::Fix(_, body) => ready(node, body, out),
        Process::Sleep(_) | Process::Save(_) | Process::Var(_) | Process::Inact => {}
    }
}

pub fn barbs_of(s: &System) -> BTreeSet<Barb> {
    let mut out = BTreeSet::new();
    for c in s.components() {
        match c {
            Component::Node { id, proc, .. } => ready(id, proc, &mut out),
            Component::Floating { dst, msg, .. } => {
                out.insert(Barb::Out(dst.clone(), msg.clone()));
            }
            Component::Crashed { .. } | Component::Latent { .. } => {}
        }
    }
    out
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum ScopeEntry {
    Out(NodeId, Pattern),
    In(NodeId, Pattern),
}

impl fmt::Display for ScopeEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScopeEntry::Out(n, p) => write!(f, "!{n} {p}"),
            ScopeEntry::In(n, p) => write!(f, "?{n} {p}"),
        }
    }
}

/// A finite set of hiding directives.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct ScopeSet {
    entries: BTreeSet<ScopeEntry>,
}

impl ScopeSet {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn new(entries: impl IntoIterator<Item = ScopeEntry>) -> Self {
        ScopeSet {
            entries: entries.into_iter().collect(),
        }
    }

    pub fn entries(&self) -> impl Iterator<Item = &ScopeEntry> {
        self.entries.iter()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_subset(&self, other: &ScopeSet) -> bool {
        self.entries.is_subset(&other.entries)
    }

    /// Whether the barb is hidden. Output barbs are hidden by any matching
    /// output directive; input barbs only by literal membership.
    pub fn hides(&self, b: &Barb) -> bool {
        match b {
            Barb::Out(n, m) => self.entries.iter().any(|e| match e {
                ScopeEntry::Out(k, p) => k == n && matches(p, m),
                ScopeEntry::In(..) => false,
            }),
            Barb::In(n, p) => self.entries.contains(&ScopeEntry::In(n.clone(), p.clone())),
        }
    }
}

pub fn scoped_barbs(bs: &BTreeSet<Barb>, n: &ScopeSet) -> BTreeSet<Barb> {
    bs.iter().filter(|b| !n.hides(b)).cloned().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse_system;

    fn barb_strings(src: &str) -> BTreeSet<String> {
        let b = parse_system(src).unwrap();
        barbs_of(&b.system).iter().map(|b| b.to_string()).collect()
    }

    fn set(xs: &[&str]) -> BTreeSet<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    const R_R: &str = "latency 1;
        node c { mu t. recv {d -> t} after 2 {!@m fail. 0} }
        node m { 0 }
        node r1 { mu t. !@c d. t }
        node r2 { mu t. !@c d. t }";

    #[test]
    fn replica_barbs() {
        assert_eq!(barb_strings(R_R), set(&["!c d", "?c d"]));
        let one = "latency 1;
            node c { mu t. recv {d -> t} after 2 {!@m fail. 0} }
            node m { 0 }
            node r1 { mu t. !@c d. t }";
        assert_eq!(barb_strings(one), set(&["!c d", "?c d"]));
    }

    #[test]
    fn crashed_replica_has_no_barbs() {
        let b = parse_system(R_R).unwrap();
        let comps = b.system.components().iter().map(|c| match c {
            Component::Node {
                id,
                checkpoint,
                time,
                ..
            } if id.as_str() == "r2" => Component::Crashed {
                id: id.clone(),
                time: *time,
                checkpoint: checkpoint.clone(),
            },
            c => c.clone(),
        });
        let s = System::new(comps);
        let got: BTreeSet<_> = barbs_of(&s).iter().map(|b| b.to_string()).collect();
        assert_eq!(got, set(&["!c d", "?c d"]));
    }

    #[test]
    fn sender_tagged_barbs() {
        let tagged = "latency 1;
            node c { mu t. recv {(n1, d) -> t, (n2, d) -> t} after 2 {!@m fail. 0} }
            node m { 0 }
            node r1 { mu t. !@c (n1, d). t }";
        assert_eq!(
            barb_strings(tagged),
            set(&["!c (n1, d)", "?c (n1, d)", "?c (n2, d)"])
        );
    }

    #[test]
    fn floating_barb_latent_none() {
        let m = Message::atoms(["item"]);
        let f = System::new([Component::Floating {
            src: "p".into(),
            dst: "c".into(),
            msg: m.clone(),
            time: 0,
        }]);
        assert_eq!(barbs_of(&f).len(), 1);
        let l = System::new([Component::Latent {
            latency: 1,
            src: "p".into(),
            dst: "c".into(),
            msg: m,
            time: 0,
        }]);
        assert!(barbs_of(&l).is_empty());
    }

    #[test]
    fn scope_hiding() {
        let x = Pattern(vec![crate::syntax::PatternElem::Var("X".into())]);
        let all_to_n = ScopeSet::new([ScopeEntry::Out("n".into(), x.clone())]);
        let out_n = Barb::Out("n".into(), Message::atoms(["a"]));
        let out_m = Barb::Out("m".into(), Message::atoms(["a"]));
        assert!(all_to_n.hides(&out_n));
        assert!(!all_to_n.hides(&out_m));
        // input barbs only hidden literally
        let in_a = ScopeSet::new([ScopeEntry::In("n".into(), Pattern::atoms(["a"]))]);
        assert!(in_a.hides(&Barb::In("n".into(), Pattern::atoms(["a"]))));
        assert!(!in_a.hides(&Barb::In("n".into(), x)));
        let bs: BTreeSet<_> = [out_n, out_m.clone()].into();
        assert_eq!(scoped_barbs(&bs, &all_to_n), [out_m].into());
        assert_eq!(scoped_barbs(&bs, &ScopeSet::empty()), bs);
    }
}
