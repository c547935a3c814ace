//! One-step reduction of cursed systems: instantaneous actor and failure
//! actions, and synchronous time steps under maximal progress.

use std::fmt;

use thiserror::Error;

use crate::curse::{CurseSpec, HealthStatus};
use crate::matching::{apply_subst, select_receive, SubstError};
use crate::syntax::{time_of, Component, Message, NodeId, Process, System, SystemTime, Value};

pub const DEFAULT_MAX_UNFOLD: usize = 512;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Rule {
    Snd,
    Sched,
    Rcv,
    Checkpoint,
    Up,
    Down,
    MsgLoss,
    Sleep,
    Latency,
    Timeout,
    NLate,
    MsgLate,
    NDLate,
    /// State-preserving passage of time (terminated nodes, waiting messages).
    Idle,
}

impl Rule {
    pub fn name(self) -> &'static str {
        match self {
            Rule::Snd => "Snd",
            Rule::Sched => "Sched",
            Rule::Rcv => "Rcv",
            Rule::Checkpoint => "Checkpoint",
            Rule::Up => "Up",
            Rule::Down => "Down",
            Rule::MsgLoss => "MsgLoss",
            Rule::Sleep => "Sleep",
            Rule::Latency => "Latency",
            Rule::Timeout => "Timeout",
            Rule::NLate => "NLate",
            Rule::MsgLate => "MsgLate",
            Rule::NDLate => "NDLate",
            Rule::Idle => "Idle",
        }
    }

    pub fn is_instantaneous(self) -> bool {
        matches!(
            self,
            Rule::Snd
                | Rule::Sched
                | Rule::Rcv
                | Rule::Checkpoint
                | Rule::Up
                | Rule::Down
                | Rule::MsgLoss
        )
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Where a rule fired.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Locus {
    Node(NodeId),
    Message {
        src: NodeId,
        dst: NodeId,
        msg: Message,
    },
    Receive {
        node: NodeId,
        msg: Message,
    },
}

impl fmt::Display for Locus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Locus::Node(n) => write!(f, "{n}"),
            Locus::Message { src, dst, msg } => write!(f, "{src} -> {dst} {msg}"),
            Locus::Receive { node, msg } => write!(f, "{node} <- {msg}"),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Firing {
    pub rule: Rule,
    pub locus: Locus,
}

impl fmt::Display for Firing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.rule, self.locus)
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum StepLabel {
    Instant(Firing),
    /// One rule per component, applied simultaneously.
    Time(Vec<Firing>),
}

impl StepLabel {
    pub fn is_time(&self) -> bool {
        matches!(self, StepLabel::Time(_))
    }

    /// Short rule name: the instantaneous rule, or `Tick`.
    pub fn rule_name(&self) -> &'static str {
        match self {
            StepLabel::Instant(f) => f.rule.name(),
            StepLabel::Time(_) => "Tick",
        }
    }
}

impl fmt::Display for StepLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StepLabel::Instant(fi) => write!(f, "{fi}"),
            StepLabel::Time(fs) => {
                f.write_str("Tick")?;
                let shown: Vec<_> = fs.iter().filter(|fi| fi.rule != Rule::Idle).collect();
                if !shown.is_empty() {
                    f.write_str(" [")?;
                    for (i, fi) in shown.iter().enumerate() {
                        if i > 0 {
                            f.write_str("; ")?;
                        }
                        write!(f, "{fi}")?;
                    }
                    f.write_str("]")?;
                }
                Ok(())
            }
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SemanticsError {
    #[error("node {node}: recursion unfolded more than {limit} times without reaching an action (unguarded recursion)")]
    ZenoGuard { node: NodeId, limit: usize },
    #[error("node {node}: free recursion variable `{var}`")]
    FreeRecVar { node: NodeId, var: String },
    #[error("node {node}: send of non-ground message {msg}")]
    NonGroundSend { node: NodeId, msg: Message },
    #[error("node {node}: send target `{target}` is not a node id")]
    BadTarget { node: NodeId, target: Value },
    #[error("node {node}: {source}")]
    Subst {
        node: NodeId,
        #[source]
        source: SubstError,
    },
    #[error("system is not time-coherent")]
    Incoherent,
    #[error("no rule lets time pass for component {0}")]
    StuckTime(String),
}

pub type Step = (StepLabel, System);

/// The reduction relation for a fixed curse and latency.
#[derive(Clone, Debug)]
pub struct Semantics {
    pub curse: CurseSpec,
    pub latency: u32,
    /// Restrict receive nondeterminism to the least matching branch.
    pub erlang_order: bool,
    pub max_unfold: usize,
}

impl Semantics {
    pub fn new(curse: CurseSpec, latency: u32) -> Self {
        Semantics {
            curse,
            latency,
            erlang_order: false,
            max_unfold: DEFAULT_MAX_UNFOLD,
        }
    }

    pub fn with_erlang_order(mut self, on: bool) -> Self {
        self.erlang_order = on;
        self
    }

    fn unfold_head(&self, node: &NodeId, p: &Process) -> Result<Process, SemanticsError> {
        let mut cur = p.clone();
        let mut k = 0;
        while let Some(next) = cur.unfold_once() {
            k += 1;
            if k > self.max_unfold {
                return Err(SemanticsError::ZenoGuard {
                    node: node.clone(),
                    limit: self.max_unfold,
                });
            }
            cur = next;
        }
        Ok(cur)
    }

    fn replace(sys: &System, i: usize, with: impl IntoIterator<Item = Component>) -> System {
        let comps = sys.components();
        System::new(
            comps[..i]
                .iter()
                .cloned()
                .chain(with)
                .chain(comps[i + 1..].iter().cloned()),
        )
    }

    /// Live node `dst` at index, if it can take a delivery now.
    fn receiver_index(&self, sys: &System, dst: &NodeId, t: u64) -> Option<usize> {
        if self.curse.node_status(t, dst) != HealthStatus::Up {
            return None;
        }
        sys.components()
            .iter()
            .position(|c| matches!(c, Component::Node { id, .. } if id == dst))
    }

    /// All single instantaneous reductions.
    pub fn instantaneous_steps(&self, sys: &System) -> Result<Vec<Step>, SemanticsError> {
        let mut out = Vec::new();
        for (i, c) in sys.components().iter().enumerate() {
            match c {
                Component::Node {
                    id,
                    proc,
                    mailbox,
                    time,
                    checkpoint,
                } => {
                    let t = *time;
                    let status = self.curse.node_status(t, id);
                    if status == HealthStatus::Down {
                        out.push((
                            StepLabel::Instant(Firing {
                                rule: Rule::Down,
                                locus: Locus::Node(id.clone()),
                            }),
                            Self::replace(
                                sys,
                                i,
                                [Component::Crashed {
                                    id: id.clone(),
                                    time: t,
                                    checkpoint: checkpoint.clone(),
                                }],
                            ),
                        ));
                    }
                    // Checkpoint carries no health premise, but reaching it
                    // through recursion needs an Up node.
                    let head = match proc {
                        Process::Fix(..) if status == HealthStatus::Up => {
                            self.unfold_head(id, proc)?
                        }
                        Process::Fix(..) => continue,
                        p => p.clone(),
                    };
                    let node = |proc: Process, mailbox: Vec<Message>, checkpoint: Process| {
                        Component::Node {
                            id: id.clone(),
                            proc,
                            mailbox,
                            time: t,
                            checkpoint,
                        }
                    };
                    match &head {
                        Process::Save(cont) => {
                            let cont = (**cont).clone();
                            out.push((
                                StepLabel::Instant(Firing {
                                    rule: Rule::Checkpoint,
                                    locus: Locus::Node(id.clone()),
                                }),
                                Self::replace(sys, i, [node(cont.clone(), mailbox.clone(), cont)]),
                            ));
                        }
                        Process::Send(branches) if status == HealthStatus::Up => {
                            for b in branches.iter() {
                                let dst = match &b.target {
                                    Value::Node(n) => n.clone(),
                                    other => {
                                        return Err(SemanticsError::BadTarget {
                                            node: id.clone(),
                                            target: other.clone(),
                                        })
                                    }
                                };
                                if !b.msg.is_ground() {
                                    return Err(SemanticsError::NonGroundSend {
                                        node: id.clone(),
                                        msg: b.msg.clone(),
                                    });
                                }
                                out.push((
                                    StepLabel::Instant(Firing {
                                        rule: Rule::Snd,
                                        locus: Locus::Message {
                                            src: id.clone(),
                                            dst: dst.clone(),
                                            msg: b.msg.clone(),
                                        },
                                    }),
                                    Self::replace(
                                        sys,
                                        i,
                                        [
                                            node(
                                                b.cont.clone(),
                                                mailbox.clone(),
                                                checkpoint.clone(),
                                            ),
                                            Component::Latent {
                                                latency: self.latency,
                                                src: id.clone(),
                                                dst,
                                                msg: b.msg.clone(),
                                                time: t,
                                            },
                                        ],
                                    ),
                                ));
                            }
                        }
                        Process::Recv(r) if status == HealthStatus::Up => {
                            let mut found =
                                select_receive(r.branches.iter().map(|b| &b.pattern), mailbox);
                            if self.erlang_order {
                                found.truncate(1);
                            }
                            for m in found {
                                let cont = apply_subst(&r.branches[m.branch_index].cont, &m.subst)
                                    .map_err(|source| SemanticsError::Subst {
                                        node: id.clone(),
                                        source,
                                    })?;
                                let mut mb = mailbox.clone();
                                let msg = mb.remove(m.message_index);
                                out.push((
                                    StepLabel::Instant(Firing {
                                        rule: Rule::Rcv,
                                        locus: Locus::Receive {
                                            node: id.clone(),
                                            msg,
                                        },
                                    }),
                                    Self::replace(sys, i, [node(cont, mb, checkpoint.clone())]),
                                ));
                            }
                        }
                        Process::Var(x) => {
                            return Err(SemanticsError::FreeRecVar {
                                node: id.clone(),
                                var: x.to_string(),
                            })
                        }
                        _ => {}
                    }
                }
                Component::Crashed {
                    id,
                    time,
                    checkpoint,
                } => {
                    if self.curse.node_status(*time, id) == HealthStatus::Up {
                        out.push((
                            StepLabel::Instant(Firing {
                                rule: Rule::Up,
                                locus: Locus::Node(id.clone()),
                            }),
                            Self::replace(
                                sys,
                                i,
                                [Component::Node {
                                    id: id.clone(),
                                    proc: checkpoint.clone(),
                                    mailbox: Vec::new(),
                                    time: *time,
                                    checkpoint: checkpoint.clone(),
                                }],
                            ),
                        ));
                    }
                }
                Component::Floating {
                    src,
                    dst,
                    msg,
                    time,
                } => {
                    let t = *time;
                    let locus = Locus::Message {
                        src: src.clone(),
                        dst: dst.clone(),
                        msg: msg.clone(),
                    };
                    match self.curse.link_status(t, src, dst) {
                        HealthStatus::Down => out.push((
                            StepLabel::Instant(Firing {
                                rule: Rule::MsgLoss,
                                locus,
                            }),
                            Self::replace(sys, i, []),
                        )),
                        HealthStatus::Up => {
                            if let Some(j) = self.receiver_index(sys, dst, t) {
                                let mut comps = sys.components().to_vec();
                                if let Component::Node { mailbox, .. } = &mut comps[j] {
                                    mailbox.push(msg.clone());
                                }
                                comps.remove(i);
                                out.push((
                                    StepLabel::Instant(Firing {
                                        rule: Rule::Sched,
                                        locus,
                                    }),
                                    System::new(comps),
                                ));
                            }
                        }
                        HealthStatus::Slow => {}
                    }
                }
                Component::Latent {
                    src,
                    dst,
                    msg,
                    time,
                    ..
                } => {
                    if self.curse.link_status(*time, src, dst) == HealthStatus::Down {
                        out.push((
                            StepLabel::Instant(Firing {
                                rule: Rule::MsgLoss,
                                locus: Locus::Message {
                                    src: src.clone(),
                                    dst: dst.clone(),
                                    msg: msg.clone(),
                                },
                            }),
                            Self::replace(sys, i, []),
                        ));
                    }
                }
            }
        }
        Ok(out)
    }

    /// The time step, computed assuming no instantaneous step is enabled.
    fn tick(&self, sys: &System) -> Result<Option<Step>, SemanticsError> {
        if sys.is_empty() {
            return Ok(None);
        }
        let mut firings = Vec::with_capacity(sys.components().len());
        let mut next = Vec::with_capacity(sys.components().len());
        for c in sys.components() {
            let stuck = || SemanticsError::StuckTime(c.to_string());
            match c {
                Component::Node {
                    id,
                    proc,
                    mailbox,
                    time,
                    checkpoint,
                } => {
                    let locus = Locus::Node(id.clone());
                    let (rule, proc) = match self.curse.node_status(*time, id) {
                        HealthStatus::Slow => (Rule::NLate, proc.clone()),
                        HealthStatus::Down => return Err(stuck()),
                        HealthStatus::Up => match self.unfold_head(id, proc)? {
                            Process::Sleep(cont) => (Rule::Sleep, (*cont).clone()),
                            Process::Recv(r) => (Rule::Timeout, r.timeout.clone()),
                            Process::Inact => (Rule::Idle, Process::Inact),
                            _ => return Err(stuck()),
                        },
                    };
                    firings.push(Firing { rule, locus });
                    next.push(Component::Node {
                        id: id.clone(),
                        proc,
                        mailbox: mailbox.clone(),
                        time: time + 1,
                        checkpoint: checkpoint.clone(),
                    });
                }
                Component::Crashed {
                    id,
                    time,
                    checkpoint,
                } => {
                    // A crashed node whose status is slow stays crashed.
                    if self.curse.node_status(*time, id) == HealthStatus::Up {
                        return Err(stuck());
                    }
                    firings.push(Firing {
                        rule: Rule::NDLate,
                        locus: Locus::Node(id.clone()),
                    });
                    next.push(Component::Crashed {
                        id: id.clone(),
                        time: time + 1,
                        checkpoint: checkpoint.clone(),
                    });
                }
                Component::Floating {
                    src,
                    dst,
                    msg,
                    time,
                } => {
                    let rule = match self.curse.link_status(*time, src, dst) {
                        HealthStatus::Slow => Rule::MsgLate,
                        HealthStatus::Down => return Err(stuck()),
                        HealthStatus::Up => Rule::Idle,
                    };
                    firings.push(Firing {
                        rule,
                        locus: Locus::Message {
                            src: src.clone(),
                            dst: dst.clone(),
                            msg: msg.clone(),
                        },
                    });
                    next.push(Component::Floating {
                        src: src.clone(),
                        dst: dst.clone(),
                        msg: msg.clone(),
                        time: time + 1,
                    });
                }
                Component::Latent {
                    latency,
                    src,
                    dst,
                    msg,
                    time,
                } => {
                    let (rule, latency) = match self.curse.link_status(*time, src, dst) {
                        HealthStatus::Slow => (Rule::MsgLate, *latency),
                        HealthStatus::Down => return Err(stuck()),
                        HealthStatus::Up => (Rule::Latency, latency - 1),
                    };
                    firings.push(Firing {
                        rule,
                        locus: Locus::Message {
                            src: src.clone(),
                            dst: dst.clone(),
                            msg: msg.clone(),
                        },
                    });
                    next.push(Component::Latent {
                        latency,
                        src: src.clone(),
                        dst: dst.clone(),
                        msg: msg.clone(),
                        time: time + 1,
                    });
                }
            }
        }
        Ok(Some((StepLabel::Time(firings), System::new(next))))
    }

    /// The time step, or `None` when an instantaneous step preempts it or
    /// the system is empty.
    pub fn time_step(&self, sys: &System) -> Result<Option<Step>, SemanticsError> {
        if !self.instantaneous_steps(sys)?.is_empty() {
            return Ok(None);
        }
        self.tick(sys)
    }

    pub fn successors(&self, sys: &System) -> Result<Vec<Step>, SemanticsError> {
        if time_of(sys) == SystemTime::Undefined {
            return Err(SemanticsError::Incoherent);
        }
        let inst = self.instantaneous_steps(sys)?;
        if !inst.is_empty() {
            return Ok(inst);
        }
        Ok(self.tick(sys)?.into_iter().collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curse::{Subject, TimeWindow};
    use crate::syntax::{Pattern, RecvBranch, SystemConfig};

    fn at(n: &str) -> Value {
        Value::Node(NodeId::new(n))
    }

    fn a() -> Message {
        Message::atoms(["a"])
    }

    fn recv_a(units: u32, handler: Process) -> Process {
        Process::recv_after(
            vec![RecvBranch {
                pattern: Pattern::atoms(["a"]),
                cont: Process::Inact,
            }],
            units,
            handler,
        )
    }

    fn node(id: &str, proc: Process, mailbox: Vec<Message>, t: u64) -> Component {
        Component::Node {
            id: id.into(),
            proc: proc.clone(),
            mailbox,
            time: t,
            checkpoint: proc,
        }
    }

    fn up() -> Semantics {
        Semantics::new(CurseSpec::uncursed(), 1)
    }

    #[test]
    fn send_creates_latent_message() {
        let sys = SystemConfig::new(1)
            .with_node("n1", Process::send(at("n2"), a(), Process::Inact))
            .with_node("n2", recv_a(2, Process::Inact))
            .initial_system();
        let steps = up().successors(&sys).unwrap();
        assert_eq!(steps.len(), 1);
        let (label, next) = &steps[0];
        assert_eq!(label.rule_name(), "Snd");
        assert!(next.components().contains(&Component::Latent {
            latency: 1,
            src: "n1".into(),
            dst: "n2".into(),
            msg: a(),
            time: 0
        }));
        // then one time unit later the message floats
        let (label, after) = up().successors(next).unwrap().remove(0);
        assert!(label.is_time());
        assert!(after.components().contains(&Component::Floating {
            src: "n1".into(),
            dst: "n2".into(),
            msg: a(),
            time: 1
        }));
        // and the receive has one unit of timeout left
        assert!(after.components().iter().any(
            |c| matches!(c, Component::Node { proc, time: 1, .. } if *proc == recv_a(1, Process::Inact))
        ));
    }

    #[test]
    fn sched_delivers_into_mailbox() {
        let sys = System::new([
            Component::Floating {
                src: "n1".into(),
                dst: "n2".into(),
                msg: a(),
                time: 0,
            },
            node("n2", Process::sleep(Process::Inact), vec![], 0),
        ]);
        let steps = up().instantaneous_steps(&sys).unwrap();
        assert_eq!(steps.len(), 1);
        assert_eq!(steps[0].0.rule_name(), "Sched");
        assert_eq!(
            steps[0].1,
            System::new([node("n2", Process::sleep(Process::Inact), vec![a()], 0)])
        );
    }

    #[test]
    fn sleep_and_timeout_advance_together() {
        let sys = SystemConfig::new(1)
            .with_node(
                "n1",
                Process::sleep(Process::send(at("n2"), a(), Process::Inact)),
            )
            .with_node("n2", recv_a(0, Process::sleep(Process::Inact)))
            .initial_system();
        let (label, next) = up().successors(&sys).unwrap().remove(0);
        assert!(label.is_time());
        assert_eq!(next.time(), SystemTime::At(1));
        assert!(next.components().iter().any(|c| matches!(
            c,
            Component::Node { proc, time: 1, .. } if *proc == Process::sleep(Process::Inact)
        )));
    }

    #[test]
    fn down_and_up() {
        let curse = CurseSpec::uncursed().with_rule(
            Subject::node("n1"),
            HealthStatus::Down,
            TimeWindow::Interval { from: 0, to: 0 },
        );
        let sem = Semantics::new(curse, 1);
        let p = Process::sleep(Process::Inact);
        let sys = System::new([Component::Node {
            id: "n1".into(),
            proc: p.clone(),
            mailbox: vec![a()],
            time: 0,
            checkpoint: Process::Inact,
        }]);
        assert!(sem.time_step(&sys).unwrap().is_none(), "down preempts time");
        let (label, crashed) = sem.successors(&sys).unwrap().remove(0);
        assert_eq!(label.rule_name(), "Down");
        assert_eq!(
            crashed,
            System::new([Component::Crashed {
                id: "n1".into(),
                time: 0,
                checkpoint: Process::Inact
            }])
        );
        let (_, later) = sem.successors(&crashed).unwrap().remove(0);
        let (label, resumed) = sem.successors(&later).unwrap().remove(0);
        assert_eq!(label.rule_name(), "Up");
        assert_eq!(
            resumed,
            System::new([node("n1", Process::Inact, vec![], 1)])
        );
    }

    #[test]
    fn maximal_progress() {
        let sys = SystemConfig::new(1)
            .with_node("n1", Process::send(at("n1"), a(), Process::Inact))
            .initial_system();
        assert!(up().time_step(&sys).unwrap().is_none());
    }

    #[test]
    fn slow_receiver_blocks_delivery() {
        let curse = CurseSpec::uncursed().with_rule(
            Subject::node("n2"),
            HealthStatus::Slow,
            TimeWindow::From(0),
        );
        let sem = Semantics::new(curse, 1);
        let sys = System::new([
            Component::Floating {
                src: "n1".into(),
                dst: "n2".into(),
                msg: a(),
                time: 0,
            },
            node("n2", recv_a(1, Process::Inact), vec![], 0),
        ]);
        let steps = sem.successors(&sys).unwrap();
        assert_eq!(steps.len(), 1);
        assert!(steps[0].0.is_time());
        // the slow node keeps its process; the message waits
        assert_eq!(steps[0].1, sys.with_time(1));
    }

    #[test]
    fn lossy_link_drops_latent_message() {
        let curse = CurseSpec::uncursed().with_rule(
            Subject::link("n1", "n2"),
            HealthStatus::Down,
            TimeWindow::Interval { from: 0, to: 0 },
        );
        let sem = Semantics::new(curse, 1);
        let sys = System::new([Component::Latent {
            latency: 1,
            src: "n1".into(),
            dst: "n2".into(),
            msg: a(),
            time: 0,
        }]);
        let steps = sem.successors(&sys).unwrap();
        assert_eq!(steps[0].0.rule_name(), "MsgLoss");
        assert!(steps[0].1.is_empty());
    }

    #[test]
    fn terminated_system_idles() {
        let sys = SystemConfig::new(1)
            .with_node("a", Process::Inact)
            .with_node("b", Process::Inact)
            .initial_system();
        let steps = up().successors(&sys).unwrap();
        assert_eq!(steps.len(), 1);
        assert_eq!(steps[0].1, sys.with_time(1));
    }

    #[test]
    fn unguarded_recursion_hits_guard() {
        let sys = SystemConfig::new(1)
            .with_node("a", Process::fix("t", Process::fix("s", Process::var("t"))))
            .initial_system();
        assert!(matches!(
            up().successors(&sys),
            Err(SemanticsError::ZenoGuard { .. })
        ));
    }

    #[test]
    fn checkpoint_saves_continuation() {
        let cont = Process::sleep(Process::Inact);
        let sys = SystemConfig::new(1)
            .with_node("a", Process::save(cont.clone()))
            .initial_system();
        let (label, next) = up().successors(&sys).unwrap().remove(0);
        assert_eq!(label.rule_name(), "Checkpoint");
        assert_eq!(next, System::new([node("a", cont, vec![], 0)]));
    }

    #[test]
    fn erlang_order_takes_first_branch() {
        let p = Process::recv(
            vec![
                RecvBranch {
                    pattern: Pattern::atoms(["a"]),
                    cont: Process::Inact,
                },
                RecvBranch {
                    pattern: Pattern(vec![crate::syntax::PatternElem::Var("X".into())]),
                    cont: Process::sleep(Process::Inact),
                },
            ],
            Process::Inact,
        );
        let sys = System::new([node("n", p, vec![a()], 0)]);
        assert_eq!(up().successors(&sys).unwrap().len(), 2);
        assert_eq!(
            up().with_erlang_order(true).successors(&sys).unwrap().len(),
            1
        );
    }
}
