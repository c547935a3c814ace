//! Abstract syntax of processes and systems, structural congruence and the
//! basic predicates over systems (time, initiality, non-instantaneity).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

macro_rules! name_type {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub struct $name(Arc<str>);

        impl $name {
            pub fn new(name: impl AsRef<str>) -> Self {
                let name = name.as_ref();
                assert!(!name.is_empty(), concat!(stringify!($name), " must be nonempty"));
                Self(Arc::from(name))
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Debug for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{}", self.0)
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl From<&str> for $name {
            fn from(s: &str) -> Self {
                Self::new(s)
            }
        }
    };
}

name_type!(
    /// Identifier of an actor node.
    NodeId
);
name_type!(
    /// An atom, i.e. a constant payload value.
    Atom
);
name_type!(
    /// A message variable bound by a receive pattern.
    Var
);
name_type!(
    /// A recursion variable bound by `mu`.
    RecVar
);

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Value {
    Atom(Atom),
    Node(NodeId),
    Var(Var),
}

impl Value {
    pub fn is_ground(&self) -> bool {
        !matches!(self, Value::Var(_))
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Atom(a) => write!(f, "{a}"),
            Value::Node(n) => write!(f, "@{n}"),
            Value::Var(x) => write!(f, "{x}"),
        }
    }
}

/// A message tuple.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Message(pub Vec<Value>);

impl Message {
    pub fn atoms<'a>(atoms: impl IntoIterator<Item = &'a str>) -> Self {
        Message(
            atoms
                .into_iter()
                .map(|a| Value::Atom(Atom::new(a)))
                .collect(),
        )
    }

    pub fn arity(&self) -> usize {
        self.0.len()
    }

    pub fn is_ground(&self) -> bool {
        self.0.iter().all(Value::is_ground)
    }
}

impl fmt::Display for Message {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str(")")
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum PatternElem {
    Atom(Atom),
    Var(Var),
}

/// A flat receive pattern. Variables occur at most once.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Pattern(pub Vec<PatternElem>);

impl Pattern {
    pub fn atoms<'a>(atoms: impl IntoIterator<Item = &'a str>) -> Self {
        Pattern(
            atoms
                .into_iter()
                .map(|a| PatternElem::Atom(Atom::new(a)))
                .collect(),
        )
    }

    pub fn vars(&self) -> impl Iterator<Item = &Var> {
        self.0.iter().filter_map(|e| match e {
            PatternElem::Var(x) => Some(x),
            PatternElem::Atom(_) => None,
        })
    }

    pub fn binds(&self, x: &Var) -> bool {
        self.vars().any(|v| v == x)
    }

    /// First variable occurring twice, if any.
    pub fn duplicate_var(&self) -> Option<&Var> {
        let mut seen = BTreeSet::new();
        self.vars().find(|x| !seen.insert(*x))
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            match e {
                PatternElem::Atom(a) => write!(f, "{a}")?,
                PatternElem::Var(x) => write!(f, "{x}")?,
            }
        }
        f.write_str(")")
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct SendBranch {
    pub target: Value,
    pub msg: Message,
    pub cont: Process,
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct RecvBranch {
    pub pattern: Pattern,
    pub cont: Process,
}

/// A receive with a one-unit timeout.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Receive {
    pub branches: Vec<RecvBranch>,
    pub timeout: Process,
}

/// Sequential process run by a node. Children are shared, so cloning is cheap.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Process {
    Send(Arc<[SendBranch]>),
    Recv(Arc<Receive>),
    Sleep(Arc<Process>),
    Save(Arc<Process>),
    Fix(RecVar, Arc<Process>),
    Var(RecVar),
    Inact,
}

impl Process {
    pub fn send(target: Value, msg: Message, cont: Process) -> Self {
        Process::Send(Arc::from(vec![SendBranch { target, msg, cont }]))
    }

    pub fn send_choice(branches: Vec<SendBranch>) -> Self {
        assert!(!branches.is_empty(), "send choice needs a branch");
        Process::Send(Arc::from(branches))
    }

    /// Receive whose timeout fires on the next tick.
    pub fn recv(branches: Vec<RecvBranch>, timeout: Process) -> Self {
        assert!(!branches.is_empty(), "receive needs a branch");
        Process::Recv(Arc::new(Receive { branches, timeout }))
    }

    /// `recv {..} after u {handler}`: `u + 1` nested single-tick timeouts,
    /// so an unanswered receive hands over `u + 1` ticks later.
    pub fn recv_after(branches: Vec<RecvBranch>, units: u32, handler: Process) -> Self {
        (0..=units).fold(handler, |acc, _| Process::recv(branches.clone(), acc))
    }

    pub fn sleep(cont: Process) -> Self {
        Process::Sleep(Arc::new(cont))
    }

    /// `sleep u . cont`.
    pub fn sleep_n(units: u32, cont: Process) -> Self {
        (0..units).fold(cont, |acc, _| Process::sleep(acc))
    }

    pub fn save(cont: Process) -> Self {
        Process::Save(Arc::new(cont))
    }

    pub fn fix(var: impl Into<RecVar>, body: Process) -> Self {
        Process::Fix(var.into(), Arc::new(body))
    }

    pub fn var(var: impl Into<RecVar>) -> Self {
        Process::Var(var.into())
    }

    /// `P[mu x. P / x]` applied to the body of a `Fix`.
    pub fn unfold_once(&self) -> Option<Process> {
        match self {
            Process::Fix(x, body) => Some(body.subst_rec(x, self)),
            _ => None,
        }
    }

    /// Replaces free occurrences of recursion variable `x` by `with`.
    pub fn subst_rec(&self, x: &RecVar, with: &Process) -> Process {
        match self {
            Process::Var(y) if y == x => with.clone(),
            Process::Var(_) | Process::Inact => self.clone(),
            Process::Fix(y, _) if y == x => self.clone(),
            Process::Fix(y, body) => Process::Fix(y.clone(), Arc::new(body.subst_rec(x, with))),
            Process::Sleep(p) => Process::Sleep(Arc::new(p.subst_rec(x, with))),
            Process::Save(p) => Process::Save(Arc::new(p.subst_rec(x, with))),
            Process::Send(branches) => Process::Send(
                branches
                    .iter()
                    .map(|b| SendBranch {
                        target: b.target.clone(),
                        msg: b.msg.clone(),
                        cont: b.cont.subst_rec(x, with),
                    })
                    .collect(),
            ),
            Process::Recv(r) => Process::Recv(Arc::new(Receive {
                branches: r
                    .branches
                    .iter()
                    .map(|b| RecvBranch {
                        pattern: b.pattern.clone(),
                        cont: b.cont.subst_rec(x, with),
                    })
                    .collect(),
                timeout: r.timeout.subst_rec(x, with),
            })),
        }
    }

    /// Message variables occurring free (not bound by an enclosing pattern).
    pub fn free_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_free_vars(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free_vars(&self, bound: &mut Vec<Var>, out: &mut BTreeSet<Var>) {
        fn check(v: &Value, bound: &[Var], out: &mut BTreeSet<Var>) {
            if let Value::Var(x) = v {
                if !bound.contains(x) {
                    out.insert(x.clone());
                }
            }
        }
        match self {
            Process::Send(branches) => {
                for b in branches.iter() {
                    check(&b.target, bound, out);
                    for v in &b.msg.0 {
                        check(v, bound, out);
                    }
                    b.cont.collect_free_vars(bound, out);
                }
            }
            Process::Recv(r) => {
                for b in &r.branches {
                    let mark = bound.len();
                    bound.extend(b.pattern.vars().cloned());
                    b.cont.collect_free_vars(bound, out);
                    bound.truncate(mark);
                }
                r.timeout.collect_free_vars(bound, out);
            }
            Process::Sleep(p) | Process::Save(p) | Process::Fix(_, p) => {
                p.collect_free_vars(bound, out)
            }
            Process::Var(_) | Process::Inact => {}
        }
    }

    /// Recursion variables occurring free.
    pub fn free_rec_vars(&self) -> BTreeSet<RecVar> {
        let mut out = BTreeSet::new();
        self.collect_free_rec(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free_rec(&self, bound: &mut Vec<RecVar>, out: &mut BTreeSet<RecVar>) {
        match self {
            Process::Var(x) => {
                if !bound.contains(x) {
                    out.insert(x.clone());
                }
            }
            Process::Fix(x, body) => {
                bound.push(x.clone());
                body.collect_free_rec(bound, out);
                bound.pop();
            }
            Process::Sleep(p) | Process::Save(p) => p.collect_free_rec(bound, out),
            Process::Send(branches) => {
                for b in branches.iter() {
                    b.cont.collect_free_rec(bound, out);
                }
            }
            Process::Recv(r) => {
                for b in &r.branches {
                    b.cont.collect_free_rec(bound, out);
                }
                r.timeout.collect_free_rec(bound, out);
            }
            Process::Inact => {}
        }
    }

    pub fn is_closed(&self) -> bool {
        self.free_rec_vars().is_empty()
    }

    pub fn contains_save(&self) -> bool {
        match self {
            Process::Save(_) => true,
            Process::Sleep(p) | Process::Fix(_, p) => p.contains_save(),
            Process::Send(branches) => branches.iter().any(|b| b.cont.contains_save()),
            Process::Recv(r) => {
                r.branches.iter().any(|b| b.cont.contains_save()) || r.timeout.contains_save()
            }
            Process::Var(_) | Process::Inact => false,
        }
    }

    /// Node ids appearing as values, in targets or message payloads.
    pub fn node_refs(&self) -> BTreeSet<NodeId> {
        let mut out = BTreeSet::new();
        self.collect_node_refs(&mut out);
        out
    }

    fn collect_node_refs(&self, out: &mut BTreeSet<NodeId>) {
        match self {
            Process::Send(branches) => {
                for b in branches.iter() {
                    for v in std::iter::once(&b.target).chain(b.msg.0.iter()) {
                        if let Value::Node(n) = v {
                            out.insert(n.clone());
                        }
                    }
                    b.cont.collect_node_refs(out);
                }
            }
            Process::Recv(r) => {
                for b in &r.branches {
                    b.cont.collect_node_refs(out);
                }
                r.timeout.collect_node_refs(out);
            }
            Process::Sleep(p) | Process::Save(p) | Process::Fix(_, p) => p.collect_node_refs(out),
            Process::Var(_) | Process::Inact => {}
        }
    }
}

/// The `ninsta` predicate: every branch eventually passes a `sleep`.
///
/// `save.P` is transparent (it is an instantaneous prefix).
pub fn non_instantaneous(p: &Process) -> bool {
    match p {
        Process::Send(branches) => branches.iter().all(|b| non_instantaneous(&b.cont)),
        Process::Recv(r) => r.branches.iter().all(|b| non_instantaneous(&b.cont)),
        Process::Fix(_, body) => non_instantaneous(body),
        Process::Save(cont) => non_instantaneous(cont),
        Process::Sleep(_) => true,
        Process::Var(_) | Process::Inact => false,
    }
}

/// Every recursion variable is separated from its binder by a `sleep`, a
/// receive branch or a timeout. Such processes perform finitely many
/// instantaneous actions per time unit, so exploration of a time slice
/// terminates.
pub fn time_guarded(p: &Process) -> bool {
    fn go(p: &Process, open: &mut Vec<RecVar>) -> bool {
        match p {
            Process::Var(x) => !open.contains(x),
            Process::Inact => true,
            Process::Fix(x, body) => {
                open.push(x.clone());
                let ok = go(body, open);
                open.pop();
                ok
            }
            Process::Save(cont) => go(cont, open),
            Process::Send(branches) => branches.iter().all(|b| go(&b.cont, open)),
            Process::Sleep(cont) => go(cont, &mut Vec::new()),
            Process::Recv(r) => {
                r.branches.iter().all(|b| go(&b.cont, &mut Vec::new()))
                    && go(&r.timeout, &mut Vec::new())
            }
        }
    }
    go(p, &mut Vec::new())
}

/// One parallel component of a system.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Component {
    Node {
        id: NodeId,
        proc: Process,
        mailbox: Vec<Message>,
        time: u64,
        checkpoint: Process,
    },
    Crashed {
        id: NodeId,
        time: u64,
        checkpoint: Process,
    },
    Floating {
        src: NodeId,
        dst: NodeId,
        msg: Message,
        time: u64,
    },
    Latent {
        latency: u32,
        src: NodeId,
        dst: NodeId,
        msg: Message,
        time: u64,
    },
}

impl Component {
    pub fn time(&self) -> u64 {
        match self {
            Component::Node { time, .. }
            | Component::Crashed { time, .. }
            | Component::Floating { time, .. }
            | Component::Latent { time, .. } => *time,
        }
    }

    pub fn set_time(&mut self, t: u64) {
        match self {
            Component::Node { time, .. }
            | Component::Crashed { time, .. }
            | Component::Floating { time, .. }
            | Component::Latent { time, .. } => *time = t,
        }
    }

    pub fn node_id(&self) -> Option<&NodeId> {
        match self {
            Component::Node { id, .. } | Component::Crashed { id, .. } => Some(id),
            _ => None,
        }
    }

    /// `0.m` is the floating message `m`.
    fn normalize(self) -> Self {
        match self {
            Component::Latent {
                latency: 0,
                src,
                dst,
                msg,
                time,
            } => Component::Floating {
                src,
                dst,
                msg,
                time,
            },
            c => c,
        }
    }
}

impl fmt::Display for Component {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Component::Node {
                id,
                proc,
                mailbox,
                time,
                checkpoint,
            } => {
                write!(f, "{id}[{proc}]{{")?;
                for (i, m) in mailbox.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "{m}")?;
                }
                write!(f, "}}@{time}")?;
                if checkpoint != proc {
                    write!(f, " ckpt[{checkpoint}]")?;
                }
                Ok(())
            }
            Component::Crashed {
                id,
                time,
                checkpoint,
            } => write!(f, "{id}[DOWN]@{time} ckpt[{checkpoint}]"),
            Component::Floating {
                src,
                dst,
                msg,
                time,
            } => write!(f, "({src},{dst},{msg})@{time}"),
            Component::Latent {
                latency,
                src,
                dst,
                msg,
                time,
            } => write!(f, "{latency}.({src},{dst},{msg})@{time}"),
        }
    }
}

/// A parallel composition of components; the empty vector is the empty system.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct System {
    components: Vec<Component>,
}

impl System {
    pub fn empty() -> Self {
        System::default()
    }

    /// Builds the canonical representative of the given parallel composition.
    pub fn new(components: impl IntoIterator<Item = Component>) -> Self {
        let mut components: Vec<_> = components.into_iter().map(Component::normalize).collect();
        components.sort();
        System { components }
    }

    /// Assembles components without canonicalizing. Used to represent
    /// arbitrary (possibly non-normal) terms.
    pub fn from_raw(components: Vec<Component>) -> Self {
        System { components }
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn into_components(self) -> Vec<Component> {
        self.components
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn parallel(&self, other: &System) -> System {
        System::new(self.components.iter().chain(&other.components).cloned())
    }

    pub fn node(&self, id: &NodeId) -> Option<&Component> {
        self.components.iter().find(|c| c.node_id() == Some(id))
    }

    pub fn time(&self) -> SystemTime {
        time_of(self)
    }

    /// The system with every component's time replaced by `t`.
    pub fn with_time(&self, t: u64) -> System {
        let mut components = self.components.clone();
        for c in &mut components {
            c.set_time(t);
        }
        System { components }
    }
}

impl fmt::Display for System {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.components.is_empty() {
            return f.write_str("0");
        }
        for (i, c) in self.components.iter().enumerate() {
            if i > 0 {
                f.write_str(" || ")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

/// Congruence-class representative.
pub fn canonicalize(s: &System) -> System {
    System::new(s.components.iter().cloned())
}

/// Result of the partial time function.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SystemTime {
    Wildcard,
    At(u64),
    Undefined,
}

impl SystemTime {
    fn sync(self, other: SystemTime) -> SystemTime {
        match (self, other) {
            (SystemTime::Undefined, _) | (_, SystemTime::Undefined) => SystemTime::Undefined,
            (SystemTime::Wildcard, t) | (t, SystemTime::Wildcard) => t,
            (SystemTime::At(a), SystemTime::At(b)) if a == b => SystemTime::At(a),
            _ => SystemTime::Undefined,
        }
    }

    pub fn concrete(self) -> Option<u64> {
        match self {
            SystemTime::At(t) => Some(t),
            _ => None,
        }
    }
}

pub fn time_of(s: &System) -> SystemTime {
    s.components.iter().fold(SystemTime::Wildcard, |acc, c| {
        acc.sync(SystemTime::At(c.time()))
    })
}

pub fn is_time_coherent(s: &System) -> bool {
    time_of(s) != SystemTime::Undefined
}

/// The fixed node set with initial processes, initial checkpoints and the
/// network latency.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SystemConfig {
    pub nodes: BTreeSet<NodeId>,
    pub initial_proc: BTreeMap<NodeId, Process>,
    pub initial_checkpoint: BTreeMap<NodeId, Process>,
    pub latency: u32,
}

impl SystemConfig {
    pub fn new(latency: u32) -> Self {
        assert!(latency >= 1, "latency must be at least 1");
        SystemConfig {
            nodes: BTreeSet::new(),
            initial_proc: BTreeMap::new(),
            initial_checkpoint: BTreeMap::new(),
            latency,
        }
    }

    /// Adds a reset-style node: its checkpoint is its initial process.
    pub fn with_node(self, id: impl Into<NodeId>, proc: Process) -> Self {
        let cp = proc.clone();
        self.with_checkpointed_node(id, proc, cp)
    }

    pub fn with_checkpointed_node(
        mut self,
        id: impl Into<NodeId>,
        proc: Process,
        checkpoint: Process,
    ) -> Self {
        let id = id.into();
        self.nodes.insert(id.clone());
        self.initial_proc.insert(id.clone(), proc);
        self.initial_checkpoint.insert(id, checkpoint);
        self
    }

    pub fn initial_system(&self) -> System {
        System::new(self.nodes.iter().map(|id| Component::Node {
            id: id.clone(),
            proc: self.initial_proc[id].clone(),
            mailbox: Vec::new(),
            time: 0,
            checkpoint: self.initial_checkpoint[id].clone(),
        }))
    }

    /// No `save` anywhere and checkpoints equal initial processes.
    pub fn is_reset(&self) -> bool {
        self.nodes.iter().all(|n| {
            let p = &self.initial_proc[n];
            !p.contains_save() && p == &self.initial_checkpoint[n]
        })
    }
}

pub fn is_initial(s: &System, cfg: &SystemConfig) -> bool {
    time_of(s) == SystemTime::At(0) && canonicalize(s) == cfg.initial_system()
}
