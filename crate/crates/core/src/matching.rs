//! Pattern matching and selective receive.

use std::collections::BTreeMap;
use std::sync::Arc;

use thiserror::Error;

use crate::syntax::{
    Message, Pattern, PatternElem, Process, Receive, RecvBranch, SendBranch, Value, Var,
};

#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Substitution {
    bindings: BTreeMap<Var, Value>,
}

impl Substitution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn single(x: Var, v: Value) -> Self {
        let mut s = Self::new();
        s.bindings.insert(x, v);
        s
    }

    pub fn get(&self, x: &Var) -> Option<&Value> {
        self.bindings.get(x)
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn vars(&self) -> impl Iterator<Item = &Var> {
        self.bindings.keys()
    }

    /// Union of substitutions with disjoint domains; `None` on a clash.
    pub fn union(mut self, other: Substitution) -> Option<Substitution> {
        for (k, v) in other.bindings {
            if self.bindings.insert(k, v).is_some() {
                return None;
            }
        }
        Some(self)
    }

    fn without(&self, xs: &[&Var]) -> Substitution {
        Substitution {
            bindings: self
                .bindings
                .iter()
                .filter(|(k, _)| !xs.contains(k))
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect(),
        }
    }
}

/// A message selected from a mailbox by a receive.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ReceiveMatch {
    pub message_index: usize,
    pub branch_index: usize,
    pub subst: Substitution,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SubstError {
    #[error("value `{value}` bound to `{var}` is used as a send target but is not a node id")]
    TargetNotNode { var: Var, value: Value },
}

/// Matches a flat pattern against a ground message.
pub fn match_pattern(p: &Pattern, m: &Message) -> Option<Substitution> {
    if p.0.len() != m.0.len() {
        return None;
    }
    let mut s = Substitution::new();
    for (pe, v) in p.0.iter().zip(&m.0) {
        match (pe, v) {
            (PatternElem::Atom(a), Value::Atom(b)) if a == b => {}
            (PatternElem::Atom(_), _) => return None,
            // VarA and VarN: binds either kind of ground value
            (PatternElem::Var(x), v) if v.is_ground() => {
                if s.bindings.insert(x.clone(), v.clone()).is_some() {
                    return None;
                }
            }
            (PatternElem::Var(_), _) => return None,
        }
    }
    Some(s)
}

pub fn matches(p: &Pattern, m: &Message) -> bool {
    match_pattern(p, m).is_some()
}

/// Scans the mailbox for the first message matching any branch and returns
/// one match per branch accepting it. Empty iff the timeout may fire.
pub fn select_receive<'a>(
    branches: impl IntoIterator<Item = &'a Pattern> + Clone,
    mailbox: &[Message],
) -> Vec<ReceiveMatch> {
    for (k, m) in mailbox.iter().enumerate() {
        let found: Vec<_> = branches
            .clone()
            .into_iter()
            .enumerate()
            .filter_map(|(j, p)| {
                match_pattern(p, m).map(|subst| ReceiveMatch {
                    message_index: k,
                    branch_index: j,
                    subst,
                })
            })
            .collect();
        if !found.is_empty() {
            return found;
        }
    }
    Vec::new()
}

fn subst_value(v: &Value, s: &Substitution) -> Value {
    match v {
        Value::Var(x) => s.get(x).cloned().unwrap_or_else(|| v.clone()),
        _ => v.clone(),
    }
}

/// Applies `s` to message and target positions. Inner receives that rebind a
/// variable shadow it.
pub fn apply_subst(p: &Process, s: &Substitution) -> Result<Process, SubstError> {
    if s.is_empty() {
        return Ok(p.clone());
    }
    Ok(match p {
        Process::Var(_) | Process::Inact => p.clone(),
        Process::Sleep(c) => Process::Sleep(Arc::new(apply_subst(c, s)?)),
        Process::Save(c) => Process::Save(Arc::new(apply_subst(c, s)?)),
        Process::Fix(x, body) => Process::Fix(x.clone(), Arc::new(apply_subst(body, s)?)),
        Process::Send(branches) => {
            let mut out = Vec::with_capacity(branches.len());
            for b in branches.iter() {
                let target = subst_value(&b.target, s);
                if let (Value::Var(x), Value::Atom(_)) = (&b.target, &target) {
                    return Err(SubstError::TargetNotNode {
                        var: x.clone(),
                        value: target,
                    });
                }
                out.push(SendBranch {
                    target,
                    msg: Message(b.msg.0.iter().map(|v| subst_value(v, s)).collect()),
                    cont: apply_subst(&b.cont, s)?,
                });
            }
            Process::Send(Arc::from(out))
        }
        Process::Recv(r) => {
            let mut branches = Vec::with_capacity(r.branches.len());
            for b in &r.branches {
                let bound: Vec<&Var> = b.pattern.vars().collect();
                let inner = s.without(&bound);
                branches.push(RecvBranch {
                    pattern: b.pattern.clone(),
                    cont: apply_subst(&b.cont, &inner)?,
                });
            }
            Process::Recv(Arc::new(Receive {
                branches,
                timeout: apply_subst(&r.timeout, s)?,
            }))
        }
    })
}
