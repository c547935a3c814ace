use std::fmt::{self, Write as _};

use crate::barbs::{ScopeEntry, ScopeSet};
use crate::curse::CurseSpec;
use crate::syntax::{Process, Receive};

use super::ParsedBundle;

/// Number of directly nested receives offering the same branches; `k`
/// of them print as `after k-1`.
fn after_depth(r: &Receive) -> (u32, &Process) {
    let mut k = 1;
    let mut cur = &r.timeout;
    while let Process::Recv(inner) = cur {
        if inner.branches != r.branches {
            break;
        }
        k += 1;
        cur = &inner.timeout;
    }
    (k, cur)
}

fn write_proc(out: &mut impl fmt::Write, p: &Process, sugar: bool) -> fmt::Result {
    match p {
        Process::Inact => out.write_str("0"),
        Process::Var(x) => write!(out, "{x}"),
        Process::Fix(x, body) => {
            write!(out, "mu {x}. ")?;
            write_proc(out, body, sugar)
        }
        Process::Sleep(cont) => {
            out.write_str("sleep. ")?;
            write_proc(out, cont, sugar)
        }
        Process::Save(cont) => {
            out.write_str("save. ")?;
            write_proc(out, cont, sugar)
        }
        Process::Send(branches) => {
            let many = branches.len() > 1;
            out.write_str(if many { "!{" } else { "!" })?;
            for (i, b) in branches.iter().enumerate() {
                if i > 0 {
                    out.write_str(", ")?;
                }
                write!(out, "{} {}. ", b.target, b.msg)?;
                write_proc(out, &b.cont, sugar)?;
            }
            if many {
                out.write_str("}")?;
            }
            Ok(())
        }
        Process::Recv(r) => {
            out.write_str("recv {")?;
            for (i, b) in r.branches.iter().enumerate() {
                if i > 0 {
                    out.write_str(", ")?;
                }
                write!(out, "{} -> ", b.pattern)?;
                write_proc(out, &b.cont, sugar)?;
            }
            let (k, handler) = if sugar {
                after_depth(r)
            } else {
                (1, &r.timeout)
            };
            write!(out, "}} after {} {{", k - 1)?;
            write_proc(out, handler, sugar)?;
            out.write_str("}")
        }
    }
}

impl fmt::Display for Process {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_proc(f, self, true)
    }
}

/// Prints without re-sugaring: every timeout fires on the next tick.
pub fn print_process_expanded(p: &Process) -> String {
    let mut s = String::new();
    write_proc(&mut s, p, false).expect("writing to a string");
    s
}

fn sugar_note(p: &Process) -> Option<String> {
    fn collect(p: &Process, acc: &mut Vec<u32>) {
        match p {
            Process::Recv(r) => {
                let (k, handler) = after_depth(r);
                if k > 1 {
                    acc.push(k);
                }
                for b in &r.branches {
                    collect(&b.cont, acc);
                }
                collect(handler, acc);
            }
            Process::Send(bs) => bs.iter().for_each(|b| collect(&b.cont, acc)),
            Process::Sleep(c) | Process::Save(c) | Process::Fix(_, c) => collect(c, acc),
            Process::Var(_) | Process::Inact => {}
        }
    }
    let mut acc = Vec::new();
    collect(p, &mut acc);
    if acc.is_empty() {
        return None;
    }
    let list: Vec<_> = acc
        .iter()
        .map(|k| format!("after {} = {k} nested receives", k - 1))
        .collect();
    Some(format!("# expanded: {}", list.join(", ")))
}

/// Deterministic printer; timeouts are printed expanded.
pub fn print_system(b: &ParsedBundle) -> String {
    let cfg = &b.config;
    let mut s = format!("latency {};\n", cfg.latency);
    for id in &cfg.nodes {
        let proc = &cfg.initial_proc[id];
        let cp = &cfg.initial_checkpoint[id];
        s.push('\n');
        for note in [
            sugar_note(proc),
            (cp != proc).then(|| sugar_note(cp)).flatten(),
        ]
        .into_iter()
        .flatten()
        {
            s.push_str(&note);
            s.push('\n');
        }
        let _ = write!(s, "node {id} ");
        if cp != proc {
            let _ = write!(s, "checkpoint {} ", print_process_expanded(cp));
        }
        let _ = writeln!(s, "{{\n  {}\n}}", print_process_expanded(proc));
    }
    s
}

pub fn print_curse(c: &CurseSpec) -> String {
    format!("{c}\n")
}

pub fn print_scope(n: &ScopeSet) -> String {
    let mut s = String::from("scope {\n");
    for e in n.entries() {
        match e {
            ScopeEntry::Out(node, p) => {
                let _ = writeln!(s, "  !{node} {p};");
            }
            ScopeEntry::In(node, p) => {
                let _ = writeln!(s, "  ?{node} {p};");
            }
        }
    }
    s.push_str("}\n");
    s
}
