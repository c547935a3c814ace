use std::collections::BTreeSet;

use super::lexer::{lex, Tok, Token};
use super::{Diagnostic, ParseError, ParsedBundle, Severity, SourceSpan};
use crate::barbs::{ScopeEntry, ScopeSet};
use crate::curse::{CurseSpec, HealthStatus, Subject, TimeWindow};
use crate::syntax::{
    non_instantaneous, time_guarded, Atom, Message, NodeId, Pattern, PatternElem, Process, RecVar,
    RecvBranch, SendBranch, SystemConfig, Value, Var,
};

const KEYWORDS: &[&str] = &[
    "latency",
    "node",
    "checkpoint",
    "sleep",
    "save",
    "mu",
    "recv",
    "after",
    "curse",
    "link",
    "down",
    "slow",
    "from",
    "every",
    "active",
    "offset",
    "scope",
];

fn is_var_name(s: &str) -> bool {
    s.starts_with(|c: char| c.is_ascii_uppercase() || c == '_')
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    /// Message variables bound by enclosing patterns.
    bound: Vec<Var>,
    /// Enclosing recursion binders.
    rec_bound: Vec<RecVar>,
    /// Node ids referenced as values, checked once all nodes are declared.
    node_refs: Vec<(NodeId, SourceSpan)>,
}

type PResult<T> = Result<T, ParseError>;

impl Parser {
    fn new(src: &str) -> PResult<Self> {
        Ok(Parser {
            toks: lex(src)?,
            pos: 0,
            bound: Vec::new(),
            rec_bound: Vec::new(),
            node_refs: Vec::new(),
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn span(&self) -> SourceSpan {
        self.toks[self.pos].span.clone()
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, what: &str) -> PResult<T> {
        Err(ParseError::new(
            self.span(),
            format!("expected {what}, found {}", self.peek().describe()),
        ))
    }

    fn expect(&mut self, tok: Tok) -> PResult<SourceSpan> {
        if *self.peek() == tok {
            Ok(self.bump().span)
        } else {
            self.error(&tok.describe())
        }
    }

    fn is_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn expect_kw(&mut self, kw: &str) -> PResult<SourceSpan> {
        if self.is_kw(kw) {
            Ok(self.bump().span)
        } else {
            self.error(&format!("`{kw}`"))
        }
    }

    fn eat(&mut self, tok: Tok) -> bool {
        if *self.peek() == tok {
            self.bump();
            true
        } else {
            false
        }
    }

    fn ident(&mut self, what: &str) -> PResult<(String, SourceSpan)> {
        match self.peek().clone() {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                let span = self.bump().span;
                Ok((s, span))
            }
            _ => self.error(what),
        }
    }

    /// Any identifier: atoms and variables may coincide with keywords.
    fn name(&mut self, what: &str) -> PResult<(String, SourceSpan)> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                let span = self.bump().span;
                Ok((s, span))
            }
            _ => self.error(what),
        }
    }

    fn nat(&mut self, what: &str) -> PResult<u64> {
        match *self.peek() {
            Tok::Nat(n) => {
                self.bump();
                Ok(n)
            }
            _ => self.error(what),
        }
    }

    fn small_nat(&mut self, what: &str) -> PResult<u32> {
        let span = self.span();
        let n = self.nat(what)?;
        u32::try_from(n).map_err(|_| ParseError::new(span, format!("{n} is too large")))
    }

    fn node_ref(&mut self) -> PResult<NodeId> {
        self.expect(Tok::At)?;
        let (name, span) = self.ident("node id after `@`")?;
        let id = NodeId::new(name);
        self.node_refs.push((id.clone(), span));
        Ok(id)
    }

    fn value(&mut self) -> PResult<Value> {
        if *self.peek() == Tok::At {
            return Ok(Value::Node(self.node_ref()?));
        }
        let (name, span) = self.name("a value")?;
        if is_var_name(&name) {
            let x = Var::new(&name);
            if !self.bound.contains(&x) {
                return Err(ParseError::new(span, format!("free variable `{name}`")));
            }
            Ok(Value::Var(x))
        } else {
            Ok(Value::Atom(Atom::new(name)))
        }
    }

    fn message(&mut self) -> PResult<Message> {
        if self.eat(Tok::LParen) {
            let mut vals = vec![self.value()?];
            while self.eat(Tok::Comma) {
                vals.push(self.value()?);
            }
            self.expect(Tok::RParen)?;
            Ok(Message(vals))
        } else {
            Ok(Message(vec![self.value()?]))
        }
    }

    fn pattern_elem(&mut self) -> PResult<PatternElem> {
        let (name, _) = self.name("an atom or variable")?;
        Ok(if is_var_name(&name) {
            PatternElem::Var(Var::new(name))
        } else {
            PatternElem::Atom(Atom::new(name))
        })
    }

    fn pattern(&mut self) -> PResult<Pattern> {
        let span = self.span();
        let pat = if self.eat(Tok::LParen) {
            let mut elems = vec![self.pattern_elem()?];
            while self.eat(Tok::Comma) {
                elems.push(self.pattern_elem()?);
            }
            self.expect(Tok::RParen)?;
            Pattern(elems)
        } else {
            Pattern(vec![self.pattern_elem()?])
        };
        if let Some(x) = pat.duplicate_var() {
            return Err(ParseError::new(
                span,
                format!("variable `{x}` appears more than once in pattern"),
            ));
        }
        Ok(pat)
    }

    fn target(&mut self) -> PResult<Value> {
        if *self.peek() == Tok::At {
            return Ok(Value::Node(self.node_ref()?));
        }
        let (name, span) = self.ident("a send target")?;
        if is_var_name(&name) {
            let x = Var::new(&name);
            if !self.bound.contains(&x) {
                return Err(ParseError::new(span, format!("free variable `{name}`")));
            }
            Ok(Value::Var(x))
        } else {
            let id = NodeId::new(name);
            self.node_refs.push((id.clone(), span));
            Ok(Value::Node(id))
        }
    }

    fn send_branch(&mut self) -> PResult<SendBranch> {
        let target = self.target()?;
        let msg = self.message()?;
        self.expect(Tok::Dot)?;
        let cont = self.process()?;
        Ok(SendBranch { target, msg, cont })
    }

    fn recv_branch(&mut self) -> PResult<RecvBranch> {
        let pattern = self.pattern()?;
        self.expect(Tok::Arrow)?;
        let mark = self.bound.len();
        self.bound.extend(pattern.vars().cloned());
        let cont = self.process();
        self.bound.truncate(mark);
        Ok(RecvBranch {
            pattern,
            cont: cont?,
        })
    }

    fn process(&mut self) -> PResult<Process> {
        match self.peek().clone() {
            Tok::Nat(0) => {
                self.bump();
                Ok(Process::Inact)
            }
            Tok::Bang => {
                self.bump();
                if self.eat(Tok::LBrace) {
                    let mut branches = vec![self.send_branch()?];
                    while self.eat(Tok::Comma) {
                        branches.push(self.send_branch()?);
                    }
                    self.expect(Tok::RBrace)?;
                    Ok(Process::send_choice(branches))
                } else {
                    Ok(Process::send_choice(vec![self.send_branch()?]))
                }
            }
            Tok::Ident(kw) if kw == "recv" => {
                self.bump();
                self.expect(Tok::LBrace)?;
                let mut branches = vec![self.recv_branch()?];
                while self.eat(Tok::Comma) {
                    branches.push(self.recv_branch()?);
                }
                self.expect(Tok::RBrace)?;
                self.expect_kw("after")?;
                let units = self.small_nat("a timeout")?;
                self.expect(Tok::LBrace)?;
                let handler = self.process()?;
                self.expect(Tok::RBrace)?;
                Ok(Process::recv_after(branches, units, handler))
            }
            Tok::Ident(kw) if kw == "sleep" => {
                self.bump();
                let units = if matches!(self.peek(), Tok::Nat(_)) {
                    self.small_nat("a duration")?
                } else {
                    1
                };
                self.expect(Tok::Dot)?;
                Ok(Process::sleep_n(units, self.process()?))
            }
            Tok::Ident(kw) if kw == "save" => {
                self.bump();
                self.expect(Tok::Dot)?;
                Ok(Process::save(self.process()?))
            }
            Tok::Ident(kw) if kw == "mu" => {
                self.bump();
                let (name, _) = self.ident("a recursion variable")?;
                self.expect(Tok::Dot)?;
                let x = RecVar::new(name);
                self.rec_bound.push(x.clone());
                let body = self.process();
                self.rec_bound.pop();
                Ok(Process::fix(x, body?))
            }
            Tok::Ident(name) if !KEYWORDS.contains(&name.as_str()) => {
                let span = self.bump().span;
                let x = RecVar::new(&name);
                if !self.rec_bound.contains(&x) {
                    return Err(ParseError::new(
                        span,
                        format!("unbound recursion variable `{name}`"),
                    ));
                }
                Ok(Process::Var(x))
            }
            _ => self.error("a process"),
        }
    }
}

/// Parses a `.csys` file and validates it.
pub fn parse_system(text: &str) -> Result<ParsedBundle, ParseError> {
    let mut p = Parser::new(text)?;
    p.expect_kw("latency")?;
    let lat_span = p.span();
    let latency = p.small_nat("the latency")?;
    if latency == 0 {
        return Err(ParseError::new(lat_span, "latency must be at least 1"));
    }
    p.expect(Tok::Semi)?;
    let mut cfg = SystemConfig::new(latency);
    let mut diagnostics = Vec::new();
    while *p.peek() != Tok::Eof {
        let node_span = p.expect_kw("node")?;
        let (name, name_span) = p.ident("a node id")?;
        let id = NodeId::new(&name);
        if cfg.nodes.contains(&id) {
            return Err(ParseError::new(
                name_span,
                format!("node `{name}` declared twice"),
            ));
        }
        let checkpoint = if p.is_kw("checkpoint") {
            p.bump();
            Some(p.process()?)
        } else {
            None
        };
        p.expect(Tok::LBrace)?;
        let proc = p.process()?;
        p.expect(Tok::RBrace)?;
        p.eat(Tok::Semi);
        for (what, q) in [
            ("process", Some(&proc)),
            ("checkpoint", checkpoint.as_ref()),
        ] {
            let Some(q) = q else { continue };
            if !time_guarded(q) {
                diagnostics.push(Diagnostic {
                    severity: Severity::Zeno,
                    span: node_span.clone(),
                    message: format!(
                        "{what} of node `{name}` can recurse without letting time pass"
                    ),
                });
            } else if !non_instantaneous(q) {
                diagnostics.push(Diagnostic {
                    severity: Severity::Warning,
                    span: node_span.clone(),
                    message: format!("{what} of node `{name}` has a branch that never sleeps"),
                });
            }
        }
        cfg = match checkpoint {
            Some(cp) => cfg.with_checkpointed_node(id, proc, cp),
            None => cfg.with_node(id, proc),
        };
    }
    for (id, span) in &p.node_refs {
        if !cfg.nodes.contains(id) {
            return Err(ParseError::new(
                span.clone(),
                format!("unknown node `{id}`"),
            ));
        }
    }
    let system = cfg.initial_system();
    Ok(ParsedBundle {
        config: cfg,
        system,
        diagnostics,
    })
}

fn only_comments(text: &str) -> bool {
    text.lines()
        .all(|l| l.trim().is_empty() || l.trim_start().starts_with('#'))
}

/// Parses a `.curse` file; an empty file is the uncursed model.
pub fn parse_curse(text: &str) -> Result<CurseSpec, ParseError> {
    if only_comments(text) {
        return Ok(CurseSpec::uncursed());
    }
    let mut p = Parser::new(text)?;
    p.expect_kw("curse")?;
    p.expect(Tok::LBrace)?;
    let mut spec = CurseSpec::uncursed();
    let mut spans = Vec::new();
    while *p.peek() != Tok::RBrace {
        let start = p.span();
        let subject = if p.is_kw("node") {
            p.bump();
            Subject::Node(NodeId::new(p.ident("a node id")?.0))
        } else if p.is_kw("link") {
            p.bump();
            let a = NodeId::new(p.ident("a node id")?.0);
            p.expect(Tok::Arrow)?;
            let b = NodeId::new(p.ident("a node id")?.0);
            Subject::Link(a, b)
        } else {
            return p.error("`node` or `link`");
        };
        p.expect(Tok::Colon)?;
        let status = if p.is_kw("down") {
            p.bump();
            HealthStatus::Down
        } else if p.is_kw("slow") {
            p.bump();
            HealthStatus::Slow
        } else {
            return p.error("`down` or `slow`");
        };
        p.expect(Tok::At)?;
        let window = if p.eat(Tok::LBracket) {
            let from = p.nat("a start time")?;
            p.expect(Tok::Comma)?;
            let to = p.nat("an end time")?;
            p.expect(Tok::RBracket)?;
            TimeWindow::Interval { from, to }
        } else if p.is_kw("from") {
            p.bump();
            TimeWindow::From(p.nat("a start time")?)
        } else if p.is_kw("every") {
            p.bump();
            let period = p.nat("a period")?;
            p.expect_kw("active")?;
            let active_len = p.nat("an active length")?;
            p.expect_kw("offset")?;
            let offset = p.nat("an offset")?;
            p.expect_kw("from")?;
            let starting_at = p.nat("a start time")?;
            TimeWindow::Periodic {
                offset,
                active_len,
                period,
                starting_at,
            }
        } else {
            return p.error("a time window");
        };
        p.expect(Tok::Semi)?;
        spec = spec.with_rule(subject, status, window);
        spans.push(start);
        // validate incrementally so the error points at the offending rule
        if let Err(e) = spec.validate(None) {
            return Err(ParseError::new(
                spans.last().unwrap().clone(),
                e.to_string(),
            ));
        }
    }
    p.expect(Tok::RBrace)?;
    p.expect(Tok::Eof)?;
    Ok(spec)
}

/// Parses a `.scope` file: `scope { !n (p); ?n (p); }`.
pub fn parse_scope(text: &str) -> Result<ScopeSet, ParseError> {
    if only_comments(text) {
        return Ok(ScopeSet::empty());
    }
    let mut p = Parser::new(text)?;
    p.expect_kw("scope")?;
    p.expect(Tok::LBrace)?;
    let mut entries = BTreeSet::new();
    while *p.peek() != Tok::RBrace {
        let out = if p.eat(Tok::Bang) {
            true
        } else if p.eat(Tok::Question) {
            false
        } else {
            return p.error("`!` or `?`");
        };
        let (node, _) = p.ident("a node id")?;
        let pat = p.pattern()?;
        p.expect(Tok::Semi)?;
        let node = NodeId::new(node);
        entries.insert(if out {
            ScopeEntry::Out(node, pat)
        } else {
            ScopeEntry::In(node, pat)
        });
    }
    p.expect(Tok::RBrace)?;
    p.expect(Tok::Eof)?;
    Ok(ScopeSet::new(entries))
}
