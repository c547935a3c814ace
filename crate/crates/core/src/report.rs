//! Rendering verdicts as text and as versioned JSON.

use std::fmt::Write as _;

use serde::Serialize;
use serde_json::{json, Value};

use crate::lts::Bounds;
use crate::reliability::{Evidence, ReliabilityVerdict};

pub const SCHEMA_ID: &str = "greyfail-verdict/1";

/// The JSON schema every `to_json` document satisfies.
pub const SCHEMA: &str = include_str!("../schema/verdict.schema.json");

/// What the check was run on.
#[derive(Clone, Debug, Default, Serialize)]
pub struct Params {
    pub systems: Vec<String>,
    pub curse: Option<String>,
    pub scope: Vec<String>,
    pub max_time: Option<u64>,
    pub max_states: usize,
    pub max_mailbox: usize,
    pub erlang_order: bool,
}

impl Params {
    pub fn with_bounds(mut self, b: &Bounds) -> Self {
        self.max_time = b.max_time;
        self.max_states = b.max_states;
        self.max_mailbox = b.max_mailbox;
        self
    }
}

fn evidence_text(out: &mut String, ev: &Evidence) {
    let _ = writeln!(out, "  run: {}", ev.run);
    if ev.steps.is_empty() {
        let _ = writeln!(out, "    (initial state)");
    }
    for s in &ev.steps {
        let _ = writeln!(out, "    t={:<3} {:<8} {}", s.time, s.rule, s.label);
    }
    let _ = writeln!(out, "    end s{}: {}", ev.end_state, ev.end_system);
    if let Some(b) = &ev.barb {
        let _ = writeln!(out, "    unmatched barb: {b}");
    }
}

fn paren(s: &str) -> String {
    if s.is_empty() {
        String::new()
    } else {
        format!(" ({s})")
    }
}

pub fn render_text(v: &ReliabilityVerdict, p: &Params) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "property: {}", v.property);
    let _ = writeln!(out, "verdict:  {}", v.outcome);
    if let Some(c) = v.class {
        let _ = writeln!(out, "class:    {c}");
    }
    if let Some(r) = &v.reason {
        let _ = writeln!(out, "reason:   {r}");
    }
    let _ = writeln!(out, "parameters:");
    let _ = writeln!(out, "  system: {}", p.systems.join(", "));
    let _ = writeln!(
        out,
        "  curse:  {}",
        p.curse.as_deref().unwrap_or("(uncursed)")
    );
    if let Some(n) = v.n {
        let _ = writeln!(out, "  n:      {n}");
    }
    if !p.scope.is_empty() {
        let _ = writeln!(out, "  scope:  {}", p.scope.join("; "));
    }
    let mt = p.max_time.map_or("auto".to_string(), |t| t.to_string());
    let _ = writeln!(
        out,
        "  bounds: max-time {mt}, max-states {}, max-mailbox {}{}",
        p.max_states,
        p.max_mailbox,
        if p.erlang_order { ", erlang order" } else { "" }
    );
    for part in &v.parts {
        let _ = writeln!(
            out,
            "part {}: {}{}",
            part.name,
            part.outcome,
            paren(&part.detail)
        );
    }
    if !v.witness.is_empty() {
        let _ = writeln!(out, "witness:");
        for ev in &v.witness {
            evidence_text(&mut out, ev);
        }
    }
    for s in &v.explored {
        let _ = writeln!(
            out,
            "explored {}: {} states, {} edges{}",
            s.run,
            s.states,
            s.edges,
            if s.complete {
                String::new()
            } else {
                format!(", truncated ({})", s.truncations.join(", "))
            }
        );
    }
    for c in &v.cross_checks {
        let mark = if c.passed { "ok" } else { "FAILED" };
        let _ = writeln!(out, "cross-check {}: {mark}{}", c.name, paren(&c.detail));
    }
    out
}

pub fn to_json(v: &ReliabilityVerdict, p: &Params, elapsed_ms: u128) -> Value {
    json!({
        "schema": SCHEMA_ID,
        "property": v.property,
        "parameters": {
            "systems": p.systems,
            "curse": p.curse,
            "n": v.n,
            "scope": p.scope,
            "bounds": {
                "max_time": p.max_time,
                "max_states": p.max_states,
                "max_mailbox": p.max_mailbox,
            },
            "erlang_order": p.erlang_order,
        },
        "verdict": v.outcome,
        "class": v.class,
        "reason": v.reason,
        "witness": v.witness,
        "parts": v.parts,
        "cross_checks": v.cross_checks,
        "explored": v.explored,
        "timing": { "elapsed_ms": elapsed_ms as u64 },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::{parse_curse, parse_system};
    use crate::reliability::{check_resilience, classify, Options};

    const R: &str = "latency 1;
        node p { recv {order -> !@c item. 0} after 3 {0} }
        node c { !@p order. recv {item -> 0} after 3 {0} }";

    fn params() -> Params {
        Params {
            systems: vec!["r.csys".into()],
            curse: Some("linkdown.curse".into()),
            ..Params::default()
        }
        .with_bounds(&Bounds::default())
    }

    #[test]
    fn text_has_verdict_and_bounds() {
        let b = parse_system(R).unwrap();
        let v = check_resilience(
            &b.config,
            &b.system,
            &Default::default(),
            &Options::default(),
        )
        .unwrap();
        let t = render_text(&v, &params());
        assert!(t.starts_with("property: resilience\nverdict:  holds\n"));
        assert!(t.contains("max-states 1000000"));
    }

    #[test]
    fn json_shape() {
        let b = parse_system(R).unwrap();
        let curse = parse_curse("curse { link c -> p : down @ [0,0]; }").unwrap();
        let v = classify(&b.config, &b.system, &curse, &Options::default()).unwrap();
        let j = to_json(&v, &params(), 3);
        assert_eq!(j["schema"], SCHEMA_ID);
        assert_eq!(j["property"], "classify");
        let class = j["class"].as_str().unwrap();
        assert!(["masking", "failSafe", "nonMasking", "none"].contains(&class));
        assert!(j["parameters"]["bounds"]["max_time"].is_null());
        let schema: Value = serde_json::from_str(SCHEMA).unwrap();
        assert_eq!(schema["properties"]["schema"]["const"], SCHEMA_ID);
    }
}
