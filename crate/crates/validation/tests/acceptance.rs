//! Acceptance run: one PASS/FAIL line per criterion. Exits non-zero if any
//! criterion fails.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use greyfail_core::barbs::barbs_of;
use greyfail_core::curse::CurseSpec;
use greyfail_core::dsl::{
    parse_curse, parse_scope, parse_system, print_curse, print_scope, print_system, ParsedBundle,
};
use greyfail_core::reliability::{
    check_augmentation, check_checkpoint_recoverable, check_n_recoverable, check_preserving,
    check_resilience, Model, Options, Outcome, ReliabilityVerdict,
};
use greyfail_core::syntax::{Component, System};

const RESILIENCE_LIMIT: Duration = Duration::from_secs(5);
const BREAKER_LIMIT: Duration = Duration::from_secs(60);
/// How far "for all n" is searched for the unprotected circuit-breaker client.
const BREAKER_HORIZON: u64 = 16;

fn corpus() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

fn read(name: &str) -> String {
    fs::read_to_string(corpus().join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

fn system(name: &str) -> ParsedBundle {
    parse_system(&read(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

fn curse(name: &str) -> CurseSpec {
    parse_curse(&read(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

fn scoped(name: &str) -> Options {
    Options {
        scope: parse_scope(&read(name)).unwrap(),
        ..Options::default()
    }
}

fn resilience(sys: &str, k: &CurseSpec, opts: &Options) -> (ReliabilityVerdict, Duration) {
    let b = system(sys);
    let t = Instant::now();
    let v = check_resilience(&b.config, &b.system, k, opts).unwrap();
    (v, t.elapsed())
}

fn recoverable(sys: &str, k: &CurseSpec, n: u64, opts: &Options) -> Outcome {
    let b = system(sys);
    check_n_recoverable(&b.config, &b.system, k, n, opts)
        .unwrap()
        .outcome
}

struct Line {
    pass: bool,
    detail: String,
}

impl Line {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Line {
            pass,
            detail: detail.into(),
        }
    }
}

fn witness_barb(v: &ReliabilityVerdict) -> Option<String> {
    v.witness.iter().find_map(|e| e.barb.clone())
}

fn c1() -> Line {
    let down = curse("linkdown_p_c_1.curse");
    let opts = Options::default();
    let (r, tr) = resilience("resilience_r.csys", &down, &opts);
    let (rp, trp) = resilience("resilience_r_prime.csys", &down, &opts);
    let barb = witness_barb(&r);
    let r_ok = r.outcome == Outcome::Fails && barb.as_deref() == Some("?c item");
    let rp_ok = rp.outcome == Outcome::Holds;
    let fast = tr < RESILIENCE_LIMIT && trp < RESILIENCE_LIMIT;
    Line::new(
        r_ok && rp_ok && fast,
        format!(
            "R: {} (witness barb {}, want fails with ?c item) in {:.2?}; R': {} (want holds) in {:.2?}; limit {:?}",
            r.outcome,
            barb.as_deref().unwrap_or("none"),
            tr,
            rp.outcome,
            trp,
            RESILIENCE_LIMIT
        ),
    )
}

fn c2() -> Line {
    let down = curse("linkdown_p_c_1.curse");
    let opts = Options::default();
    let (t, _) = resilience("redundancy_rt.csys", &down, &opts);
    let (s, _) = resilience("redundancy_rs.csys", &down, &opts);
    Line::new(
        t.outcome == Outcome::Holds && s.outcome == Outcome::Holds,
        format!("R_T: {}, R_S: {} (want both holds)", t.outcome, s.outcome),
    )
}

fn c3() -> Line {
    let down = curse("linkdown_p_c_1.curse");
    let opts = Options::default();
    let (tt, _) = resilience("retry_tt.csys", &down, &opts);
    let outcomes: Vec<Outcome> = (0..=6)
        .map(|n| recoverable("retryn_tt.csys", &down, n, &opts))
        .collect();
    let minimal =
        outcomes[6] == Outcome::Holds && outcomes[..6].iter().all(|o| *o == Outcome::Fails);
    let shown: Vec<String> = outcomes
        .iter()
        .enumerate()
        .map(|(n, o)| format!("{n}:{o}"))
        .collect();
    Line::new(
        tt.outcome == Outcome::Fails && minimal,
        format!(
            "R_TT resilience: {} (want fails); retry-n recoverability {} (want fails below 6, holds at 6)",
            tt.outcome,
            shown.join(" ")
        ),
    )
}

fn c4() -> Line {
    let down = "linkdown_p_c_1.curse";
    let slow = "linkslow_p_c_1.curse";
    let inline = |s: &str| parse_curse(s).unwrap();
    let breaker = scoped("breaker.scope");
    let plain = Options::default();
    let pairs: Vec<(&str, CurseSpec, &Options)> = vec![
        ("resilience_r.csys", curse(down), &plain),
        ("resilience_r.csys", curse(slow), &plain),
        ("resilience_r_prime.csys", curse(down), &plain),
        ("redundancy_rt.csys", curse(down), &plain),
        ("redundancy_rs.csys", curse(down), &plain),
        ("retry_tt.csys", curse(down), &plain),
        ("retryn_tt.csys", curse(down), &plain),
        ("checkpoint_tt.csys", curse("p_down_2.curse"), &plain),
        (
            "producer_consumer.csys",
            curse("producer_slow_1_3.curse"),
            &plain,
        ),
        ("breaker.csys", curse("breaker_link_slow.curse"), &breaker),
        (
            "breaker_aug.csys",
            curse("breaker_link_slow.curse"),
            &breaker,
        ),
        (
            "breaker_aug.csys",
            curse("breaker_inner_link_slow.curse"),
            &breaker,
        ),
        ("failsafe.csys", curse("p_down_forever.curse"), &plain),
        (
            "nrec.csys",
            inline("curse { link n_1 -> n_2 : down @ [0,0]; }"),
            &plain,
        ),
        (
            "counter_ce.csys",
            inline("curse { node n2 : slow @ [0,1]; }"),
            &plain,
        ),
    ];
    let mut agree = 0;
    let mut bad = vec![];
    let mut open = vec![];
    for (sys, k, opts) in &pairs {
        let (r, _) = resilience(sys, k, opts);
        let z = recoverable(sys, k, 0, opts);
        let xc = r.cross_checks_pass();
        if r.outcome == Outcome::Inconclusive && z == Outcome::Inconclusive {
            open.push(sys.to_string());
        } else if r.outcome == z && xc {
            agree += 1;
        } else {
            bad.push(format!(
                "{sys}: resilience {} vs 0-recoverable {z}, cross-checks {xc}",
                r.outcome
            ));
        }
    }
    let skipped = if open.is_empty() {
        String::new()
    } else {
        format!("; both inconclusive (not counted): {}", open.join(", "))
    };
    Line::new(
        bad.is_empty() && agree >= 10,
        if bad.is_empty() {
            format!(
                "{agree}/{} conclusive pairs agree, zero disagreements{skipped}",
                pairs.len()
            )
        } else {
            format!("{agree}/{} agree; {}{skipped}", pairs.len(), bad.join("; "))
        },
    )
}

fn c5() -> Line {
    let b = system("checkpoint_tt.csys");
    let k = curse("p_down_2.curse");
    let opts = Options::default();
    let ck = check_checkpoint_recoverable(&b.config, &b.system, &k, 4, &opts).unwrap();
    let rec = check_n_recoverable(&b.config, &b.system, &k, 4, &opts).unwrap();
    Line::new(
        ck.outcome == Outcome::Holds && rec.outcome == Outcome::Fails,
        format!(
            "4-checkpoint-recoverable: {} (want holds{}); 4-recoverable: {} (want fails)",
            ck.outcome,
            ck.reason
                .as_deref()
                .map(|r| format!("; {r}"))
                .unwrap_or_default(),
            rec.outcome
        ),
    )
}

fn c6() -> Line {
    let base = system("producer_consumer.csys");
    let aug = system("producer_consumer_aug.csys");
    let k = curse("producer_slow_1_3.curse");
    let opts = Options::default();
    let b4 = check_n_recoverable(&base.config, &base.system, &k, 4, &opts)
        .unwrap()
        .outcome;
    let a0 = check_n_recoverable(&aug.config, &aug.system, &k, 0, &opts)
        .unwrap()
        .outcome;
    let bm = Model {
        config: &base.config,
        system: &base.system,
    };
    let am = Model {
        config: &aug.config,
        system: &aug.system,
    };
    let augv = check_augmentation(bm, am, &k, 0, &opts).unwrap();
    let transparency = augv
        .parts
        .iter()
        .find(|p| p.name == "transparency")
        .map(|p| p.outcome)
        .unwrap();
    let pres = check_preserving(bm, am, &[("producer slow 1-3".into(), k.clone(), 4)], &opts)
        .unwrap()
        .outcome;
    let ok = [b4, a0, transparency, pres]
        .iter()
        .all(|o| *o == Outcome::Holds);
    let why = if a0 == Outcome::Inconclusive {
        "; augmented exploration truncated"
    } else {
        ""
    };
    Line::new(
        ok,
        format!(
            "base 4-recoverable: {b4}; R_I 0-recoverable: {a0}; transparency: {transparency}; preserving: {pres} (want all holds){why}"
        ),
    )
}

fn c7() -> Line {
    let t = Instant::now();
    let base = system("breaker.csys");
    let aug = system("breaker_aug.csys");
    let k = curse("breaker_link_slow.curse");
    let opts = scoped("breaker.scope");
    let a0 = check_n_recoverable(&aug.config, &aug.system, &k, 0, &opts)
        .unwrap()
        .outcome;
    let base_outcomes: Vec<Outcome> = (0..=BREAKER_HORIZON)
        .map(|n| {
            check_n_recoverable(&base.config, &base.system, &k, n, &opts)
                .unwrap()
                .outcome
        })
        .collect();
    let base_fails = base_outcomes.iter().all(|o| *o == Outcome::Fails);
    let el = t.elapsed();
    let held: Vec<usize> = (0..base_outcomes.len())
        .filter(|&n| base_outcomes[n] != Outcome::Fails)
        .collect();
    Line::new(
        a0 == Outcome::Holds && base_fails && el < BREAKER_LIMIT,
        format!(
            "R_I 0-recoverable: {a0} (want holds); base fails for n = 0..={BREAKER_HORIZON}: {base_fails}{}; {el:.2?} (limit {BREAKER_LIMIT:?})",
            if held.is_empty() { String::new() } else { format!(" (not failing at {held:?})") }
        ),
    )
}

fn barb_set(s: &System) -> BTreeSet<String> {
    barbs_of(s).iter().map(|b| b.to_string()).collect()
}

fn set(xs: &[&str]) -> BTreeSet<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

fn without(s: &System, id: &str) -> System {
    System::new(
        s.components()
            .iter()
            .filter(|c| !matches!(c, Component::Node { id: n, .. } if n.as_str() == id))
            .cloned(),
    )
}

fn crashed(s: &System, id: &str) -> System {
    System::new(s.components().iter().map(|c| match c {
        Component::Node {
            id: n,
            checkpoint,
            time,
            ..
        } if n.as_str() == id => Component::Crashed {
            id: n.clone(),
            checkpoint: checkpoint.clone(),
            time: *time,
        },
        c => c.clone(),
    }))
}

fn c8() -> Line {
    let rr = system("barbs_replicas.csys").system;
    let rt = system("barbs_tagged.csys").system;
    let plain = set(&["!c d", "?c d"]);
    let tagged = set(&["!c (n1, d)", "!c (n2, d)", "?c (n1, d)", "?c (n2, d)"]);
    let tagged_one = set(&["!c (n1, d)", "?c (n1, d)", "?c (n2, d)"]);
    let checks = [
        ("R_R", barb_set(&rr), plain.clone()),
        (
            "R_R without r2",
            barb_set(&without(&rr, "r2")),
            plain.clone(),
        ),
        ("R_R with r2 down", barb_set(&crashed(&rr, "r2")), plain),
        ("R'_R", barb_set(&rt), tagged),
        (
            "R'_R without r2",
            barb_set(&without(&rt, "r2")),
            tagged_one.clone(),
        ),
        (
            "R'_R with r2 down",
            barb_set(&crashed(&rt, "r2")),
            tagged_one,
        ),
    ];
    let bad: Vec<String> = checks
        .iter()
        .filter(|(_, got, want)| got != want)
        .map(|(n, got, want)| format!("{n}: got {got:?}, want {want:?}"))
        .collect();
    Line::new(
        bad.is_empty(),
        if bad.is_empty() {
            "barb examples exact (6 systems); randomized suites: greyfail-core tests/semantics_props.rs, tests/equivalence_oracle.rs (1000 cases each)".to_string()
        } else {
            bad.join("; ")
        },
    )
}

fn c9() -> Line {
    let mut n = 0;
    let mut bad = vec![];
    let mut entries: Vec<PathBuf> = fs::read_dir(corpus())
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    entries.sort();
    for p in entries {
        let name = p.file_name().unwrap().to_string_lossy().into_owned();
        let src = fs::read_to_string(&p).unwrap();
        let ok = match p.extension().and_then(|e| e.to_str()) {
            Some("csys") => parse_system(&src).map_err(|e| e.to_string()).and_then(|b| {
                let once = print_system(&b);
                let b2 = parse_system(&once).map_err(|e| e.to_string())?;
                let same =
                    b2.system == b.system && b2.config == b.config && print_system(&b2) == once;
                same.then_some(()).ok_or("not a fixpoint".to_string())
            }),
            Some("curse") => parse_curse(&src).map_err(|e| e.to_string()).and_then(|c| {
                let once = print_curse(&c);
                let c2 = parse_curse(&once).map_err(|e| e.to_string())?;
                (c2 == c && print_curse(&c2) == once)
                    .then_some(())
                    .ok_or("not a fixpoint".to_string())
            }),
            Some("scope") => parse_scope(&src).map_err(|e| e.to_string()).and_then(|s| {
                let once = print_scope(&s);
                let s2 = parse_scope(&once).map_err(|e| e.to_string())?;
                (s2 == s && print_scope(&s2) == once)
                    .then_some(())
                    .ok_or("not a fixpoint".to_string())
            }),
            _ => continue,
        };
        n += 1;
        if let Err(e) = ok {
            bad.push(format!("{name}: {e}"));
        }
    }
    Line::new(
        bad.is_empty(),
        if bad.is_empty() {
            format!("{n} corpus files parse and round-trip")
        } else {
            bad.join("; ")
        },
    )
}

type Criterion = (&'static str, fn() -> Line);

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("resilience of R and R'", c1),
        ("time and space redundancy", c2),
        ("retry coordination", c3),
        ("resilience iff 0-recoverability", c4),
        ("checkpointing", c5),
        ("producer-consumer augmentation", c6),
        ("circuit breaker", c7),
        ("property suites and barb examples", c8),
        ("DSL round-trip", c9),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let line = f();
        if !line.pass {
            failed += 1;
        }
        println!(
            "acceptance {}: {} [{}] {}",
            i + 1,
            if line.pass { "PASS" } else { "FAIL" },
            name,
            line.detail
        );
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
