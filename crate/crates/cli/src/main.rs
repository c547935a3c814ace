use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use greyfail_core::barbs::ScopeSet;
use greyfail_core::curse::CurseSpec;
use greyfail_core::dsl::{parse_curse, parse_scope, parse_system, ParsedBundle};
use greyfail_core::lts::{explore, Bounds};
use greyfail_core::reliability::{self, Model, Options, Outcome, ReliabilityVerdict};
use greyfail_core::report::{self, Params};
use greyfail_core::semantics::Semantics;

/// `println!` that stops quietly when stdout is a closed pipe (`| head`).
macro_rules! outln {
    ($($arg:tt)*) => {{
        use std::io::Write as _;
        if writeln!(std::io::stdout(), $($arg)*).is_err() {
            std::process::exit(0);
        }
    }};
}

/// `print!` counterpart of `outln!`.
macro_rules! out {
    ($($arg:tt)*) => {{
        use std::io::Write as _;
        if write!(std::io::stdout(), $($arg)*).is_err() {
            std::process::exit(0);
        }
    }};
}

const EX_USAGE: u8 = 64;
const EX_DATAERR: u8 = 65;
const EX_NOINPUT: u8 = 66;
const EX_SOFTWARE: u8 = 70;

#[derive(Parser)]
#[command(
    name = "greyfail",
    version,
    about = "Model checker for actor systems under grey failures"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Follow one run, resolving choices with a seeded random scheduler.
    Simulate {
        #[arg(long)]
        system: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        common: Common,
    },
    /// Build the state graph.
    Explore {
        #[arg(long)]
        system: PathBuf,
        /// Write Graphviz output here (`-` for stdout).
        #[arg(long)]
        dot: Option<PathBuf>,
        /// Write the graph as JSON here (`-` for stdout).
        #[arg(long)]
        json: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Decide a reliability property.
    Check {
        #[command(subcommand)]
        prop: Prop,
    },
}

#[derive(Subcommand)]
enum Prop {
    /// Cursed and uncursed runs are weakly barbed bisimilar.
    Resilience {
        #[arg(long)]
        system: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Every run from time `n` passes a state bisimilar to the uncursed start.
    Recoverable {
        #[arg(long)]
        system: PathBuf,
        #[arg(long)]
        n: u64,
        #[command(flatten)]
        common: Common,
    },
    /// Every uncursed state before time `n` is matched by a cursed one by time `n`.
    CheckpointRecoverable {
        #[arg(long)]
        system: PathBuf,
        #[arg(long)]
        n: u64,
        #[command(flatten)]
        common: Common,
    },
    /// Masking, fail-safe, non-masking or none.
    Classify {
        #[arg(long)]
        system: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Transparency plus improvement; without `--n`, the smallest `n` up
    /// to `--search-n` with an improvement is reported.
    Augmentation {
        #[arg(long)]
        base: PathBuf,
        #[arg(long)]
        augmented: PathBuf,
        #[arg(long)]
        n: Option<u64>,
        #[arg(long, default_value_t = 16)]
        search_n: u64,
        #[command(flatten)]
        common: Common,
    },
    /// Recoverability of the base implies that of the augmentation, for
    /// each `--case CURSE_FILE:N`.
    Preserving {
        #[arg(long)]
        base: PathBuf,
        #[arg(long)]
        augmented: PathBuf,
        #[arg(long = "case", required = true)]
        cases: Vec<String>,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum Format {
    Text,
    Json,
}

#[derive(Args, Clone)]
struct Common {
    #[arg(long)]
    curse: Option<PathBuf>,
    #[arg(long)]
    scope: Option<PathBuf>,
    #[arg(long)]
    max_time: Option<u64>,
    /// Defaults to GREYFAIL_MAX_STATES, else 1000000.
    #[arg(long)]
    max_states: Option<usize>,
    #[arg(long, default_value_t = 16)]
    max_mailbox: usize,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Only deliver floating messages between a pair in send order.
    #[arg(long)]
    erlang_order: bool,
    /// Accept recursion not guarded by time.
    #[arg(long)]
    allow_zeno: bool,
}

#[derive(Debug)]
struct Failure {
    code: u8,
    msg: String,
}

impl Failure {
    fn new(code: u8, msg: impl Into<String>) -> Self {
        Failure {
            code,
            msg: msg.into(),
        }
    }
}

type Res<T> = Result<T, Failure>;

fn read(path: &Path) -> Res<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Failure::new(EX_NOINPUT, format!("{}: {e}", path.display())))
}

fn load_system(path: &Path, allow_zeno: bool) -> Res<ParsedBundle> {
    let file = path.display().to_string();
    let b = parse_system(&read(path)?)
        .map_err(|e| Failure::new(EX_DATAERR, e.in_file(file.clone()).to_string()))?
        .in_file(&file);
    for d in &b.diagnostics {
        eprintln!("{d}");
    }
    if b.has_zeno() && !allow_zeno {
        return Err(Failure::new(
            EX_DATAERR,
            format!("{file}: recursion not guarded by time (use --allow-zeno to accept)"),
        ));
    }
    Ok(b)
}

fn load_curse(c: &Common, b: &ParsedBundle) -> Res<CurseSpec> {
    let Some(path) = &c.curse else {
        return Ok(CurseSpec::uncursed());
    };
    let file = path.display().to_string();
    let curse = parse_curse(&read(path)?)
        .map_err(|e| Failure::new(EX_DATAERR, e.in_file(file.clone()).to_string()))?;
    curse
        .validate(Some(&b.config.nodes))
        .map_err(|e| Failure::new(EX_DATAERR, format!("{file}: {e}")))?;
    Ok(curse)
}

fn load_scope(c: &Common) -> Res<ScopeSet> {
    let Some(path) = &c.scope else {
        return Ok(ScopeSet::empty());
    };
    let file = path.display().to_string();
    parse_scope(&read(path)?).map_err(|e| Failure::new(EX_DATAERR, e.in_file(file).to_string()))
}

fn bounds(c: &Common) -> Res<Bounds> {
    let mut b = Bounds {
        max_time: c.max_time,
        max_mailbox: c.max_mailbox,
        ..Bounds::default()
    };
    if let Ok(v) = std::env::var("GREYFAIL_MAX_STATES") {
        b.max_states = v.parse().map_err(|_| {
            Failure::new(EX_USAGE, format!("GREYFAIL_MAX_STATES: not a number: {v}"))
        })?;
    }
    if let Some(m) = c.max_states {
        b.max_states = m;
    }
    if b.max_states == 0 {
        return Err(Failure::new(EX_USAGE, "max-states must be at least 1"));
    }
    Ok(b)
}

fn options(c: &Common) -> Res<Options> {
    Ok(Options {
        bounds: bounds(c)?,
        erlang_order: c.erlang_order,
        scope: load_scope(c)?,
    })
}

fn params(systems: &[&Path], c: &Common, opts: &Options) -> Params {
    Params {
        systems: systems.iter().map(|p| p.display().to_string()).collect(),
        curse: c.curse.as_ref().map(|p| p.display().to_string()),
        scope: opts.scope.entries().map(|e| e.to_string()).collect(),
        erlang_order: c.erlang_order,
        ..Params::default()
    }
    .with_bounds(&opts.bounds)
}

fn emit(v: &ReliabilityVerdict, p: &Params, c: &Common, started: Instant) -> u8 {
    match c.format {
        Format::Text => out!("{}", report::render_text(v, p)),
        Format::Json => {
            let j = report::to_json(v, p, started.elapsed().as_millis());
            outln!(
                "{}",
                serde_json::to_string_pretty(&j).expect("verdict serializes")
            );
        }
    }
    if !v.cross_checks_pass() {
        eprintln!("internal cross-check failed; verdict is not trustworthy");
        return EX_SOFTWARE;
    }
    match v.outcome {
        Outcome::Holds => 0,
        Outcome::Fails => 1,
        Outcome::Inconclusive => 2,
    }
}

fn runtime(e: reliability::ReliabilityError) -> Failure {
    Failure::new(EX_SOFTWARE, e.to_string())
}

fn check(prop: Prop) -> Res<u8> {
    let started = Instant::now();
    match prop {
        Prop::Resilience { system, common } => {
            let (b, curse, opts) = single(&system, &common)?;
            let v = reliability::check_resilience(&b.config, &b.system, &curse, &opts)
                .map_err(runtime)?;
            Ok(emit(
                &v,
                &params(&[&system], &common, &opts),
                &common,
                started,
            ))
        }
        Prop::Recoverable { system, n, common } => {
            let (b, curse, opts) = single(&system, &common)?;
            let v = reliability::check_n_recoverable(&b.config, &b.system, &curse, n, &opts)
                .map_err(runtime)?;
            Ok(emit(
                &v,
                &params(&[&system], &common, &opts),
                &common,
                started,
            ))
        }
        Prop::CheckpointRecoverable { system, n, common } => {
            let (b, curse, opts) = single(&system, &common)?;
            let v =
                reliability::check_checkpoint_recoverable(&b.config, &b.system, &curse, n, &opts)
                    .map_err(runtime)?;
            Ok(emit(
                &v,
                &params(&[&system], &common, &opts),
                &common,
                started,
            ))
        }
        Prop::Classify { system, common } => {
            let (b, curse, opts) = single(&system, &common)?;
            let v = reliability::classify(&b.config, &b.system, &curse, &opts).map_err(runtime)?;
            Ok(emit(
                &v,
                &params(&[&system], &common, &opts),
                &common,
                started,
            ))
        }
        Prop::Augmentation {
            base,
            augmented,
            n,
            search_n,
            common,
        } => {
            let bb = load_system(&base, common.allow_zeno)?;
            let ab = load_system(&augmented, common.allow_zeno)?;
            let curse = load_curse(&common, &bb)?;
            curse
                .validate(Some(&ab.config.nodes))
                .map_err(|e| Failure::new(EX_DATAERR, e.to_string()))?;
            let opts = options(&common)?;
            let bm = Model {
                config: &bb.config,
                system: &bb.system,
            };
            let am = Model {
                config: &ab.config,
                system: &ab.system,
            };
            let v = match n {
                Some(n) => {
                    reliability::check_augmentation(bm, am, &curse, n, &opts).map_err(runtime)?
                }
                None => {
                    let mut first = None;
                    for k in 0..=search_n {
                        let v = reliability::check_augmentation(bm, am, &curse, k, &opts)
                            .map_err(runtime)?;
                        let stop =
                            v.outcome == Outcome::Holds || v.parts[0].outcome != Outcome::Holds;
                        if stop {
                            first = Some(v);
                            break;
                        }
                        first.get_or_insert(v);
                    }
                    first.expect("search range is non-empty")
                }
            };
            Ok(emit(
                &v,
                &params(&[&base, &augmented], &common, &opts),
                &common,
                started,
            ))
        }
        Prop::Preserving {
            base,
            augmented,
            cases,
            common,
        } => {
            let bb = load_system(&base, common.allow_zeno)?;
            let ab = load_system(&augmented, common.allow_zeno)?;
            let opts = options(&common)?;
            let mut parsed = Vec::new();
            for case in &cases {
                let (file, n) = case
                    .rsplit_once(':')
                    .and_then(|(f, n)| n.parse::<u64>().ok().map(|n| (f, n)))
                    .ok_or_else(|| {
                        Failure::new(EX_USAGE, format!("--case expects CURSE_FILE:N, got {case}"))
                    })?;
                let c = Common {
                    curse: Some(file.into()),
                    ..common.clone()
                };
                let curse = load_curse(&c, &bb)?;
                parsed.push((file.to_string(), curse, n));
            }
            let bm = Model {
                config: &bb.config,
                system: &bb.system,
            };
            let am = Model {
                config: &ab.config,
                system: &ab.system,
            };
            let v = reliability::check_preserving(bm, am, &parsed, &opts).map_err(runtime)?;
            Ok(emit(
                &v,
                &params(&[&base, &augmented], &common, &opts),
                &common,
                started,
            ))
        }
    }
}

fn single(system: &Path, common: &Common) -> Res<(ParsedBundle, CurseSpec, Options)> {
    let b = load_system(system, common.allow_zeno)?;
    let curse = load_curse(common, &b)?;
    Ok((b, curse, options(common)?))
}

fn write_out(path: &Path, text: &str) -> Res<()> {
    if path == Path::new("-") {
        out!("{text}");
        Ok(())
    } else {
        std::fs::write(path, text).map_err(|e| Failure::new(73, format!("{}: {e}", path.display())))
    }
}

fn run_explore(system: &Path, dot: Option<&Path>, json: Option<&Path>, common: &Common) -> Res<u8> {
    let (b, curse, opts) = single(system, common)?;
    let sem = Semantics::new(curse, b.config.latency).with_erlang_order(opts.erlang_order);
    let lts = explore(&sem, &b.system, &opts.bounds);
    if let Some(p) = dot {
        write_out(p, &lts.to_dot())?;
    }
    if let Some(p) = json {
        let text = serde_json::to_string_pretty(&lts.to_json()).expect("lts serializes");
        write_out(p, &format!("{text}\n"))?;
    }
    let to_stdout = |p: Option<&Path>| p == Some(Path::new("-"));
    if !to_stdout(dot) && !to_stdout(json) {
        match common.format {
            Format::Text => {
                outln!("states: {}", lts.len());
                outln!("edges: {}", lts.edge_count());
                outln!(
                    "horizon: stable {} period {}",
                    lts.horizon.stable_time,
                    lts.horizon.period
                );
                outln!("complete: {}", lts.is_complete());
                for t in &lts.truncations {
                    outln!("truncated: {t}");
                }
            }
            Format::Json => {
                let j = serde_json::json!({
                    "states": lts.len(),
                    "edges": lts.edge_count(),
                    "complete": lts.is_complete(),
                    "truncations": lts.truncations.iter().map(|t| t.to_string()).collect::<Vec<_>>(),
                });
                outln!("{j}");
            }
        }
    }
    Ok(if lts.is_complete() { 0 } else { 2 })
}

fn run_simulate(system: &Path, seed: Option<u64>, common: &Common) -> Res<u8> {
    let (b, curse, opts) = single(system, common)?;
    let sem = Semantics::new(curse, b.config.latency).with_erlang_order(opts.erlang_order);
    let seed = seed.unwrap_or_else(|| rand::thread_rng().gen());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let until = opts.bounds.max_time.unwrap_or(20);
    outln!("# seed {seed}");
    outln!("# until time {until}");
    let mut sys = b.system.clone();
    let mut events = 0usize;
    loop {
        let t = sys.time().concrete().unwrap_or(0);
        let instants = sem
            .instantaneous_steps(&sys)
            .map_err(|e| Failure::new(EX_SOFTWARE, format!("at time {t}: {e}")))?;
        let (label, next) = if instants.is_empty() {
            if t >= until {
                break;
            }
            sem.time_step(&sys)
                .map_err(|e| Failure::new(EX_SOFTWARE, format!("at time {t}: {e}")))?
                .ok_or_else(|| {
                    Failure::new(EX_SOFTWARE, format!("at time {t}: time cannot advance"))
                })?
        } else {
            let i = rng.gen_range(0..instants.len());
            instants.into_iter().nth(i).expect("index in range")
        };
        outln!("t={t:<3} {:<8} {label}", label.rule_name());
        events += 1;
        if events > opts.bounds.max_states {
            return Err(Failure::new(
                EX_SOFTWARE,
                "event limit reached without time advancing",
            ));
        }
        sys = next;
    }
    outln!("# final: {sys}");
    Ok(0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EX_USAGE } else { 0 });
        }
    };
    let r = match cli.cmd {
        Cmd::Simulate {
            system,
            seed,
            common,
        } => run_simulate(&system, seed, &common),
        Cmd::Explore {
            system,
            dot,
            json,
            common,
        } => run_explore(&system, dot.as_deref(), json.as_deref(), &common),
        Cmd::Check { prop } => check(prop),
    };
    match r {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("greyfail: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}
