//! Command-line front end. Every command is a pure function of its
//! configuration: defaults, then the `--config` TOML file, then flags.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::approx::{
    error_report, random_dyadic_distribution, sparse_spoiler, AdviceDecider, BudgetDecider, Decider,
    FractionDecider, Stage, StagedDecider,
};
use crate::bijection::{transcript_to_jsonl, verify_window, BuilderState, Injection, Side, TableInjection};
use crate::dovetail::{
    bb_table, halting_table, sandwich_constant, survivor_stats, ComplexityTable, GroundTruth, Schedule,
};
use crate::machine::Certification;
use crate::optimalkit::{
    dedupe_values, desk_machine, left_total, prepend_zero, seat_exchange, shift_density, standard_optimal,
    Machine, Shift, StringSet,
};
use crate::rational::{format_rational, parse_rational, pow2, Rational};

#[derive(Parser, Debug)]
#[command(name = "haltkit", version, about = "Desk-scale halting statistics and optimal-machine transforms")]
struct Cli {
    /// TOML file with default settings; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(flatten)]
    common: CommonArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default)]
struct CommonArgs {
    /// Window: programs of length at most this.
    #[arg(long, global = true)]
    max_len: Option<usize>,
    /// Step budget for certification.
    #[arg(long, global = true)]
    budget: Option<u64>,
    /// Configuration store bound for divergence certificates.
    #[arg(long, global = true)]
    space: Option<usize>,
    /// Comma-separated step checkpoints (default: powers of two up to the budget).
    #[arg(long, global = true, value_delimiter = ',')]
    checkpoints: Option<Vec<u64>>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory; artifacts go to stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Certified halting status of every program in the window.
    Truth,
    /// Halting counts and densities per length and checkpoint.
    Density,
    /// Busy-beaver, complexity and survivor tables.
    Bb {
        /// Largest sandwich constant to try.
        #[arg(long, default_value_t = 8)]
        max_c: usize,
    },
    /// Run an approximate decider and report its exact error rates.
    Approx(ApproxArgs),
    /// Apply a transform pipeline and re-tabulate halting counts.
    Transform {
        /// Comma-separated steps: left_total, dedupe, zero, shift0, shift1, seats.
        #[arg(long, value_delimiter = ',', default_value = "left_total")]
        pipeline: Vec<String>,
        /// Source machine: desk or standard.
        #[arg(long, default_value = "desk")]
        base: String,
    },
    /// Build a bijection from two random injections and verify it.
    Bijection {
        #[arg(long, default_value_t = 256)]
        window: u64,
        /// Width of the random injection tables.
        #[arg(long, default_value_t = 256)]
        width: usize,
    },
    /// Carve high-probability strings out of random dyadic distributions.
    Spoiler {
        #[arg(long, default_value = "1/4")]
        eps: String,
        #[arg(long, default_value_t = 100)]
        trials: u64,
        #[arg(long, default_value_t = 4)]
        min_len: usize,
        #[arg(long, default_value_t = 10)]
        support: usize,
    },
}

#[derive(Args, Debug)]
struct ApproxArgs {
    #[arg(long, value_enum, default_value = "budget")]
    decider: DeciderKind,
    /// Step budget of the budget decider.
    #[arg(long)]
    t: Option<u64>,
    /// Target fraction for the fraction decider ("num/den"); default is
    /// the window density minus 1/64.
    #[arg(long)]
    r: Option<String>,
    /// Length sequence of the fraction decider.
    #[arg(long, value_delimiter = ',')]
    lengths: Option<Vec<usize>>,
    /// Number of advice levels, each one length below the last.
    #[arg(long, default_value_t = 3)]
    levels: usize,
    /// Half-width of the advice bracket around the true fraction.
    #[arg(long, default_value = "1/32")]
    advice_width: String,
    /// Staged decider stages as `upto:budget` pairs.
    #[arg(long, value_delimiter = ',')]
    stages: Option<Vec<String>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum DeciderKind {
    Budget,
    Fraction,
    Advice,
    Staged,
}

/// Settings shared by all commands.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub max_len: usize,
    pub budget: u64,
    pub space: usize,
    pub checkpoints: Option<Vec<u64>>,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub format: String,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            max_len: 10,
            budget: 1_000_000,
            space: 100_000,
            checkpoints: None,
            seed: 0,
            out: None,
            format: "csv".into(),
        }
    }
}

impl ExperimentConfig {
    pub fn checkpoint_grid(&self) -> Vec<u64> {
        match &self.checkpoints {
            Some(c) => c.clone(),
            None => Schedule::doubling(self.budget).rounds(),
        }
    }

    fn json(&self) -> bool {
        self.format == "json"
    }
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Check(String, String),
}

impl Failure {
    fn check(kind: &str, message: impl ToString) -> Failure {
        Failure::Check(kind.to_string(), message.to_string())
    }
}

/// Parse arguments, run, and return the process exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(Failure::Usage(msg)) => {
            eprintln!("{}", serde_json::json!({ "error": "usage", "message": msg }));
            2
        }
        Err(Failure::Check(kind, msg)) => {
            eprintln!("{}", serde_json::json!({ "error": kind, "message": msg }));
            1
        }
    }
}

fn load_config(cli: &Cli) -> Result<ExperimentConfig, Failure> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
            toml::from_str(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?
        }
        None => ExperimentConfig::default(),
    };
    let c = &cli.common;
    if let Some(v) = c.max_len {
        cfg.max_len = v;
    }
    if let Some(v) = c.budget {
        cfg.budget = v;
    }
    if let Some(v) = c.space {
        cfg.space = v;
    }
    if let Some(v) = &c.checkpoints {
        cfg.checkpoints = Some(v.clone());
    }
    if let Some(v) = c.seed {
        cfg.seed = v;
    }
    if let Some(v) = &c.out {
        cfg.out = Some(v.clone());
    }
    if let Some(v) = c.format {
        cfg.format = match v {
            Format::Csv => "csv".into(),
            Format::Json => "json".into(),
        };
    }
    if cfg.format != "csv" && cfg.format != "json" {
        return Err(Failure::Usage(format!("unknown format {:?}", cfg.format)));
    }
    if cfg.budget == 0 || cfg.space == 0 {
        return Err(Failure::Usage("budget and space must be positive".into()));
    }
    if cfg.max_len > 20 {
        return Err(Failure::Usage("max-len above 20 is out of desk range".into()));
    }
    let grid = cfg.checkpoint_grid();
    if grid.is_empty() || grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Failure::Usage("checkpoints must be strictly increasing".into()));
    }
    Ok(cfg)
}

/// Named artifacts; written to `out` or concatenated on stdout.
struct Output {
    dir: Option<PathBuf>,
}

impl Output {
    fn emit(&self, name: &str, content: &str) -> Result<(), Failure> {
        match &self.dir {
            Some(dir) => {
                fs::create_dir_all(dir).map_err(|e| Failure::check("io", e))?;
                fs::write(dir.join(name), content).map_err(|e| Failure::check("io", e))
            }
            None => {
                let mut stdout = std::io::stdout().lock();
                match stdout.write_all(content.as_bytes()).and_then(|_| stdout.flush()) {
                    Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(Failure::check("io", e)),
                    _ => Ok(()),
                }
            }
        }
    }
}

fn to_csv<T: Serialize>(rows: &[T]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).expect("row serializes");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf8")
}

fn pretty(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json");
    s.push('\n');
    s
}

fn truth_for(cfg: &ExperimentConfig) -> Result<GroundTruth, Failure> {
    let truth = GroundTruth::desk(cfg.max_len, cfg.budget, cfg.space);
    truth.require_certified().map_err(|e| Failure::check("nonzero_unknown", e))?;
    Ok(truth)
}

fn parse_q(s: &str) -> Result<Rational, Failure> {
    parse_rational(s).map_err(|e| Failure::Usage(e.to_string()))
}

fn dispatch(cli: Cli) -> Result<(), Failure> {
    let cfg = load_config(&cli)?;
    let out = Output { dir: cfg.out.clone() };
    match cli.command {
        Command::Truth => cmd_truth(&cfg, &out),
        Command::Density => cmd_density(&cfg, &out),
        Command::Bb { max_c } => cmd_bb(&cfg, &out, max_c),
        Command::Approx(a) => cmd_approx(&cfg, &out, &a),
        Command::Transform { pipeline, base } => cmd_transform(&cfg, &out, &pipeline, &base),
        Command::Bijection { window, width } => cmd_bijection(&cfg, &out, window, width),
        Command::Spoiler {
            eps,
            trials,
            min_len,
            support,
        } => cmd_spoiler(&cfg, &out, &parse_q(&eps)?, trials, min_len, support),
    }
}

#[derive(Serialize)]
struct StatusRow {
    program: String,
    status: &'static str,
    steps: Option<u64>,
    output: Option<String>,
}

fn cmd_truth(cfg: &ExperimentConfig, out: &Output) -> Result<(), Failure> {
    let truth = GroundTruth::desk(cfg.max_len, cfg.budget, cfg.space);
    let counts = truth.counts();
    let rows: Vec<StatusRow> = truth
        .iter()
        .map(|(p, s)| {
            let (status, steps, output) = match s {
                Certification::Halts { steps, output } => ("halts", Some(*steps), Some(output.to_string())),
                Certification::Diverges { .. } => ("diverges", None, None),
                Certification::Unknown => ("unknown", None, None),
            };
            StatusRow {
                program: p.to_string(),
                status,
                steps,
                output,
            }
        })
        .collect();
    if cfg.json() {
        let v = serde_json::json!({
            "max_len": cfg.max_len,
            "budget": cfg.budget,
            "space": cfg.space,
            "counts": counts,
            "H": truth.cumulative_halting(),
            "unknown": truth.unknown().iter().map(|p| p.to_string()).collect::<Vec<_>>(),
        });
        out.emit("truth.json", &pretty(&v))?;
    } else {
        out.emit("truth.csv", &to_csv(&rows))?;
    }
    truth.require_certified().map_err(|e| Failure::check("nonzero_unknown", e))?;
    Ok(())
}

fn cmd_density(cfg: &ExperimentConfig, out: &Output) -> Result<(), Failure> {
    let truth = truth_for(cfg)?;
    let table = halting_table(truth.halt_events().iter(), cfg.max_len, &cfg.checkpoint_grid());
    if cfg.json() {
        let v = serde_json::json!({ "rows": table.rows() });
        out.emit("density.json", &pretty(&v))
    } else {
        out.emit("density.csv", &table.to_csv())
    }
}

#[derive(Serialize)]
struct BbRow {
    n: usize,
    bb: u64,
    b: u64,
}

fn cmd_bb(cfg: &ExperimentConfig, out: &Output, max_c: usize) -> Result<(), Failure> {
    let truth = truth_for(cfg)?;
    let events = truth.halt_events();
    let bb = bb_table(&truth);
    let k = ComplexityTable::from_truth(&truth);
    let c = sandwich_constant(&bb, &k, max_c);
    let grid = cfg.checkpoint_grid();
    let n = cfg.max_len;
    let survivors: Vec<_> = (0..=n).map(|kk| survivor_stats(&truth, events.iter(), n, kk, &grid)).collect();
    if cfg.json() {
        let v = serde_json::json!({
            "max_len": n,
            "BB": bb.bb,
            "B": k.b_column(),
            "K": k.to_json()["K"],
            "sandwich_c": c,
            "survivors": survivors,
        });
        out.emit("bb.json", &pretty(&v))
    } else {
        let b = k.b_column();
        let rows: Vec<BbRow> = (0..=n).map(|i| BbRow { n: i, bb: bb.bb[i], b: b[i] }).collect();
        out.emit("bb.csv", &to_csv(&rows))?;
        let mut surv = Vec::new();
        for s in &survivors {
            for p in &s.curve {
                surv.push((s.n, s.k, s.r, s.t_star, p.t, p.survivors));
            }
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["n", "k", "r", "t_star", "t", "survivors"]).expect("header");
        for r in surv {
            w.serialize(r).expect("row");
        }
        let text = String::from_utf8(w.into_inner().expect("flush")).expect("utf8");
        out.emit("survivors.csv", &text)
    }
}

fn density(truth: &GroundTruth, n: usize) -> Rational {
    Rational::new(truth.cumulative_halting()[n] as i128, pow2(n + 1) as i128)
}

fn cmd_approx(cfg: &ExperimentConfig, out: &Output, a: &ApproxArgs) -> Result<(), Failure> {
    let truth = truth_for(cfg)?;
    let n = cfg.max_len;
    let schedule = Schedule::doubling(cfg.budget);
    let (decider, against): (Box<dyn Decider>, GroundTruth) = match a.decider {
        DeciderKind::Budget => {
            let t = a.t.unwrap_or(cfg.budget);
            if t == 0 {
                return Err(Failure::Usage("budget decider needs t >= 1".into()));
            }
            (Box::new(BudgetDecider::new(t)), truth)
        }
        DeciderKind::Fraction => {
            let r = match &a.r {
                Some(s) => parse_q(s)?,
                None => density(&truth, n) - Rational::new(1, 64),
            };
            let lengths = a.lengths.clone().unwrap_or_else(|| vec![n]);
            let u = desk_machine(n, schedule, cfg.space);
            let d = FractionDecider::new(&u, r, &lengths, cfg.budget).map_err(|e| Failure::Usage(e.to_string()))?;
            if let Err(e) = d.require_reached() {
                eprintln!("{}", serde_json::json!({ "warning": "fraction_not_reached", "message": e.to_string() }));
            }
            (Box::new(d), truth)
        }
        DeciderKind::Advice => {
            let width = parse_q(&a.advice_width)?;
            let lt = left_total(&desk_machine(n, schedule, cfg.space));
            let lt_truth = GroundTruth::from_events(n, &lt.materialize());
            let h = lt_truth.halting_by_length();
            let zero = Rational::from_integer(0);
            let one = Rational::from_integer(1);
            let d = AdviceDecider::shifted(&[n], a.levels.min(n + 1), |j| {
                let m = n - j;
                let tau = Rational::new(h[m] as i128, pow2(m) as i128);
                ((tau - width).max(zero), (tau + width).min(one))
            })
            .map_err(|e| Failure::Usage(e.to_string()))?;
            (Box::new(d), lt_truth)
        }
        DeciderKind::Staged => {
            let specs = a.stages.clone().unwrap_or_else(|| vec![format!("{}:{}", n + 1, cfg.budget)]);
            let mut stages = Vec::new();
            for s in specs {
                let (u, b) = s
                    .split_once(':')
                    .ok_or_else(|| Failure::Usage(format!("stage {s:?} is not upto:budget")))?;
                let upto = u.parse().map_err(|_| Failure::Usage(format!("bad stage {s:?}")))?;
                let budget = b.parse().map_err(|_| Failure::Usage(format!("bad stage {s:?}")))?;
                stages.push(Stage { upto, budget });
            }
            let source = Machine::from_events("window", n, truth.halt_events());
            let d = StagedDecider::new(&source, 0, stages).map_err(|e| Failure::Usage(e.to_string()))?;
            (Box::new(d), truth)
        }
    };
    let report = error_report(decider.as_ref(), &against, n);
    if cfg.json() {
        out.emit("approx.json", &pretty(&report.to_json()))?;
    } else {
        out.emit("approx.csv", &report.to_csv())?;
    }
    if let DeciderKind::Advice = a.decider {
        if let Some(row) = report.rows.iter().find(|r| r.wrong() > 0) {
            return Err(Failure::check("advice_wrong_answer", format!("wrong answers at n = {}", row.n)));
        }
    }
    Ok(())
}

fn cmd_transform(cfg: &ExperimentConfig, out: &Output, pipeline: &[String], base: &str) -> Result<(), Failure> {
    let schedule = Schedule::doubling(cfg.budget);
    let mut m = match base {
        "desk" => desk_machine(cfg.max_len, schedule, cfg.space),
        "standard" => standard_optimal(cfg.max_len, schedule, cfg.space),
        other => return Err(Failure::Usage(format!("unknown base machine {other:?}"))),
    };
    for step in pipeline {
        m = match step.as_str() {
            "left_total" => left_total(&m),
            "dedupe" => dedupe_values(&m),
            "zero" => prepend_zero(&m),
            "shift0" => shift_density(&m, Shift::Zero),
            "shift1" => shift_density(&m, Shift::OneFill),
            "seats" => {
                let w: Vec<StringSet> = (1..=3)
                    .map(|k| StringSet::lengths(format!("w{k}"), k + 1, m.max_len() + 1))
                    .collect();
                seat_exchange(&m, &w)
            }
            other => return Err(Failure::Usage(format!("unknown transform {other:?}"))),
        };
    }
    let events = m.materialize();
    let table = halting_table(events.iter(), m.max_len(), &cfg.checkpoint_grid());
    if cfg.json() {
        let v = serde_json::json!({ "machine": m.name(), "max_len": m.max_len(), "rows": table.rows() });
        out.emit("transform.json", &pretty(&v))
    } else {
        out.emit("transform.csv", &table.to_csv())
    }
}

fn cmd_bijection(cfg: &ExperimentConfig, out: &Output, window: u64, width: usize) -> Result<(), Failure> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let f: Arc<dyn Injection> = Arc::new(TableInjection::random(&mut rng, width));
    let g: Arc<dyn Injection> = Arc::new(TableInjection::random(&mut rng, width));
    let mut state = BuilderState::new(Arc::clone(&f), Arc::clone(&g));
    for v in 0..window {
        for side in [Side::L, Side::R] {
            state.resolve(side, v).map_err(|e| Failure::check("build", e))?;
        }
    }
    state.check_invariants().map_err(|e| Failure::check("invariant", e))?;
    let transcript = state.into_transcript();
    let report = verify_window(f.as_ref(), g.as_ref(), &transcript, window);
    let summary = serde_json::json!({ "seed": cfg.seed, "report": report });
    if out.dir.is_some() {
        out.emit("transcript.jsonl", &transcript_to_jsonl(&transcript))?;
    }
    out.emit("report.json", &pretty(&summary))?;
    if !report.passed() {
        return Err(Failure::check("verify", format!("{} failures", report.failures.len())));
    }
    Ok(())
}

#[derive(Serialize)]
struct SpoilerRow {
    trial: u64,
    mass: String,
    carved_mass: String,
    added: usize,
    bound_ok: bool,
}

fn cmd_spoiler(
    cfg: &ExperimentConfig,
    out: &Output,
    eps: &Rational,
    trials: u64,
    min_len: usize,
    support: usize,
) -> Result<(), Failure> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let max_len = cfg.max_len.max(min_len);
    let quarter = Rational::new(1, 4);
    let mut rows = Vec::new();
    for trial in 0..trials {
        let dist: BTreeMap<_, _> = random_dyadic_distribution(&mut rng, min_len, max_len, support);
        let sp = sparse_spoiler(&dist, *eps, min_len).map_err(|e| Failure::check("spoiler", e))?;
        rows.push(SpoilerRow {
            trial,
            mass: format_rational(&sp.mass),
            carved_mass: format_rational(&sp.carved_mass),
            added: sp.added.len(),
            bound_ok: sp.carved_mass >= eps * quarter * sp.mass,
        });
    }
    if cfg.json() {
        out.emit("spoiler.json", &pretty(&serde_json::json!({ "trials": rows })))?;
    } else {
        out.emit("spoiler.csv", &to_csv(&rows))?;
    }
    if let Some(r) = rows.iter().find(|r| !r.bound_ok) {
        return Err(Failure::check("spoiler_bound", format!("trial {}", r.trial)));
    }
    Ok(())
}
