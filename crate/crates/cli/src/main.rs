//! `cascade-lab`: run ideal-cipher experiments from the command line.
//!
//! Exit codes: 0 on success, 1 on usage or configuration errors, 2 when a
//! verification suite or transcript replay finds a failure.

mod config;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use cascade_lab::attacks::AttackSpec;
use cascade_lab::bounds::{bounds_report, curves_csv, emit_curves};
use cascade_lab::estimator::{estimate_advantage, EstimateOptions, CSV_HEADER};
use cascade_lab::game::{build_world, run_adversary, Operator, OracleBudget, World};
use cascade_lab::replay::replay_text;
use cascade_lab::seed::{stream_rng, Role};
use cascade_lab::transcript::TranscriptHeader;
use cascade_lab::verify::{run_suite, Scale, Suite};
use cascade_lab::{CipherParams, Error};

use config::{parse_budget, parse_real_t, required, ExperimentConfig, FileConfig, Format};

#[derive(Parser, Debug)]
#[command(
    name = "cascade-lab",
    version,
    about = "Ideal-cipher experiments for double, triple and cascade encryption"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Estimate an attack's advantage by Monte Carlo and write one record.
    Simulate(SimulateArgs),
    /// Print the closed-form bounds at one budget.
    Bounds(BoundsArgs),
    /// Emit single/double bound curves as CSV over x = log2(t).
    Curves(CurvesArgs),
    /// Run a verification suite: bounds, badevent, oracle or mitm.
    Verify(VerifyArgs),
    /// Audit a transcript file.
    Replay(ReplayArgs),
    /// Play one seeded game and print its transcript.
    Dump(DumpArgs),
}

#[derive(clap::Args, Debug, Default)]
struct SimulateArgs {
    /// TOML file with any of the settings below; flags win.
    #[arg(long)]
    config: Option<PathBuf>,
    /// single, dbl, trp2 or cascade:m
    #[arg(long)]
    op: Option<String>,
    /// Key length of the base cipher in bits.
    #[arg(long)]
    kappa: Option<u32>,
    /// Block length in bits.
    #[arg(long)]
    n: Option<u32>,
    /// E-query budget.
    #[arg(long)]
    q: Option<u64>,
    /// F/F^-1 budget; an integer or 2^x.
    #[arg(long, value_parser = parse_budget)]
    t: Option<u64>,
    /// e.g. mitm-double:s=2, exhaustive:probes=2, mitm-triple:s=2, baseline:p=0.5
    #[arg(long)]
    attack: Option<String>,
    /// Trials per world.
    #[arg(long)]
    trials: Option<u64>,
    /// Master seed; defaults to 0.
    #[arg(long)]
    seed: Option<u64>,
    /// Write the record here instead of standard output.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Worker threads (0 = all cores). Results do not depend on it.
    #[arg(long)]
    workers: Option<usize>,
    /// Also tally the bad event in each world (two-key operators only).
    #[arg(long)]
    record_bad: bool,
    /// Confidence level: 0.95, 0.99 or 0.999.
    #[arg(long)]
    level: Option<f64>,
}

#[derive(clap::Args, Debug)]
struct BoundsArgs {
    #[arg(long)]
    kappa: u32,
    #[arg(long)]
    n: u32,
    /// Query budget: a number or 2^x.
    #[arg(long, value_parser = parse_real_t)]
    t: f64,
    #[arg(long, default_value = "dbl")]
    op: String,
    #[arg(long)]
    json: bool,
}

#[derive(clap::Args, Debug)]
struct CurvesArgs {
    #[arg(long)]
    kappa: u32,
    /// Block length; only the lower-bound column depends on it.
    #[arg(long, default_value_t = 64)]
    n: u32,
    #[arg(long, default_value_t = 0.0)]
    from: f64,
    /// Defaults to kappa.
    #[arg(long)]
    to: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    step: f64,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(clap::Args, Debug)]
struct VerifyArgs {
    /// bounds, badevent, oracle, mitm or all
    suite: String,
    /// Tenth of the trials; path enumeration for the exact oracle.
    #[arg(long)]
    quick: bool,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 0)]
    workers: usize,
}

#[derive(clap::Args, Debug)]
struct ReplayArgs {
    file: PathBuf,
}

#[derive(clap::Args, Debug)]
struct DumpArgs {
    #[arg(long)]
    op: String,
    #[arg(long)]
    kappa: u32,
    #[arg(long)]
    n: u32,
    #[arg(long)]
    q: u64,
    #[arg(long, value_parser = parse_budget)]
    t: u64,
    #[arg(long)]
    attack: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// 1 = composed cipher, 2 = random permutation.
    #[arg(long, default_value_t = 1)]
    world: u8,
    #[arg(long)]
    output: Option<PathBuf>,
}

enum Failure {
    Usage(String),
    Check(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Simulate(a) => simulate(a),
        Command::Bounds(a) => bounds(a),
        Command::Curves(a) => curves(a),
        Command::Verify(a) => verify(a),
        Command::Replay(a) => replay(a),
        Command::Dump(a) => dump(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Check(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(2)
        }
    }
}

fn write_out(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::Usage(format!("cannot write {}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| Failure::Usage(format!("cannot write output: {e}")))
        }
    }
}

fn resolve(a: SimulateArgs) -> Result<ExperimentConfig, Error> {
    let file = match &a.config {
        Some(p) => FileConfig::load(p)?,
        None => FileConfig::default(),
    };
    let op: Operator = required(a.op.or(file.op.clone()), "op")?.parse()?;
    let params = CipherParams::new(
        required(a.kappa.or(file.kappa), "kappa")?,
        required(a.n.or(file.n), "n")?,
    )?;
    let attack: AttackSpec = required(a.attack.or(file.attack.clone()), "attack")?.parse()?;
    let t = match a.t {
        Some(t) => t,
        None => required(file.t()?, "t")?,
    };
    Ok(ExperimentConfig {
        op,
        params,
        q: required(a.q.or(file.q), "q")?,
        t,
        attack,
        trials: required(a.trials.or(file.trials), "trials")?,
        seed: a.seed.or(file.seed).unwrap_or(0),
        output: a.output.or(file.output),
        format: a.format.or(file.format).unwrap_or_default(),
        workers: a.workers.or(file.workers).unwrap_or(0),
        record_bad: a.record_bad || file.record_bad.unwrap_or(false),
        level: a.level.or(file.level).unwrap_or(0.95),
    })
}

fn simulate(a: SimulateArgs) -> Result<(), Failure> {
    let cfg = resolve(a)?;
    if cfg.q == 0 {
        return Err(Failure::Usage("q must be at least 1".into()));
    }
    if cfg.trials == 0 {
        return Err(Failure::Usage("trials must be at least 1".into()));
    }
    let budget = OracleBudget::new(cfg.q, cfg.t);
    let attack = cfg.attack.build(cfg.params, budget)?;
    eprintln!(
        "simulating {} against {} (kappa={}, n={}, q={}, t={}): {} trials per world",
        attack.name(),
        cfg.op,
        cfg.params.kappa(),
        cfg.params.n(),
        cfg.q,
        cfg.t,
        cfg.trials
    );
    let opts = EstimateOptions {
        record_bad: cfg.record_bad,
        level: cfg.level,
        workers: cfg.workers,
    };
    let est = estimate_advantage(attack.as_ref(), cfg.op, cfg.params, budget, cfg.trials, cfg.seed, opts)?;
    let mut record = est.record();
    record.attack = cfg.attack.to_string();
    let text = match cfg.format {
        Format::Json => record.to_json() + "\n",
        Format::Csv => format!("{CSV_HEADER}\n{}\n", record.to_csv_row()),
    };
    write_out(cfg.output.as_deref(), &text)
}

fn bounds(a: BoundsArgs) -> Result<(), Failure> {
    let op: Operator = a.op.parse()?;
    let report = bounds_report(a.kappa, a.n, a.t, op)?;
    let text = if a.json {
        serde_json::to_string(&report).expect("report serializes") + "\n"
    } else {
        report.to_table()
    };
    write_out(None, &text)
}

fn curves(a: CurvesArgs) -> Result<(), Failure> {
    let to = a.to.unwrap_or(f64::from(a.kappa));
    let rows = emit_curves(a.kappa, a.n, a.from, to, a.step)?;
    write_out(a.output.as_deref(), &curves_csv(&rows))
}

fn verify(a: VerifyArgs) -> Result<(), Failure> {
    let suites: Vec<Suite> = if a.suite == "all" {
        Suite::ALL.to_vec()
    } else {
        vec![a.suite.parse()?]
    };
    let scale = if a.quick { Scale::Quick } else { Scale::Full };
    let mut failed = Vec::new();
    for suite in suites {
        eprintln!("running suite {suite} ({scale:?})");
        let report = run_suite(suite, scale, a.seed, a.workers)?;
        for c in &report.checks {
            eprintln!("  [{}] {} {}", if c.passed { "pass" } else { "FAIL" }, c.name, c.detail);
        }
        if !report.passed {
            failed.push(suite.to_string());
        }
        write_out(
            None,
            &(serde_json::to_string(&report).expect("report serializes") + "\n"),
        )?;
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Check(format!("verification failed: {}", failed.join(", "))))
    }
}

fn replay(a: ReplayArgs) -> Result<(), Failure> {
    let text = std::fs::read_to_string(&a.file)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", a.file.display())))?;
    let report = replay_text(&text).map_err(|e| Failure::Usage(format!("{}: {e}", a.file.display())))?;
    write_out(
        None,
        &(serde_json::to_string(&report).expect("report serializes") + "\n"),
    )?;
    if report.is_valid() {
        Ok(())
    } else {
        let first = &report.violations[0];
        Err(Failure::Check(format!(
            "{} violation(s); first at line {}: {}",
            report.violations.len(),
            first.line,
            first.message
        )))
    }
}

fn dump(a: DumpArgs) -> Result<(), Failure> {
    let op: Operator = a.op.parse()?;
    let params = CipherParams::new(a.kappa, a.n)?;
    let world = World::from_number(a.world)?;
    let budget = OracleBudget::new(a.q, a.t);
    let spec: AttackSpec = a.attack.parse()?;
    let attack = spec.build(params, budget)?;
    let mut game = build_world(world, op, params, budget, a.seed)?;
    let crucial = game.crucial().0.clone();
    let mut coins = stream_rng(a.seed, world.number(), 0, Role::Attack);
    let outcome = run_adversary(&mut game, attack.as_ref(), &mut coins)?;
    let header = TranscriptHeader {
        kappa: Some(a.kappa),
        n: Some(a.n),
        q: Some(a.q),
        t: Some(a.t),
        crucial: Some(crucial),
    };
    let mut text = format!(
        "# {spec} op={op} world={} seed={} decision={}\n",
        a.world,
        a.seed,
        u8::from(outcome.decision)
    );
    text.push_str(&outcome.transcript.to_text(&header));
    write_out(a.output.as_deref(), &text)
}
