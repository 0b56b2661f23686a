//! `hk1lab`: build the two systems, run the verification suite, and replay
//! the obstruction, writing `report.json` and CSV plot data.

mod config;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use hk1lab::lab::{inv0_equivalence_report, ObstructionLedger, ObstructionRunner};
use hk1lab::report::{csv_columns, CheckRecord, Num, Relation, Report, Section};
use hk1lab::suite::{determinant_phase_columns, ramp_columns, run_all, run_criterion, SuiteContext};
use hk1lab::unitary::is_uniformly_varied;
use hk1lab::{build_system_a, build_system_b, GridFunction, InductiveSystem, Space, SystemParams};
use serde::Serialize;
use serde_json::{json, Value};

use config::{ConfigError, RunConfig};

#[derive(Parser)]
#[command(
    version,
    about = "Invariants of two inductive systems that share K-theory and traces but differ in K1 structure"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Number of stages.
    #[arg(long, global = true)]
    stages: Option<usize>,
    /// Grid resolution N.
    #[arg(long, global = true)]
    grid: Option<usize>,
    /// Seed of the random test families.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Describe the stages and connecting maps of both systems.
    Build,
    /// Run the full verification suite.
    Verify,
    /// Replay the obstruction for B at one corner and amplitude.
    Obstruct {
        /// Corner stage n.
        #[arg(long)]
        corner: Option<usize>,
        /// Amplitude M of the phase correction.
        #[arg(long)]
        amplitude: Option<f64>,
        /// Target stage m.
        #[arg(long)]
        target_stage: Option<usize>,
    },
    /// Compare the AffT data of the two systems step by step.
    Inv0,
    /// Check the uniformly varied determinant property of both systems.
    Uvd,
}

enum Failure {
    Config(String),
    Io(String),
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e.to_string())
    }
}

impl From<hk1lab::Error> for Failure {
    fn from(e: hk1lab::Error) -> Self {
        Failure::Config(e.to_string())
    }
}

fn resolve_config(cli: &Cli) -> Result<RunConfig, ConfigError> {
    let mut cfg = match &cli.common.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(s) = cli.common.stages {
        cfg.stage_count = s;
    }
    if let Some(g) = cli.common.grid {
        cfg.grid_resolution = g;
    }
    if let Some(s) = cli.common.seed {
        cfg.seed = s;
    }
    if let Command::Obstruct { corner, amplitude, target_stage } = &cli.command {
        if let Some(c) = corner {
            cfg.corner = *c;
        }
        if let Some(a) = amplitude {
            cfg.amplitude = *a;
        }
        if target_stage.is_some() {
            cfg.target_stage = *target_stage;
        }
    }
    Ok(cfg)
}

fn write(dir: &Path, name: &str, contents: &str) -> Result<(), Failure> {
    std::fs::create_dir_all(dir).map_err(|e| Failure::Io(format!("cannot create {}: {e}", dir.display())))?;
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(|e| Failure::Io(format!("cannot write {}: {e}", path.display())))
}

fn write_report<D: Serialize>(dir: &Path, report: &Report<RunConfig, D>) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(report).map_err(|e| Failure::Io(e.to_string()))?;
    text.push('\n');
    write(dir, "report.json", &text)
}

fn write_columns(dir: &Path, name: &str, columns: &[(String, Vec<f64>)]) -> Result<(), Failure> {
    let cols: Vec<(&str, &[f64])> = columns.iter().map(|(h, c)| (h.as_str(), c.as_slice())).collect();
    write(dir, name, &csv_columns(&cols))
}

fn summarize(sections: &[Section]) {
    for s in sections {
        let verdict = if s.pass { "PASS" } else { "FAIL" };
        println!("{verdict} {:>2} {} ({} checks)", s.id, s.title, s.checks.len());
        for c in s.checks.iter().filter(|c| !c.pass) {
            let note = c.note.as_deref().map(|n| format!(" [{n}]")).unwrap_or_default();
            println!("     failed: {}{note}", c.name);
        }
    }
}

fn describe(sys: &InductiveSystem) -> Value {
    json!({
        "kind": sys.kind,
        "stages": sys.stages(),
        "steps": sys.steps(),
    })
}

fn cmd_build(cfg: RunConfig, params: &SystemParams, out: &Path) -> Result<bool, Failure> {
    let a = build_system_a(params)?;
    let b = build_system_b(params)?;
    for n in 1..=a.stage_count() {
        let sizes: Vec<String> = a.stage(n).iter().map(|b| b.size.to_string()).collect();
        println!("stage {n}: [{}]", sizes.join(", "));
    }
    let details = json!({ "A": describe(&a), "B": describe(&b) });
    write_report(out, &Report::new("build", cfg, Vec::new(), Some(details)))?;
    Ok(true)
}

fn cmd_verify(cfg: RunConfig, params: SystemParams, out: &Path) -> Result<bool, Failure> {
    let ctx = SuiteContext::new(params, cfg.seed)?;
    let sections = run_all(&ctx);
    summarize(&sections);
    let report: Report<RunConfig, ()> = Report::new("verify", cfg, sections, None);
    write_report(out, &report)?;
    write_columns(out, "ramps.csv", &ramp_columns(&ctx)?)?;
    write_columns(out, "determinant_phases.csv", &determinant_phase_columns(&ctx)?)?;
    Ok(report.pass)
}

fn ledger_section(l: &ObstructionLedger) -> Section {
    const ANCHOR: &str = "obstruction chain: 4^(m-1) > 8M+8 forces a corner image of norm ≥ 3 > 1/16";
    let mut checks = vec![CheckRecord::new(
        "l_(m-1)/[m,m-1] is a power of four",
        ANCHOR,
        Num::int(u8::from(l.ratio_is_power_of_four)),
        Relation::Eq,
        Num::int(1),
        Num::int(0),
    )];
    for r in &l.trace {
        let rel = if r.strict { Relation::Gt } else { Relation::Ge };
        checks.push(CheckRecord::new(r.name.clone(), ANCHOR, r.lhs.into(), rel, r.rhs.into(), 0.0.into()));
    }
    Section::new(1, format!("obstruction at corner {}, target stage {}", l.n, l.m), checks)
}

fn cmd_obstruct(cfg: RunConfig, params: &SystemParams, out: &Path) -> Result<bool, Failure> {
    let b = build_system_b(params)?;
    if cfg.corner == 0 || cfg.corner > b.stage_count() {
        return Err(Failure::Config(format!("corner must lie in 1..={}, got {}", b.stage_count(), cfg.corner)));
    }
    let amp = cfg.amplitude;
    let h = GridFunction::from_fn(Space::Circle, params.grid_resolution, |x| amp * (std::f64::consts::TAU * x).sin());
    match ObstructionRunner::new(&b).run(cfg.corner, &h, cfg.target_stage) {
        Ok(ledger) => {
            let section = ledger_section(&ledger);
            summarize(std::slice::from_ref(&section));
            println!(
                "m = {}, ratio = {}, lower bound = {} vs threshold {}",
                ledger.m, ledger.ratio, ledger.lower_bound, ledger.threshold
            );
            if let Some(ramp) = &ledger.ramp {
                let n = ramp.resolution();
                let t: Vec<f64> = (0..ramp.samples().len()).map(|k| k as f64 / n as f64).collect();
                write_columns(out, "ramp.csv", &[("t".into(), t), ("ramp".into(), ramp.samples().to_vec())])?;
            }
            let report = Report::new("obstruct", cfg, vec![section], Some(ledger));
            write_report(out, &report)?;
            Ok(report.pass)
        }
        Err(e @ (hk1lab::Error::StageBudgetExceeded { .. } | hk1lab::Error::InadmissibleStage { .. })) => {
            let section = Section::new(
                1,
                "obstruction",
                vec![CheckRecord::failed(
                    "admissible target stage",
                    "4^(m-1) > 8M+8 with n < m ≤ stage_count",
                    e.to_string(),
                )],
            );
            summarize(std::slice::from_ref(&section));
            let report: Report<RunConfig, ()> = Report::new("obstruct", cfg, vec![section], None);
            write_report(out, &report)?;
            Ok(false)
        }
        Err(e) => Err(e.into()),
    }
}

fn cmd_inv0(cfg: RunConfig, params: SystemParams, out: &Path) -> Result<bool, Failure> {
    let ctx = SuiteContext::new(params, cfg.seed)?;
    let details = inv0_equivalence_report(&ctx.a, &ctx.b, cfg.seed)?;
    let sections = vec![run_criterion(&ctx, 4)];
    summarize(&sections);
    let report = Report::new("inv0", cfg, sections, Some(details));
    write_report(out, &report)?;
    Ok(report.pass)
}

fn cmd_uvd(cfg: RunConfig, params: SystemParams, out: &Path) -> Result<bool, Failure> {
    let ctx = SuiteContext::new(params, cfg.seed)?;
    let details = json!({ "A": is_uniformly_varied(&ctx.a)?, "B": is_uniformly_varied(&ctx.b)? });
    let sections = vec![run_criterion(&ctx, 2), run_criterion(&ctx, 3)];
    summarize(&sections);
    let report = Report::new("uvd", cfg, sections, Some(details));
    write_report(out, &report)?;
    write_columns(out, "determinant_phases.csv", &determinant_phase_columns(&ctx)?)?;
    Ok(report.pass)
}

fn run(cli: &Cli) -> Result<bool, Failure> {
    let cfg = resolve_config(cli)?;
    let params = cfg.params()?;
    let out = cli.common.out.as_path();
    match cli.command {
        Command::Build => cmd_build(cfg, &params, out),
        Command::Verify => cmd_verify(cfg, params, out),
        Command::Obstruct { .. } => cmd_obstruct(cfg, &params, out),
        Command::Inv0 => cmd_inv0(cfg, params, out),
        Command::Uvd => cmd_uvd(cfg, params, out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let result = run(&cli);
    eprintln!("elapsed {:.2}s", start.elapsed().as_secs_f64());
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
