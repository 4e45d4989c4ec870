use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use star_core::{
    emit_netlist, emit_rtl, gen_schedule, load_netlist, parse_schedule, report_csv, report_table,
    run_synthesis, simulate, GenKind, GreedyConfig, Priority, Report, Schedule, SynthError,
};

#[derive(Parser)]
#[command(name = "star", version, about = "Space-time adapter synthesis")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a test schedule.
    Gen(GenArgs),
    /// Synthesize and verify an adapter for a schedule.
    Synth(SynthArgs),
    /// Replay a schedule against a netlist.
    Simulate(SimulateArgs),
    /// Synthesize one or more schedules under a grid of configurations.
    Sweep(SweepArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Identity,
    Reversal,
    Block,
    Random,
}

#[derive(Parser)]
struct GenArgs {
    #[arg(long, value_enum)]
    kind: Kind,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    latency: Option<u64>,
    #[arg(long)]
    rows: Option<usize>,
    #[arg(long)]
    cols: Option<usize>,
    /// First read cycle; defaults to the earliest legal one.
    #[arg(long)]
    offset: Option<u64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum PriorityArg {
    Fifo,
    Lifo,
}

#[derive(Parser)]
struct SynthArgs {
    #[arg(long)]
    constraints: PathBuf,
    #[arg(long, default_value_t = 2)]
    min_len: usize,
    #[arg(long, default_value_t = 0.0)]
    fill: f64,
    #[arg(long)]
    no_fifo: bool,
    #[arg(long)]
    no_lifo: bool,
    #[arg(long, value_enum, default_value = "fifo")]
    priority: PriorityArg,
    #[arg(long)]
    netlist: Option<PathBuf>,
    #[arg(long)]
    rtl: Option<PathBuf>,
    /// Report file: CSV for a .csv extension, JSON for .json, a text table otherwise.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Parser)]
struct SimulateArgs {
    #[arg(long)]
    netlist: PathBuf,
    #[arg(long)]
    constraints: PathBuf,
    /// Print the per-cycle trace.
    #[arg(long)]
    trace: bool,
}

#[derive(Parser)]
struct SweepArgs {
    /// Schedule file; may be repeated.
    #[arg(long, required = true)]
    constraints: Vec<PathBuf>,
    /// JSON array of configurations; the built-in grid when omitted.
    #[arg(long)]
    configs: Option<PathBuf>,
    #[arg(long)]
    csv: PathBuf,
}

/// Failure classes, mapped to the process exit code.
enum Failure {
    Input(anyhow::Error),
    Verification(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Input(e)
    }
}

fn synth_failure(e: SynthError, schedule: &Path) -> Failure {
    let internal = e.is_internal();
    let mut msg = format!("{}: {e}", schedule.display());
    if let SynthError::Verification { trace, .. } = &e {
        msg.push_str("\nsimulation trace:\n");
        msg.push_str(trace);
    }
    let err = anyhow::Error::msg(msg);
    if internal {
        Failure::Verification(err)
    } else {
        Failure::Input(err)
    }
}

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn write(path: &Path, text: &str) -> anyhow::Result<()> {
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

fn load_schedule(path: &Path) -> anyhow::Result<Schedule> {
    parse_schedule(&read(path)?).with_context(|| format!("invalid schedule {}", path.display()))
}

fn gen(a: GenArgs) -> anyhow::Result<()> {
    let need = |v: Option<usize>, flag: &str| v.with_context(|| format!("--{flag} is required"));
    let kind = match a.kind {
        Kind::Identity => {
            GenKind::Identity { n: need(a.n, "n")?, latency: a.latency.context("--latency is required")? }
        }
        Kind::Reversal => GenKind::Reversal { n: need(a.n, "n")? },
        Kind::Block => {
            GenKind::Block { rows: need(a.rows, "rows")?, cols: need(a.cols, "cols")?, offset: a.offset }
        }
        Kind::Random => GenKind::Random { n: need(a.n, "n")?, seed: a.seed, offset: a.offset },
    };
    let s = gen_schedule(&kind)?;
    write(&a.out, &s.to_json())
}

fn synth(a: SynthArgs) -> Result<(), Failure> {
    let s = load_schedule(&a.constraints)?;
    let cfg = GreedyConfig {
        min_len: a.min_len,
        fill_threshold: a.fill,
        fifo_enabled: !a.no_fifo,
        lifo_enabled: !a.no_lifo,
        priority: match a.priority {
            PriorityArg::Fifo => Priority::FifoFirst,
            PriorityArg::Lifo => Priority::LifoFirst,
        },
    };
    let out = run_synthesis(&s, &cfg).map_err(|e| synth_failure(e, &a.constraints))?;
    if let Some(p) = &a.netlist {
        write(p, &emit_netlist(&out.architecture))?;
    }
    if let Some(p) = &a.rtl {
        write(p, &emit_rtl(&out.architecture))?;
    }
    let reports = [out.report];
    if let Some(p) = &a.report {
        let text = match p.extension().and_then(|e| e.to_str()) {
            Some("csv") => report_csv(&reports),
            Some("json") => serde_json::to_string_pretty(&reports[0]).context("report serialization")? + "\n",
            _ => report_table(&reports),
        };
        write(p, &text)?;
    }
    print!("{}", report_table(&reports));
    Ok(())
}

fn simulate_cmd(a: SimulateArgs) -> Result<(), Failure> {
    let arch = load_netlist(&read(&a.netlist)?)
        .with_context(|| format!("invalid netlist {}", a.netlist.display()))?;
    let s = load_schedule(&a.constraints)?;
    let trace = simulate(&arch, &s);
    if a.trace {
        print!("{}", trace.dump());
    }
    match trace.verdict {
        Ok(()) => {
            println!("PASS: {} cycles, {} storages", trace.cycles.len(), arch.storages.len());
            Ok(())
        }
        Err(f) => Err(Failure::Verification(anyhow::Error::msg(format!("FAIL: {f}")))),
    }
}

fn sweep(a: SweepArgs) -> Result<(), Failure> {
    let configs: Vec<GreedyConfig> = match &a.configs {
        Some(p) => {
            serde_json::from_str(&read(p)?).with_context(|| format!("invalid configs {}", p.display()))?
        }
        None => GreedyConfig::default_grid(),
    };
    if configs.is_empty() {
        return Err(anyhow::anyhow!("no configurations to sweep").into());
    }
    let mut reports: Vec<Report> = Vec::new();
    for path in &a.constraints {
        let s = load_schedule(path)?;
        for cfg in &configs {
            reports.push(run_synthesis(&s, cfg).map_err(|e| synth_failure(e, path))?.report);
        }
    }
    write(&a.csv, &report_csv(&reports))?;
    print!("{}", report_table(&reports));
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Gen(a) => Ok(gen(a)?),
        Command::Synth(a) => synth(a),
        Command::Simulate(a) => simulate_cmd(a),
        Command::Sweep(a) => sweep(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Verification(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
