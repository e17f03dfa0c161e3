use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use cpn_mirror::pipeline::{CheckGroup, FaultInjection};
use cpn_mirror::report::{execute, Command, OutputFormat, RunConfig};
use cpn_mirror::Error;

#[derive(Parser)]
#[command(name = "cpn-mirror", version, about = "Genus-0 Gromov–Witten invariants of CP^n from mirror periods")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Run the mirror pipeline and report invariants and checks.
    Compute(Common),
    /// Reconstruct invariants from WDVV only.
    Gw(Common),
    /// Run the full property suite and compare with the oracle.
    Verify(Common),
}

#[derive(Args)]
struct Common {
    /// Dimension of the projective space.
    #[arg(long, default_value_t = 2)]
    n: usize,
    /// Truncation degree in the flat coordinates.
    #[arg(long, default_value_t = 6)]
    degree: u32,
    /// Highest curve degree for `gw`.
    #[arg(long, default_value_t = 3)]
    dmax: u32,
    /// Instanton terms of ξ kept in the ℏ-window (default: degree + 2).
    #[arg(long)]
    hbar_depth: Option<i32>,
    /// Window top ℏ-degree.
    #[arg(long)]
    window_top: Option<i32>,
    /// Comma-separated check groups (default: all).
    #[arg(long, value_delimiter = ',', value_parser = parse_group)]
    checks: Option<Vec<CheckGroup>>,
    #[arg(long)]
    compare_oracle: bool,
    /// Seed for randomized checks.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "json", value_parser = parse_format)]
    format: OutputFormat,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Record stage timings in the report.
    #[arg(long)]
    timings: bool,
    #[arg(long, hide = true, value_parser = parse_fault)]
    inject_fault: Option<FaultInjection>,
}

fn parse_group(s: &str) -> Result<CheckGroup, String> {
    s.trim().parse().map_err(|e: Error| e.to_string())
}

fn parse_fault(s: &str) -> Result<FaultInjection, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_format(s: &str) -> Result<OutputFormat, String> {
    match s {
        "json" => Ok(OutputFormat::Json),
        "csv" => Ok(OutputFormat::Csv),
        _ => Err(format!("unknown format '{s}' (json or csv)")),
    }
}

fn config(command: Command, c: Common) -> RunConfig {
    RunConfig {
        dmax: Some(c.dmax),
        hbar_depth: c.hbar_depth,
        window_top: c.window_top,
        checks: c.checks.unwrap_or_else(|| CheckGroup::ALL.to_vec()),
        compare_oracle: c.compare_oracle,
        seed: c.seed,
        format: c.format,
        out: c.out,
        timings: c.timings,
        fault: c.inject_fault,
        ..RunConfig::new(command, c.n, c.degree)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let cfg = match cli.command {
        Sub::Compute(c) => config(Command::Compute, c),
        Sub::Gw(c) => config(Command::Gw, c),
        Sub::Verify(c) => config(Command::Verify, c),
    };
    let report = match execute(&cfg) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    if let Err(e) = report.write(cfg.format, cfg.out.as_ref()) {
        eprintln!("error: {e}");
        return ExitCode::from(e.exit_code() as u8);
    }
    if report.passed() {
        ExitCode::SUCCESS
    } else {
        for f in report.failures() {
            eprintln!("FAIL {}: {}", f.name, f.witness.as_deref().unwrap_or(""));
        }
        ExitCode::from(1)
    }
}
