use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use orlicz_cli::scenario::SEED_ENV;
use orlicz_cli::{execute, execute_runs, load_scenario, parse_range, CliError, Format, Overrides, Report};

/// Orlicz-space numerics and composition-operator checks.
///
/// Commands: norm F | conjugate | hderiv MAP | density MAP | domain MAP F |
/// approximate MAP F [N] | bounded MAP [PROBES] | lp-check MAP F [P] |
/// adjoint-check MAP F G | verify [COUNT] | run.
/// `run` executes the `runs` list stored in the scenario.
#[derive(Debug, Parser)]
#[command(name = "orlicz", version)]
struct Cli {
    /// Command to run.
    command: String,
    /// Names of scenario functions and maps, then optional numbers.
    args: Vec<String>,
    /// Scenario file (JSON).
    #[arg(short, long)]
    scenario: Option<PathBuf>,
    /// Young function: a scenario name or a descriptor such as power_abs:2,
    /// power_over_p:3, exp_minus_one, abs_value, conjugate_of(power_abs:3).
    /// Defaults to the scenario's `phi`, else power_abs:2.
    #[arg(short, long)]
    young: Option<String>,
    /// Relative bisection tolerance for norms [default: 1e-12].
    #[arg(long)]
    tol: Option<f64>,
    /// Truncation depth M for countable spaces [default: from the scenario].
    #[arg(long)]
    depth: Option<usize>,
    /// RNG seed [default: 42, or the ORLICZ_SEED environment variable].
    #[arg(long)]
    seed: Option<u64>,
    /// Growth-probe interval lo:hi[:per_decade] [default: 1e-6:1e6:512].
    #[arg(long)]
    range: Option<String>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

fn run(cli: Cli) -> Result<Vec<Report>, CliError> {
    let scenario = cli.scenario.as_deref().map(load_scenario).transpose()?;
    let overrides = Overrides {
        tol: cli.tol,
        depth: cli.depth,
        range: cli.range.as_deref().map(parse_range).transpose()?,
        seed: cli.seed,
        young: cli.young,
        seed_env: std::env::var(SEED_ENV).ok(),
    };
    if cli.command == "run" {
        let s = scenario.ok_or_else(|| CliError::Usage("`run` needs --scenario".into()))?;
        return execute_runs(&s, &overrides);
    }
    Ok(vec![execute(scenario.as_ref(), &cli.command, &cli.args, &overrides)?])
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let format = cli.format;
    match run(cli) {
        Ok(reports) => {
            let mut out = std::io::stdout().lock();
            for r in &reports {
                if writeln!(out, "{}", r.render(format)).is_err() {
                    break;
                }
            }
            if reports.iter().all(|r| r.passed) {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
