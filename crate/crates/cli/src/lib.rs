//! Scenario-driven harness around `orlicz-core`.

pub mod commands;
pub mod report;
pub mod scenario;
pub mod suite;

use orlicz_core::{ProbeRange, YoungFunction};

pub use commands::{run_command, COMMANDS};
pub use report::{Format, Report, Resolved, SeedSource};
pub use scenario::{load_scenario, parse_range, parse_young, Scenario};
pub use suite::{verify_suite, SuiteSummary};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("scenario: {0}")]
    Scenario(String),
    #[error(transparent)]
    Core(#[from] orlicz_core::Error),
}

impl CliError {
    /// 2 for usage and scenario errors, 1 for failed computations.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Scenario(_) => 2,
            CliError::Core(_) => 1,
        }
    }
}

/// Parameters after merging flags, environment and scenario.
#[derive(Debug, Clone)]
pub struct Context {
    pub tol: f64,
    pub depth: Option<usize>,
    pub range: ProbeRange,
    pub seed: u64,
    pub probes: usize,
    pub young: YoungFunction,
}

/// Command-line overrides; `None` falls back to the scenario, then defaults.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub tol: Option<f64>,
    pub depth: Option<usize>,
    pub range: Option<ProbeRange>,
    pub seed: Option<u64>,
    pub young: Option<String>,
    /// Raw value of the seed environment variable.
    pub seed_env: Option<String>,
}

pub fn resolve(scenario: Option<&Scenario>, o: &Overrides) -> Result<(Context, Resolved), CliError> {
    let params = scenario.map(|s| s.params.clone()).unwrap_or_default();
    let env_seed = match &o.seed_env {
        Some(raw) => Some(
            raw.trim()
                .parse::<u64>()
                .map_err(|_| CliError::Usage(format!("{}=`{raw}` is not an unsigned integer", scenario::SEED_ENV)))?,
        ),
        None => None,
    };
    let (seed, seed_source) = match (o.seed, env_seed, params.seed) {
        (Some(s), _, _) => (s, SeedSource::Flag),
        (None, Some(s), _) => (s, SeedSource::Env),
        (None, None, Some(s)) => (s, SeedSource::Scenario),
        _ => (scenario::DEFAULT_SEED, SeedSource::Default),
    };
    let young = match (&o.young, scenario) {
        (Some(key), Some(s)) => s.young_named(key)?,
        (Some(key), None) => parse_young(key)?,
        (None, Some(s)) => s.default_young(),
        (None, None) => YoungFunction::power_abs(2.0),
    };
    let tol = o.tol.unwrap_or(params.tol);
    if !(tol > 0.0 && tol < 1.0) {
        return Err(CliError::Usage(format!("--tol {tol} must lie in (0, 1)")));
    }
    let depth = o.depth.or(params.depth);
    if depth == Some(0) {
        return Err(CliError::Usage("--depth must be positive".into()));
    }
    let range = o.range.or(params.range).unwrap_or_default();
    let ctx = Context { tol, depth, range, seed, probes: params.probes, young };
    let resolved = Resolved {
        tol,
        depth,
        range,
        seed,
        seed_source,
        seed_env: o.seed_env.clone(),
        young: ctx.young.label(),
    };
    Ok((ctx, resolved))
}

/// Runs one command end to end and assembles the report.
pub fn execute(scenario: Option<&Scenario>, command: &str, args: &[String], o: &Overrides) -> Result<Report, CliError> {
    let (ctx, params) = resolve(scenario, o)?;
    let (results, passed) = run_command(scenario, command, args, &ctx)?;
    let suite = if command == "verify" { serde_json::from_value(results.clone()).ok() } else { None };
    let mut echo = vec![command.to_string()];
    echo.extend(args.iter().cloned());
    Ok(Report {
        command: echo,
        version: env!("CARGO_PKG_VERSION").to_string(),
        params,
        results: if suite.is_some() { serde_json::Value::Null } else { results },
        suite,
        passed,
    })
}

/// Runs every entry of `scenario.runs` in order.
pub fn execute_runs(scenario: &Scenario, o: &Overrides) -> Result<Vec<Report>, CliError> {
    scenario
        .runs
        .iter()
        .map(|run| {
            let mut o = o.clone();
            if run.young.is_some() {
                o.young = run.young.clone();
            }
            execute(Some(scenario), &run.command, &run.args, &o)
        })
        .collect()
}
