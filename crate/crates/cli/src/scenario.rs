//! Scenario files: a measure space plus named Young functions, functions and maps.

use std::collections::BTreeMap;
use std::path::Path;

use orlicz_core::measure::ext_real;
use orlicz_core::{MeasureSpace, ProbeRange, SimpleFunction, Transformation, YoungFunction};
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_TOL: f64 = 1e-12;
pub const DEFAULT_PROBES: usize = 64;
pub const SEED_ENV: &str = "ORLICZ_SEED";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    #[serde(default = "default_tol")]
    pub tol: f64,
    /// Truncation depth `M` for countable spaces.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub range: Option<ProbeRange>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default = "default_probes")]
    pub probes: usize,
}

fn default_tol() -> f64 {
    DEFAULT_TOL
}

fn default_probes() -> usize {
    DEFAULT_PROBES
}

impl Default for Params {
    fn default() -> Self {
        Params { tol: DEFAULT_TOL, depth: None, range: None, seed: None, probes: DEFAULT_PROBES }
    }
}

/// A command to run against the scenario; `args` name functions and maps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Run {
    pub command: String,
    #[serde(default)]
    pub args: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub young: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub space: MeasureSpace,
    #[serde(default)]
    pub young: BTreeMap<String, YoungFunction>,
    #[serde(default)]
    pub functions: BTreeMap<String, SimpleFunction>,
    #[serde(default)]
    pub maps: BTreeMap<String, Transformation>,
    #[serde(default)]
    pub params: Params,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub runs: Vec<Run>,
}

impl Scenario {
    pub fn new(space: MeasureSpace) -> Self {
        Scenario {
            space,
            young: BTreeMap::new(),
            functions: BTreeMap::new(),
            maps: BTreeMap::new(),
            params: Params::default(),
            runs: Vec::new(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let s: Scenario = serde_json::from_str(text).map_err(|e| {
            let line = text.lines().nth(e.line().saturating_sub(1)).unwrap_or("").trim();
            CliError::Scenario(format!("line {}, column {}: {e}\n  | {line}", e.line(), e.column()))
        })?;
        s.validate()?;
        Ok(s)
    }

    pub fn to_json(&self) -> String {
        crate::report::to_json_string(self)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |what: &str, name: &str, e: orlicz_core::Error| CliError::Scenario(format!("{what} `{name}`: {e}"));
        for (name, phi) in &self.young {
            phi.validate().map_err(|e| bad("young function", name, e))?;
        }
        let n = self.space.len();
        for (name, f) in &self.functions {
            f.validate().map_err(|e| bad("function", name, e))?;
            if !self.space.is_countable() && f.len() != n {
                return Err(CliError::Scenario(format!(
                    "function `{name}` has {} values on a space with {n} atoms",
                    f.len()
                )));
            }
        }
        for (name, m) in &self.maps {
            m.validate(&self.space).map_err(|e| bad("map", name, e))?;
        }
        let p = &self.params;
        if !(p.tol > 0.0 && p.tol < 1.0) {
            return Err(CliError::Scenario(format!("params.tol = {} must lie in (0, 1)", p.tol)));
        }
        if p.depth == Some(0) {
            return Err(CliError::Scenario("params.depth must be positive".into()));
        }
        if let Some(r) = &p.range {
            r.validate().map_err(|e| CliError::Scenario(format!("params.range: {e}")))?;
        }
        for (i, run) in self.runs.iter().enumerate() {
            if let Some(y) = &run.young {
                self.young_named(y).map_err(|e| CliError::Scenario(format!("runs[{i}]: {e}")))?;
            }
            crate::commands::check_args(self, &run.command, &run.args)
                .map_err(|e| CliError::Scenario(format!("runs[{i}]: {e}")))?;
        }
        Ok(())
    }

    pub fn function(&self, name: &str) -> Result<&SimpleFunction, CliError> {
        self.functions.get(name).ok_or_else(|| CliError::Scenario(format!("unknown function `{name}`")))
    }

    pub fn map(&self, name: &str) -> Result<&Transformation, CliError> {
        self.maps.get(name).ok_or_else(|| CliError::Scenario(format!("unknown map `{name}`")))
    }

    /// A name from `young`, or an inline descriptor such as `power_abs:2`.
    pub fn young_named(&self, key: &str) -> Result<YoungFunction, CliError> {
        match self.young.get(key) {
            Some(phi) => Ok(phi.clone()),
            None => parse_young(key),
        }
    }

    /// The `phi` entry, else the only entry, else `|x|²`.
    pub fn default_young(&self) -> YoungFunction {
        if let Some(phi) = self.young.get("phi") {
            return phi.clone();
        }
        match self.young.len() {
            1 => self.young.values().next().cloned().unwrap(),
            _ => YoungFunction::power_abs(2.0),
        }
    }
}

pub fn load_scenario(path: &Path) -> Result<Scenario, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Scenario(format!("cannot read {}: {e}", path.display())))?;
    Scenario::from_json(&text).map_err(|e| match e {
        CliError::Scenario(m) => CliError::Scenario(format!("{}: {m}", path.display())),
        other => other,
    })
}

/// `power_abs:p`, `power_over_p:p`, `exp_minus_one`, `abs_value`,
/// `conjugate_of(<descriptor>)`, or a JSON object.
pub fn parse_young(text: &str) -> Result<YoungFunction, CliError> {
    let t = text.trim();
    let err = |m: String| CliError::Usage(format!("young descriptor `{t}`: {m}"));
    let phi = if t.starts_with('{') {
        serde_json::from_str(t).map_err(|e| err(e.to_string()))?
    } else if let Some(inner) = t.strip_prefix("conjugate_of(").and_then(|r| r.strip_suffix(')')) {
        YoungFunction::conjugate_of(parse_young(inner)?)
    } else {
        let (family, arg) = match t.split_once(':') {
            Some((f, a)) => (f, Some(a)),
            None => (t, None),
        };
        let p = || -> Result<f64, CliError> {
            let a = arg.ok_or_else(|| err("missing exponent".into()))?;
            ext_real::parse(a).ok_or_else(|| err(format!("`{a}` is not a number")))
        };
        match family {
            "power_abs" => YoungFunction::power_abs(p()?),
            "power_over_p" => YoungFunction::power_over_p(p()?),
            "exp_minus_one" if arg.is_none() => YoungFunction::ExpMinusOne,
            "abs_value" if arg.is_none() => YoungFunction::AbsValue,
            _ => return Err(err("unknown family".into())),
        }
    };
    phi.validate().map_err(|e| err(e.to_string()))?;
    Ok(phi)
}

/// `lo:hi` or `lo:hi:per_decade`.
pub fn parse_range(text: &str) -> Result<ProbeRange, CliError> {
    let err = || CliError::Usage(format!("range `{text}` must look like lo:hi or lo:hi:per_decade"));
    let parts: Vec<&str> = text.split(':').collect();
    let num = |s: &str| s.trim().parse::<f64>().map_err(|_| err());
    let r = match parts.as_slice() {
        [lo, hi] => ProbeRange::new(num(lo)?, num(hi)?, ProbeRange::default().per_decade),
        [lo, hi, d] => ProbeRange::new(num(lo)?, num(hi)?, d.trim().parse().map_err(|_| err())?),
        _ => return Err(err()),
    };
    r.map_err(|e| CliError::Usage(e.to_string()))
}
