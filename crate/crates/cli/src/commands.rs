//! `run_command`: one computation against a scenario.

use orlicz_core::adjoint::duality_pairing_check;
use orlicz_core::compop::{
    boundedness_verdict, closure_identity_check, default_battery, density_verdict, domain_membership,
    operator_norm_estimate, truncation_approximants, BoundedStatus,
};
use orlicz_core::lp::{lp_density_verdict, multiplication_equivalence_check};
use orlicz_core::measure::{ext_real, h_finiteness};
use orlicz_core::norms::{luxemburg_norm_tol, modular, orlicz_norm};
use orlicz_core::young::{delta2_probe, delta_prime_probe, n_function_probe, nabla_prime_probe};
use orlicz_core::{MeasureSpace, ProbeRange, TailSum, YoungFunction};
use serde_json::{json, Value};

use crate::report::ext;
use crate::scenario::Scenario;
use crate::suite::{verify_suite, DEFAULT_COUNT};
use crate::{CliError, Context};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Arg {
    Map,
    Function,
    Number,
}

/// Required and optional positional arguments per command.
fn signature(command: &str) -> Option<(&'static [Arg], &'static [Arg])> {
    use Arg::*;
    Some(match command {
        "norm" => (&[Function], &[]),
        "conjugate" => (&[], &[]),
        "hderiv" => (&[Map], &[]),
        "density" => (&[Map], &[]),
        "domain" => (&[Map, Function], &[]),
        "approximate" => (&[Map, Function], &[Number]),
        "bounded" => (&[Map], &[Number]),
        "lp-check" => (&[Map, Function], &[Number]),
        "adjoint-check" => (&[Map, Function, Function], &[]),
        "verify" => (&[], &[Number]),
        _ => return None,
    })
}

pub const COMMANDS: &[&str] =
    &["norm", "conjugate", "hderiv", "density", "domain", "approximate", "bounded", "lp-check", "adjoint-check", "verify"];

pub fn check_args(s: &Scenario, command: &str, args: &[String]) -> Result<(), CliError> {
    let (req, opt) = signature(command)
        .ok_or_else(|| CliError::Usage(format!("unknown command `{command}`; expected one of {}", COMMANDS.join(", "))))?;
    if args.len() < req.len() || args.len() > req.len() + opt.len() {
        return Err(CliError::Usage(format!(
            "`{command}` takes {} to {} arguments, got {}",
            req.len(),
            req.len() + opt.len(),
            args.len()
        )));
    }
    for (kind, a) in req.iter().chain(opt).zip(args) {
        match kind {
            Arg::Map => drop(s.map(a)?),
            Arg::Function => drop(s.function(a)?),
            Arg::Number => {
                ext_real::parse(a).ok_or_else(|| CliError::Usage(format!("`{a}` is not a number")))?;
            }
        }
    }
    Ok(())
}

fn number(args: &[String], i: usize, default: f64) -> f64 {
    args.get(i).and_then(|a| ext_real::parse(a)).unwrap_or(default)
}

fn tail_sum(t: &TailSum) -> Value {
    match t {
        TailSum::Finite { lo, hi } if lo == hi => ext(*lo),
        TailSum::Finite { lo, hi } => json!({"lo": ext(*lo), "hi": ext(*hi)}),
        TailSum::Infinite => ext(f64::INFINITY),
        TailSum::Unresolved { partial } => json!({"unresolved": true, "partial": ext(*partial)}),
    }
}

fn value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("core types serialize")
}

/// Result payload and whether every verification inside it passed.
pub fn run_command(
    scenario: Option<&Scenario>,
    command: &str,
    args: &[String],
    ctx: &Context,
) -> Result<(Value, bool), CliError> {
    let phi = &ctx.young;
    if signature(command).is_none() {
        return Err(CliError::Usage(format!("unknown command `{command}`; expected one of {}", COMMANDS.join(", "))));
    }
    if command == "conjugate" {
        if !args.is_empty() {
            return Err(CliError::Usage("`conjugate` takes no arguments; pass the function with --young".into()));
        }
        return Ok((conjugate(phi, ctx.range)?, true));
    }
    if command == "verify" {
        let count = match args {
            [] => DEFAULT_COUNT,
            [n] => n.parse().map_err(|_| CliError::Usage(format!("`{n}` is not a count")))?,
            _ => return Err(CliError::Usage("`verify` takes at most one argument".into())),
        };
        let (summary, _) = verify_suite(scenario.map(|s| (s, phi)), ctx.seed, count);
        let passed = summary.passed();
        return Ok((value(&summary), passed));
    }
    let s = scenario.ok_or_else(|| CliError::Usage(format!("`{command}` needs a scenario (--scenario PATH)")))?;
    check_args(s, command, args)?;
    let space = match ctx.depth {
        Some(d) if s.space.is_countable() => s.space.with_depth(d),
        _ => s.space.clone(),
    };
    let space = &space;
    let out = match command {
        "norm" => {
            let f = s.function(&args[0])?;
            let lux = luxemburg_norm_tol(space, phi, f, ctx.tol)?;
            let orl = match orlicz_norm(space, phi, f) {
                Ok(r) => value(&r),
                Err(e) => json!({"unavailable": e.to_string()}),
            };
            (json!({"function": args[0], "modular": tail_sum(&modular(space, phi, f)?), "luxemburg": value(&lux), "orlicz": orl}), true)
        }
        "hderiv" => {
            let map = s.map(&args[0])?;
            let h = space.radon_nikodym(map)?;
            let mut v = json!({
                "map": args[0],
                "h": value(&h),
                "nonsingular": value(&space.nonsingular_check(map)?),
                "h_finite": value(&h_finiteness(&h)),
                "sigma_finite": value(&space.sigma_finite_check(map)?),
            });
            if map.is_bijective(space) {
                v["h_inverse"] = value(&space.inverse_rn(map)?);
            }
            (v, true)
        }
        "density" => {
            let v = density_verdict(space, phi, s.map(&args[0])?)?;
            let ok = v.facets_agree();
            (json!({"map": args[0], "verdict": value(&v), "facets_agree": ok}), ok)
        }
        "domain" => {
            let d = domain_membership(space, phi, s.map(&args[0])?, s.function(&args[1])?)?;
            (json!({"map": args[0], "function": args[1], "membership": value(&d)}), d.agree)
        }
        "approximate" => approximate(space, phi, s, args)?,
        "bounded" => {
            let map = s.map(&args[0])?;
            let probes = number(args, 1, ctx.probes as f64) as usize;
            let v = boundedness_verdict(space, phi, map)?;
            let mut ok = true;
            let mut out = json!({"map": args[0], "verdict": value(&v)});
            if let BoundedStatus::EverywhereDefinedAndBounded { bound, .. } = v.status {
                let est = operator_norm_estimate(space, phi, map, probes, ctx.seed)?;
                ok = est <= bound * (1.0 + 1e-9);
                out["operator_norm_estimate"] = ext(est);
            }
            (out, ok)
        }
        "lp-check" => {
            let map = s.map(&args[0])?;
            let p = number(args, 2, 2.0);
            let r = multiplication_equivalence_check(space, s.function(&args[1])?, map, p)?;
            let ok = !r.verdict.is_fails();
            (json!({"map": args[0], "function": args[1], "p": p, "equivalence": value(&r), "density": value(&lp_density_verdict(space, map, p)?)}), ok)
        }
        "adjoint-check" => {
            let r = duality_pairing_check(space, phi, s.map(&args[0])?, s.function(&args[1])?, s.function(&args[2])?)?;
            let ok = r.residual <= 1e-10 && !r.density_verdict.as_ref().is_some_and(|v| v.is_fails());
            (json!({"map": args[0], "f": args[1], "g": args[2], "report": value(&r)}), ok)
        }
        other => return Err(CliError::Usage(format!("unknown command `{other}`"))),
    };
    Ok(out)
}

fn conjugate(phi: &YoungFunction, range: ProbeRange) -> Result<Value, CliError> {
    let psi = phi.conjugate().normalized();
    let probe = |v: orlicz_core::Result<orlicz_core::GrowthVerdict>| v.map(|g| value(&g.status)).unwrap_or_else(|e| json!({"error": e.to_string()}));
    let pairs = range.with_density(range.per_decade.min(64));
    Ok(json!({
        "young": phi.label(),
        "conjugate": psi.label(),
        "descriptor": value(&psi),
        "young_probes": {
            "delta2": probe(delta2_probe(phi, range)),
            "delta_prime": probe(delta_prime_probe(phi, pairs)),
            "nabla_prime": probe(nabla_prime_probe(phi, pairs)),
            "n_function": probe(n_function_probe(phi, range)),
        },
        "conjugate_probes": {
            "delta2": probe(delta2_probe(&psi, range)),
            "delta_prime": probe(delta_prime_probe(&psi, pairs)),
        },
    }))
}

fn approximate(space: &MeasureSpace, phi: &YoungFunction, s: &Scenario, args: &[String]) -> Result<(Value, bool), CliError> {
    let map = s.map(&args[0])?;
    let f = s.function(&args[1])?;
    let ns: Vec<usize> = match args.get(2) {
        Some(_) => vec![number(args, 2, 2.0) as usize],
        None => (1..=10).map(|k| 1usize << k).collect(),
    };
    let mut ok = true;
    let mut trail = Vec::new();
    for n in ns {
        let a = truncation_approximants(space, phi, map, f, n.max(2))?;
        ok &= a.bound_holds;
        trail.push(json!({"n": a.n, "distance": ext(a.distance), "image_norm": ext(a.image_norm), "bound": ext(a.bound), "in_domain": value(&a.in_domain), "bound_holds": a.bound_holds}));
    }
    let closure = closure_identity_check(space, phi, map, std::slice::from_ref(f)).map(|c| value(&c.verdict));
    let battery = default_battery(space).len();
    Ok((
        json!({
            "map": args[0],
            "function": args[1],
            "approximants": trail,
            "closure": closure.unwrap_or_else(|e| json!({"error": e.to_string()})),
            "default_battery_size": battery,
        }),
        ok,
    ))
}
