//! Turns parsed arguments into channel points and evaluates bounds.

use std::sync::atomic::{AtomicUsize, Ordering};

use pibgc::baselines::{ci_asymptotic, ci_tmsv, npj_bound, plob_upper, rci_asymptotic, rci_tmsv, BoundValue};
use pibgc::multirail::optimize_multirail;
use pibgc::rate::optimize;
use pibgc::{Config, PiBGC};
use rayon::prelude::*;
use serde::Serialize;

use crate::args::{ChannelArg, MethodArg, Param, QueryArgs};
use crate::CliError;

const EB_FLAG: &str = "entanglement-breaking";

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Method {
    New,
    Multirail,
    Plob,
    Ci,
    Rci,
    Npj,
}

const ALL: [Method; 6] = [
    Method::New,
    Method::Multirail,
    Method::Plob,
    Method::Ci,
    Method::Rci,
    Method::Npj,
];

#[derive(Clone, Debug, PartialEq)]
pub struct Point {
    pub channel: PiBGC,
    pub swept_name: &'static str,
    pub swept_value: f64,
    pub fixed: Option<(&'static str, f64)>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Record {
    pub channel: &'static str,
    pub fixed_name: Option<&'static str>,
    pub fixed_value: Option<f64>,
    pub swept_name: &'static str,
    pub swept_value: f64,
    pub ns: Option<f64>,
    pub method: &'static str,
    pub value: f64,
    #[serde(rename = "opt_M")]
    pub opt_m: Option<usize>,
    pub opt_c: Option<f64>,
    pub opt_k: Option<usize>,
    #[serde(rename = "opt_N")]
    pub opt_n: Option<usize>,
    #[serde(rename = "opt_K")]
    pub opt_rails: Option<usize>,
    pub flags: Vec<&'static str>,
    #[serde(skip)]
    order: Method,
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Channel points in sweep order. `sweep` requires exactly one range,
/// `bound` none.
pub fn points(args: &QueryArgs, sweep: bool) -> Result<Vec<Point>, CliError> {
    let given = [("lambda", args.lambda), ("nu", args.nu), ("g", args.g), ("xi", args.xi)];
    let (primary, secondary): (&'static str, Option<&'static str>) = match args.channel {
        ChannelArg::Attenuator => ("lambda", Some("nu")),
        ChannelArg::Amplifier => ("g", Some("nu")),
        ChannelArg::Additive => ("xi", None),
    };
    let mut params: Vec<(&'static str, Param)> = Vec::new();
    for (name, value) in given {
        let wanted = name == primary || Some(name) == secondary;
        match (value, wanted) {
            (Some(v), true) => params.push((name, v)),
            (None, true) => return Err(usage(format!("--{name} is required for the {} channel", channel_name(args.channel)))),
            (Some(_), false) => {
                return Err(usage(format!("--{name} does not apply to the {} channel", channel_name(args.channel))))
            }
            (None, false) => {}
        }
    }
    params.sort_by_key(|(name, _)| *name != primary);
    let ranges = params.iter().filter(|(_, p)| p.is_range()).count();
    if sweep && ranges != 1 {
        return Err(usage("sweep needs exactly one parameter given as start:stop:step"));
    }
    if !sweep && ranges != 0 {
        return Err(usage("bound takes single values; use sweep for ranges"));
    }
    if let Some(ns) = args.ns {
        if !(ns >= 0.0 && ns.is_finite()) {
            return Err(usage(format!("--ns must be finite and >= 0, got {ns}")));
        }
    }

    let swept_idx = params.iter().position(|(_, p)| p.is_range()).unwrap_or(0);
    let (swept_name, swept) = params[swept_idx];
    let fixed = params
        .iter()
        .enumerate()
        .find(|(i, _)| *i != swept_idx)
        .map(|(_, (name, p))| (*name, p.values()[0]));

    swept
        .values()
        .into_iter()
        .map(|x| {
            let get = |name: &str| if name == swept_name { x } else { fixed.map(|f| f.1).unwrap_or(0.0) };
            let channel = match args.channel {
                ChannelArg::Attenuator => PiBGC::attenuator(get("lambda"), get("nu")),
                ChannelArg::Amplifier => PiBGC::amplifier(get("g"), get("nu")),
                ChannelArg::Additive => PiBGC::additive(get("xi")),
            }
            .map_err(|e| usage(e.to_string()))?;
            Ok(Point {
                channel,
                swept_name,
                swept_value: x,
                fixed,
            })
        })
        .collect()
}

fn channel_name(c: ChannelArg) -> &'static str {
    match c {
        ChannelArg::Attenuator => "attenuator",
        ChannelArg::Amplifier => "amplifier",
        ChannelArg::Additive => "additive",
    }
}

/// Methods to evaluate, in output order. Methods that cannot run for this
/// query are an error when requested by name and skipped under `all`.
pub fn methods(args: &QueryArgs) -> Result<Vec<Method>, CliError> {
    let all = args.method.contains(&MethodArg::All);
    let requested: Vec<Method> = if all {
        ALL.to_vec()
    } else {
        let mut m: Vec<Method> = args
            .method
            .iter()
            .map(|m| match m {
                MethodArg::New => Method::New,
                MethodArg::Multirail => Method::Multirail,
                MethodArg::Plob => Method::Plob,
                MethodArg::Ci => Method::Ci,
                MethodArg::Rci => Method::Rci,
                MethodArg::Npj => Method::Npj,
                MethodArg::All => unreachable!(),
            })
            .collect();
        m.sort();
        m.dedup();
        m
    };
    let mut out = Vec::new();
    for m in requested {
        let problem = match m {
            Method::Rci if args.channel != ChannelArg::Attenuator => {
                Some("rci is only available for the attenuator")
            }
            Method::Npj if args.ns.is_none() => Some("npj needs --ns"),
            _ => None,
        };
        match problem {
            None => out.push(m),
            Some(msg) if all => log::warn!("skipping: {msg}"),
            Some(msg) => return Err(usage(msg)),
        }
    }
    Ok(out)
}

fn closed_form(p: &Point, order: Method, b: BoundValue) -> Record {
    Record {
        channel: p.channel.kind().name(),
        fixed_name: p.fixed.map(|f| f.0),
        fixed_value: p.fixed.map(|f| f.1),
        swept_name: p.swept_name,
        swept_value: p.swept_value,
        ns: b.ns,
        method: b.method.label(),
        value: b.value,
        opt_m: None,
        opt_c: None,
        opt_k: None,
        opt_n: None,
        opt_rails: None,
        flags: Vec::new(),
        order,
    }
}

fn evaluate(p: &Point, m: Method, ns: Option<f64>, cfg: &Config) -> Result<Record, CliError> {
    let ch = &p.channel;
    let cf = ch.to_composition();
    let fail = |e: pibgc::Error| CliError::Failure(e.to_string());
    let mut rec = match m {
        Method::Plob => closed_form(p, m, plob_upper(ch)),
        Method::Ci => match ns {
            Some(ns) => closed_form(p, m, ci_tmsv(ch, ns).map_err(fail)?),
            None => closed_form(p, m, ci_asymptotic(ch)),
        },
        Method::Rci => match ns {
            Some(ns) => closed_form(p, m, rci_tmsv(ch, ns).map_err(fail)?),
            None => closed_form(p, m, rci_asymptotic(ch).map_err(fail)?),
        },
        Method::Npj => {
            let ns = ns.expect("npj is filtered out without ns");
            closed_form(p, m, npj_bound(ch, ns, &cfg.npj).map_err(fail)?)
        }
        Method::New => {
            let r = optimize(&cf, ns, &cfg.optimizer).map_err(fail)?;
            let ran = r.m > 0;
            let mut rec = closed_form(p, m, plob_upper(ch));
            rec.method = "new";
            rec.ns = ns;
            rec.value = r.rate;
            rec.opt_m = ran.then_some(r.m);
            rec.opt_c = ran.then_some(r.c);
            rec.opt_k = ran.then_some(r.k);
            rec.flags = r.flags.iter().map(|f| f.label()).collect();
            rec
        }
        Method::Multirail => {
            if ns.is_some() {
                log::warn!("multirail ignores --ns");
            }
            let r = optimize_multirail(&cf, &cfg.multirail).map_err(fail)?;
            let mut rec = closed_form(p, m, plob_upper(ch));
            rec.method = "multirail";
            rec.value = r.rate;
            let ran = !r.terms.is_empty();
            rec.opt_n = ran.then_some(r.n_photons);
            rec.opt_rails = ran.then_some(r.rails);
            rec.flags = r.flags.iter().map(|f| f.label()).collect();
            rec
        }
    };
    if ch.is_entanglement_breaking() && !rec.flags.contains(&EB_FLAG) {
        rec.flags.insert(0, EB_FLAG);
    }
    Ok(rec)
}

/// Evaluates every (point, method) pair on the current rayon pool and
/// returns rows sorted by swept value, then method.
pub fn run(points: &[Point], methods: &[Method], ns: Option<f64>, cfg: &Config) -> Result<Vec<Record>, CliError> {
    let tasks: Vec<(&Point, Method)> = points.iter().flat_map(|p| methods.iter().map(move |&m| (p, m))).collect();
    let done = AtomicUsize::new(0);
    let total = tasks.len();
    let mut rows: Vec<Record> = tasks
        .par_iter()
        .map(|&(p, m)| {
            let r = evaluate(p, m, ns, cfg);
            let n = done.fetch_add(1, Ordering::Relaxed) + 1;
            log::info!("{n}/{total} {}={} {:?}", p.swept_name, p.swept_value, m);
            r
        })
        .collect::<Result<_, _>>()?;
    rows.sort_by(|a, b| a.swept_value.total_cmp(&b.swept_value).then(a.order.cmp(&b.order)));
    Ok(rows)
}
