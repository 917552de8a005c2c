//! Reference bounds: PLOB upper bound, (reverse) coherent information of a
//! two-mode squeezed vacuum input, and NPJ forward/backward mixing.

use serde::Serialize;

use crate::channel::PiBGC;
use crate::config::NpjBudget;
use crate::error::{check, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundKind {
    Upper,
    Lower,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Method {
    #[serde(rename = "PLOB")]
    Plob,
    #[serde(rename = "CI")]
    Ci,
    #[serde(rename = "RCI")]
    Rci,
    #[serde(rename = "CI_EC")]
    CiEc,
    #[serde(rename = "RCI_EC")]
    RciEc,
    #[serde(rename = "NPJ")]
    Npj,
}

impl Method {
    pub fn label(self) -> &'static str {
        match self {
            Method::Plob => "PLOB",
            Method::Ci => "CI",
            Method::Rci => "RCI",
            Method::CiEc => "CI_EC",
            Method::RciEc => "RCI_EC",
            Method::Npj => "NPJ",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoundValue {
    /// Bits per channel use.
    pub value: f64,
    pub kind: BoundKind,
    pub method: Method,
    pub channel: PiBGC,
    pub ns: Option<f64>,
}

impl BoundValue {
    fn lower(value: f64, method: Method, channel: &PiBGC, ns: Option<f64>) -> Self {
        Self {
            value: value.max(0.0),
            kind: BoundKind::Lower,
            method,
            channel: *channel,
            ns,
        }
    }
}

/// `h(x) = (x+1) log2(x+1) - x log2 x`, with `h(x) = 0` for `x <= 0`.
pub fn bosonic_entropy(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    (x + 1.0) * (x + 1.0).log2() - x * x.log2()
}

fn log2_e() -> f64 {
    std::f64::consts::LOG2_E
}

pub fn plob_upper(ch: &PiBGC) -> BoundValue {
    let value = if ch.is_entanglement_breaking() {
        0.0
    } else {
        match *ch {
            PiBGC::Attenuator { lambda, nu } => {
                -bosonic_entropy(nu) - ((1.0 - lambda).log2() + nu * lambda.log2())
            }
            PiBGC::Amplifier { g, nu } => -bosonic_entropy(nu) + (nu + 1.0) * g.log2() - (g - 1.0).log2(),
            PiBGC::AdditiveNoise { xi } => (xi - 1.0) * log2_e() - xi.log2(),
        }
    };
    BoundValue {
        value: value.max(0.0),
        kind: BoundKind::Upper,
        method: Method::Plob,
        channel: *ch,
        ns: None,
    }
}

/// Coherent information in the infinite-energy limit.
pub fn ci_asymptotic(ch: &PiBGC) -> BoundValue {
    let v = match *ch {
        PiBGC::Attenuator { lambda, nu } => (lambda / (1.0 - lambda)).log2() - bosonic_entropy(nu),
        PiBGC::Amplifier { g, nu } => -bosonic_entropy(nu) + (g / (g - 1.0)).log2(),
        PiBGC::AdditiveNoise { xi } => -(std::f64::consts::E * xi).log2(),
    };
    BoundValue::lower(v, Method::Ci, ch, None)
}

/// Reverse coherent information in the infinite-energy limit (attenuator only).
pub fn rci_asymptotic(ch: &PiBGC) -> Result<BoundValue> {
    match *ch {
        PiBGC::Attenuator { lambda, nu } => Ok(BoundValue::lower(
            -bosonic_entropy(nu) - (1.0 - lambda).log2(),
            Method::Rci,
            ch,
            None,
        )),
        _ => Err(Error::Unsupported {
            method: "reverse coherent information",
            channel: ch.kind().name(),
        }),
    }
}

/// Joint entropy of the output state, as the two symplectic terms.
fn joint_entropy(ch: &PiBGC, ns: f64) -> f64 {
    let (d, shift) = match *ch {
        PiBGC::Attenuator { lambda, nu } => {
            let s = (1.0 + lambda) * ns + (1.0 - lambda) * nu + 1.0;
            ((s * s - 4.0 * lambda * ns * (ns + 1.0)).max(0.0).sqrt(), (1.0 - lambda) * (ns - nu))
        }
        PiBGC::Amplifier { g, nu } => {
            let s = (g + 1.0) * ns + (g - 1.0) * (nu + 1.0) + 1.0;
            ((s * s - 4.0 * g * ns * (ns + 1.0)).max(0.0).sqrt(), (g - 1.0) * (ns + nu + 1.0))
        }
        PiBGC::AdditiveNoise { xi } => {
            let s = 2.0 * ns + xi + 1.0;
            ((s * s - 4.0 * ns * (ns + 1.0)).max(0.0).sqrt(), xi)
        }
    };
    bosonic_entropy((d + shift - 1.0) / 2.0) + bosonic_entropy((d - shift - 1.0) / 2.0)
}

fn output_entropy(ch: &PiBGC, ns: f64) -> f64 {
    match *ch {
        PiBGC::Attenuator { lambda, nu } => bosonic_entropy(lambda * ns + (1.0 - lambda) * nu),
        PiBGC::Amplifier { g, nu } => bosonic_entropy(g * ns + (g - 1.0) * (nu + 1.0)),
        PiBGC::AdditiveNoise { xi } => bosonic_entropy(ns + xi),
    }
}

fn ci_raw(ch: &PiBGC, ns: f64) -> f64 {
    output_entropy(ch, ns) - joint_entropy(ch, ns)
}

fn rci_raw(ch: &PiBGC, ns: f64) -> f64 {
    bosonic_entropy(ns) - joint_entropy(ch, ns)
}

fn check_ns(ns: f64) -> Result<()> {
    check(ns >= 0.0 && ns.is_finite(), "ns", ns, "must be finite and >= 0")
}

/// Coherent information of a two-mode squeezed vacuum with `ns` photons.
pub fn ci_tmsv(ch: &PiBGC, ns: f64) -> Result<BoundValue> {
    check_ns(ns)?;
    Ok(BoundValue::lower(ci_raw(ch, ns), Method::CiEc, ch, Some(ns)))
}

/// Reverse coherent information of a two-mode squeezed vacuum (attenuator only).
pub fn rci_tmsv(ch: &PiBGC, ns: f64) -> Result<BoundValue> {
    check_ns(ns)?;
    match ch {
        PiBGC::Attenuator { .. } => Ok(BoundValue::lower(rci_raw(ch, ns), Method::RciEc, ch, Some(ns))),
        _ => Err(Error::Unsupported {
            method: "reverse coherent information",
            channel: ch.kind().name(),
        }),
    }
}

fn grid(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| if i + 1 == n { hi } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 })
}

/// 2-D grid search with local refinement; returns the best value found.
/// Ties keep the first point in grid order.
fn maximize_2d<F: Fn(f64, f64) -> f64>(f: F, budget: &NpjBudget) -> f64 {
    let n = budget.grid;
    let (mut xlo, mut xhi, mut ylo, mut yhi) = (0.0, 1.0, 0.0, 1.0);
    let mut best = (f64::NEG_INFINITY, 0.0, 0.0);
    for _ in 0..=budget.refine_rounds {
        for x in grid(xlo, xhi, n) {
            for y in grid(ylo, yhi, n) {
                let v = f(x, y);
                if v > best.0 {
                    best = (v, x, y);
                }
            }
        }
        let dx = (xhi - xlo) / (n - 1) as f64;
        let dy = (yhi - ylo) / (n - 1) as f64;
        xlo = (best.1 - dx).max(0.0);
        xhi = (best.1 + dx).min(1.0);
        ylo = (best.2 - dy).max(0.0);
        yhi = (best.2 + dy).min(1.0);
    }
    best.0
}

fn maximize_1d<F: Fn(f64) -> f64>(f: F, budget: &NpjBudget) -> f64 {
    let n = budget.grid;
    let (mut lo, mut hi) = (0.0, 1.0);
    let mut best = (f64::NEG_INFINITY, 0.0);
    for _ in 0..=budget.refine_rounds {
        for x in grid(lo, hi, n) {
            let v = f(x);
            if v > best.0 {
                best = (v, x);
            }
        }
        let dx = (hi - lo) / (n - 1) as f64;
        lo = (best.1 - dx).max(0.0);
        hi = (best.1 + dx).min(1.0);
    }
    best.0
}

/// Best mixture of forward and backward strategies at mean energy `ns`.
pub fn npj_bound(ch: &PiBGC, ns: f64, budget: &NpjBudget) -> Result<BoundValue> {
    check_ns(ns)?;
    let v = match ch {
        PiBGC::Attenuator { .. } => {
            // a fraction x of uses runs forward with t*ns of the energy budget
            let obj = |x: f64, t: f64| {
                let fwd = if x > 0.0 { x * ci_raw(ch, t * ns / x).max(0.0) } else { 0.0 };
                let bwd = if x < 1.0 {
                    (1.0 - x) * rci_raw(ch, (1.0 - t) * ns / (1.0 - x)).max(0.0)
                } else {
                    0.0
                };
                fwd + bwd
            };
            let endpoints = obj(1.0, 1.0).max(obj(0.0, 0.0));
            maximize_2d(obj, budget).max(endpoints)
        }
        _ => {
            let obj = |x: f64| if x > 0.0 { x * ci_raw(ch, ns / x).max(0.0) } else { 0.0 };
            maximize_1d(obj, budget).max(obj(1.0))
        }
    };
    Ok(BoundValue::lower(v, Method::Npj, ch, Some(ns)))
}

/// Maximum tolerable excess noise; identically 1 on (0, 1).
pub fn excess_noise(lambda: f64) -> Result<f64> {
    check(lambda > 0.0 && lambda < 1.0, "lambda", lambda, "must lie in (0, 1)")?;
    let nu_star = lambda / (1.0 - lambda);
    Ok((1.0 - lambda) / lambda * nu_star)
}
