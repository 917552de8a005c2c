//! Rate of the single-pair protocol (conditional state, twirl, P1-or-P2
//! recurrence, hashing) and its optimization over (M, c, k).

use rayon::prelude::*;
use serde::Serialize;

use crate::bell::{conditional_state, twirl};
use crate::channel::CompositionForm;
use crate::config::OptBudget;
use crate::distill::{best_yield, p1p2_step, YieldPermutation};
use crate::error::{check, Error, Result};
use crate::numeric::golden_max;

/// Rates below this are reported as zero.
pub const RATE_FLOOR: f64 = 1e-15;

/// Largest M the optimizer is expected to pick; larger choices are flagged.
pub const EXPECTED_M_MAX: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RateFlag {
    EntanglementBreaking,
    Clamped,
    Degenerate,
    Infeasible,
    HighM,
}

impl RateFlag {
    pub fn label(self) -> &'static str {
        match self {
            RateFlag::EntanglementBreaking => "entanglement-breaking",
            RateFlag::Clamped => "clamped",
            RateFlag::Degenerate => "degenerate",
            RateFlag::Infeasible => "infeasible",
            RateFlag::HighM => "high-M",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RateResult {
    /// Ebits per channel use.
    pub rate: f64,
    /// Fock label; 0 when no protocol was run.
    pub m: usize,
    pub c: f64,
    pub k: usize,
    /// Post-selection probability.
    pub post_selection: f64,
    /// `prod P_t / 2^k`.
    pub survival: f64,
    pub yield_value: f64,
    pub permutation: Option<YieldPermutation>,
    pub constraint: Option<f64>,
    pub flags: Vec<RateFlag>,
}

impl RateResult {
    fn zero(constraint: Option<f64>, flag: RateFlag) -> Self {
        Self {
            rate: 0.0,
            m: 0,
            c: 0.0,
            k: 0,
            post_selection: 0.0,
            survival: 0.0,
            yield_value: 0.0,
            permutation: None,
            constraint,
            flags: vec![flag],
        }
    }

    pub fn has_flag(&self, flag: RateFlag) -> bool {
        self.flags.contains(&flag)
    }

    fn clamp(&mut self) {
        if self.rate < RATE_FLOOR {
            if self.rate > 0.0 {
                self.flags.push(RateFlag::Clamped);
            }
            self.rate = 0.0;
        }
    }
}

fn check_point(m: usize, c: f64) -> Result<()> {
    check(m >= 1, "M", m as f64, "must be >= 1")?;
    check(c > 0.0 && c < 1.0, "c", c, "must lie in (0, 1)")
}

/// Rate for fixed protocol parameters.
pub fn rate(cf: &CompositionForm, m: usize, c: f64, k: usize) -> Result<RateResult> {
    check_point(m, c)?;
    let cs = conditional_state(cf, m, c)?;
    let mut state = twirl(&cs);
    let mut survival = 1.0;
    let mut flags = Vec::new();
    for _ in 0..k {
        match p1p2_step(&state) {
            Ok(s) => {
                survival *= s.prob * 0.5;
                state = s.state;
            }
            Err(Error::Degenerate(_)) => {
                survival = 0.0;
                flags.push(RateFlag::Degenerate);
                break;
            }
            Err(e) => return Err(e),
        }
    }
    let (y, perm) = best_yield(&state);
    if cf.is_entanglement_breaking() {
        flags.push(RateFlag::EntanglementBreaking);
    }
    let mut res = RateResult {
        rate: cs.prob * survival * y,
        m,
        c,
        k,
        post_selection: cs.prob,
        survival,
        yield_value: y,
        permutation: Some(perm),
        constraint: None,
        flags,
    };
    res.clamp();
    Ok(res)
}

/// Best rate over `k = 0..=k_max` for fixed (M, c), scanning the recurrence
/// once. Ties keep the smaller k.
pub fn best_over_k(cf: &CompositionForm, m: usize, c: f64, k_max: usize) -> Result<RateResult> {
    check_point(m, c)?;
    let cs = conditional_state(cf, m, c)?;
    let mut state = twirl(&cs);
    let mut survival = 1.0;
    let (y0, p0) = best_yield(&state);
    let mut best = RateResult {
        rate: cs.prob * y0,
        m,
        c,
        k: 0,
        post_selection: cs.prob,
        survival,
        yield_value: y0,
        permutation: Some(p0),
        constraint: None,
        flags: Vec::new(),
    };
    for k in 1..=k_max {
        let Ok(step) = p1p2_step(&state) else {
            best.flags.push(RateFlag::Degenerate);
            break;
        };
        survival *= step.prob * 0.5;
        state = step.state;
        let (y, p) = best_yield(&state);
        let r = cs.prob * survival * y;
        if r > best.rate {
            best.rate = r;
            best.k = k;
            best.survival = survival;
            best.yield_value = y;
            best.permutation = Some(p);
        }
    }
    Ok(best)
}

/// Smallest admissible c for Fock label `m` under mean photon budget `ns`.
pub fn c_min(m: usize, ns: f64) -> f64 {
    (1.0 - ns / m as f64).max(0.0).sqrt()
}

fn c_candidates(budget: &OptBudget, lo: f64) -> Vec<f64> {
    let n = (1.0 / budget.c_step).ceil() as usize;
    let mut cs: Vec<f64> = (1..n)
        .map(|j| j as f64 * budget.c_step)
        .filter(|&c| c < 1.0 && c >= lo)
        .collect();
    if lo > 0.0 && lo < 1.0 && cs.first() != Some(&lo) {
        cs.insert(0, lo);
    }
    cs
}

/// Strictly better. Candidates are visited in (M, c, k) order, so ties keep
/// the earliest one.
fn beats(a: &RateResult, b: &RateResult) -> bool {
    a.rate > b.rate
}

fn optimize_m(cf: &CompositionForm, m: usize, lo: f64, budget: &OptBudget) -> Result<Option<RateResult>> {
    let cs = c_candidates(budget, lo);
    if cs.is_empty() {
        return Ok(None);
    }
    let evals: Vec<RateResult> = cs
        .par_iter()
        .map(|&c| best_over_k(cf, m, c, budget.k_max))
        .collect::<Result<_>>()?;
    let mut best = evals[0].clone();
    for e in &evals[1..] {
        if beats(e, &best) {
            best = e.clone();
        }
    }
    if best.rate <= 0.0 {
        return Ok(Some(best));
    }
    let floor = if lo > 0.0 { lo } else { 1e-9 };
    let a = (best.c - budget.c_step).max(floor);
    let b = (best.c + budget.c_step).min(1.0 - 1e-9);
    if b - a > budget.c_tol {
        let k_max = budget.k_max;
        let (x, fx) = golden_max(
            |c| best_over_k(cf, m, c, k_max).map(|r| r.rate).unwrap_or(0.0),
            a,
            b,
            budget.c_tol,
        );
        if fx > best.rate {
            best = best_over_k(cf, m, x, k_max)?;
        }
    }
    Ok(Some(best))
}

/// Maximize the rate over M, c and k. With `ns` set, each M is restricted to
/// `(1 - c^2) M <= ns`.
pub fn optimize(cf: &CompositionForm, ns: Option<f64>, budget: &OptBudget) -> Result<RateResult> {
    if let Some(ns) = ns {
        check(ns >= 0.0 && !ns.is_nan(), "ns", ns, "must be >= 0")?;
    }
    if cf.is_entanglement_breaking() {
        return Ok(RateResult::zero(ns, RateFlag::EntanglementBreaking));
    }
    let per_m: Vec<Option<RateResult>> = (1..=budget.m_max)
        .into_par_iter()
        .map(|m| optimize_m(cf, m, ns.map_or(0.0, |ns| c_min(m, ns)), budget))
        .collect::<Result<_>>()?;
    let mut best: Option<RateResult> = None;
    for r in per_m.into_iter().flatten() {
        if best.as_ref().is_none_or(|b| beats(&r, b)) {
            best = Some(r);
        }
    }
    let Some(mut best) = best else {
        return Ok(RateResult::zero(ns, RateFlag::Infeasible));
    };
    best.constraint = ns;
    best.clamp();
    if best.rate > 0.0 && best.m > EXPECTED_M_MAX {
        log::warn!("optimal M = {} exceeds {}", best.m, EXPECTED_M_MAX);
        best.flags.push(RateFlag::HighM);
    }
    Ok(best)
}
