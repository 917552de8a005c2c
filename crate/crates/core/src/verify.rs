//! Fast invariant suite behind the `verify` command.

use serde::Serialize;

use crate::bell::determinant_condition;
use crate::channel::CompositionForm;
use crate::gaussian::{choi_cov, simon_entangled, simon_f};
use crate::multirail::{p_f, p_f_alt, MultiIndexBasis};
use crate::numeric::CompensatedSum;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub max_error: f64,
    pub tolerance: f64,
    pub failures: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyReport {
    pub passed: bool,
    pub checks: Vec<CheckResult>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VerifyOptions {
    /// Multiplies every Kraus coefficient; 1.0 leaves them untouched.
    /// Exists so tests can confirm that the suite detects a broken kernel.
    pub f_scale: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self { f_scale: 1.0 }
    }
}

/// 40 x 40 grid: g in [1, 3], λ in (0, 1].
pub fn eb_grid() -> Vec<CompositionForm> {
    let mut out = Vec::with_capacity(1600);
    for i in 0..40 {
        for j in 0..40 {
            let g = 1.0 + 2.0 * i as f64 / 39.0;
            let lambda = (j + 1) as f64 / 40.0;
            out.push(CompositionForm { g, lambda });
        }
    }
    out
}

/// Deterministic spread of channels with g in [1, 3] and λ in [0, 1].
pub fn sample_channels(count: usize) -> Vec<CompositionForm> {
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let root2 = 2f64.sqrt();
    (1..=count)
        .map(|i| {
            let u = (i as f64 * phi).fract();
            let v = (i as f64 * root2).fract();
            CompositionForm {
                g: 1.0 + 2.0 * u,
                lambda: v,
            }
        })
        .collect()
}

struct Tracker {
    name: &'static str,
    tolerance: f64,
    max_error: f64,
    failures: Vec<String>,
}

impl Tracker {
    fn new(name: &'static str, tolerance: f64) -> Self {
        Self {
            name,
            tolerance,
            max_error: 0.0,
            failures: Vec::new(),
        }
    }

    fn error(&mut self, err: f64, what: impl FnOnce() -> String) {
        if err > self.max_error || err.is_nan() {
            self.max_error = err;
        }
        if !(err <= self.tolerance) && self.failures.len() < 20 {
            self.failures.push(what());
        }
    }

    fn flag(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok && self.failures.len() < 20 {
            self.failures.push(what());
        }
    }

    fn finish(self) -> CheckResult {
        CheckResult {
            name: self.name,
            passed: self.failures.is_empty(),
            max_error: self.max_error,
            tolerance: self.tolerance,
            failures: self.failures,
        }
    }
}

fn trace_preservation(opts: &VerifyOptions) -> CheckResult {
    let mut t = Tracker::new("kraus-trace-preservation", 1e-10);
    for cf in sample_channels(20) {
        for n in 0..=5 {
            let s: CompensatedSum = (0..=200).map(|l| cf.f_coeff(n, n, l) * opts.f_scale).collect();
            t.error((s.value() - 1.0).abs(), || format!("n={n} g={} lambda={}", cf.g, cf.lambda));
        }
    }
    t.finish()
}

fn dual_p_f() -> CheckResult {
    let mut t = Tracker::new("p_f-dual-formula", 1e-12);
    for cf in sample_channels(20) {
        for n in 0..=10 {
            for k in 1..=10 {
                for f in 0..=10 {
                    let err = (p_f(&cf, n, k, f) - p_f_alt(&cf, n, k, f)).abs();
                    t.error(err, || format!("N={n} K={k} F={f} g={} lambda={}", cf.g, cf.lambda));
                }
            }
        }
    }
    t.finish()
}

fn p_f_normalization() -> CheckResult {
    let mut t = Tracker::new("p_f-normalization", 1e-9);
    for cf in sample_channels(20) {
        for n in 0..=10 {
            for k in 1..=10 {
                let mut s = CompensatedSum::new();
                let mut f = 0;
                // stop once the remaining mass is provably negligible
                while f < 5000 {
                    let p = p_f(&cf, n, k, f);
                    s.add(p);
                    f += 1;
                    if f > n && 1.0 - s.value() < 1e-13 {
                        break;
                    }
                }
                t.error((s.value() - 1.0).abs(), || format!("N={n} K={k} g={} lambda={}", cf.g, cf.lambda));
            }
        }
    }
    t.finish()
}

/// Outcome probabilities rebuilt rail-by-rail from the Kraus coefficients.
fn p_f_from_kraus(opts: &VerifyOptions) -> CheckResult {
    let mut t = Tracker::new("p_f-from-kraus", 1e-12);
    for cf in sample_channels(6) {
        for n in 1..=3 {
            for k in 2..=3 {
                let a = MultiIndexBasis::new(k, n);
                for f in 0..=4 {
                    let b = MultiIndexBasis::new(k, f);
                    let mut s = CompensatedSum::new();
                    for nv in a.iter() {
                        for lv in b.iter() {
                            let prod: f64 = (0..k).map(|j| cf.f_coeff(nv[j], nv[j], lv[j]) * opts.f_scale).product();
                            s.add(prod);
                        }
                    }
                    let direct = s.value() / a.len() as f64;
                    let err = (direct - p_f(&cf, n, k, f)).abs();
                    t.error(err, || format!("N={n} K={k} F={f} g={} lambda={}", cf.g, cf.lambda));
                }
            }
        }
    }
    t.finish()
}

fn simon_closed_form() -> CheckResult {
    let mut t = Tracker::new("simon-closed-form", 1e-9);
    for i in 0..20 {
        for j in 0..20 {
            for ns in [0.1, 0.5, 1.0, 2.0, 5.0] {
                let g = 1.0 + 2.0 * i as f64 / 19.0;
                let lambda = j as f64 / 19.0;
                let cf = CompositionForm { g, lambda };
                let f = simon_f(&choi_cov(&cf, ns));
                let expect = -16.0 * ns * (1.0 + ns) * g * (1.0 - (1.0 - lambda) * g);
                t.error((f - expect).abs(), || format!("g={g} lambda={lambda} ns={ns}"));
            }
        }
    }
    t.finish()
}

fn eb_consistency() -> CheckResult {
    let mut t = Tracker::new("eb-region-consistency", 0.0);
    for cf in eb_grid() {
        let eb = cf.is_entanglement_breaking();
        let simon = simon_entangled(&choi_cov(&cf, 1.0));
        t.flag(simon != eb, || format!("simon g={} lambda={}", cf.g, cf.lambda));
        for m in 1..=5 {
            t.flag(determinant_condition(&cf, m) != eb, || {
                format!("determinant M={m} g={} lambda={}", cf.g, cf.lambda)
            });
        }
    }
    t.finish()
}

pub fn run_suite(opts: &VerifyOptions) -> VerifyReport {
    let checks = vec![
        trace_preservation(opts),
        dual_p_f(),
        p_f_normalization(),
        p_f_from_kraus(opts),
        simon_closed_form(),
        eb_consistency(),
    ];
    VerifyReport {
        passed: checks.iter().all(|c| c.passed),
        checks,
    }
}
