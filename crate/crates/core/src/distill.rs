//! P1-or-P2 recurrence steps and hashing yields.

use serde::Serialize;

use crate::bell::{BellDiag2, BellDiagD};
use crate::error::{Error, Result};
use crate::numeric::{binary_entropy, csum, shannon};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Branch {
    /// Convolution along the phase index (bit-flip correction).
    P1,
    /// Convolution along the bit index.
    P2,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Step<S> {
    pub state: S,
    pub prob: f64,
    pub branch: Branch,
}

/// Modular self-convolution of `alpha` along the phase index (P1) or the
/// bit index (P2). Returns the unnormalized output and its total weight.
fn convolve(alpha: &[f64], d: usize, branch: Branch) -> (Vec<f64>, f64) {
    let mut out = vec![0.0; d * d];
    match branch {
        Branch::P1 => {
            for n in 0..d {
                for m1 in 0..d {
                    let a = alpha[m1 * d + n];
                    if a == 0.0 {
                        continue;
                    }
                    for m2 in 0..d {
                        out[((m1 + m2) % d) * d + n] += a * alpha[m2 * d + n];
                    }
                }
            }
        }
        Branch::P2 => {
            for m in 0..d {
                for n1 in 0..d {
                    let a = alpha[m * d + n1];
                    if a == 0.0 {
                        continue;
                    }
                    for n2 in 0..d {
                        out[m * d + (n1 + n2) % d] += a * alpha[m * d + n2];
                    }
                }
            }
        }
    }
    let prob = match branch {
        Branch::P1 => csum((0..d).map(|n| {
            let s = csum((0..d).map(|m| alpha[m * d + n]));
            s * s
        })),
        Branch::P2 => csum((0..d).map(|m| {
            let s = csum((0..d).map(|n| alpha[m * d + n]));
            s * s
        })),
    };
    (out, prob)
}

fn qudit_branch(alpha: &[f64], d: usize) -> Branch {
    // alpha_00 appears on both sides and is dropped
    let col0 = csum((1..d).map(|m| alpha[m * d]));
    let row0 = csum((1..d).map(|n| alpha[n]));
    if col0 < row0 {
        Branch::P1
    } else {
        Branch::P2
    }
}

fn step_raw(alpha: &[f64], d: usize) -> Result<(Vec<f64>, f64, Branch)> {
    let branch = qudit_branch(alpha, d);
    let (mut out, prob) = convolve(alpha, d, branch);
    if !(prob > 0.0) {
        return Err(Error::Degenerate("recurrence success probability is zero"));
    }
    for x in out.iter_mut() {
        *x /= prob;
    }
    Ok((out, prob, branch))
}

pub fn p1p2_step(bd: &BellDiag2) -> Result<Step<BellDiag2>> {
    let (out, prob, branch) = step_raw(&bd.to_array(), 2)?;
    Ok(Step {
        state: BellDiag2::from_array([out[0], out[1], out[2], out[3]]),
        prob,
        branch,
    })
}

pub fn p1p2_step_qudit(bd: &BellDiagD) -> Result<Step<BellDiagD>> {
    let (alpha, prob, branch) = step_raw(&bd.alpha, bd.d)?;
    Ok(Step {
        state: BellDiagD { d: bd.d, alpha },
        prob,
        branch,
    })
}

/// Improved hashing yield `Y`.
pub fn hashing_yield(bd: &BellDiag2) -> f64 {
    let a = bd.to_array();
    let (a00, a01, a10, a11) = (a[0], a[1], a[2], a[3]);
    let s0 = a00 + a10;
    let s1 = a01 + a11;
    let h0 = if s0 > 0.0 { binary_entropy(a00 / s0) } else { 0.0 };
    let h1 = if s1 > 0.0 { binary_entropy(a11 / s1) } else { 0.0 };
    let y = 1.0 - shannon(&a) + 0.5 * s0 * s1 * (h0 + h1);
    y.max(0.0)
}

/// Plain hashing yield `max(0, 1 - H)`.
pub fn plain_hashing_yield(bd: &BellDiag2) -> f64 {
    (1.0 - shannon(&bd.to_array())).max(0.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum YieldPermutation {
    Identity,
    Hadamard,
    Bx,
}

pub fn best_yield(bd: &BellDiag2) -> (f64, YieldPermutation) {
    let BellDiag2 { a00, a01, a10, a11 } = *bd;
    let candidates = [
        (BellDiag2::from_array([a00, a01, a10, a11]), YieldPermutation::Identity),
        (BellDiag2::from_array([a00, a10, a01, a11]), YieldPermutation::Hadamard),
        (BellDiag2::from_array([a01, a00, a10, a11]), YieldPermutation::Bx),
    ];
    let mut best = (f64::NEG_INFINITY, YieldPermutation::Identity);
    for (c, p) in candidates {
        let y = hashing_yield(&c);
        if y > best.0 {
            best = (y, p);
        }
    }
    best
}

pub fn qudit_yield(bd: &BellDiagD) -> f64 {
    if let Some(q) = bd.to_qubit() {
        return best_yield(&q).0;
    }
    ((bd.d as f64).log2() - shannon(&bd.alpha)).max(0.0)
}

/// Per-step record of a recurrence run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RecurrenceTrace<S> {
    pub initial: S,
    pub steps: Vec<Step<S>>,
}

impl<S> RecurrenceTrace<S> {
    pub fn k(&self) -> usize {
        self.steps.len()
    }

    pub fn last(&self) -> &S {
        self.steps.last().map(|s| &s.state).unwrap_or(&self.initial)
    }

    /// `prod P_t / 2^k`.
    pub fn survival(&self) -> f64 {
        self.steps.iter().fold(1.0, |acc, s| acc * s.prob * 0.5)
    }
}

pub fn run_recurrence(bd: &BellDiag2, k: usize) -> Result<RecurrenceTrace<BellDiag2>> {
    let mut trace = RecurrenceTrace {
        initial: *bd,
        steps: Vec::with_capacity(k),
    };
    for _ in 0..k {
        let step = p1p2_step(trace.last())?;
        trace.steps.push(step);
    }
    Ok(trace)
}

pub fn run_recurrence_qudit(bd: &BellDiagD, k: usize) -> Result<RecurrenceTrace<BellDiagD>> {
    let mut trace = RecurrenceTrace {
        initial: bd.clone(),
        steps: Vec::with_capacity(k),
    };
    for _ in 0..k {
        let step = p1p2_step_qudit(trace.last())?;
        trace.steps.push(step);
    }
    Ok(trace)
}

/// Best value of `survival * yield` over `0..=k_max` recurrence steps,
/// returning `(value, k)`. Stops early if a step becomes degenerate.
pub fn best_over_k_qudit(bd: &BellDiagD, k_max: usize) -> (f64, usize) {
    let mut state = bd.clone();
    let mut survival = 1.0;
    let mut best = (qudit_yield(&state), 0);
    for k in 1..=k_max {
        let Ok(step) = p1p2_step_qudit(&state) else { break };
        survival *= step.prob * 0.5;
        state = step.state;
        let v = survival * qudit_yield(&state);
        if v > best.0 {
            best = (v, k);
        }
    }
    best
}
