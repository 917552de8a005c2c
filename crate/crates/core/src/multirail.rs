//! Multi-rail protocol: N photons spread over K rails, total photon number
//! measured at the receiver, then either reverse hashing or qudit
//! recurrence plus hashing on the post-measurement state.

use std::collections::{BTreeMap, HashMap};

use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;
use serde::Serialize;

use crate::bell::BellDiagD;
use crate::channel::CompositionForm;
use crate::config::MultirailBudget;
use crate::distill::best_over_k_qudit;
use crate::error::{check, Error, Result};
use crate::numeric::{csum, ln_binom, ln_pow, neg_plog2, CompensatedSum};
use crate::rate::{RateFlag, RATE_FLOOR};

/// Multi-indices of `rails` non-negative integers summing to `total`, in
/// lexicographic order with the first rail most significant.
#[derive(Clone, Debug)]
pub struct MultiIndexBasis {
    pub rails: usize,
    pub total: usize,
    elems: Vec<Vec<usize>>,
    index: HashMap<Vec<usize>, usize>,
}

impl MultiIndexBasis {
    pub fn new(rails: usize, total: usize) -> Self {
        let mut elems = Vec::new();
        let mut prefix = Vec::with_capacity(rails);
        fill(&mut elems, &mut prefix, rails, total);
        let index = elems.iter().enumerate().map(|(i, e)| (e.clone(), i)).collect();
        Self {
            rails,
            total,
            elems,
            index,
        }
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn get(&self, i: usize) -> &[usize] {
        &self.elems[i]
    }

    pub fn index_of(&self, v: &[usize]) -> Option<usize> {
        self.index.get(v).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = &[usize]> {
        self.elems.iter().map(|v| v.as_slice())
    }
}

fn fill(out: &mut Vec<Vec<usize>>, prefix: &mut Vec<usize>, rails: usize, remaining: usize) {
    if rails == 0 {
        return;
    }
    if rails == 1 {
        prefix.push(remaining);
        out.push(prefix.clone());
        prefix.pop();
        return;
    }
    for first in 0..=remaining {
        prefix.push(first);
        fill(out, prefix, rails - 1, remaining - first);
        prefix.pop();
    }
}

/// `binom(total + rails - 1, total)` as an integer.
pub fn basis_dim(rails: usize, total: usize) -> usize {
    let mut acc: u128 = 1;
    for j in 0..total {
        acc = acc * (rails as u128 + j as u128) / (j as u128 + 1);
    }
    acc.min(usize::MAX as u128) as usize
}

/// Probability that `rails` uses of the channel deliver `f` photons when `n`
/// photons are sent.
pub fn p_f(cf: &CompositionForm, n: usize, rails: usize, f: usize) -> f64 {
    let (g, lam) = (cf.g, cf.lambda);
    let ln_den = ln_pow(g, (rails + f) as f64);
    let mut acc = CompensatedSum::new();
    for p in 0..=f.min(n) {
        let t = ln_binom(n, p) + ln_binom(rails + f - 1, f - p) + ln_pow(lam, p as f64) + ln_pow(1.0 - lam, (n - p) as f64)
            + ln_pow(g - 1.0, (f - p) as f64)
            - ln_den;
        if t > f64::NEG_INFINITY {
            acc.add(t.exp());
        }
    }
    acc.value()
}

/// Exact `binom(n, k)` when it fits in 53 bits.
fn binom_exact(n: usize, k: usize) -> Option<f64> {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for j in 0..k {
        acc = acc * (n - j) as u128 / (j + 1) as u128;
        if acc > 1u128 << 53 {
            return None;
        }
    }
    Some(acc as f64)
}

/// Second expression for the same probability, with alternating signs.
/// Terms are formed by direct products so that cancellation is not made
/// worse by exp/ln round trips.
pub fn p_f_alt(cf: &CompositionForm, n: usize, rails: usize, f: usize) -> f64 {
    let (g, lam) = (cf.g, cf.lambda);
    let base = 1.0 + g * lam - g;
    let ln_den = ln_pow(g, (rails + f) as f64);
    let mut acc = CompensatedSum::new();
    for p in 0..=f.min(n) {
        let exact = binom_exact(n, p).zip(binom_exact(n + rails + f - p - 1, f - p));
        let term = match exact {
            Some((b1, b2)) if ln_den < 600.0 => {
                b1 * b2 * base.powi(p as i32) * (1.0 - lam).powi((n - p) as i32) * (g - 1.0).powi((f - p) as i32)
                    / g.powi((rails + f) as i32)
            }
            _ => {
                let t = ln_binom(n, p) + ln_binom(n + rails + f - p - 1, f - p) + ln_pow(base.abs(), p as f64)
                    + ln_pow(1.0 - lam, (n - p) as f64)
                    + ln_pow(g - 1.0, (f - p) as f64)
                    - ln_den;
                let sign = if base < 0.0 && p % 2 == 1 { -1.0 } else { 1.0 };
                sign * t.exp()
            }
        };
        acc.add(term);
    }
    acc.value()
}

/// One diagonal block of the post-measurement state. All rows `(a, b)` share
/// the same photon-number difference `n_a - h_b` between Alice and Bob.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Block {
    pub rows: Vec<(usize, usize)>,
    /// Row-major, `rows.len()^2` entries.
    pub values: Vec<f64>,
}

/// State conditioned on Bob counting `f` photons. Entries
/// `eta[(a, a'), (b, b')]` multiply `|a><a'| (x) |b><b'|`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PostMeasState {
    pub f: usize,
    pub n_photons: usize,
    pub rails: usize,
    pub dim_a: usize,
    pub dim_b: usize,
    /// Padded dimension `max(dim_a, dim_b)`.
    pub d: usize,
    pub p_f: f64,
    pub blocks: Vec<Block>,
}

impl PostMeasState {
    /// Non-zero coefficients as `(a, a', b, b', value)`.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, usize, usize, f64)> + '_ {
        self.blocks.iter().flat_map(|blk| {
            let s = blk.rows.len();
            (0..s).flat_map(move |r| {
                (0..s).map(move |c| {
                    let (a, b) = blk.rows[r];
                    let (a2, b2) = blk.rows[c];
                    (a, a2, b, b2, blk.values[r * s + c])
                })
            })
        })
    }

    pub fn trace(&self) -> f64 {
        csum(self.entries().filter(|e| e.0 == e.1 && e.2 == e.3).map(|e| e.4))
    }

    /// Diagonal of Alice's reduced state.
    pub fn reduced_a_diagonal(&self) -> Vec<f64> {
        let mut out = vec![CompensatedSum::new(); self.dim_a];
        for (a, a2, b, b2, v) in self.entries() {
            if a == a2 && b == b2 {
                out[a].add(v);
            }
        }
        out.iter().map(|s| s.value()).collect()
    }

    /// Dense `dim_a * dim_b` matrix, row index `a * dim_b + b`.
    pub fn dense(&self) -> DMatrix<f64> {
        let n = self.dim_a * self.dim_b;
        let mut m = DMatrix::zeros(n, n);
        for (a, a2, b, b2, v) in self.entries() {
            m[(a * self.dim_b + b, a2 * self.dim_b + b2)] = v;
        }
        m
    }
}

pub fn post_meas_state(cf: &CompositionForm, n: usize, rails: usize, f: usize) -> Result<PostMeasState> {
    check(rails >= 1, "K", rails as f64, "must be >= 1")?;
    let pf = p_f(cf, n, rails, f);
    if !(pf > 0.0) {
        return Err(Error::Degenerate("outcome has zero probability"));
    }
    let basis_a = MultiIndexBasis::new(rails, n);
    let basis_b = MultiIndexBasis::new(rails, f);
    let dim_a = basis_a.len();
    let dim_b = basis_b.len();

    // f_{x, y, l} for x, y <= n and l <= f
    let stride_l = f + 1;
    let mut fc = vec![0.0; (n + 1) * (n + 1) * stride_l];
    for x in 0..=n {
        for y in 0..=n {
            for l in 0..=f {
                fc[(x * (n + 1) + y) * stride_l + l] = cf.f_coeff(x, y, l);
            }
        }
    }
    let fval = |x: usize, y: usize, l: usize| fc[(x * (n + 1) + y) * stride_l + l];

    let mut groups: BTreeMap<Vec<i64>, Vec<(usize, usize)>> = BTreeMap::new();
    for (a, na) in basis_a.iter().enumerate() {
        for (b, hb) in basis_b.iter().enumerate() {
            let delta: Vec<i64> = na.iter().zip(hb).map(|(&x, &y)| x as i64 - y as i64).collect();
            groups.entry(delta).or_default().push((a, b));
        }
    }

    let norm = 1.0 / (pf * dim_a as f64);
    let blocks = groups
        .into_values()
        .map(|rows| {
            let s = rows.len();
            let mut values = vec![0.0; s * s];
            for (r, &(a, _)) in rows.iter().enumerate() {
                let nv = basis_a.get(a);
                for (c, &(a2, b2)) in rows.iter().enumerate() {
                    let iv = basis_a.get(a2);
                    let lv = basis_b.get(b2);
                    let mut prod = norm;
                    for j in 0..rails {
                        prod *= fval(nv[j], iv[j], lv[j]);
                    }
                    values[r * s + c] = prod;
                }
            }
            Block { rows, values }
        })
        .collect();

    Ok(PostMeasState {
        f,
        n_photons: n,
        rails,
        dim_a,
        dim_b,
        d: dim_a.max(dim_b),
        p_f: pf,
        blocks,
    })
}

/// Von Neumann entropy in bits of the block-diagonal state.
pub fn entropy(pm: &PostMeasState) -> f64 {
    let mut acc = CompensatedSum::new();
    for blk in &pm.blocks {
        let s = blk.rows.len();
        if s == 1 {
            acc.add(neg_plog2(blk.values[0]));
            continue;
        }
        let m = DMatrix::from_row_slice(s, s, &blk.values);
        let m = (&m + m.transpose()) * 0.5;
        for ev in SymmetricEigen::new(m).eigenvalues.iter() {
            acc.add(neg_plog2(*ev));
        }
    }
    acc.value()
}

/// Reverse coherent information `log2(dim_a) - S(rho)`.
pub fn reverse_ci(pm: &PostMeasState, matrix_cap: usize) -> Result<f64> {
    let dim = pm.dim_a * pm.dim_b;
    if dim > matrix_cap {
        return Err(Error::DimensionCap { dim, cap: matrix_cap });
    }
    Ok((pm.dim_a as f64).log2() - entropy(pm))
}

/// Overlaps with the qudit Bell states
/// `(1/sqrt d) sum_r e^{2 pi i m r/d} |r>|r-n>`, padding both sides to `d`.
pub fn qudit_twirl(pm: &PostMeasState) -> BellDiagD {
    let d = pm.d;
    let cos: Vec<f64> = (0..d)
        .map(|j| (2.0 * std::f64::consts::PI * j as f64 / d as f64).cos())
        .collect();
    let mut acc = vec![CompensatedSum::new(); d * d];
    for (a, a2, b, b2, v) in pm.entries() {
        let s = (a + d - b) % d;
        if (a2 + d - b2) % d != s {
            continue;
        }
        let shift = (a2 + d - a) % d;
        for m in 0..d {
            acc[m * d + s].add(cos[(m * shift) % d] * v / d as f64);
        }
    }
    BellDiagD {
        d,
        alpha: acc.iter().map(|x| x.value().max(0.0)).collect(),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FTerm {
    pub f: usize,
    pub p_f: f64,
    pub dim_a: usize,
    pub dim_b: usize,
    /// Reverse coherent information, absent when over the matrix cap.
    pub i_rc: Option<f64>,
    /// Best recurrence-plus-hashing yield, absent when over the qudit cap.
    pub recurrence: Option<f64>,
    pub k: Option<usize>,
    /// `max(i_rc, recurrence, 0)`.
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MultirailResult {
    pub rate: f64,
    pub n_photons: usize,
    pub rails: usize,
    pub terms: Vec<FTerm>,
    /// Outcome probability not covered by the evaluated terms.
    pub tail_mass: f64,
    /// Outcomes for which no branch fit under the caps.
    pub skipped: usize,
    pub flags: Vec<RateFlag>,
}

impl MultirailResult {
    fn zero(n: usize, rails: usize, flag: RateFlag) -> Self {
        Self {
            rate: 0.0,
            n_photons: n,
            rails,
            terms: Vec::new(),
            tail_mass: 0.0,
            skipped: 0,
            flags: vec![flag],
        }
    }

    pub fn has_flag(&self, flag: RateFlag) -> bool {
        self.flags.contains(&flag)
    }
}

fn f_term(cf: &CompositionForm, n: usize, rails: usize, f: usize, budget: &MultirailBudget) -> Result<FTerm> {
    let dim_a = basis_dim(rails, n);
    let dim_b = basis_dim(rails, f);
    let d = dim_a.max(dim_b);
    let want_matrix = dim_a.saturating_mul(dim_b) <= budget.matrix_cap;
    let want_qudit = d <= budget.qudit_cap;
    let mut term = FTerm {
        f,
        p_f: p_f(cf, n, rails, f),
        dim_a,
        dim_b,
        i_rc: None,
        recurrence: None,
        k: None,
        value: 0.0,
    };
    if !(want_matrix || want_qudit) || !(term.p_f > 0.0) {
        return Ok(term);
    }
    let pm = post_meas_state(cf, n, rails, f)?;
    if want_matrix {
        term.i_rc = Some(reverse_ci(&pm, budget.matrix_cap)?);
    }
    if want_qudit {
        let (v, k) = best_over_k_qudit(&qudit_twirl(&pm), budget.k_max);
        term.recurrence = Some(v);
        term.k = Some(k);
    }
    term.value = term.i_rc.unwrap_or(0.0).max(term.recurrence.unwrap_or(0.0)).max(0.0);
    Ok(term)
}

pub fn multirail_rate(cf: &CompositionForm, n: usize, rails: usize, budget: &MultirailBudget) -> Result<MultirailResult> {
    check(n >= 1, "N", n as f64, "must be >= 1")?;
    check(rails >= 2, "K", rails as f64, "must be >= 2")?;
    if cf.is_entanglement_breaking() {
        return Ok(MultirailResult::zero(n, rails, RateFlag::EntanglementBreaking));
    }
    let mut cumulative = CompensatedSum::new();
    let mut outcomes = Vec::new();
    for f in 0..=budget.f_max {
        let p = p_f(cf, n, rails, f);
        cumulative.add(p);
        if f >= 1 && p > 0.0 {
            outcomes.push(f);
        }
        if cumulative.value() >= 1.0 - budget.tail_tol {
            break;
        }
    }
    let terms: Vec<FTerm> = outcomes
        .par_iter()
        .map(|&f| f_term(cf, n, rails, f, budget))
        .collect::<Result<_>>()?;
    let skipped = terms.iter().filter(|t| t.i_rc.is_none() && t.recurrence.is_none()).count();
    if skipped > 0 {
        log::warn!("multi-rail N={n} K={rails}: {skipped} outcome(s) exceed both dimension caps and contribute 0");
    }
    let total = csum(terms.iter().map(|t| t.p_f * t.value));
    let mut res = MultirailResult {
        rate: total / rails as f64,
        n_photons: n,
        rails,
        terms,
        tail_mass: (1.0 - cumulative.value()).max(0.0),
        skipped,
        flags: Vec::new(),
    };
    if res.rate < RATE_FLOOR {
        if res.rate > 0.0 {
            res.flags.push(RateFlag::Clamped);
        }
        res.rate = 0.0;
    }
    Ok(res)
}

/// Best rate over `N <= n_max` and `2 <= K <= rails_max`; ties keep the
/// smaller N, then the smaller K.
pub fn optimize_multirail(cf: &CompositionForm, budget: &MultirailBudget) -> Result<MultirailResult> {
    let pairs: Vec<(usize, usize)> = (1..=budget.n_max)
        .flat_map(|n| (2..=budget.rails_max).map(move |k| (n, k)))
        .collect();
    let results: Vec<MultirailResult> = pairs
        .par_iter()
        .map(|&(n, k)| multirail_rate(cf, n, k, budget))
        .collect::<Result<_>>()?;
    let mut best = results[0].clone();
    for r in results.into_iter().skip(1) {
        if r.rate > best.rate {
            best = r;
        }
    }
    Ok(best)
}
