//! End-to-end acceptance checks. Runs as a plain binary so that every
//! criterion prints exactly one status line, even on success.

use std::time::Instant;

use nalgebra::DMatrix;
use pibgc::baselines::{
    bosonic_entropy, ci_asymptotic, ci_tmsv, npj_bound, plob_upper, rci_asymptotic, rci_tmsv,
};
use pibgc::bell::{conditional_is_distillable, BellDiag2};
use pibgc::config::{MultirailBudget, NpjBudget, OptBudget};
use pibgc::distill::{hashing_yield, p1p2_step, plain_hashing_yield};
use pibgc::gaussian::{choi_cov, simon_entangled};
use pibgc::multirail::{multirail_rate, optimize_multirail};
use pibgc::rate::{optimize, RateFlag};
use pibgc::verify::{eb_grid, run_suite, VerifyOptions};
use pibgc::{CompositionForm, PiBGC};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn att(lambda: f64, nu: f64) -> PiBGC {
    PiBGC::attenuator(lambda, nu).unwrap()
}

fn criterion_1() -> Outcome {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let cf = att(0.75, 1.0).to_composition();
    let t0 = Instant::now();
    let r = pool.install(|| optimize(&cf, None, &OptBudget::default())).unwrap();
    let secs = t0.elapsed().as_secs_f64();
    let ok = (0.031..=0.035).contains(&r.rate)
        && r.m == 2
        && r.k == 2
        && (0.69..=0.72).contains(&r.c)
        && secs < 60.0;
    outcome(
        ok,
        format!("rate={:.5} M={} c={:.4} k={} in {:.1}s on one thread", r.rate, r.m, r.c, r.k, secs),
    )
}

fn criterion_2() -> Outcome {
    let ch = att(0.75, 1.0);
    let r = optimize(&ch.to_composition(), None, &OptBudget::default()).unwrap();
    let ratio = r.rate / plob_upper(&ch).value;
    outcome((0.075..=0.085).contains(&ratio), format!("rate/PLOB={ratio:.4}"))
}

fn criterion_3() -> Outcome {
    let t0 = Instant::now();
    let mut ok = true;
    let mut parts = Vec::new();
    for nu in [20.0, 50.0] {
        let lambda = 1.0 - 2f64.powf(-bosonic_entropy(nu));
        let ch = att(lambda, nu);
        let r = optimize(&ch.to_composition(), None, &OptBudget::default()).unwrap();
        let ratio = r.rate / plob_upper(&ch).value;
        ok &= (0.12..=0.16).contains(&ratio);
        parts.push(format!("nu={nu}: rate/PLOB={ratio:.4}"));
    }
    let secs = t0.elapsed().as_secs_f64();
    ok &= secs < 600.0;
    outcome(ok, format!("{} in {:.1}s", parts.join(", "), secs))
}

fn criterion_4() -> Outcome {
    let budget = OptBudget {
        k_max: 30,
        ..OptBudget::default()
    };
    let mut ok = true;
    let mut parts = Vec::new();
    for lambda in [0.55, 0.6, 0.7] {
        let r = optimize(&att(lambda, 1.0).to_composition(), None, &budget).unwrap();
        ok &= r.rate > 0.0;
        parts.push(format!("{lambda}:{:.3e}", r.rate));
    }
    let npj = NpjBudget::default();
    let mr = MultirailBudget::default();
    for lambda in [0.3, 0.5] {
        let ch = att(lambda, 1.0);
        let cf = ch.to_composition();
        let r = optimize(&cf, None, &budget).unwrap();
        let m = optimize_multirail(&cf, &mr).unwrap();
        ok &= ch.is_entanglement_breaking();
        ok &= r.rate == 0.0 && r.has_flag(RateFlag::EntanglementBreaking);
        ok &= m.rate == 0.0 && m.has_flag(RateFlag::EntanglementBreaking);
        ok &= plob_upper(&ch).value == 0.0;
        ok &= ci_asymptotic(&ch).value == 0.0 && rci_asymptotic(&ch).unwrap().value == 0.0;
        for ns in [0.1, 1.0, 10.0, 100.0] {
            ok &= ci_tmsv(&ch, ns).unwrap().value == 0.0;
            ok &= rci_tmsv(&ch, ns).unwrap().value == 0.0;
            ok &= npj_bound(&ch, ns, &npj).unwrap().value == 0.0;
        }
        parts.push(format!("{lambda}:EB"));
    }
    outcome(ok, parts.join(" "))
}

fn criterion_5() -> Outcome {
    let mut disagreements = 0;
    for cf in eb_grid() {
        let a = conditional_is_distillable(&cf);
        let b = simon_entangled(&choi_cov(&cf, 1.0));
        let c = !cf.is_entanglement_breaking();
        if a != b || b != c {
            disagreements += 1;
        }
    }
    outcome(disagreements == 0, format!("{disagreements} disagreements over 1600 points"))
}

fn suite_check(name: &str) -> Outcome {
    let report = run_suite(&VerifyOptions::default());
    let c = report.checks.iter().find(|c| c.name == name).unwrap();
    outcome(
        c.passed,
        format!("{}: max error {:.3e} (tol {:.0e})", c.name, c.max_error, c.tolerance),
    )
}

fn criterion_8() -> Outcome {
    let a = suite_check("p_f-dual-formula");
    let b = suite_check("p_f-normalization");
    outcome(a.passed && b.passed, format!("{}; {}", a.detail, b.detail))
}

fn criterion_9() -> Outcome {
    let r = rci_tmsv(&att(0.9, 1.0), 1e4).unwrap().value;
    let expect = -bosonic_entropy(1.0) - 0.1f64.log2();
    outcome((r - expect).abs() < 1e-3, format!("RCI={r:.6} limit={expect:.6}"))
}

/// Von Neumann entropy (bits) of a dense symmetric matrix.
fn dense_entropy(m: DMatrix<f64>) -> f64 {
    m.symmetric_eigenvalues()
        .iter()
        .filter(|&&x| x > 0.0)
        .map(|&x| -x * x.log2())
        .sum()
}

/// One photon shared by two rails, sent through pure loss rail by rail,
/// conditioned on the total count F. Bob's space is indexed by the pair of
/// per-rail counts (h0, h1) with h0, h1 <= 1.
fn brute_force_single_photon(cf: &CompositionForm) -> f64 {
    // Alice label a in {0, 1} is entangled with the photon sitting in rail a.
    let input = |a: usize| if a == 0 { [1usize, 0] } else { [0, 1] };
    let mut total = 0.0;
    for f in 0..=2usize {
        let mut rho = DMatrix::<f64>::zeros(8, 8);
        for a in 0..2 {
            for a2 in 0..2 {
                let (n, i) = (input(a), input(a2));
                let r0 = cf.channel_action_fock(n[0], i[0], 1).unwrap();
                let r1 = cf.channel_action_fock(n[1], i[1], 1).unwrap();
                for e0 in &r0.entries {
                    for e1 in &r1.entries {
                        if e0.ket > 1 || e1.ket > 1 || e0.ket + e1.ket != f || e0.bra + e1.bra != f {
                            continue;
                        }
                        let row = a * 4 + e0.ket * 2 + e1.ket;
                        let col = a2 * 4 + e0.bra * 2 + e1.bra;
                        rho[(row, col)] += 0.5 * e0.coeff * e1.coeff;
                    }
                }
            }
        }
        let p = rho.trace();
        if p <= 0.0 {
            continue;
        }
        let s = dense_entropy(rho / p);
        // Both outcomes are extreme (a perfect ebit or a product state), so
        // no recurrence yield can beat the reverse coherent information.
        total += p * (1.0 - s).max(0.0);
    }
    total / 2.0
}

fn criterion_10() -> Outcome {
    let budget = MultirailBudget::default();
    let cf = CompositionForm::new(1.0, 0.9).unwrap();
    let r = multirail_rate(&cf, 1, 2, &budget).unwrap();
    let oracle = brute_force_single_photon(&cf);
    let mut ok = (r.rate - oracle).abs() < 1e-9;
    let mut winner = None;
    for j in 0..=8 {
        let lambda = 0.55 + 0.05 * j as f64;
        let cf = att(lambda, 0.5).to_composition();
        let m = optimize_multirail(&cf, &budget).unwrap().rate;
        let q = optimize(&cf, None, &OptBudget::default()).unwrap().rate;
        if m > q {
            winner = Some((lambda, m, q));
            break;
        }
    }
    ok &= winner.is_some();
    let tail = match winner {
        Some((l, m, q)) => format!("nu=0.5 lambda={l:.2}: multi-rail {m:.4e} > single-pair {q:.4e}"),
        None => "no lambda at nu=0.5 where multi-rail wins".into(),
    };
    outcome(ok, format!("rate={:.12} oracle={:.12}; {}", r.rate, oracle, tail))
}

fn criterion_11() -> Outcome {
    let mut rng = StdRng::seed_from_u64(11);
    let mut worst = 0f64;
    let mut yield_ok = true;
    for _ in 0..1000 {
        let w: [f64; 4] = std::array::from_fn(|_| rng.gen::<f64>());
        let s: f64 = w.iter().sum();
        let mut bd = BellDiag2::from_array(w.map(|x| x / s));
        yield_ok &= hashing_yield(&bd) >= plain_hashing_yield(&bd);
        for _ in 0..5 {
            let Ok(step) = p1p2_step(&bd) else { break };
            worst = worst.max((step.state.sum() - 1.0).abs());
            bd = step.state;
        }
    }
    let ebit = p1p2_step(&BellDiag2::from_array([1.0, 0.0, 0.0, 0.0])).unwrap();
    let mixed = p1p2_step(&BellDiag2::from_array([0.25; 4])).unwrap();
    let fixed = ebit.prob == 1.0
        && ebit.state.to_array() == [1.0, 0.0, 0.0, 0.0]
        && mixed.prob == 0.5
        && mixed.state.to_array().iter().all(|&x| (x - 0.25).abs() < 1e-15);
    outcome(
        worst <= 1e-12 && fixed && yield_ok,
        format!("max normalization drift {worst:.2e}; fixed points ok={fixed}; Y >= 1-H ok={yield_ok}"),
    )
}

/// Channels and energies shared by the ordering checks.
fn sweep_grid() -> Vec<PiBGC> {
    let mut out = Vec::new();
    for nu in [0.5, 1.0, 10.0] {
        for j in 0..10 {
            out.push(att(0.5 + 0.05 * j as f64, nu));
        }
    }
    for g in [1.1, 1.3, 1.6, 2.5] {
        out.push(PiBGC::amplifier(g, 1.0).unwrap());
    }
    for xi in [0.05, 0.2, 0.5, 0.9] {
        out.push(PiBGC::additive(xi).unwrap());
    }
    out
}

fn criterion_12() -> Outcome {
    let opt = OptBudget::default();
    let npj = NpjBudget::default();
    let mr = MultirailBudget::default();
    let mut failures = Vec::new();
    for ch in sweep_grid() {
        let cf = ch.to_composition();
        let plob = plob_upper(&ch).value;
        let free = optimize(&cf, None, &opt).unwrap().rate;
        let mut lower = vec![("new", free), ("CI", ci_asymptotic(&ch).value)];
        if let Ok(r) = rci_asymptotic(&ch) {
            lower.push(("RCI", r.value));
        }
        lower.push(("multirail", optimize_multirail(&cf, &mr).unwrap().rate));
        for ns in [0.1, 1.0, 10.0] {
            let ci = ci_tmsv(&ch, ns).unwrap().value;
            let rci = rci_tmsv(&ch, ns).map(|b| b.value).unwrap_or(0.0);
            let n = npj_bound(&ch, ns, &npj).unwrap().value;
            let ec = optimize(&cf, Some(ns), &opt).unwrap().rate;
            if n < ci.max(rci) {
                failures.push(format!("{ch:?} ns={ns}: NPJ {n} < {}", ci.max(rci)));
            }
            if ec > free {
                failures.push(format!("{ch:?} ns={ns}: constrained {ec} > free {free}"));
            }
            lower.extend([("CI_EC", ci), ("RCI_EC", rci), ("NPJ", n), ("new_EC", ec)]);
        }
        for (name, v) in lower {
            if v > plob + 1e-9 {
                failures.push(format!("{ch:?}: {name} {v} > PLOB {plob}"));
            }
        }
    }
    let n = sweep_grid().len();
    let detail = if failures.is_empty() {
        format!("{n} channels, 3 energies each")
    } else {
        failures.join("; ")
    };
    outcome(failures.is_empty(), detail)
}

fn main() {
    let criteria: [(u32, &str, fn() -> Outcome); 12] = [
        (1, "golden point", criterion_1),
        (2, "ratio to PLOB", criterion_2),
        (3, "large-nu plateau", criterion_3),
        (4, "positivity region", criterion_4),
        (5, "distillability equivalence", criterion_5),
        (6, "Simon closed form", || suite_check("simon-closed-form")),
        (7, "Kraus trace preservation", || suite_check("kraus-trace-preservation")),
        (8, "dual P_F and normalization", criterion_8),
        (9, "RCI asymptote", criterion_9),
        (10, "multi-rail oracle and advantage", criterion_10),
        (11, "recurrence engine", criterion_11),
        (12, "bound ordering", criterion_12),
    ];
    let mut failed = 0;
    for (id, name, run) in criteria {
        let t0 = Instant::now();
        let o = run();
        let status = if o.passed { "PASS" } else { "FAIL" };
        println!(
            "criterion {id:>2} {status} {name}: {} [{:.1}s]",
            o.detail,
            t0.elapsed().as_secs_f64()
        );
        if !o.passed {
            failed += 1;
        }
    }
    println!("acceptance: {} passed, {} failed", 12 - failed, failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
