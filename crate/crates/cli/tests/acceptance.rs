//! One test per acceptance criterion. Each prints a single PASS/FAIL line
//! with the measured quantities, then asserts.

use std::f64::consts::PI;
use std::process::Command;
use std::sync::Mutex;
use std::time::{Duration, Instant};

use rand::Rng;

use cone_overlap::cone::{ConeSlab, DecompositionParams, RadialInterval};
use cone_overlap::experiments::{
    counterexample_study, epsilon_study, normalized_ratio, uniformity_study, CounterexampleSpec, LadderSpec,
};
use cone_overlap::lemma_checks::{
    check_cos_bounds, check_diam_bound, check_lemma_3_2, check_regroup_4_3, check_regroup_4_5, lemma_3_1_sweep,
    lemma_3_2_constant, lemma_3_3_sweep, lemma_3_4_sweep, quadratic_gap_sweep, regroup_4_4_sweep, ConstantsLedger,
};
use cone_overlap::minkowski::{
    bruteforce_witness, sum_contains_bruteforce, sum_contains_certified, BruteMode, SearchBudget, SumSpec,
};
use cone_overlap::sampling::{interior_param, param_point, rng_for, uniform_in_ball};
use cone_overlap::Verdict;

// Serializes the criteria so the runtime limits measure one criterion at a time.
static SERIAL: Mutex<()> = Mutex::new(());

fn report(id: u32, name: &str, pass: bool, elapsed: Duration, detail: &str) {
    let tag = if pass { "PASS" } else { "FAIL" };
    println!("[{tag}] criterion {id} ({name}) in {:.2}s: {detail}", elapsed.as_secs_f64());
}

fn within(elapsed: Duration, minutes: u64) -> bool {
    elapsed <= Duration::from_secs(60 * minutes)
}

#[test]
fn criterion_1_uniformity_ladder() {
    let _g = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let t = Instant::now();
    let spec = LadderSpec::new(vec![1e-2, 2.5e-3, 6.25e-4], 200, 0);
    let table = uniformity_study(&spec, 1.3, 1.3).unwrap();
    let el = t.elapsed();
    let unknown_ok = table.rows.iter().all(|r| r.unknown_fraction < 0.01);
    let maxima: Vec<_> = table.rows.iter().map(|r| r.max_with_unknown).collect();
    let fractions: Vec<_> = table.rows.iter().map(|r| r.unknown_fraction).collect();
    let pass = table.pass && unknown_ok && within(el, 5);
    report(
        1,
        "uniformity ladder",
        pass,
        el,
        &format!("max_with_unknown {maxima:?} (tolerance +20%), unknown_fraction {fractions:?} (< 0.01)"),
    );
    assert!(pass);
}

#[test]
fn criterion_2_wide_cone_counterexample() {
    let _g = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let t = Instant::now();
    let spec = CounterexampleSpec {
        a_angle: 3.0 * PI / 4.0,
        b: 1.3,
        taus: vec![1e4, 4e4, 1.6e5],
    };
    let table = counterexample_study(&spec, 100, 0).unwrap();
    let el = t.elapsed();
    let counts: Vec<_> = table.rows.iter().map(|r| r.oracle_count).collect();
    let increasing = counts.windows(2).all(|w| w[1] > w[0]);
    let exponent_ok = (0.4..=0.6).contains(&table.exponent);
    let standard_zero = table.rows.iter().all(|r| r.standard_count == 0);
    let agreement_ok = table
        .rows
        .iter()
        .all(|r| r.checked > 0 && r.agree as f64 >= 0.99 * r.checked as f64);
    let agreement: Vec<_> = table.rows.iter().map(|r| format!("{}/{}", r.agree, r.checked)).collect();
    let pass = increasing && exponent_ok && standard_zero && agreement_ok && within(el, 2);
    report(
        2,
        "wide-cone counterexample",
        pass,
        el,
        &format!(
            "oracle counts {counts:?}, exponent {:.4} (in [0.4, 0.6]), standard counts zero {standard_zero}, agreement {agreement:?} (>= 99%)",
            table.exponent
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_3_epsilon_scaling() {
    let _g = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let t = Instant::now();
    let spec = LadderSpec::new(vec![1e-2, 1e-3, 1e-4], 100, 0).with_epsilon(0.3);
    let table = epsilon_study(&spec, 1.3, 1.3).unwrap();
    let el = t.elapsed();
    let ratio = normalized_ratio(&table);
    let normalized: Vec<_> = table.rows.iter().map(|r| format!("{:.3}", r.normalized)).collect();
    let pass = table.pass && ratio <= 4.0 && within(el, 10);
    report(
        3,
        "epsilon-variant scaling",
        pass,
        el,
        &format!("max count * delta^eps {normalized:?}, max/min {ratio:.3} (<= 4)"),
    );
    assert!(pass);
}

#[test]
fn criterion_4_displayed_inequalities() {
    let _g = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let t = Instant::now();
    let delta = 1e-4;
    let params = DecompositionParams::standard(delta).unwrap();
    let m = params.index_bound().unwrap() as u64;
    let cos = check_cos_bounds(m, m, delta);

    let j1 = RadialInterval::pinned(1.3, &params).unwrap();
    let j2 = RadialInterval::pinned(1.7, &params).unwrap();
    let mut rng = rng_for(0, 4);
    let mut diam_ok = true;
    let mut worst: f64 = 0.0;
    for i in 0..20 {
        let s = rng.gen_range(0..=m);
        let l = rng.gen_range(0..=s);
        let r = check_diam_bound(&params, j1, j2, l, s - l, 10_000, i).unwrap();
        diam_ok &= r.pass;
        worst = worst.max(r.spread / r.bound);
    }

    let (gap, argmax) = quadratic_gap_sweep(10_000);
    let el = t.elapsed();
    let pass = cos.pass && cos.violations.is_empty() && diam_ok && within(el, 1);
    report(
        4,
        "displayed inequalities",
        pass,
        el,
        &format!(
            "cos cells {} violations {} (tolerance 1e-12); diam 20 cells pass {diam_ok}, worst spread/bound {worst:.3}; quadratic gap max {gap} at ell {argmax}",
            cos.cells,
            cos.violations.len()
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_5_containment_suite() {
    let _g = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let t = Instant::now();
    let samples = 10_000;
    let mut lines = Vec::new();

    let mut l32_ok = true;
    for (c1, c2) in [(1.0, 1.0), (2.0, 3.0)] {
        for delta in [1e-3, 1e-4] {
            let r = check_lemma_3_2(c1, c2, delta, 5);
            l32_ok &= r.pass && r.c0_prime == lemma_3_2_constant(c1, c2);
        }
    }
    lines.push(format!("lemma 3.2 pass {l32_ok}"));

    let ledger = ConstantsLedger::calibrate(1.3, 1.7, samples, 0).unwrap();
    let mut series: [(&str, f64, Vec<f64>); 5] = [
        ("b2", ledger.b2.value, vec![]),
        ("b3", ledger.b3.value, vec![]),
        ("c1p", ledger.c1p.value, vec![]),
        ("c2p", ledger.c2p.value, vec![]),
        ("a0", f64::INFINITY, vec![]),
    ];
    let mut hypotheses_ok = true;
    for delta in [1e-2, 1e-3, 1e-4] {
        let params = DecompositionParams::standard(delta).unwrap();
        let j1 = RadialInterval::pinned(1.3, &params).unwrap();
        let j2 = RadialInterval::pinned(1.7, &params).unwrap();
        let s31 = lemma_3_1_sweep(&params, j1, j2, ledger.b1.value, samples).unwrap();
        let s33 = lemma_3_3_sweep(&params, j1, j2, ledger.c1.value, ledger.c2.value, samples).unwrap();
        let a0 = lemma_3_4_sweep(&params, j1, j2, ledger.c1.value, ledger.c2.value, samples).unwrap();
        hypotheses_ok &= s31.cells > 0 && s33.hits > 0;
        for (slot, v) in series.iter_mut().zip([s31.b2, s31.b3, s33.c1p, s33.c2p, a0]) {
            slot.2.push(v);
        }
    }
    let mut consts_ok = hypotheses_ok;
    for (name, bound, vals) in &series {
        let lo = vals.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = vals.iter().copied().fold(0.0, f64::max);
        let ratio = hi / lo;
        let ok = lo > 0.0 && hi.is_finite() && ratio <= 2.0 && hi <= *bound;
        consts_ok &= ok;
        lines.push(format!("{name} {vals:.3?} max/min {ratio:.3} ledger {bound:.3} ok {ok}"));
    }
    let el = t.elapsed();
    let pass = l32_ok && consts_ok && within(el, 5);
    report(5, "containment suite", pass, el, &lines.join("; "));
    assert!(pass);
}

#[test]
fn criterion_6_regrouping_chain() {
    let _g = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let t = Instant::now();
    let mut failed = Vec::new();
    for delta in [1e-3, 1e-4, 1e-6] {
        for eps in [0.1, 0.3, 0.45] {
            if !check_regroup_4_3(delta, eps).unwrap() {
                failed.push(format!("4.3@({delta},{eps})"));
            }
            let r45 = check_regroup_4_5(delta, eps).unwrap();
            if !r45.pass {
                failed.push(format!("4.5@({delta},{eps}) worst ell {} > {:.2}", r45.worst_ell, r45.bound));
            }
            let r44 = regroup_4_4_sweep(delta, eps, 1.3, 10_000, 0).unwrap();
            if !r44.pass {
                failed.push(format!(
                    "4.4@({delta},{eps}) {}/{} failures ({} vertical)",
                    r44.failures, r44.samples, r44.vertical_failures
                ));
            }
        }
    }
    let el = t.elapsed();
    let pass = failed.is_empty() && within(el, 3);
    let detail = if failed.is_empty() {
        "all 9 cells pass 4.3, 4.4, 4.5".to_string()
    } else {
        format!("failing cells: {}", failed.join("; "))
    };
    report(6, "regrouping chain", pass, el, &detail);
    assert!(pass);
}

#[test]
fn criterion_7_oracle_equivalence() {
    let _g = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let t = Instant::now();
    let budget = SearchBudget::default();
    let mut contradictions = 0;
    let mut tally = [0usize; 3];
    for (k, delta) in [1e-2, 1e-3].into_iter().enumerate() {
        let params = DecompositionParams::standard(delta).unwrap();
        let m = params.index_bound().unwrap();
        let j1 = RadialInterval::pinned(1.3, &params).unwrap();
        let j2 = RadialInterval::pinned(1.5, &params).unwrap();
        let mut rng = rng_for(0, 7 + k as u64);
        for i in 0..1000 {
            let mu = rng.gen_range(-m..=m);
            let nu = (mu + rng.gen_range(-3..=3)).clamp(-m, m);
            let sp = SumSpec::new(
                ConeSlab::standard(params, mu, j1).unwrap(),
                ConeSlab::standard(params, nu, j2).unwrap(),
            )
            .unwrap();
            let (a, b) = (sp.slab_a.shape(), sp.slab_b.shape());
            let jitter = if i % 2 == 0 { 4.0 * delta } else { 2.0 * delta.sqrt() };
            let p = param_point(&a, interior_param(&a, 0.0, &mut rng))
                + param_point(&b, interior_param(&b, 0.0, &mut rng))
                + uniform_in_ball(jitter, &mut rng);
            match sum_contains_certified(&sp, p, &budget) {
                Verdict::In => {
                    tally[0] += 1;
                    if !sum_contains_bruteforce(&sp, p, 24) {
                        contradictions += 1;
                    }
                }
                Verdict::Out => {
                    tally[1] += 1;
                    if bruteforce_witness(&sp, p, 24, BruteMode::Strict).is_some() {
                        contradictions += 1;
                    }
                }
                Verdict::Unknown { .. } => tally[2] += 1,
            }
        }
    }
    let el = t.elapsed();
    let pass = contradictions == 0 && within(el, 5);
    report(
        7,
        "oracle equivalence",
        pass,
        el,
        &format!("2000 points: in {} out {} unknown {}, contradictions {contradictions}", tally[0], tally[1], tally[2]),
    );
    assert!(pass);
}

fn run_cli(args: &[&str], threads: &str) -> (Vec<u8>, i32) {
    let out = Command::new(env!("CARGO_BIN_EXE_cone-overlap"))
        .args(args)
        .env("OVERLAP_THREADS", threads)
        .output()
        .expect("binary runs");
    (out.stdout, out.status.code().unwrap_or(-1))
}

#[test]
fn criterion_8_determinism() {
    let _g = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let t = Instant::now();
    let commands: [&[&str]; 8] = [
        &["uniformity"],
        &["counterexample"],
        &["epsilon-scan", "--deltas", "1e-2,1e-3"],
        &["lemma", "diam", "--samples", "2000"],
        &["lemma", "ledger"],
        &["regroup", "4.4", "--delta", "1e-4", "--epsilon", "0.3"],
        &["scan", "--delta", "1e-3", "--points", "50", "--format", "json"],
        &["lemma", "3.2", "--delta", "1e-3", "--c1", "2", "--c2", "3"],
    ];
    let mut differing = Vec::new();
    for args in commands {
        let a = run_cli(args, "1");
        let b = run_cli(args, "0");
        if a != b || a.0.is_empty() {
            differing.push(args.join(" "));
        }
    }
    let el = t.elapsed();
    let pass = differing.is_empty();
    let detail = if pass {
        format!("{} commands byte-identical across repeated runs and thread counts", commands.len())
    } else {
        format!("differing: {differing:?}")
    };
    report(8, "determinism", pass, el, &detail);
    assert!(pass);
}
