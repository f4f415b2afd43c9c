use rand::Rng;

use cone_overlap::cone::{DecompositionParams, RadialInterval, SlabVariant};
use cone_overlap::experiments::{
    counterexample_study, epsilon_study, uniformity_study, CounterexampleSpec, LadderSpec,
};
use cone_overlap::lemma_checks as lc;
use cone_overlap::overlap::{fiber, overlap_scan, pair_verdicts, ClassIndex, CountOptions};
use cone_overlap::sampling::rng_for;
use cone_overlap::Point3;

use crate::report::{Cell, Report};
use crate::{CliError, Command, Common, Intervals, LemmaArgs, VariantArg};

fn intervals(params: &DecompositionParams, j: &Intervals) -> Result<(RadialInterval, RadialInterval), CliError> {
    let w = j.width.unwrap_or_else(|| params.sqrt_delta());
    let j1 = RadialInterval::new(j.j1, j.j1 + w)?;
    let j2 = RadialInterval::new(j.j2, j.j2 + w)?;
    j1.check_width(params)?;
    j2.check_width(params)?;
    Ok((j1, j2))
}

fn variant(v: VariantArg, epsilon: Option<f64>, delta: f64) -> Result<(SlabVariant, DecompositionParams), CliError> {
    Ok(match v {
        VariantArg::Standard => (SlabVariant::Standard, DecompositionParams::standard(delta)?),
        VariantArg::Enlarged => (SlabVariant::Enlarged, DecompositionParams::starred(delta)?),
        VariantArg::Eps => {
            let e = epsilon.ok_or_else(|| CliError::Usage("--epsilon is required with --variant eps".into()))?;
            (SlabVariant::eps(e)?, DecompositionParams::standard(delta)?)
        }
    })
}

fn class_index(a: f64) -> Result<ClassIndex, CliError> {
    let twice = 2.0 * a;
    if twice.fract() != 0.0 {
        return Err(CliError::Usage(format!("--a must be a half-integer, got {a}")));
    }
    Ok(ClassIndex::from_twice(twice as i64))
}

pub(crate) fn dispatch(cmd: &Command, common: &Common) -> Result<Report, CliError> {
    let budget = common.budget();
    let seed = common.seed;
    match cmd {
        Command::Scan { delta, j, points, variant: v, epsilon } => {
            let (var, params) = variant(*v, *epsilon, *delta)?;
            let (j1, j2) = intervals(&params, j)?;
            let rep = overlap_scan(&params, j1, j2, var, *points, seed, &budget)?;
            let mut out = Report::new(&["delta", "point_id", "xi1", "xi2", "eta", "certified_in", "unknown", "pairs_tested"]);
            for r in &rep.rows {
                out.push(vec![
                    (*delta).into(),
                    r.point_id.into(),
                    r.p.x1.into(),
                    r.p.x2.into(),
                    r.p.eta.into(),
                    r.count.certified_in.into(),
                    r.count.unknown.into(),
                    r.count.pairs_tested.into(),
                ]);
            }
            Ok(out)
        }
        Command::Point { delta, j, xi1, xi2, eta, variant: v, epsilon } => {
            let (var, params) = variant(*v, *epsilon, *delta)?;
            let (j1, j2) = intervals(&params, j)?;
            let p = Point3::new(*xi1, *xi2, *eta);
            let (_, verdicts) = pair_verdicts(p, &params, j1, j2, var, &budget, CountOptions::default())?;
            let mut out = Report::new(&["mu", "nu", "a", "verdict"]);
            for (mu, nu, v) in verdicts {
                let a = ClassIndex::from_twice(mu.0 + nu.0);
                out.push(vec![mu.0.into(), nu.0.into(), a.value().into(), v.label().into()]);
            }
            Ok(out)
        }
        Command::Fiber { delta, a } => {
            let params = DecompositionParams::standard(*delta)?;
            let f = fiber(class_index(*a)?, &params);
            let mut out = Report::new(&["a", "mu", "nu"]);
            for (mu, nu) in f.pairs {
                out.push(vec![f.a.value().into(), mu.0.into(), nu.0.into()]);
            }
            Ok(out)
        }
        Command::Lemma { name, args } => lemma(name, args, seed),
        Command::Regroup { name, delta, epsilon, mu, j1, samples } => regroup(name, *delta, *epsilon, *mu, *j1, *samples, seed),
        Command::Uniformity { deltas, j1, j2, points } => {
            let t = uniformity_study(&LadderSpec::new(deltas.clone(), *points, seed), *j1, *j2)?;
            let mut out = Report::new(&["delta", "points", "max_certified", "max_with_unknown", "unknown_fraction"]);
            for r in &t.rows {
                out.push(vec![
                    r.delta.into(),
                    r.points.into(),
                    r.max_certified.into(),
                    r.max_with_unknown.into(),
                    r.unknown_fraction.into(),
                ]);
            }
            out.pass = t.pass;
            Ok(out)
        }
        Command::EpsilonScan { epsilon, deltas, j1, j2, points } => {
            let spec = LadderSpec::new(deltas.clone(), *points, seed).with_epsilon(*epsilon);
            let t = epsilon_study(&spec, *j1, *j2)?;
            let mut out = Report::new(&["delta", "epsilon", "points", "max_count", "normalized", "unknown_fraction"]);
            for r in &t.rows {
                out.push(vec![
                    r.delta.into(),
                    (*epsilon).into(),
                    r.points.into(),
                    r.max_with_unknown.into(),
                    r.normalized.into(),
                    r.unknown_fraction.into(),
                ]);
            }
            out.pass = t.pass;
            Ok(out)
        }
        Command::Counterexample { a, b, taus, subsample } => {
            let spec = CounterexampleSpec { a_angle: *a, b: *b, taus: taus.clone() };
            let t = counterexample_study(&spec, *subsample, seed)?;
            let mut out = Report::new(&[
                "tau",
                "oracle_count",
                "standard_count",
                "checked",
                "agree",
                "unknown",
                "contradictions",
                "exponent",
            ]);
            for r in &t.rows {
                out.push(vec![
                    r.tau.into(),
                    r.oracle_count.into(),
                    r.standard_count.into(),
                    r.checked.into(),
                    r.agree.into(),
                    r.unknown.into(),
                    r.contradictions.into(),
                    t.exponent.into(),
                ]);
            }
            out.pass = t.pass;
            Ok(out)
        }
    }
}

fn lemma(name: &str, a: &LemmaArgs, seed: u64) -> Result<Report, CliError> {
    let params = DecompositionParams::standard(a.delta)?;
    let delta = a.delta;
    let j1 = RadialInterval::pinned(a.j1, &params)?;
    let j2 = RadialInterval::pinned(a.j2, &params)?;
    let (lo1, hi1) = j1.thickened(delta);
    let (lo2, hi2) = j2.thickened(delta);
    let eta_p = a.eta_p.unwrap_or(0.5 * (lo1 + hi1));
    let eta_pp = a.eta_pp.unwrap_or(0.5 * (lo2 + hi2));
    let eta = a.eta.unwrap_or(eta_p + eta_pp);
    let ledger = || lc::ConstantsLedger::calibrate(a.j1, a.j2, a.samples, seed);
    let m_bound = params.index_bound().unwrap_or(0) as u64;

    let out = match name {
        "cos" => {
            let r = lc::check_cos_bounds(m_bound, m_bound, delta);
            let mut out = Report::new(&["delta", "cells", "max_violation", "violations", "pass"]);
            out.push(vec![delta.into(), r.cells.into(), r.max_violation.into(), r.violations.len().into(), r.pass.into()]);
            out.pass = r.pass;
            out
        }
        "diam" => {
            let cells: Vec<(u64, u64)> = match (a.ell, a.m) {
                (Some(l), Some(m)) => vec![(l as u64, m)],
                _ => {
                    let mut rng = rng_for(seed, 0);
                    (0..20)
                        .map(|_| {
                            let s = rng.gen_range(0..=m_bound);
                            let l = rng.gen_range(0..=s);
                            (l, s - l)
                        })
                        .collect()
                }
            };
            let mut out = Report::new(&["delta", "ell", "m", "spread", "bound", "pass"]);
            for (i, &(l, m)) in cells.iter().enumerate() {
                let r = lc::check_diam_bound(&params, j1, j2, l, m, a.samples, seed ^ i as u64)?;
                out.pass &= r.pass;
                out.push(vec![delta.into(), l.into(), m.into(), r.spread.into(), r.bound.into(), r.pass.into()]);
            }
            out
        }
        "quadratic" => {
            let top = a.ell.map(|l| l as u64).unwrap_or(10_000);
            let (max, at) = lc::quadratic_gap_sweep(top);
            let mut out = Report::new(&["ell_max", "m_at_zero", "max_m", "argmax"]);
            out.push(vec![top.into(), lc::check_quadratic_gap(0).into(), max.into(), at.into()]);
            out
        }
        "slice" => {
            let ell = a.ell.unwrap_or(0.0);
            let (c1, c2) = (a.c1.unwrap_or(f64::INFINITY), a.c2.unwrap_or(f64::INFINITY));
            let r = lc::check_slice_rectangle(&params, class_index(a.a)?, ell, j1, j2, eta_p, eta_pp, c1, c2, a.samples, seed)?;
            let mut out = Report::new(&["delta", "a", "ell", "eta_p", "eta_pp", "c1", "c2", "c1_tight", "c2_tight", "pass"]);
            out.push(vec![
                delta.into(),
                a.a.into(),
                ell.into(),
                eta_p.into(),
                eta_pp.into(),
                c1.into(),
                c2.into(),
                r.c1.into(),
                r.c2.into(),
                r.pass.into(),
            ]);
            out.pass = r.pass;
            out
        }
        "3.1" => {
            let mut out = Report::new(&["delta", "b1", "cells", "skipped", "b2", "b3", "pass"]);
            let (cells, skipped, b2, b3) = match a.ell {
                Some(ell) => {
                    let r = lc::check_lemma_3_1(a.b1, ell, delta, eta_p, eta_pp, a.samples)?;
                    (1, 0, r.b2, r.b3)
                }
                None => {
                    let s = lc::lemma_3_1_sweep(&params, j1, j2, a.b1, a.samples.min(2000))?;
                    (s.cells, s.skipped.len(), s.b2, s.b3)
                }
            };
            let pass = b2.is_finite() && b3.is_finite();
            out.push(vec![delta.into(), a.b1.into(), cells.into(), skipped.into(), b2.into(), b3.into(), pass.into()]);
            out.pass = pass;
            out
        }
        "3.2" => {
            let (c1, c2) = (a.c1.unwrap_or(1.0), a.c2.unwrap_or(1.0));
            let r = lc::check_lemma_3_2(c1, c2, delta, a.grid);
            let mut out = Report::new(&["delta", "c1", "c2", "c0_prime", "c0_measured", "c3", "c4", "cells", "pass"]);
            out.push(vec![
                delta.into(),
                c1.into(),
                c2.into(),
                r.c0_prime.into(),
                r.c0_measured.into(),
                r.c3.into(),
                r.c4.into(),
                r.cells.into(),
                r.pass.into(),
            ]);
            out.pass = r.pass;
            out
        }
        "3.3" => {
            let (c1, c2) = match (a.c1, a.c2) {
                (Some(c1), Some(c2)) => (c1, c2),
                _ => {
                    let l = ledger()?;
                    (l.c1.value, l.c2.value)
                }
            };
            let (c1p, c2p, hits) = match a.ell {
                Some(ell) => {
                    let r = lc::check_lemma_3_3(&params, a.a, ell, j1, j2, c1, c2, a.samples.min(2000), seed)?;
                    (r.c1p, r.c2p, r.hits)
                }
                None => {
                    let s = lc::lemma_3_3_sweep(&params, j1, j2, c1, c2, a.samples.min(2000))?;
                    (s.c1p, s.c2p, s.hits)
                }
            };
            let pass = c1p.is_finite() && c2p.is_finite();
            let mut out = Report::new(&["delta", "c1", "c2", "c1p", "c2p", "hits", "pass"]);
            out.push(vec![delta.into(), c1.into(), c2.into(), c1p.into(), c2p.into(), hits.into(), pass.into()]);
            out.pass = pass;
            out
        }
        "ball" => {
            let c3 = match a.c3 {
                Some(c) => c,
                None => ledger()?.c3.value,
            };
            let ell = a.ell.unwrap_or(lc::ell_max(delta));
            let a0 = lc::check_ball_separation(&params, j1, j2, eta, ell, c3)?;
            let mut out = Report::new(&["delta", "eta", "ell", "c3", "a0"]);
            out.push(vec![delta.into(), eta.into(), ell.into(), c3.into(), a0.into()]);
            out
        }
        "3.4" => {
            let (c1, c2) = match (a.c1, a.c2) {
                (Some(c1), Some(c2)) => (c1, c2),
                _ => {
                    let l = ledger()?;
                    (l.c1.value, l.c2.value)
                }
            };
            let r = lc::check_lemma_3_4(&params, j1, j2, eta, c1, c2, a.samples.min(2000), seed)?;
            let pass = r.hit_at_zero && r.a0.is_finite();
            let mut out = Report::new(&["delta", "eta", "a0", "a_max", "hit_at_zero", "pass"]);
            out.push(vec![delta.into(), eta.into(), r.a0.into(), r.a_max.into(), r.hit_at_zero.into(), pass.into()]);
            out.pass = pass;
            out
        }
        "ledger" => {
            let l = ledger()?;
            let mut out = Report::new(&["name", "value", "validated_by"]);
            for (n, e) in l.entries() {
                out.push(vec![n.into(), e.value.into(), e.validated_by.clone().into()]);
            }
            out
        }
        other => {
            return Err(CliError::Usage(format!(
                "unknown lemma check '{other}' (expected cos, diam, quadratic, slice, 3.1, 3.2, 3.3, ball, 3.4, ledger)"
            )))
        }
    };
    Ok(out)
}

fn regroup(name: &str, delta: f64, epsilon: f64, mu: Option<i64>, alpha: f64, samples: usize, seed: u64) -> Result<Report, CliError> {
    let rp = lc::RegroupParams::new(delta, epsilon)?;
    let mut out = Report::new(&["check", "delta", "epsilon", "n", "delta_eps", "mu", "ell", "samples", "failures", "pass"]);
    let base = |out: &mut Report, mu: Cell, ell: Cell, samples: usize, failures: usize, pass: bool| {
        out.push(vec![
            name.into(),
            delta.into(),
            epsilon.into(),
            rp.n.into(),
            rp.delta_eps.into(),
            mu,
            ell,
            samples.into(),
            failures.into(),
            pass.into(),
        ]);
        out.pass &= pass;
    };
    match name {
        "4.3" => {
            let pass = lc::check_regroup_4_3(delta, epsilon)?;
            base(&mut out, "".into(), "".into(), 0, usize::from(!pass), pass);
        }
        "4.5" => {
            let r = lc::check_regroup_4_5(delta, epsilon)?;
            base(&mut out, "".into(), r.worst_ell.into(), 0, r.failures.len(), r.pass);
        }
        "4.4" => match mu {
            Some(mu) => {
                let params = DecompositionParams::standard(delta)?;
                let j = RadialInterval::pinned(alpha, &params)?;
                let r = lc::check_regroup_4_4(delta, epsilon, mu, j, samples, seed)?;
                base(&mut out, mu.into(), r.ell.into(), r.samples, r.failures, r.pass);
            }
            None => {
                let s = lc::regroup_4_4_sweep(delta, epsilon, alpha, samples, seed)?;
                base(&mut out, "".into(), "".into(), s.samples, s.failures, s.pass);
            }
        },
        other => return Err(CliError::Usage(format!("unknown regroup check '{other}' (expected 4.3, 4.4, 4.5)"))),
    }
    Ok(out)
}
