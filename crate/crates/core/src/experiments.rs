//! End-to-end studies: the overlap bound down a δ ladder, the δ^{−ε}
//! growth of the ε-neighborhood family, and the wide-cone counterexample.

use std::collections::BTreeSet;
use std::f64::consts::PI;

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;

use crate::cone::{DecompositionParams, RadialInterval, SlabVariant};
use crate::error::{Error, Result};
use crate::geom::{Point3, Verdict};
use crate::minkowski::{sum_contains_certified, SearchBudget};
use crate::overlap::{overlap_count, overlap_scan, pair_spec};
use crate::sampling::rng_for;

/// Allowed growth of the maximum from one rung to the next.
pub const LADDER_TOLERANCE: f64 = 1.2;
/// Allowed max/min ratio of the normalized ε counts.
pub const EPSILON_RATIO_LIMIT: f64 = 4.0;
/// Window for the fitted growth exponent of the counterexample.
pub const EXPONENT_WINDOW: (f64, f64) = (0.4, 0.6);
/// Required agreement between the oracle and certified checks.
pub const AGREEMENT_LIMIT: f64 = 0.99;

#[derive(Clone, Debug, PartialEq)]
pub struct LadderSpec {
    pub deltas: Vec<f64>,
    pub n_points: usize,
    pub seed: u64,
    pub variant: SlabVariant,
    pub epsilon: Option<f64>,
}

impl LadderSpec {
    pub fn new(deltas: Vec<f64>, n_points: usize, seed: u64) -> Self {
        Self {
            deltas,
            n_points,
            seed,
            variant: SlabVariant::Standard,
            epsilon: None,
        }
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = Some(epsilon);
        self.variant = SlabVariant::EpsNeighborhood(epsilon);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.deltas.is_empty() {
            return Err(Error::InvalidParams("empty δ ladder".into()));
        }
        if self.deltas.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::InvalidParams("δ ladder must be strictly decreasing".into()));
        }
        for &d in &self.deltas {
            DecompositionParams::standard(d)?;
        }
        if self.n_points == 0 {
            return Err(Error::InvalidSample);
        }
        Ok(())
    }
}

/// One rung of a ladder study.
#[derive(Clone, Debug, PartialEq)]
pub struct LadderRow {
    pub delta: f64,
    pub points: usize,
    pub max_certified: usize,
    pub max_with_unknown: usize,
    pub unknown_fraction: f64,
    /// max_with_unknown · δ^ε for the ε study, the plain maximum otherwise.
    pub normalized: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LadderTable {
    pub rows: Vec<LadderRow>,
    pub pass: bool,
}

fn ladder_rows(spec: &LadderSpec, alpha1: f64, alpha2: f64, variant: SlabVariant) -> Result<Vec<LadderRow>> {
    spec.validate()?;
    let budget = SearchBudget::default();
    let scale = spec.epsilon.unwrap_or(0.0);
    spec.deltas
        .iter()
        .map(|&delta| {
            let params = DecompositionParams::standard(delta)?;
            let j1 = RadialInterval::pinned(alpha1, &params)?;
            let j2 = RadialInterval::pinned(alpha2, &params)?;
            let rep = overlap_scan(&params, j1, j2, variant, spec.n_points, spec.seed, &budget)?;
            Ok(LadderRow {
                delta,
                points: rep.points,
                max_certified: rep.max_certified,
                max_with_unknown: rep.max_with_unknown,
                unknown_fraction: rep.unknown_fraction,
                normalized: rep.max_with_unknown as f64 * delta.powf(scale),
            })
        })
        .collect()
}

/// Overlap scans down the ladder with J_i = [α_i, α_i + √δ]; passes when
/// each maximum stays within 20% of the previous one.
pub fn uniformity_study(spec: &LadderSpec, alpha1: f64, alpha2: f64) -> Result<LadderTable> {
    let rows = ladder_rows(spec, alpha1, alpha2, spec.variant)?;
    let pass = rows
        .windows(2)
        .all(|w| w[1].max_with_unknown as f64 <= LADDER_TOLERANCE * w[0].max_with_unknown as f64);
    Ok(LadderTable { rows, pass })
}

/// Scans of the ε-neighborhood family; passes when the maxima scaled by
/// δ^ε vary by at most a factor 4.
pub fn epsilon_study(spec: &LadderSpec, alpha1: f64, alpha2: f64) -> Result<LadderTable> {
    let eps = spec.epsilon.ok_or(Error::InvalidEpsilon(f64::NAN))?;
    let variant = SlabVariant::eps(eps)?;
    let rows = ladder_rows(spec, alpha1, alpha2, variant)?;
    let (lo, hi) = rows
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(a, b), r| (a.min(r.normalized), b.max(r.normalized)));
    Ok(LadderTable {
        pass: lo > 0.0 && hi / lo <= EPSILON_RATIO_LIMIT,
        rows,
    })
}

/// max/min of the normalized column.
pub fn normalized_ratio(table: &LadderTable) -> f64 {
    let (lo, hi) = table
        .rows
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(a, b), r| (a.min(r.normalized), b.max(r.normalized)));
    hi / lo
}

#[derive(Clone, Debug, PartialEq)]
pub struct CounterexampleSpec {
    pub a_angle: f64,
    pub b: f64,
    pub taus: Vec<f64>,
}

impl CounterexampleSpec {
    pub fn validate(&self) -> Result<()> {
        if !(PI / 2.0 < self.a_angle && self.a_angle < PI) {
            return Err(Error::InvalidParams(format!("a must lie in (π/2, π), got {}", self.a_angle)));
        }
        if self.taus.len() < 2 || self.taus.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParams("need at least two increasing τ values".into()));
        }
        for &tau in &self.taus {
            self.interval(tau)?;
        }
        Ok(())
    }

    /// J = [b − √δ/2, b + √δ/2], which keeps b interior.
    pub fn interval(&self, tau: f64) -> Result<RadialInterval> {
        let h = tau.powf(-0.5);
        RadialInterval::new(self.b - h / 2.0, self.b + h / 2.0)
    }

    /// The apex probe ((0,0), 2b).
    pub fn apex(&self) -> Point3 {
        Point3::new(0.0, 0.0, 2.0 * self.b)
    }
}

/// Ordered pairs (μ, ν), |μ|, |ν| ≤ bound·√τ − 1, whose sectors are
/// antipodal somewhere: θ ∈ Γ_μ and θ − π ∈ Γ_ν for some θ, together with
/// the swapped pairs.
pub fn antipodal_pairs(sector_bound: f64, tau: f64) -> Vec<(i64, i64)> {
    let h = tau.powf(-0.5);
    let x = sector_bound / h - 1.0;
    if x < 0.0 {
        return Vec::new();
    }
    let m = x.floor() as i64;
    let mut out = BTreeSet::new();
    for mu in -m..=m {
        let (lo, hi) = (mu as f64 * h, (mu + 1) as f64 * h);
        let guess = ((lo - PI) / h).floor() as i64;
        for nu in guess - 1..=guess + 1 {
            if nu.abs() > m {
                continue;
            }
            let (lo2, hi2) = (nu as f64 * h + PI, (nu + 1) as f64 * h + PI);
            if lo.max(lo2) < hi.min(hi2) {
                out.insert((mu, nu));
                out.insert((nu, mu));
            }
        }
    }
    out.into_iter().collect()
}

/// Number of [`antipodal_pairs`] for the spec's a at this τ.
pub fn counterexample_count_oracle(spec: &CounterexampleSpec, tau: f64) -> usize {
    antipodal_pairs(spec.a_angle, tau).len()
}

#[derive(Clone, Debug, PartialEq)]
pub struct CounterexampleRow {
    pub tau: f64,
    pub oracle_count: usize,
    /// Certified overlap count (with unknowns) at the apex for the π/8
    /// index set.
    pub standard_count: usize,
    pub checked: usize,
    pub agree: usize,
    pub unknown: usize,
    /// Oracle pairs certified Out or non-oracle pairs certified In.
    pub contradictions: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CounterexampleTable {
    pub rows: Vec<CounterexampleRow>,
    /// Least-squares slope of log count against log τ.
    pub exponent: f64,
    pub increasing: bool,
    pub pass: bool,
    pub note: &'static str,
}

/// Pairs absent from `set`: shifted neighbors of members first, then
/// uniform draws from the index set.
fn outside_pairs<R: Rng + ?Sized>(set: &BTreeSet<(i64, i64)>, m: i64, n: usize, rng: &mut R) -> Vec<(i64, i64)> {
    let members: Vec<_> = set.iter().copied().collect();
    let mut out = Vec::new();
    let mut tries = 0;
    while out.len() < n && tries < 100 * n.max(1) {
        tries += 1;
        let cand = if tries % 2 == 1 && !members.is_empty() {
            let (mu, nu) = *members.choose(rng).unwrap();
            (mu, nu + [-2, -1, 1, 2][rng.gen_range(0..4)])
        } else {
            (rng.gen_range(-m..=m), rng.gen_range(-m..=m))
        };
        if cand.1.abs() <= m && !set.contains(&cand) {
            out.push(cand);
        }
    }
    out
}

/// Oracle counts down the τ list, the growth-exponent fit, the contrast
/// count under the π/8 index set, and certified checks at the apex on
/// `subsample` oracle pairs and `subsample` non-oracle pairs per τ.
pub fn counterexample_study(spec: &CounterexampleSpec, subsample: usize, seed: u64) -> Result<CounterexampleTable> {
    spec.validate()?;
    let budget = SearchBudget::default();
    let p = spec.apex();
    let mut rows = Vec::new();
    for (k, &tau) in spec.taus.iter().enumerate() {
        let delta = 1.0 / tau;
        let j = spec.interval(tau)?;
        let wide = DecompositionParams::new(delta, spec.a_angle)?;
        let standard = DecompositionParams::standard(delta)?;
        let pairs = antipodal_pairs(spec.a_angle, tau);
        let set: BTreeSet<_> = pairs.iter().copied().collect();
        let standard_count = overlap_count(p, &standard, j, j, SlabVariant::Standard, &budget)?.with_unknown();

        let mut rng = rng_for(seed, k as u64);
        let inside: Vec<_> = pairs.choose_multiple(&mut rng, subsample).copied().collect();
        let m = wide.index_bound().unwrap_or(0);
        let outside = outside_pairs(&set, m, subsample, &mut rng);
        let cases: Vec<((i64, i64), bool)> = inside
            .into_iter()
            .map(|q| (q, true))
            .chain(outside.into_iter().map(|q| (q, false)))
            .collect();
        let verdicts = cases
            .par_iter()
            .map(|&((mu, nu), _)| {
                let s = pair_spec(&wide, mu, nu, j, j, SlabVariant::Standard)?;
                Ok(sum_contains_certified(&s, p, &budget))
            })
            .collect::<Result<Vec<Verdict>>>()?;
        let mut row = CounterexampleRow {
            tau,
            oracle_count: pairs.len(),
            standard_count,
            checked: cases.len(),
            agree: 0,
            unknown: 0,
            contradictions: 0,
        };
        for (&(_, expect_in), v) in cases.iter().zip(verdicts) {
            match (v, expect_in) {
                (Verdict::In, true) | (Verdict::Out, false) => row.agree += 1,
                (Verdict::Unknown { .. }, _) => row.unknown += 1,
                _ => row.contradictions += 1,
            }
        }
        rows.push(row);
    }
    let exponent = log_log_slope(rows.iter().map(|r| (r.tau, r.oracle_count as f64)));
    let increasing = rows.windows(2).all(|w| w[1].oracle_count > w[0].oracle_count);
    let agreement_ok = rows
        .iter()
        .all(|r| r.contradictions == 0 && r.agree as f64 >= AGREEMENT_LIMIT * r.checked as f64);
    let pass = increasing
        && (EXPONENT_WINDOW.0..=EXPONENT_WINDOW.1).contains(&exponent)
        && rows.iter().all(|r| r.standard_count == 0)
        && agreement_ok;
    Ok(CounterexampleTable {
        rows,
        exponent,
        increasing,
        pass,
        note: "oracle counts every admissible θ, not only θ near π/2",
    })
}

/// Least-squares slope through (ln x, ln y), skipping y ≤ 0.
pub fn log_log_slope(points: impl IntoIterator<Item = (f64, f64)>) -> f64 {
    let pts: Vec<(f64, f64)> = points
        .into_iter()
        .filter(|&(_, y)| y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    let n = pts.len() as f64;
    if pts.len() < 2 {
        return f64::NAN;
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}
