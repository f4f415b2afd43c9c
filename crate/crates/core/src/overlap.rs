//! Overlap counts of the family of pairwise sums u_{μ,J₁} + u_{ν,J₂}.
//!
//! Pairs are grouped by the half-integer class a = (μ+ν)/2. Counting at a
//! point first discards pairs that a cheap analytic bound proves cannot
//! contain it, then runs the certified membership search on the rest.

use std::collections::BTreeMap;
use std::fmt;

use rand::Rng;
use rayon::prelude::*;

use crate::cone::{ConeSlab, DecompositionParams, RadialInterval, SectorIndex, SlabShape, SlabVariant};
use crate::error::{Error, Result};
use crate::geom::{wrap_angle, Point2, Point3, Verdict};
use crate::minkowski::{quick_reject, sum_contains_certified, SearchBudget, SumSpec};
use crate::sampling::{interior_param, param_point, rng_for, uniform_in_ball};

/// Half-integer a, stored as 2a.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ClassIndex {
    twice: i64,
}

impl ClassIndex {
    pub const fn from_twice(twice: i64) -> Self {
        Self { twice }
    }

    pub const fn from_int(a: i64) -> Self {
        Self { twice: 2 * a }
    }

    pub fn twice(self) -> i64 {
        self.twice
    }

    pub fn value(self) -> f64 {
        self.twice as f64 / 2.0
    }

    pub fn is_integer(self) -> bool {
        self.twice % 2 == 0
    }

    /// |a − b| as a float.
    pub fn gap(self, other: ClassIndex) -> f64 {
        (self.twice - other.twice).abs() as f64 / 2.0
    }
}

impl fmt::Display for ClassIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.twice / 2)
        } else {
            write!(f, "{}/2", self.twice)
        }
    }
}

/// k₀(μ, ν) = (μ + ν)/2.
pub fn k0(mu: SectorIndex, nu: SectorIndex) -> ClassIndex {
    ClassIndex::from_twice(mu.0 + nu.0)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Fiber {
    pub a: ClassIndex,
    pub pairs: Vec<(SectorIndex, SectorIndex)>,
}

/// All (μ, ν) in the index set with μ + ν = 2a, by increasing μ.
pub fn fiber(a: ClassIndex, params: &DecompositionParams) -> Fiber {
    let pairs = match params.index_bound() {
        Some(m) => (-m..=m)
            .filter_map(|mu| {
                let nu = a.twice - mu;
                (nu.abs() <= m).then_some((SectorIndex(mu), SectorIndex(nu)))
            })
            .collect(),
        None => Vec::new(),
    };
    Fiber { a, pairs }
}

/// Every class value taken by k₀ on the index set, ascending.
pub fn class_range(params: &DecompositionParams) -> Vec<ClassIndex> {
    match params.index_bound() {
        Some(m) => (-2 * m..=2 * m).map(ClassIndex::from_twice).collect(),
        None => Vec::new(),
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct OverlapCount {
    pub certified_in: usize,
    pub unknown: usize,
    /// Pairs that reached the certified search.
    pub pairs_tested: usize,
    /// Pairs discarded by the analytic prefilter or the bounding balls.
    pub pairs_prefiltered: usize,
}

impl OverlapCount {
    pub fn with_unknown(&self) -> usize {
        self.certified_in + self.unknown
    }

    fn record(&mut self, v: Verdict) {
        self.pairs_tested += 1;
        match v {
            Verdict::In => self.certified_in += 1,
            Verdict::Unknown { .. } => self.unknown += 1,
            Verdict::Out => {}
        }
    }
}

/// Options for [`overlap_count_with`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CountOptions {
    pub prefilter: bool,
    /// Restrict both μ and ν to this inclusive range (intersected with the
    /// index set).
    pub index_range: Option<(i64, i64)>,
}

impl Default for CountOptions {
    fn default() -> Self {
        Self {
            prefilter: true,
            index_range: None,
        }
    }
}

/// The slab pair (μ, ν) with the given intervals and variant.
pub fn pair_spec(
    params: &DecompositionParams,
    mu: i64,
    nu: i64,
    j1: RadialInterval,
    j2: RadialInterval,
    variant: SlabVariant,
) -> Result<SumSpec> {
    SumSpec::new(
        ConeSlab::new(*params, mu, j1, variant)?,
        ConeSlab::new(*params, nu, j2, variant)?,
    )
}

/// Sound rejection: true only if p is outside the sum of the pair.
///
/// Uses three facts about a sum point x = r₁e(θ₁) + r₂e(θ₂) at height
/// r₁ + r₂ + s with |s| ≤ v_a + v_b: x lies in the convex hull of the two
/// sectors with |x| ≥ (r₁+r₂)cos(W/2), and
/// |x|² = (r₁+r₂)² − 2r₁r₂(1 − cos(θ₁−θ₂)). An inflation t of the sum is
/// absorbed by moving every quantity by t.
pub fn pair_prefilter_rejects(a: &SlabShape, b: &SlabShape, t: f64, p: Point3) -> bool {
    const TOL: f64 = 1e-9;
    let lo = a.ang_lo.min(b.ang_lo);
    let hi = a.ang_hi.max(b.ang_hi);
    let width = hi - lo;
    let v = a.vert + b.vert;
    let xi = p.xi();
    let n = xi.norm();

    if n > 0.0 {
        let qmin = (a.rad_lo + b.rad_lo) * (0.5 * width).cos();
        if t < qmin {
            let pad = (t / qmin).asin() + TOL;
            let phi = xi.arg();
            let mid = 0.5 * (lo + hi);
            if wrap_angle(phi - mid).abs() > 0.5 * width + pad {
                return true;
            }
        }
    }

    let gap_min = (b.ang_lo - a.ang_hi).max(a.ang_lo - b.ang_hi).max(0.0);
    let gap_max = width;
    let top = p.eta + v + t;
    if top < 0.0 {
        return true;
    }
    let inner = (n - t).max(0.0);
    let upper_sq = top * top - 2.0 * a.rad_lo * b.rad_lo * (1.0 - gap_min.cos());
    if inner * inner > upper_sq + TOL {
        return true;
    }
    let bottom = p.eta - v - t;
    if bottom > 0.0 {
        let lower_sq = bottom * bottom - 2.0 * a.rad_hi * b.rad_hi * (1.0 - gap_max.cos());
        let outer = n + t;
        if outer * outer < lower_sq - TOL {
            return true;
        }
    }
    false
}

/// (μ, ν, verdict) for one tested pair.
pub type PairVerdict = (SectorIndex, SectorIndex, Verdict);

/// Verdict of every pair that reaches the certified search, in (μ, ν)
/// order, together with the tally.
pub fn pair_verdicts(
    p: Point3,
    params: &DecompositionParams,
    j1: RadialInterval,
    j2: RadialInterval,
    variant: SlabVariant,
    budget: &SearchBudget,
    opts: CountOptions,
) -> Result<(OverlapCount, Vec<PairVerdict>)> {
    let Some(m) = params.index_bound() else {
        return Ok((OverlapCount::default(), Vec::new()));
    };
    let (lo, hi) = match opts.index_range {
        Some((lo, hi)) => (lo.max(-m), hi.min(m)),
        None => (-m, m),
    };
    let mut count = OverlapCount::default();
    let mut verdicts = Vec::new();
    for mu in lo..=hi {
        let a = ConeSlab::new(*params, mu, j1, variant)?;
        let sa = a.shape();
        for nu in lo..=hi {
            let b = ConeSlab::new(*params, nu, j2, variant)?;
            let spec = SumSpec::new(a, b)?;
            if opts.prefilter {
                let sb = b.shape();
                if pair_prefilter_rejects(&sa, &sb, sa.inflate + sb.inflate, p) || quick_reject(&spec, p) {
                    count.pairs_prefiltered += 1;
                    continue;
                }
            }
            let v = sum_contains_certified(&spec, p, budget);
            count.record(v);
            verdicts.push((SectorIndex(mu), SectorIndex(nu), v));
        }
    }
    Ok((count, verdicts))
}

/// Overlap count at `p` with default options (prefilter on, full index
/// set).
pub fn overlap_count(
    p: Point3,
    params: &DecompositionParams,
    j1: RadialInterval,
    j2: RadialInterval,
    variant: SlabVariant,
    budget: &SearchBudget,
) -> Result<OverlapCount> {
    overlap_count_with(p, params, j1, j2, variant, budget, CountOptions::default())
}

pub fn overlap_count_with(
    p: Point3,
    params: &DecompositionParams,
    j1: RadialInterval,
    j2: RadialInterval,
    variant: SlabVariant,
    budget: &SearchBudget,
    opts: CountOptions,
) -> Result<OverlapCount> {
    pair_verdicts(p, params, j1, j2, variant, budget, opts).map(|(c, _)| c)
}

/// Number of pairs in the fiber of `a` whose sum certifiably contains p,
/// and the number left undecided.
pub fn class_count(
    a: ClassIndex,
    p: Point3,
    params: &DecompositionParams,
    j1: RadialInterval,
    j2: RadialInterval,
    budget: &SearchBudget,
) -> Result<OverlapCount> {
    let mut count = OverlapCount::default();
    for (mu, nu) in fiber(a, params).pairs {
        let spec = pair_spec(params, mu.0, nu.0, j1, j2, SlabVariant::Standard)?;
        count.record(sum_contains_certified(&spec, p, budget));
    }
    Ok(count)
}

/// Membership of p in the class union E_a.
pub fn class_contains(
    a: ClassIndex,
    p: Point3,
    params: &DecompositionParams,
    j1: RadialInterval,
    j2: RadialInterval,
    budget: &SearchBudget,
) -> Result<Verdict> {
    let mut any_unknown: Option<Verdict> = None;
    for (mu, nu) in fiber(a, params).pairs {
        let spec = pair_spec(params, mu.0, nu.0, j1, j2, SlabVariant::Standard)?;
        match sum_contains_certified(&spec, p, budget) {
            Verdict::In => return Ok(Verdict::In),
            Verdict::Out => {}
            u => any_unknown = Some(any_unknown.map_or(u, |w| w.and(u))),
        }
    }
    Ok(any_unknown.unwrap_or(Verdict::Out))
}

/// Probe point near the sum of a random pair: interior points of both
/// slabs plus jitter uniform in a ball of radius 2δ. Returns the point and
/// the generating pair.
pub fn witness_biased_point<R: Rng + ?Sized>(
    params: &DecompositionParams,
    j1: RadialInterval,
    j2: RadialInterval,
    variant: SlabVariant,
    rng: &mut R,
) -> Result<(Point3, (i64, i64))> {
    let m = params.index_bound().ok_or(Error::InvalidParams("empty index set".into()))?;
    let mu = rng.gen_range(-m..=m);
    let nu = rng.gen_range(-m..=m);
    let spec = pair_spec(params, mu, nu, j1, j2, variant)?;
    let a = spec.slab_a.shape();
    let b = spec.slab_b.shape();
    let qa = param_point(&a, interior_param(&a, 0.0, rng));
    let qb = param_point(&b, interior_param(&b, 0.0, rng));
    let jitter = uniform_in_ball(2.0 * params.delta(), rng);
    Ok((qa + qb + jitter, (mu, nu)))
}

/// Largest gap |a − a′| between classes that both certifiably contain a
/// sampled point, plus 1/2: the smallest separation C observed to keep
/// classes disjoint.
pub fn class_separation_constant(
    params: &DecompositionParams,
    j1: RadialInterval,
    j2: RadialInterval,
    sample: usize,
    seed: u64,
) -> Result<f64> {
    if sample == 0 {
        return Err(Error::InvalidSample);
    }
    let budget = SearchBudget::default();
    let gaps = (0..sample as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_for(seed, i);
            let (p, _) = witness_biased_point(params, j1, j2, SlabVariant::Standard, &mut rng)?;
            let (_, verdicts) =
                pair_verdicts(p, params, j1, j2, SlabVariant::Standard, &budget, CountOptions::default())?;
            let classes: Vec<ClassIndex> = verdicts
                .iter()
                .filter(|(_, _, v)| v.is_in())
                .map(|&(mu, nu, _)| k0(mu, nu))
                .collect();
            let lo = classes.iter().min();
            let hi = classes.iter().max();
            Ok(match (lo, hi) {
                (Some(lo), Some(hi)) => hi.gap(*lo),
                _ => 0.0,
            })
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(gaps.into_iter().fold(0.0, f64::max) + 0.5)
}

/// One probe of a scan.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScanPoint {
    pub point_id: u64,
    pub p: Point3,
    pub generator: (i64, i64),
    pub count: OverlapCount,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OverlapReport {
    pub delta: f64,
    pub j1: RadialInterval,
    pub j2: RadialInterval,
    pub points: usize,
    pub max_certified: usize,
    pub max_with_unknown: usize,
    /// Fraction of points at which at least one pair stayed undecided.
    pub unknown_fraction: f64,
    /// Number of points per certified overlap value.
    pub histogram: BTreeMap<usize, usize>,
    pub seed: u64,
    pub rows: Vec<ScanPoint>,
}

impl OverlapReport {
    fn from_rows(delta: f64, j1: RadialInterval, j2: RadialInterval, seed: u64, rows: Vec<ScanPoint>) -> Self {
        let mut histogram = BTreeMap::new();
        for r in &rows {
            *histogram.entry(r.count.certified_in).or_insert(0) += 1;
        }
        let points = rows.len();
        let with_unknown = rows.iter().filter(|r| r.count.unknown > 0).count();
        Self {
            delta,
            j1,
            j2,
            points,
            max_certified: rows.iter().map(|r| r.count.certified_in).max().unwrap_or(0),
            max_with_unknown: rows.iter().map(|r| r.count.with_unknown()).max().unwrap_or(0),
            unknown_fraction: if points == 0 { 0.0 } else { with_unknown as f64 / points as f64 },
            histogram,
            seed,
            rows,
        }
    }
}

/// Witness-biased scan of `n_points` probes. Point i draws from stream i of
/// `seed`, so the report does not depend on thread scheduling.
pub fn overlap_scan(
    params: &DecompositionParams,
    j1: RadialInterval,
    j2: RadialInterval,
    variant: SlabVariant,
    n_points: usize,
    seed: u64,
    budget: &SearchBudget,
) -> Result<OverlapReport> {
    if n_points == 0 {
        return Err(Error::InvalidSample);
    }
    j1.check_width(params)?;
    j2.check_width(params)?;
    let rows = (0..n_points as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_for(seed, i);
            let (p, generator) = witness_biased_point(params, j1, j2, variant, &mut rng)?;
            let count = overlap_count(p, params, j1, j2, variant, budget)?;
            Ok(ScanPoint {
                point_id: i,
                p,
                generator,
                count,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(OverlapReport::from_rows(params.delta(), j1, j2, seed, rows))
}

/// On-cone point 2·(b e(θ), b), the doubled apex probe.
pub fn doubled_cone_point(theta: f64, r: f64) -> Point3 {
    Point3::from_parts(Point2::polar(2.0 * r, theta), 2.0 * r)
}
