//! Sectors, index sets and the thickened cone pieces ("slabs").
//!
//! A standard slab over sector index μ and radial interval J = [α, β] is
//!
//! ```text
//! { (ξ, η) : μ√δ ≤ arg ξ < (μ+1)√δ,  α ≤ |ξ| ≤ β,  |η − |ξ|| ≤ δ }.
//! ```
//!
//! The enlarged variant widens the sector to [(μ−1)√δ, (μ+2)√δ), the radii
//! by 2δ on each side and the vertical thickness to 6δ. The ε-neighborhood
//! variant is the open δ^{1−ε}-neighborhood of the standard slab.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geom::{wrap_angle, Point2, Point3, Verdict, DEFAULT_SLACK};

/// Largest fineness accepted for user-facing parameters.
pub const MAX_DELTA: f64 = 1e-2;
/// Largest fineness accepted for derived (coarsened) scales.
pub const MAX_DERIVED_DELTA: f64 = 1.0 / 16.0;
/// Sector cutoff of the standard index set.
pub const STANDARD_SECTOR_BOUND: f64 = PI / 8.0;
/// Sector cutoff of the starred index set used with enlarged slabs.
pub const STARRED_SECTOR_BOUND: f64 = PI / 7.0;

/// Fineness δ and the angular cutoff factor of the index set.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DecompositionParams {
    delta: f64,
    sector_bound: f64,
}

impl DecompositionParams {
    pub fn new(delta: f64, sector_bound: f64) -> Result<Self> {
        if !(delta > 0.0 && delta <= MAX_DELTA) {
            return Err(Error::InvalidParams(format!(
                "delta must lie in (0, {MAX_DELTA}], got {delta}"
            )));
        }
        Self::with_limit(delta, sector_bound, MAX_DELTA)
    }

    /// Parameters at a coarsened scale such as δ_ε = δ·N², which can exceed
    /// [`MAX_DELTA`].
    pub fn derived(delta: f64, sector_bound: f64) -> Result<Self> {
        Self::with_limit(delta, sector_bound, MAX_DERIVED_DELTA)
    }

    fn with_limit(delta: f64, sector_bound: f64, limit: f64) -> Result<Self> {
        if !(delta > 0.0 && delta <= limit) {
            return Err(Error::InvalidParams(format!(
                "delta must lie in (0, {limit}], got {delta}"
            )));
        }
        if !(sector_bound > 0.0 && sector_bound < PI) {
            return Err(Error::InvalidParams(format!(
                "sector bound must lie in (0, π), got {sector_bound}"
            )));
        }
        Ok(Self { delta, sector_bound })
    }

    pub fn standard(delta: f64) -> Result<Self> {
        Self::new(delta, STANDARD_SECTOR_BOUND)
    }

    pub fn starred(delta: f64) -> Result<Self> {
        Self::new(delta, STARRED_SECTOR_BOUND)
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn sector_bound(&self) -> f64 {
        self.sector_bound
    }

    /// Angular width √δ of one sector.
    pub fn sqrt_delta(&self) -> f64 {
        self.delta.sqrt()
    }

    /// Largest admissible |μ|, or `None` when the index set is empty.
    pub fn index_bound(&self) -> Option<i64> {
        let x = self.sector_bound / self.sqrt_delta() - 1.0;
        (x >= 0.0).then(|| x.floor() as i64)
    }

    pub fn contains_index(&self, mu: i64) -> bool {
        self.index_bound().is_some_and(|m| mu.abs() <= m)
    }

    pub fn with_delta(&self, delta: f64) -> Result<Self> {
        Self::derived(delta, self.sector_bound)
    }
}

/// Radial interval J = [α, β] ⊂ [1, 2].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RadialInterval {
    pub alpha: f64,
    pub beta: f64,
}

impl RadialInterval {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(1.0 <= alpha && alpha <= beta && beta <= 2.0) {
            return Err(Error::InvalidParams(format!(
                "radial interval must satisfy 1 ≤ α ≤ β ≤ 2, got [{alpha}, {beta}]"
            )));
        }
        Ok(Self { alpha, beta })
    }

    /// `[alpha, alpha + √δ]`, the widest interval allowed at this scale.
    pub fn pinned(alpha: f64, params: &DecompositionParams) -> Result<Self> {
        Self::new(alpha, alpha + params.sqrt_delta())
    }

    pub fn width(&self) -> f64 {
        self.beta - self.alpha
    }

    pub fn contains(&self, r: f64) -> bool {
        self.alpha <= r && r <= self.beta
    }

    /// `|J| ≤ √δ`, up to rounding in how J was computed.
    pub fn check_width(&self, params: &DecompositionParams) -> Result<()> {
        let h = params.sqrt_delta();
        if self.width() > h * (1.0 + 1e-12) {
            return Err(Error::InvalidParams(format!(
                "|J| must be ≤ δ^(1/2): |J| = {} > {h}",
                self.width()
            )));
        }
        Ok(())
    }

    /// J̃ = [α − δ, β + δ], the range of admissible heights of slices.
    pub fn thickened(&self, delta: f64) -> (f64, f64) {
        (self.alpha - delta, self.beta + delta)
    }
}

/// Sector index μ.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SectorIndex(pub i64);

impl SectorIndex {
    pub fn value(self) -> i64 {
        self.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SlabVariant {
    Standard,
    Enlarged,
    /// Open δ^{1−ε}-neighborhood of the standard slab, ε ∈ (0, 1/2).
    EpsNeighborhood(f64),
}

impl SlabVariant {
    pub fn eps(epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 0.5) {
            return Err(Error::InvalidEpsilon(epsilon));
        }
        Ok(SlabVariant::EpsNeighborhood(epsilon))
    }

    pub fn name(&self) -> &'static str {
        match self {
            SlabVariant::Standard => "standard",
            SlabVariant::Enlarged => "enlarged",
            SlabVariant::EpsNeighborhood(_) => "eps-neighborhood",
        }
    }
}

/// Explicit polar description of a slab: angular range, radial range,
/// vertical half-thickness and Euclidean inflation radius.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SlabShape {
    pub ang_lo: f64,
    pub ang_hi: f64,
    pub rad_lo: f64,
    pub rad_hi: f64,
    pub vert: f64,
    /// Radius of the open neighborhood taken around the slab (0 if none).
    pub inflate: f64,
}

impl SlabShape {
    pub fn ang_width(&self) -> f64 {
        self.ang_hi - self.ang_lo
    }

    /// Same shape with its vertical thickness increased by `extra`.
    pub fn thickened(mut self, extra: f64) -> Self {
        self.vert += extra;
        self
    }

    pub fn point(&self, theta: f64, r: f64, s: f64) -> Point3 {
        Point3::from_parts(Point2::polar(r, theta), r + s)
    }

    /// Largest |ξ| + vertical reach; used for bounding balls.
    pub fn bounding_center_and_radius(&self) -> (Point3, f64) {
        let mid = 0.5 * (self.ang_lo + self.ang_hi);
        let rmid = 0.5 * (self.rad_lo + self.rad_hi);
        let center = Point3::from_parts(Point2::polar(rmid, mid), rmid);
        // Farthest point is a corner of the polar box.
        let mut radius: f64 = 0.0;
        for theta in [self.ang_lo, self.ang_hi] {
            for r in [self.rad_lo, self.rad_hi] {
                for s in [-self.vert, self.vert] {
                    radius = radius.max(self.point(theta, r, s).dist(center));
                }
            }
        }
        (center, radius * (1.0 + 1e-12) + self.inflate)
    }

    /// Exact (up to rounding) Euclidean distance from `p` to the closed
    /// core slab, ignoring `inflate`.
    ///
    /// For fixed r the nearest angle is the point of the sector closest to
    /// arg ξ, independent of r; the remaining problem in r is convex and
    /// piecewise quadratic, so its minimizer is among a handful of
    /// candidates.
    pub fn core_distance(&self, p: Point3) -> f64 {
        let xi = p.xi();
        let theta = if xi == Point2::ORIGIN {
            self.ang_lo
        } else {
            let phi = xi.arg();
            if angle_in_closed(phi, self.ang_lo, self.ang_hi) {
                phi
            } else {
                let d_lo = wrap_angle(phi - self.ang_lo).abs();
                let d_hi = wrap_angle(phi - self.ang_hi).abs();
                if d_lo <= d_hi {
                    self.ang_lo
                } else {
                    self.ang_hi
                }
            }
        };
        let e = Point2::polar(1.0, theta);
        let c = xi.dot(e);
        let (v, x3) = (self.vert, p.eta);
        let sq = |r: f64| {
            let d = xi - e * r;
            let g = ((x3 - r).abs() - v).max(0.0);
            d.dot(d) + g * g
        };
        let candidates = [
            self.rad_lo,
            self.rad_hi,
            c,
            0.5 * (c + x3 - v),
            0.5 * (c + x3 + v),
            x3 - v,
            x3 + v,
        ];
        candidates
            .iter()
            .map(|&r| sq(r.clamp(self.rad_lo, self.rad_hi)))
            .fold(f64::INFINITY, f64::min)
            .sqrt()
    }

    /// Three-valued membership in the core slab (no inflation).
    pub fn core_contains(&self, p: Point3, slack: f64) -> Verdict {
        let xi = p.xi();
        let r = xi.norm();
        if r == 0.0 {
            return Verdict::Out;
        }
        let phi = xi.arg();
        let ang = Verdict::from_margin(angle_margin(phi, self.ang_lo, self.ang_hi), slack);
        let rad = Verdict::from_margin((r - self.rad_lo).min(self.rad_hi - r), slack);
        let vert = Verdict::from_margin(self.vert - (p.eta - r).abs(), slack);
        ang.and(rad).and(vert)
    }

    /// Smallest signed margin over the angular, radial and vertical
    /// conditions (positive inside). The angular margin is in radians.
    pub fn core_margin(&self, p: Point3) -> f64 {
        let xi = p.xi();
        let r = xi.norm();
        if r == 0.0 {
            return -self.rad_lo;
        }
        angle_margin(xi.arg(), self.ang_lo, self.ang_hi)
            .min(r - self.rad_lo)
            .min(self.rad_hi - r)
            .min(self.vert - (p.eta - r).abs())
    }
}

fn angle_in_closed(phi: f64, lo: f64, hi: f64) -> bool {
    angle_margin(phi, lo, hi) >= 0.0
}

/// Signed angular margin of `phi` inside `[lo, hi]` (negative outside),
/// measured along the circle.
///
/// An argument that equals the closed endpoint `lo` exactly (as happens for
/// ξ on the positive axis with μ = 0) counts as interior at that end.
fn angle_margin(phi: f64, lo: f64, hi: f64) -> f64 {
    if phi == lo {
        return hi - lo;
    }
    let from_lo = wrap_angle(phi - lo);
    let to_hi = wrap_angle(hi - phi);
    let width = hi - lo;
    if from_lo >= 0.0 && to_hi >= 0.0 && from_lo <= width {
        from_lo.min(to_hi)
    } else {
        -(wrap_angle(phi - lo).abs().min(wrap_angle(phi - hi).abs()))
    }
}

/// Parametrization coordinates: angle, radius and vertical offset.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SlabParam {
    pub theta: f64,
    pub r: f64,
    pub s: f64,
}

/// One piece u_{μ,J} in one of its three variants.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConeSlab {
    pub params: DecompositionParams,
    pub mu: SectorIndex,
    pub j: RadialInterval,
    pub variant: SlabVariant,
}

impl ConeSlab {
    /// Validates μ against the index set of `params` and |J| ≤ √δ.
    pub fn new(
        params: DecompositionParams,
        mu: i64,
        j: RadialInterval,
        variant: SlabVariant,
    ) -> Result<Self> {
        if !params.contains_index(mu) {
            return Err(Error::IndexOutOfRange(mu));
        }
        j.check_width(&params)?;
        if let SlabVariant::EpsNeighborhood(e) = variant {
            SlabVariant::eps(e)?;
        }
        Ok(Self {
            params,
            mu: SectorIndex(mu),
            j,
            variant,
        })
    }

    pub fn standard(params: DecompositionParams, mu: i64, j: RadialInterval) -> Result<Self> {
        Self::new(params, mu, j, SlabVariant::Standard)
    }

    pub fn with_index(&self, mu: i64) -> Result<Self> {
        Self::new(self.params, mu, self.j, self.variant)
    }

    pub fn shape(&self) -> SlabShape {
        let h = self.params.sqrt_delta();
        let d = self.params.delta();
        let mu = self.mu.0 as f64;
        match self.variant {
            SlabVariant::Standard => SlabShape {
                ang_lo: mu * h,
                ang_hi: (mu + 1.0) * h,
                rad_lo: self.j.alpha,
                rad_hi: self.j.beta,
                vert: d,
                inflate: 0.0,
            },
            SlabVariant::Enlarged => SlabShape {
                ang_lo: (mu - 1.0) * h,
                ang_hi: (mu + 2.0) * h,
                rad_lo: self.j.alpha - 2.0 * d,
                rad_hi: self.j.beta + 2.0 * d,
                vert: 6.0 * d,
                inflate: 0.0,
            },
            SlabVariant::EpsNeighborhood(eps) => SlabShape {
                ang_lo: mu * h,
                ang_hi: (mu + 1.0) * h,
                rad_lo: self.j.alpha,
                rad_hi: self.j.beta,
                vert: d,
                inflate: d.powf(1.0 - eps),
            },
        }
    }

    /// Neighborhood radius δ^{1−ε} for the ε variant, 0 otherwise.
    pub fn inflation(&self) -> f64 {
        self.shape().inflate
    }

    /// Membership for any variant.
    pub fn contains(&self, p: Point3) -> Verdict {
        match self.variant {
            SlabVariant::EpsNeighborhood(_) => eps_slab_contains(self, p).expect("eps variant"),
            _ => slab_contains(self, p).expect("standard or enlarged variant"),
        }
    }

    /// Inverse of [`slab_param_point`]: (arg ξ, |ξ|, η − |ξ|).
    pub fn param_of(&self, p: Point3) -> SlabParam {
        let r = p.xi().norm();
        SlabParam {
            theta: p.xi().arg(),
            r,
            s: p.eta - r,
        }
    }
}

/// All μ with |μ| ≤ bound·δ^{−1/2} − 1, ascending.
pub fn index_set(params: &DecompositionParams) -> Vec<SectorIndex> {
    match params.index_bound() {
        Some(m) => (-m..=m).map(SectorIndex).collect(),
        None => Vec::new(),
    }
}

/// Half-open sector test μ√δ ≤ arg ξ < (μ+1)√δ with the default slack.
pub fn sector_contains(mu: SectorIndex, xi: Point2, params: &DecompositionParams) -> Result<Verdict> {
    if xi == Point2::ORIGIN {
        return Err(Error::ZeroVector);
    }
    let h = params.sqrt_delta();
    let lo = mu.0 as f64 * h;
    Ok(Verdict::from_margin(
        angle_margin(xi.arg(), lo, lo + h),
        DEFAULT_SLACK,
    ))
}

/// Membership in a standard or enlarged slab.
pub fn slab_contains(slab: &ConeSlab, p: Point3) -> Result<Verdict> {
    if let SlabVariant::EpsNeighborhood(_) = slab.variant {
        return Err(Error::WrongVariant("eps-neighborhood"));
    }
    Ok(slab.shape().core_contains(p, DEFAULT_SLACK))
}

/// `(r cos θ, r sin θ, r + s)` for an in-range parameter.
pub fn slab_param_point(slab: &ConeSlab, q: SlabParam) -> Result<Point3> {
    let sh = slab.shape();
    if !(sh.ang_lo <= q.theta && q.theta < sh.ang_hi) {
        return Err(Error::ParamOutOfRange(format!(
            "theta {} outside [{}, {})",
            q.theta, sh.ang_lo, sh.ang_hi
        )));
    }
    if !(sh.rad_lo <= q.r && q.r <= sh.rad_hi) {
        return Err(Error::ParamOutOfRange(format!(
            "r {} outside [{}, {}]",
            q.r, sh.rad_lo, sh.rad_hi
        )));
    }
    if q.s.abs() > sh.vert {
        return Err(Error::ParamOutOfRange(format!("|s| = {} > {}", q.s.abs(), sh.vert)));
    }
    Ok(sh.point(q.theta, q.r, q.s))
}

/// Certified bracket on a Euclidean distance.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DistanceBracket {
    pub lower: f64,
    pub upper: f64,
}

impl DistanceBracket {
    pub fn contains(&self, d: f64) -> bool {
        self.lower <= d && d <= self.upper
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

/// Rounding pad for closed-form distances of points with |p| ≲ 10.
pub(crate) fn distance_pad(p: Point3) -> f64 {
    1e-13 * (1.0 + p.norm())
}

/// Distance from `p` to the underlying (non-inflated) slab set.
///
/// Defined for standard slabs; for the ε variant it measures the distance to
/// the standard slab whose neighborhood is taken.
pub fn slab_distance(slab: &ConeSlab, p: Point3) -> Result<DistanceBracket> {
    if slab.variant == SlabVariant::Enlarged {
        return Err(Error::WrongVariant("enlarged"));
    }
    let d = slab.shape().core_distance(p);
    let pad = distance_pad(p);
    Ok(DistanceBracket {
        lower: (d - pad).max(0.0),
        upper: d + pad,
    })
}

/// Membership in the open δ^{1−ε}-neighborhood of the standard slab.
pub fn eps_slab_contains(slab: &ConeSlab, p: Point3) -> Result<Verdict> {
    let SlabVariant::EpsNeighborhood(_) = slab.variant else {
        return Err(Error::WrongVariant(slab.variant.name()));
    };
    let b = slab_distance(slab, p)?;
    Ok(verdict_from_bracket(b, slab.inflation(), DEFAULT_SLACK))
}

/// `d < radius` tested against a bracket with a slack band.
pub fn verdict_from_bracket(b: DistanceBracket, radius: f64, slack: f64) -> Verdict {
    if b.upper < radius - slack {
        Verdict::In
    } else if b.lower > radius + slack {
        Verdict::Out
    } else {
        Verdict::BOUNDARY
    }
}

/// Shift a sector index by `k`; rotating by k√δ maps Γ_μ onto Γ_{μ+k}.
pub fn rotate_slab_index(
    mu: SectorIndex,
    k: i64,
    params: &DecompositionParams,
) -> Result<SectorIndex> {
    let shifted = mu.0 + k;
    if !params.contains_index(shifted) {
        return Err(Error::IndexOutOfRange(shifted));
    }
    Ok(SectorIndex(shifted))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::rotate;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn p4() -> DecompositionParams {
        DecompositionParams::standard(1e-4).unwrap()
    }

    #[test]
    fn index_set_examples() {
        let s = index_set(&p4());
        assert_eq!(s.len(), 77);
        assert_eq!(s.first(), Some(&SectorIndex(-38)));
        assert_eq!(s.last(), Some(&SectorIndex(38)));
        let s = index_set(&DecompositionParams::standard(1e-2).unwrap());
        assert_eq!(s, (-2..=2).map(SectorIndex).collect::<Vec<_>>());
        let tiny = DecompositionParams::new(1e-2, 0.05).unwrap();
        assert!(index_set(&tiny).is_empty());
    }

    #[test]
    fn params_validation() {
        assert!(DecompositionParams::standard(0.0).is_err());
        assert!(DecompositionParams::standard(0.02).is_err());
        assert!(DecompositionParams::new(1e-3, PI).is_err());
        assert!(DecompositionParams::derived(0.016, STARRED_SECTOR_BOUND).is_ok());
        assert!(RadialInterval::new(0.9, 1.0).is_err());
        assert!(RadialInterval::new(1.5, 1.4).is_err());
        let j = RadialInterval::new(1.2, 1.3).unwrap();
        assert!(ConeSlab::standard(p4(), 0, j).is_err());
    }

    #[test]
    fn sector_contains_examples() {
        let p = p4();
        let xi = Point2::polar(1.3, 0.035);
        assert_eq!(sector_contains(SectorIndex(3), xi, &p).unwrap(), Verdict::In);
        assert_eq!(sector_contains(SectorIndex(0), Point2::new(1.0, 0.0), &p).unwrap(), Verdict::In);
        assert_eq!(sector_contains(SectorIndex(-1), Point2::new(1.0, 0.0), &p).unwrap(), Verdict::BOUNDARY);
        assert_eq!(sector_contains(SectorIndex(0), Point2::polar(1.0, 0.005), &p).unwrap(), Verdict::In);
        assert_eq!(sector_contains(SectorIndex(0), Point2::polar(1.0, 0.02), &p).unwrap(), Verdict::Out);
        assert_eq!(sector_contains(SectorIndex(0), Point2::ORIGIN, &p), Err(Error::ZeroVector));
    }

    fn example_slab(variant: SlabVariant) -> ConeSlab {
        let j = RadialInterval::new(1.2, 1.21).unwrap();
        ConeSlab::new(p4(), 0, j, variant).unwrap()
    }

    #[test]
    fn slab_contains_examples() {
        let xi = Point2::new(1.205, 0.0);
        let s = example_slab(SlabVariant::Standard);
        assert_eq!(slab_contains(&s, Point3::from_parts(xi, 1.205)).unwrap(), Verdict::In);
        assert_eq!(slab_contains(&s, Point3::from_parts(xi, 1.2052)).unwrap(), Verdict::Out);
        let e = example_slab(SlabVariant::Enlarged);
        assert_eq!(slab_contains(&e, Point3::from_parts(xi, 1.2055)).unwrap(), Verdict::In);
        let eps = example_slab(SlabVariant::EpsNeighborhood(0.3));
        assert_eq!(
            slab_contains(&eps, Point3::new(1.205, 0.0, 1.205)),
            Err(Error::WrongVariant("eps-neighborhood"))
        );
    }

    #[test]
    fn on_edge_angle_zero_is_closed_side() {
        let s = example_slab(SlabVariant::Standard);
        let v = slab_contains(&s, Point3::new(1.205, 0.0, 1.205)).unwrap();
        assert_eq!(v, Verdict::In);
        // Just below the closed end lies in the slack band.
        let v = slab_contains(&s, Point3::from_parts(Point2::polar(1.205, -1e-14), 1.205)).unwrap();
        assert!(v.is_unknown());
    }

    #[test]
    fn slab_param_point_examples() {
        let s = example_slab(SlabVariant::Standard);
        let j = RadialInterval::new(1.49, 1.5).unwrap();
        let wide = ConeSlab::standard(p4(), 0, j).unwrap();
        let q = SlabParam { theta: 0.0, r: 1.5, s: 0.0 };
        assert_eq!(slab_param_point(&wide, q).unwrap(), Point3::new(1.5, 0.0, 1.5));
        let q = SlabParam { theta: 0.0, r: 1.5, s: 1e-4 };
        assert_eq!(slab_param_point(&wide, q).unwrap(), Point3::new(1.5, 0.0, 1.5 + 1e-4));
        let one = s.with_index(1).unwrap();
        let q = SlabParam { theta: 0.015, r: 1.205, s: 0.0 };
        let pt = slab_param_point(&one, q).unwrap();
        assert_eq!(sector_contains(SectorIndex(1), pt.xi(), &p4()).unwrap(), Verdict::In);
        let bad = SlabParam { theta: 0.5, r: 1.205, s: 0.0 };
        assert!(matches!(slab_param_point(&s, bad), Err(Error::ParamOutOfRange(_))));
    }

    /// Dense-sampling oracle for the distance to a standard slab.
    fn sampled_distance(slab: &ConeSlab, p: Point3, n: usize) -> f64 {
        let sh = slab.shape();
        let mut best = f64::INFINITY;
        for i in 0..=n {
            let theta = sh.ang_lo + sh.ang_width() * i as f64 / n as f64;
            for k in 0..=n {
                let r = sh.rad_lo + (sh.rad_hi - sh.rad_lo) * k as f64 / n as f64;
                for m in 0..=8 {
                    let s = -sh.vert + 2.0 * sh.vert * m as f64 / 8.0;
                    best = best.min(sh.point(theta, r, s).dist(p));
                }
            }
        }
        best
    }

    #[test]
    fn slab_distance_examples() {
        let s = example_slab(SlabVariant::Standard);
        let q = SlabParam { theta: 0.004, r: 1.203, s: 3e-5 };
        let inside = slab_param_point(&s, q).unwrap();
        assert!(slab_distance(&s, inside).unwrap().contains(0.0));
        let far = slab_distance(&s, Point3::new(10.0, 0.0, 0.0)).unwrap();
        assert!(far.lower > 7.0);
        // On-cone point outside the sector by angle γ: chord length 2r₀ sin(γ/2).
        let (r0, gamma) = (1.205, 0.05);
        let p = Point3::from_parts(Point2::polar(r0, s.shape().ang_hi + gamma), r0);
        let b = slab_distance(&s, p).unwrap();
        let chord = 2.0 * r0 * (gamma / 2.0).sin();
        assert!((b.upper - chord).abs() < 2e-4 * chord, "{b:?} vs {chord}");
        let oracle = sampled_distance(&s, p, 400);
        assert!(b.lower <= oracle + 1e-12);
        assert!(oracle - b.upper < 1e-5, "{oracle} vs {b:?}");
    }

    #[test]
    fn slab_distance_agrees_with_sampling_oracle() {
        let s = example_slab(SlabVariant::Standard);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..40 {
            let p = Point3::new(
                rng.gen_range(1.0..1.4),
                rng.gen_range(-0.1..0.1),
                rng.gen_range(1.0..1.4),
            );
            let b = slab_distance(&s, p).unwrap();
            let oracle = sampled_distance(&s, p, 200);
            // The sampled minimum can only overestimate.
            assert!(b.lower <= oracle + 1e-12, "{b:?} vs {oracle}");
            assert!(oracle - b.upper <= 2e-4, "{b:?} vs {oracle}");
        }
    }

    #[test]
    fn eps_slab_contains_examples() {
        let s = example_slab(SlabVariant::EpsNeighborhood(0.3));
        let rho = s.inflation();
        let on = Point3::from_parts(Point2::polar(1.205, 0.004), 1.205);
        assert_eq!(eps_slab_contains(&s, on).unwrap(), Verdict::In);
        // Vertically above the top face at height d the distance is d/√2,
        // since the face η = |ξ| + δ is inclined at 45°.
        let up = |d: f64| Point3::from_parts(Point2::polar(1.205, 0.004), 1.205 + 1e-4 + d);
        assert_eq!(eps_slab_contains(&s, up(1.2 * rho)).unwrap(), Verdict::In);
        assert_eq!(eps_slab_contains(&s, up(2.0 * rho)).unwrap(), Verdict::Out);
        assert!(eps_slab_contains(&s, up(std::f64::consts::SQRT_2 * rho)).unwrap().is_unknown());
        let b = DistanceBracket { lower: 0.9 * rho, upper: 1.1 * rho };
        assert!(verdict_from_bracket(b, rho, DEFAULT_SLACK).is_unknown());
        let b = DistanceBracket { lower: 2.0 * rho, upper: 2.001 * rho };
        assert_eq!(verdict_from_bracket(b, rho, DEFAULT_SLACK), Verdict::Out);
    }

    #[test]
    fn rotate_slab_index_examples() {
        let p = p4();
        assert_eq!(rotate_slab_index(SectorIndex(3), -3, &p).unwrap(), SectorIndex(0));
        assert_eq!(rotate_slab_index(SectorIndex(0), 5, &p).unwrap(), SectorIndex(5));
        assert_eq!(rotate_slab_index(SectorIndex(38), 1, &p), Err(Error::IndexOutOfRange(39)));
    }

    fn random_interior(slab: &ConeSlab, rng: &mut ChaCha8Rng) -> SlabParam {
        let sh = slab.shape();
        let m = 1e-9;
        SlabParam {
            theta: rng.gen_range(sh.ang_lo + m..sh.ang_hi - m),
            r: rng.gen_range(sh.rad_lo + m..sh.rad_hi - m),
            s: rng.gen_range(-sh.vert + m..sh.vert - m),
        }
    }

    #[test]
    fn parametrization_soundness_and_completeness() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for variant in [SlabVariant::Standard, SlabVariant::Enlarged] {
            let slab = ConeSlab::new(p4(), 7, RadialInterval::new(1.4, 1.41).unwrap(), variant).unwrap();
            for _ in 0..10_000 {
                let q = random_interior(&slab, &mut rng);
                let p = slab_param_point(&slab, q).unwrap();
                assert_eq!(slab_contains(&slab, p).unwrap(), Verdict::In);
                let back = slab_param_point(&slab, slab.param_of(p)).unwrap();
                assert!(back.dist(p) < 1e-10);
            }
        }
    }

    #[test]
    fn standard_slab_nests_in_enlarged() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let j = RadialInterval::new(1.7, 1.71).unwrap();
        let std_slab = ConeSlab::standard(p4(), -5, j).unwrap();
        let big = ConeSlab::new(p4(), -5, j, SlabVariant::Enlarged).unwrap();
        for _ in 0..2_000 {
            let p = slab_param_point(&std_slab, random_interior(&std_slab, &mut rng)).unwrap();
            assert_eq!(slab_contains(&big, p).unwrap(), Verdict::In);
        }
    }

    #[test]
    fn distance_consistency_with_membership() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        let slab = ConeSlab::standard(p4(), 2, RadialInterval::new(1.1, 1.11).unwrap()).unwrap();
        for _ in 0..2_000 {
            let p = Point3::new(
                rng.gen_range(1.05..1.15),
                rng.gen_range(0.0..0.06),
                rng.gen_range(1.05..1.15),
            );
            let b = slab_distance(&slab, p).unwrap();
            match slab_contains(&slab, p).unwrap() {
                Verdict::In => assert!(b.lower <= 1e-12),
                Verdict::Out => assert!(b.upper > 0.0),
                _ => {}
            }
        }
    }

    #[test]
    fn rotation_covariance_of_membership() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let p = p4();
        let h = p.sqrt_delta();
        let j = RadialInterval::new(1.3, 1.31).unwrap();
        let base = ConeSlab::standard(p, -4, j).unwrap();
        for k in [-10i64, -1, 3, 20] {
            let moved = base.with_index(-4 + k).unwrap();
            for _ in 0..1_000 {
                let pt = Point3::new(
                    rng.gen_range(1.25..1.36),
                    rng.gen_range(-0.07..0.0),
                    rng.gen_range(1.25..1.36),
                );
                let a = slab_contains(&base, pt).unwrap();
                let b = slab_contains(&moved, pt.rotate_xi(k as f64 * h)).unwrap();
                if !a.is_unknown() && !b.is_unknown() {
                    assert_eq!(a, b);
                }
            }
        }
        let _ = rotate;
    }
}
