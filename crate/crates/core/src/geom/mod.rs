//! Planar and spatial primitives: points, rotations, rectangles, annuli,
//! and interval enclosures of the norm and argument over axis boxes.

mod interval;

pub use interval::{Interval, ULP_SLACK};

use std::f64::consts::PI;
use std::ops::{Add, Mul, Sub};

use crate::error::{Error, Result};

/// Default width of the indeterminate band around every certified boundary.
pub const DEFAULT_SLACK: f64 = 1e-12;

/// Three-valued membership result. `In` and `Out` are certified claims.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    In,
    Out,
    /// Undecided. `budget_exhausted` is true when the search ran out of
    /// boxes, false when the point sits inside a slack band.
    Unknown { budget_exhausted: bool },
}

impl Verdict {
    pub const BOUNDARY: Verdict = Verdict::Unknown {
        budget_exhausted: false,
    };

    pub fn is_in(self) -> bool {
        self == Verdict::In
    }

    pub fn is_out(self) -> bool {
        self == Verdict::Out
    }

    pub fn is_unknown(self) -> bool {
        matches!(self, Verdict::Unknown { .. })
    }

    /// Three-valued conjunction.
    pub fn and(self, other: Verdict) -> Verdict {
        match (self, other) {
            (Verdict::Out, _) | (_, Verdict::Out) => Verdict::Out,
            (Verdict::In, Verdict::In) => Verdict::In,
            (Verdict::Unknown { budget_exhausted: a }, Verdict::Unknown { budget_exhausted: b }) => {
                Verdict::Unknown {
                    budget_exhausted: a || b,
                }
            }
            (u @ Verdict::Unknown { .. }, Verdict::In) | (Verdict::In, u @ Verdict::Unknown { .. }) => u,
        }
    }

    /// Classify a signed margin (positive inside) against a slack band.
    pub fn from_margin(margin: f64, slack: f64) -> Verdict {
        if margin > slack {
            Verdict::In
        } else if margin < -slack {
            Verdict::Out
        } else {
            Verdict::BOUNDARY
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Verdict::In => "in",
            Verdict::Out => "out",
            Verdict::Unknown { .. } => "unknown",
        }
    }
}

/// A point ξ = (ξ₁, ξ₂) of the frequency plane.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Point2 {
    pub x1: f64,
    pub x2: f64,
}

impl Point2 {
    pub const ORIGIN: Point2 = Point2 { x1: 0.0, x2: 0.0 };

    pub const fn new(x1: f64, x2: f64) -> Self {
        Self { x1, x2 }
    }

    /// `r·(cos θ, sin θ)`.
    pub fn polar(r: f64, theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self::new(r * c, r * s)
    }

    pub fn norm(self) -> f64 {
        self.x1.hypot(self.x2)
    }

    /// Argument in (−π, π]. The zero vector maps to 0.
    pub fn arg(self) -> f64 {
        // atan2(-0.0, x<0) = -π; normalise the signed zero.
        let x2 = if self.x2 == 0.0 { 0.0 } else { self.x2 };
        x2.atan2(self.x1)
    }

    pub fn dot(self, other: Point2) -> f64 {
        self.x1 * other.x1 + self.x2 * other.x2
    }

    /// z-component of `self × other`.
    pub fn cross(self, other: Point2) -> f64 {
        self.x1 * other.x2 - self.x2 * other.x1
    }

    pub fn dist(self, other: Point2) -> f64 {
        (self - other).norm()
    }

    pub fn is_finite(self) -> bool {
        self.x1.is_finite() && self.x2.is_finite()
    }
}

impl Add for Point2 {
    type Output = Point2;
    fn add(self, o: Point2) -> Point2 {
        Point2::new(self.x1 + o.x1, self.x2 + o.x2)
    }
}

impl Sub for Point2 {
    type Output = Point2;
    fn sub(self, o: Point2) -> Point2 {
        Point2::new(self.x1 - o.x1, self.x2 - o.x2)
    }
}

impl Mul<f64> for Point2 {
    type Output = Point2;
    fn mul(self, k: f64) -> Point2 {
        Point2::new(self.x1 * k, self.x2 * k)
    }
}

/// A point (ξ, η) ∈ ℝ² × ℝ.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Point3 {
    pub x1: f64,
    pub x2: f64,
    pub eta: f64,
}

impl Point3 {
    pub const fn new(x1: f64, x2: f64, eta: f64) -> Self {
        Self { x1, x2, eta }
    }

    pub fn from_parts(xi: Point2, eta: f64) -> Self {
        Self::new(xi.x1, xi.x2, eta)
    }

    pub fn xi(self) -> Point2 {
        Point2::new(self.x1, self.x2)
    }

    pub fn norm(self) -> f64 {
        self.x1.hypot(self.x2).hypot(self.eta)
    }

    pub fn dist(self, other: Point3) -> f64 {
        (self - other).norm()
    }

    pub fn is_finite(self) -> bool {
        self.x1.is_finite() && self.x2.is_finite() && self.eta.is_finite()
    }

    /// Rotate the ξ component about the η axis.
    pub fn rotate_xi(self, sigma: f64) -> Self {
        Self::from_parts(rotate(self.xi(), sigma), self.eta)
    }
}

impl Add for Point3 {
    type Output = Point3;
    fn add(self, o: Point3) -> Point3 {
        Point3::new(self.x1 + o.x1, self.x2 + o.x2, self.eta + o.eta)
    }
}

impl Sub for Point3 {
    type Output = Point3;
    fn sub(self, o: Point3) -> Point3 {
        Point3::new(self.x1 - o.x1, self.x2 - o.x2, self.eta - o.eta)
    }
}

impl Mul<f64> for Point3 {
    type Output = Point3;
    fn mul(self, k: f64) -> Point3 {
        Point3::new(self.x1 * k, self.x2 * k, self.eta * k)
    }
}

/// Rotation about the origin with `rotate((1,0), σ) = (cos σ, sin σ)`.
pub fn rotate(p: Point2, sigma: f64) -> Point2 {
    let (s, c) = sigma.sin_cos();
    Point2::new(c * p.x1 - s * p.x2, s * p.x1 + c * p.x2)
}

/// Reduce an angle to (−π, π].
pub fn wrap_angle(theta: f64) -> f64 {
    let mut t = theta % (2.0 * PI);
    if t <= -PI {
        t += 2.0 * PI;
    } else if t > PI {
        t -= 2.0 * PI;
    }
    t
}

/// Enclosure of `√(x²+y²)` over the box `x_iv × y_iv`.
pub fn iv_eval_norm(x_iv: Interval, y_iv: Interval) -> Interval {
    (x_iv.sqr() + y_iv.sqr()).sqrt()
}

/// Enclosure of `arg(x, y)` over the box, with arg ∈ (−π, π].
///
/// A box straddling the negative real axis has no continuous branch; the
/// enclosure returned then is the full range `[−π, π]`.
pub fn iv_eval_arg(x_iv: Interval, y_iv: Interval) -> Result<Interval> {
    if x_iv.contains_zero() && y_iv.contains_zero() {
        return Err(Error::BoxContainsOrigin);
    }
    if x_iv.hi < 0.0 && y_iv.lo < 0.0 && y_iv.hi >= 0.0 {
        return Ok(Interval::new(-PI, PI));
    }
    let corners = [
        Point2::new(x_iv.lo, y_iv.lo),
        Point2::new(x_iv.lo, y_iv.hi),
        Point2::new(x_iv.hi, y_iv.lo),
        Point2::new(x_iv.hi, y_iv.hi),
    ];
    let (lo, hi) = corners
        .iter()
        .map(|c| c.arg())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), a| (lo.min(a), hi.max(a)));
    let pad = 4.0 * ULP_SLACK;
    Ok(Interval::new((lo - pad).max(-PI), (hi + pad).min(PI)))
}

/// Rotated rectangle: the image under `rotate(·, rotation)` of
/// `[−half_width, half_width] × [−half_height, half_height]`, translated to
/// `center`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rect2 {
    pub center: Point2,
    pub half_width: f64,
    pub half_height: f64,
    pub rotation: f64,
}

impl Rect2 {
    pub fn axis_aligned(center: Point2, half_width: f64, half_height: f64) -> Self {
        Self::new(center, half_width, half_height, 0.0)
    }

    /// Panics on negative half-extents.
    pub fn new(center: Point2, half_width: f64, half_height: f64, rotation: f64) -> Self {
        assert!(half_width >= 0.0 && half_height >= 0.0, "negative rectangle extent");
        Self {
            center,
            half_width,
            half_height,
            rotation: wrap_angle(rotation),
        }
    }

    /// The rectangle rotated about the origin (not about its center).
    pub fn rotated_about_origin(self, sigma: f64) -> Self {
        Self::new(
            rotate(self.center, sigma),
            self.half_width,
            self.half_height,
            self.rotation + sigma,
        )
    }

    /// Corners in counter-clockwise order.
    pub fn corners(self) -> [Point2; 4] {
        let (w, h) = (self.half_width, self.half_height);
        [(-w, -h), (w, -h), (w, h), (-w, h)]
            .map(|(a, b)| self.center + rotate(Point2::new(a, b), self.rotation))
    }

    /// Coordinates of `p` in the rectangle's own frame.
    pub fn local(self, p: Point2) -> Point2 {
        rotate(p - self.center, -self.rotation)
    }
}

/// Closed annulus `{ξ : inner ≤ |ξ| ≤ outer}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Annulus {
    pub inner: f64,
    pub outer: f64,
}

impl Annulus {
    pub fn new(inner: f64, outer: f64) -> Self {
        assert!(0.0 <= inner && inner <= outer, "invalid annulus [{inner}, {outer}]");
        Self { inner, outer }
    }

    pub fn contains(self, p: Point2) -> bool {
        let r = p.norm();
        self.inner <= r && r <= self.outer
    }
}

fn segment_distance(p: Point2, a: Point2, b: Point2) -> f64 {
    let ab = b - a;
    let len2 = ab.dot(ab);
    if len2 == 0.0 {
        return p.dist(a);
    }
    let t = ((p - a).dot(ab) / len2).clamp(0.0, 1.0);
    p.dist(a + ab * t)
}

/// Exact range of `|ξ|` over the rectangle.
pub fn rect_norm_range(r: Rect2) -> Interval {
    let corners = r.corners();
    let max = corners.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let o = r.local(Point2::ORIGIN);
    let min = if o.x1.abs() <= r.half_width && o.x2.abs() <= r.half_height {
        0.0
    } else {
        (0..4)
            .map(|i| segment_distance(Point2::ORIGIN, corners[i], corners[(i + 1) % 4]))
            .fold(f64::INFINITY, f64::min)
    };
    Interval::new(min, max.max(min))
}

/// Membership of `p` in the closed rectangle with a slack band.
pub fn rect_contains(r: Rect2, p: Point2, slack: f64) -> Verdict {
    let q = r.local(p);
    let margin = (r.half_width - q.x1.abs()).min(r.half_height - q.x2.abs());
    Verdict::from_margin(margin, slack)
}

/// Whether the rectangle lies inside the closed annulus.
pub fn annulus_contains_rect(a: Annulus, r: Rect2) -> bool {
    rect_norm_range(r).is_subset_of(Interval::new(a.inner, a.outer))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn close(a: Point2, b: Point2, tol: f64) -> bool {
        (a.x1 - b.x1).abs() <= tol && (a.x2 - b.x2).abs() <= tol
    }

    #[test]
    fn rotate_examples() {
        assert!(close(rotate(Point2::new(1.0, 0.0), PI / 2.0), Point2::new(0.0, 1.0), 1e-15));
        assert_eq!(rotate(Point2::new(2.0, 0.0), 0.0), Point2::new(2.0, 0.0));
        assert!(close(rotate(Point2::new(1.0, 1.0), PI), Point2::new(-1.0, -1.0), 1e-15));
    }

    #[test]
    fn norm_enclosure_examples() {
        let n = iv_eval_norm(Interval::point(1.0), Interval::point(0.0));
        assert!(n.contains(1.0) && n.width() < 1e-12);
        let n = iv_eval_norm(Interval::new(-1.0, 1.0), Interval::new(-1.0, 1.0));
        assert!(n.lo <= 0.0 && n.hi >= 2f64.sqrt());
        let n = iv_eval_norm(Interval::new(3.0, 4.0), Interval::point(0.0));
        assert!(n.lo <= 3.0 && n.hi >= 4.0 && n.lo > 3.0 - 1e-12 && n.hi < 4.0 + 1e-12);
    }

    #[test]
    fn arg_enclosure_examples() {
        let a = iv_eval_arg(Interval::point(1.0), Interval::point(0.0)).unwrap();
        assert!(a.contains(0.0) && a.width() < 1e-12);
        let a = iv_eval_arg(Interval::point(1.0), Interval::new(-1.0, 1.0)).unwrap();
        assert!(a.lo <= -PI / 4.0 && a.hi >= PI / 4.0);
        assert_eq!(
            iv_eval_arg(Interval::new(-1.0, 1.0), Interval::new(-1.0, 1.0)),
            Err(Error::BoxContainsOrigin)
        );
    }

    #[test]
    fn arg_enclosure_across_branch_cut_is_full_range() {
        let a = iv_eval_arg(Interval::new(-2.0, -1.0), Interval::new(-0.5, 0.5)).unwrap();
        assert!(a.lo <= -PI + 1e-12 && a.hi >= PI - 1e-12);
    }

    #[test]
    fn rect_norm_range_examples() {
        let r = Rect2::axis_aligned(Point2::new(2.0, 0.0), 0.1, 0.2);
        let n = rect_norm_range(r);
        assert!((n.lo - 1.9).abs() < 1e-15);
        assert!((n.hi - (2.1f64 * 2.1 + 0.04).sqrt()).abs() < 1e-15);
        let n = rect_norm_range(Rect2::axis_aligned(Point2::ORIGIN, 0.3, 0.4));
        assert_eq!(n.lo, 0.0);
        assert!((n.hi - 0.5).abs() < 1e-15);
        let n = rect_norm_range(Rect2::axis_aligned(Point2::new(5.0, 0.0), 0.0, 0.0));
        assert_eq!((n.lo, n.hi), (5.0, 5.0));
    }

    #[test]
    fn rect_contains_examples() {
        let sq = Rect2::axis_aligned(Point2::ORIGIN, 0.5, 0.5);
        assert_eq!(rect_contains(sq, Point2::ORIGIN, DEFAULT_SLACK), Verdict::In);
        assert_eq!(rect_contains(sq, Point2::new(5.0, 5.0), DEFAULT_SLACK), Verdict::Out);
        assert!(rect_contains(sq, Point2::new(0.5, 0.0), 1e-12).is_unknown());
    }

    #[test]
    fn annulus_contains_rect_examples() {
        let a = Annulus::new(1.0, 3.0);
        assert!(annulus_contains_rect(a, Rect2::axis_aligned(Point2::new(2.0, 0.0), 0.1, 0.1)));
        assert!(!annulus_contains_rect(a, Rect2::axis_aligned(Point2::new(3.5, 0.0), 0.01, 0.01)));
        let big = Annulus::new(0.0, 10.0);
        assert!(annulus_contains_rect(big, Rect2::new(Point2::new(3.0, 4.0), 1.0, 2.0, 0.7)));
    }

    #[test]
    fn enclosures_contain_sampled_values() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let x0 = rng.gen_range(-3.0..3.0);
            let y0 = rng.gen_range(-3.0..3.0);
            let xi = Interval::new(x0, x0 + rng.gen_range(0.0..0.5));
            let yi = Interval::new(y0, y0 + rng.gen_range(0.0..0.5));
            let n = iv_eval_norm(xi, yi);
            let a = iv_eval_arg(xi, yi);
            for _ in 0..200 {
                let p = Point2::new(rng.gen_range(xi.lo..=xi.hi), rng.gen_range(yi.lo..=yi.hi));
                assert!(n.contains(p.norm()));
                if let Ok(a) = a {
                    assert!(a.contains(p.arg()), "{a} misses {}", p.arg());
                }
            }
        }
    }

    /// Sampling oracle: dense grid along a segment, then zoom into the
    /// best cell a few times.
    fn sampled_extreme(a: Point2, b: Point2, maximize: bool) -> f64 {
        let sign = if maximize { -1.0 } else { 1.0 };
        let f = |t: f64| sign * (a + (b - a) * t).norm();
        let (mut lo, mut hi) = (0.0, 1.0);
        let n = 200;
        let mut best = f64::INFINITY;
        for _ in 0..12 {
            let step = (hi - lo) / n as f64;
            let mut arg = lo;
            for k in 0..=n {
                let t = lo + step * k as f64;
                if f(t) < best {
                    best = f(t);
                    arg = t;
                }
            }
            lo = (arg - step).max(0.0);
            hi = (arg + step).min(1.0);
        }
        sign * best
    }

    #[test]
    fn rect_norm_range_matches_dense_sampling() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let r = Rect2::new(
                Point2::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)),
                rng.gen_range(0.0..1.0),
                rng.gen_range(0.0..1.0),
                rng.gen_range(-PI..PI),
            );
            let exact = rect_norm_range(r);
            let c = r.corners();
            let mut lo = (0..4)
                .map(|i| sampled_extreme(c[i], c[(i + 1) % 4], false))
                .fold(f64::INFINITY, f64::min);
            let hi = (0..4)
                .map(|i| sampled_extreme(c[i], c[(i + 1) % 4], true))
                .fold(0.0, f64::max);
            let o = r.local(Point2::ORIGIN);
            if o.x1.abs() <= r.half_width && o.x2.abs() <= r.half_height {
                lo = 0.0;
            }
            assert!((exact.lo - lo).abs() <= 1e-9, "{} vs {lo}", exact.lo);
            assert!((exact.hi - hi).abs() <= 1e-9, "{} vs {hi}", exact.hi);
        }
    }

    proptest! {
        #[test]
        fn rotation_is_an_isometry(
            x1 in -10.0..10.0f64, x2 in -10.0..10.0f64,
            y1 in -10.0..10.0f64, y2 in -10.0..10.0f64,
            sigma in -7.0..7.0f64,
        ) {
            let p = Point2::new(x1, x2);
            let q = Point2::new(y1, y2);
            let d0 = p.dist(q);
            let d1 = rotate(p, sigma).dist(rotate(q, sigma));
            prop_assert!((d0 - d1).abs() <= 1e-12 * d0.max(1.0));
            let back = rotate(rotate(p, sigma), -sigma);
            prop_assert!(p.dist(back) <= 1e-12 * p.norm().max(1.0));
        }
    }
}
