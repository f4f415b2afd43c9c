//! Closed real intervals with outward rounding.
//!
//! Each elementary operation is evaluated in round-to-nearest and then
//! widened by [`ULP_SLACK`] units in the last place of the result (plus a
//! subnormal floor), so the returned interval always encloses the exact
//! real image. Transcendental functions additionally get an absolute slack
//! of the same size, since libm errors are relative to the argument scale.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// Relative widening applied to every rounded bound.
pub const ULP_SLACK: f64 = 4.0 * f64::EPSILON;

#[inline]
fn down(x: f64) -> f64 {
    if x == 0.0 {
        return -f64::MIN_POSITIVE;
    }
    x - x.abs() * ULP_SLACK - f64::MIN_POSITIVE
}

#[inline]
fn up(x: f64) -> f64 {
    if x == 0.0 {
        return f64::MIN_POSITIVE;
    }
    x + x.abs() * ULP_SLACK + f64::MIN_POSITIVE
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    /// Panics if `lo > hi` or either bound is NaN.
    pub fn new(lo: f64, hi: f64) -> Self {
        assert!(lo <= hi, "interval bounds out of order: [{lo}, {hi}]");
        Self { lo, hi }
    }

    /// Degenerate interval `[x, x]`. Exact: no widening.
    pub const fn point(x: f64) -> Self {
        Self { lo: x, hi: x }
    }

    /// Interval from two values in either order.
    pub fn hull_of(a: f64, b: f64) -> Self {
        Self {
            lo: a.min(b),
            hi: a.max(b),
        }
    }

    fn rounded(lo: f64, hi: f64) -> Self {
        Self {
            lo: down(lo),
            hi: up(hi),
        }
    }

    pub fn width(self) -> f64 {
        self.hi - self.lo
    }

    pub fn mid(self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn contains(self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn contains_zero(self) -> bool {
        self.lo <= 0.0 && 0.0 <= self.hi
    }

    /// `self ⊆ other`.
    pub fn is_subset_of(self, other: Interval) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    pub fn hull(self, other: Interval) -> Self {
        Self {
            lo: self.lo.min(other.lo),
            hi: self.hi.max(other.hi),
        }
    }

    /// Intersection, or `None` when disjoint.
    pub fn intersect(self, other: Interval) -> Option<Self> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        (lo <= hi).then_some(Self { lo, hi })
    }

    /// `1/x`, or `None` if the interval contains zero.
    pub fn recip(self) -> Option<Self> {
        if self.contains_zero() {
            return None;
        }
        let a = 1.0 / self.lo;
        let b = 1.0 / self.hi;
        Some(Self::rounded(a.min(b), a.max(b)))
    }

    pub fn sqr(self) -> Self {
        let a = self.lo * self.lo;
        let b = self.hi * self.hi;
        if self.contains_zero() {
            Self {
                lo: 0.0,
                hi: up(a.max(b)),
            }
        } else {
            Self::rounded(a.min(b), a.max(b))
        }
    }

    /// Square root of the non-negative part.
    pub fn sqrt(self) -> Self {
        let lo = self.lo.max(0.0);
        let hi = self.hi.max(0.0);
        Self {
            lo: down(lo.sqrt()).max(0.0),
            hi: up(hi.sqrt()),
        }
    }

    pub fn abs(self) -> Self {
        if self.lo >= 0.0 {
            self
        } else if self.hi <= 0.0 {
            -self
        } else {
            Self {
                lo: 0.0,
                hi: (-self.lo).max(self.hi),
            }
        }
    }

    pub fn scale(self, k: f64) -> Self {
        let a = self.lo * k;
        let b = self.hi * k;
        Self::rounded(a.min(b), a.max(b))
    }

    pub fn max_with(self, x: f64) -> Self {
        Self {
            lo: self.lo.max(x),
            hi: self.hi.max(x),
        }
    }

    /// Enclosure of `cos` over the interval.
    pub fn cos(self) -> Self {
        if self.width() >= TAU {
            return Self::new(-1.0, 1.0);
        }
        let a = self.lo.cos();
        let b = self.hi.cos();
        let mut lo = a.min(b);
        let mut hi = a.max(b);
        // Maxima at 2kπ, minima at (2k+1)π.
        if contains_multiple(self, 0.0, TAU) {
            hi = 1.0;
        }
        if contains_multiple(self, PI, TAU) {
            lo = -1.0;
        }
        trig_widen(lo, hi)
    }

    /// Enclosure of `sin` over the interval.
    pub fn sin(self) -> Self {
        if self.width() >= TAU {
            return Self::new(-1.0, 1.0);
        }
        let a = self.lo.sin();
        let b = self.hi.sin();
        let mut lo = a.min(b);
        let mut hi = a.max(b);
        if contains_multiple(self, 0.5 * PI, TAU) {
            hi = 1.0;
        }
        if contains_multiple(self, -0.5 * PI, TAU) {
            lo = -1.0;
        }
        trig_widen(lo, hi)
    }
}

/// Whether `[iv.lo, iv.hi]` contains some `offset + k·period`.
fn contains_multiple(iv: Interval, offset: f64, period: f64) -> bool {
    let k = ((iv.lo - offset) / period).ceil();
    // Tolerate rounding in the quotient by testing the neighbours as well.
    [k - 1.0, k, k + 1.0].iter().any(|&k| {
        let x = offset + k * period;
        down(iv.lo) <= x && x <= up(iv.hi)
    })
}

fn trig_widen(lo: f64, hi: f64) -> Interval {
    Interval {
        lo: (down(lo) - ULP_SLACK).max(-1.0),
        hi: (up(hi) + ULP_SLACK).min(1.0),
    }
}

impl Add for Interval {
    type Output = Interval;
    fn add(self, rhs: Interval) -> Interval {
        Interval::rounded(self.lo + rhs.lo, self.hi + rhs.hi)
    }
}

impl Add<f64> for Interval {
    type Output = Interval;
    fn add(self, rhs: f64) -> Interval {
        self + Interval::point(rhs)
    }
}

impl Sub for Interval {
    type Output = Interval;
    fn sub(self, rhs: Interval) -> Interval {
        Interval::rounded(self.lo - rhs.hi, self.hi - rhs.lo)
    }
}

impl Sub<f64> for Interval {
    type Output = Interval;
    fn sub(self, rhs: f64) -> Interval {
        self - Interval::point(rhs)
    }
}

impl Sub<Interval> for f64 {
    type Output = Interval;
    fn sub(self, rhs: Interval) -> Interval {
        Interval::point(self) - rhs
    }
}

impl Neg for Interval {
    type Output = Interval;
    fn neg(self) -> Interval {
        Interval {
            lo: -self.hi,
            hi: -self.lo,
        }
    }
}

impl Mul for Interval {
    type Output = Interval;
    fn mul(self, rhs: Interval) -> Interval {
        let c = [
            self.lo * rhs.lo,
            self.lo * rhs.hi,
            self.hi * rhs.lo,
            self.hi * rhs.hi,
        ];
        let lo = c.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = c.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Interval::rounded(lo, hi)
    }
}

impl Mul<f64> for Interval {
    type Output = Interval;
    fn mul(self, rhs: f64) -> Interval {
        self.scale(rhs)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}
