//! Numerical checks of the quantitative lemmas behind the overlap bound.
//!
//! Checks come in three groups: displayed inequalities (cosine bounds,
//! projection diameters, the quadratic gap in m), planar containments
//! (slice-sum rectangles, ellipse arcs against annuli, ball separation) and
//! the regrouping of δ-sectors into coarser δ_ε-sectors. Sampling-based
//! checks combine random boundary-biased samples with every extreme corner
//! of the parameter ranges; a pass is evidence, a failure is a
//! counterexample.

mod containment;
mod displayed;
mod regroup;

pub use containment::*;
pub use displayed::*;
pub use regroup::*;

use std::f64::consts::PI;

use crate::cone::{DecompositionParams, RadialInterval};
use crate::error::{Error, Result};
use crate::geom::Point2;

/// ℓ* = max(ℓ, 1/2).
pub fn ell_star(ell: f64) -> f64 {
    ell.max(0.5)
}

/// Largest half-integer ℓ with ℓ ≤ (π/8)δ^{−1/2} − 1.
pub fn ell_max(delta: f64) -> f64 {
    let x = PI / 8.0 / delta.sqrt() - 1.0;
    (2.0 * x).floor().max(0.0) / 2.0
}

/// ℓ ∈ {0, 1/2, 1, 2, 4, …} up to and including `max`.
pub fn ell_sweep(max: f64) -> Vec<f64> {
    let mut out = vec![0.0];
    if max >= 0.5 {
        out.push(0.5);
    }
    let mut ell = 1.0;
    while ell <= max {
        out.push(ell);
        ell *= 2.0;
    }
    if *out.last().unwrap() < max {
        out.push(max);
    }
    out
}

/// `n` equispaced values from `lo` to `hi` inclusive.
pub fn splits(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n <= 1 || hi <= lo {
        return vec![0.5 * (lo + hi)];
    }
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

/// p_{ℓ,δ}(η′, η″) = (η cos ℓ√δ, (η′ − η″) sin ℓ√δ) with η = η′ + η″.
pub fn p_point(ell: f64, delta: f64, eta_p: f64, eta_pp: f64) -> Point2 {
    let t = ell * delta.sqrt();
    Point2::new((eta_p + eta_pp) * t.cos(), (eta_p - eta_pp) * t.sin())
}

/// Quarter ellipse ξ₁²/η² + ξ₂²/β² = 1 with 1 ≤ ξ₁ ≤ η on the side of the
/// sign of β = η′ − η″, optionally extended by the segment η ≤ ξ₁ ≤ 5 on
/// the axis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EllipseArc {
    pub eta: f64,
    pub beta: f64,
    pub augmented: bool,
}

/// Right end of the augmenting segment.
pub const AUGMENTED_END: f64 = 5.0;

impl EllipseArc {
    pub fn new(eta_p: f64, eta_pp: f64, augmented: bool) -> Self {
        Self {
            eta: eta_p + eta_pp,
            beta: eta_p - eta_pp,
            augmented,
        }
    }

    /// +1 for the upper half (η′ ≥ η″), −1 otherwise.
    pub fn sign(&self) -> f64 {
        if self.beta >= 0.0 {
            1.0
        } else {
            -1.0
        }
    }

    /// Arc point at parameter t: (η cos t, β sin t).
    pub fn at(&self, t: f64) -> Point2 {
        Point2::new(self.eta * t.cos(), self.beta * t.sin())
    }

    /// Largest parameter, where ξ₁ = 1.
    pub fn t_max(&self) -> f64 {
        (1.0 / self.eta).clamp(-1.0, 1.0).acos()
    }

    /// Parameter ranges of the arc inside the annulus r_lo ≤ |ξ| ≤ r_hi
    /// (at most one range, since |ξ| decreases in t).
    pub fn t_range_in_annulus(&self, r_lo: f64, r_hi: f64) -> Option<(f64, f64)> {
        let (e2, b2) = (self.eta * self.eta, self.beta * self.beta);
        let t_max = self.t_max();
        if e2 == b2 || r_lo > self.eta || r_hi < self.at(t_max).norm() {
            return None;
        }
        // |ξ|² = η² − (η² − β²) sin² t.
        let sin2 = |r: f64| ((e2 - r * r) / (e2 - b2)).clamp(0.0, 1.0);
        let lo = sin2(r_hi.max(0.0)).sqrt().asin();
        let hi = sin2(r_lo.max(0.0)).sqrt().asin().min(t_max);
        (lo <= hi && r_lo <= r_hi).then_some((lo, hi))
    }

    /// ξ₁-range of the augmenting segment inside the annulus.
    pub fn segment_in_annulus(&self, r_lo: f64, r_hi: f64) -> Option<(f64, f64)> {
        if !self.augmented {
            return None;
        }
        let lo = self.eta.max(r_lo);
        let hi = AUGMENTED_END.min(r_hi);
        (lo <= hi).then_some((lo, hi))
    }
}

/// Φ(ξ₁) = β·sqrt(1 − ξ₁²/η²), the arc as a graph over ξ₁.
///
/// On an augmented arc ξ₁ may run up to 5, where the graph is 0.
pub fn ellipse_graph(arc: &EllipseArc, xi1: f64) -> Result<f64> {
    let hi = if arc.augmented { AUGMENTED_END } else { arc.eta };
    if !(1.0 <= xi1 && xi1 <= hi) {
        return Err(Error::DomainError { value: xi1, lo: 1.0, hi });
    }
    if xi1 >= arc.eta {
        return Ok(0.0);
    }
    let q = xi1 / arc.eta;
    Ok(arc.beta * (1.0 - q * q).max(0.0).sqrt())
}

/// Admissible heights J̃ = [α − δ, β + δ].
pub fn thickened(j: RadialInterval, delta: f64) -> (f64, f64) {
    j.thickened(delta)
}

/// Range of η′ ∈ J̃₁ with η − η′ ∈ J̃₂, or `None` if η is not attained.
pub fn split_range(eta: f64, j1: RadialInterval, j2: RadialInterval, delta: f64) -> Option<(f64, f64)> {
    let (a1, b1) = j1.thickened(delta);
    let (a2, b2) = j2.thickened(delta);
    let lo = a1.max(eta - b2);
    let hi = b1.min(eta - a2);
    (lo <= hi).then_some((lo, hi))
}

/// A constant together with the check that produced or validated it.
#[derive(Clone, Debug, PartialEq)]
pub struct LedgerEntry {
    pub value: f64,
    pub validated_by: String,
}

impl LedgerEntry {
    fn new(value: f64, validated_by: impl Into<String>) -> Self {
        Self {
            value,
            validated_by: validated_by.into(),
        }
    }
}

/// Constants left unspecified by the lemmas, calibrated once and then
/// frozen: each sampled constant is the tightest passing value at the
/// coarsest δ, doubled.
#[derive(Clone, Debug, PartialEq)]
pub struct ConstantsLedger {
    pub c1: LedgerEntry,
    pub c2: LedgerEntry,
    pub c1p: LedgerEntry,
    pub c2p: LedgerEntry,
    pub c3: LedgerEntry,
    pub b1: LedgerEntry,
    pub b2: LedgerEntry,
    pub b3: LedgerEntry,
    pub c0: LedgerEntry,
    pub a0: LedgerEntry,
}

/// δ at which the ledger is calibrated.
pub const CALIBRATION_DELTA: f64 = 1e-2;
/// Safety factor applied to calibrated constants.
pub const CALIBRATION_FACTOR: f64 = 2.0;
/// b₁ used for the annulus width in the arc containment.
pub const DEFAULT_B1: f64 = 1.0;

impl ConstantsLedger {
    /// Calibrate at δ = 1e−2 for the given intervals (left endpoints; the
    /// widths are δ^{1/2}).
    pub fn calibrate(alpha1: f64, alpha2: f64, samples: usize, seed: u64) -> Result<Self> {
        let params = DecompositionParams::standard(CALIBRATION_DELTA)?;
        let j1 = RadialInterval::pinned(alpha1, &params)?;
        let j2 = RadialInterval::pinned(alpha2, &params)?;
        let f = CALIBRATION_FACTOR;

        let rect = slice_rectangle_sweep(&params, j1, j2, f64::INFINITY, f64::INFINITY, samples, seed)?;
        let c1 = (f * rect.c1).max(1.0);
        let c2 = (f * rect.c2).max(1.0);

        let arc = lemma_3_1_sweep(&params, j1, j2, DEFAULT_B1, samples)?;
        let l33 = lemma_3_3_sweep(&params, j1, j2, c1, c2, samples)?;
        let c1p = (f * l33.c1p).max(1.0);
        let c2p = (f * l33.c2p).max(1.0);
        let c3 = ball_radius_factor(c1, c2, c1p, c2p);
        let c0 = crate::overlap::class_separation_constant(&params, j1, j2, samples.clamp(1, 500), seed)?;
        let a0 = lemma_3_4_sweep(&params, j1, j2, c1, c2, samples)?;

        let at = format!("calibrated at δ = {CALIBRATION_DELTA} (×{f})");
        Ok(Self {
            c1: LedgerEntry::new(c1, format!("check_slice_rectangle, {at}")),
            c2: LedgerEntry::new(c2, format!("check_slice_rectangle, {at}")),
            c1p: LedgerEntry::new(c1p, format!("check_lemma_3_3, {at}")),
            c2p: LedgerEntry::new(c2p, format!("check_lemma_3_3, {at}")),
            c3: LedgerEntry::new(c3, "smallest radius covering both grouped rectangles"),
            b1: LedgerEntry::new(DEFAULT_B1, "chosen; hypothesis checked per cell"),
            b2: LedgerEntry::new(f * arc.b2.max(1e-3), format!("check_lemma_3_1, {at}")),
            b3: LedgerEntry::new(f * arc.b3.max(1e-3), format!("check_lemma_3_1, {at}")),
            c0: LedgerEntry::new(c0, "class_separation_constant at the calibration δ"),
            a0: LedgerEntry::new(a0.max(0.5), "check_lemma_3_4 at the calibration δ"),
        })
    }

    /// All entries by name, in declaration order.
    pub fn entries(&self) -> Vec<(&'static str, &LedgerEntry)> {
        vec![
            ("c1", &self.c1),
            ("c2", &self.c2),
            ("c1p", &self.c1p),
            ("c2p", &self.c2p),
            ("c3", &self.c3),
            ("b1", &self.b1),
            ("b2", &self.b2),
            ("b3", &self.b3),
            ("C0", &self.c0),
            ("a0", &self.a0),
        ]
    }
}

/// Smallest c₃ with R(p; c₁ℓ*δ, (c₂+4)√δ) ∪ R(p; c₁′ℓ*δ, c₂′√δ) inside
/// B(p, c₃√δ) for every admissible ℓ (ℓ*√δ ≤ π/8).
pub fn ball_radius_factor(c1: f64, c2: f64, c1p: f64, c2p: f64) -> f64 {
    let x = c1.max(c1p) * PI / 8.0;
    let y = (c2 + 4.0).max(c2p);
    x.hypot(y)
}
