//! Displayed inequalities: cosine bounds, projection diameters and the
//! quadratic gap in m.

use std::f64::consts::PI;

use rand::Rng;

use super::splits;
use crate::cone::{DecompositionParams, RadialInterval};
use crate::error::{Error, Result};
use crate::geom::Point2;
use crate::sampling::rng_for;

/// Outcome of [`check_cos_bounds`].
#[derive(Clone, Debug, PartialEq)]
pub struct CosBoundsReport {
    pub cells: usize,
    /// Largest amount by which either side is violated (≤ 0 when all hold).
    pub max_violation: f64,
    /// Cells violating by more than [`COS_TOLERANCE`].
    pub violations: Vec<(u64, u64, f64)>,
    pub pass: bool,
}

pub const COS_TOLERANCE: f64 = 1e-12;

/// 2(2/π)²(ℓ+m/2)(m/2)δ ≤ cos ℓ√δ − cos (ℓ+m)√δ ≤ 2(ℓ+m/2)(m/2)δ over the
/// grid ℓ ≤ `ell_max`, m ≤ `m_max`, skipping cells with (ℓ+m)√δ > π/2.
pub fn check_cos_bounds(ell_max: u64, m_max: u64, delta: f64) -> CosBoundsReport {
    let h = delta.sqrt();
    let mut cells = 0;
    let mut max_violation = f64::NEG_INFINITY;
    let mut violations = Vec::new();
    for ell in 0..=ell_max {
        for m in 0..=m_max {
            let (l, mf) = (ell as f64, m as f64);
            if (l + mf) * h > PI / 2.0 {
                continue;
            }
            cells += 1;
            let diff = (l * h).cos() - ((l + mf) * h).cos();
            let core = 2.0 * (l + mf / 2.0) * (mf / 2.0) * delta;
            let lower = (2.0 / PI).powi(2) * core;
            let v = (lower - diff).max(diff - core);
            max_violation = max_violation.max(v);
            if v > COS_TOLERANCE {
                violations.push((ell, m, v));
            }
        }
    }
    CosBoundsReport {
        cells,
        max_violation,
        pass: violations.is_empty(),
        violations,
    }
}

/// Parameter box (θ range, r range) of the slice u^{η′}_{μ,J}, or `None`
/// when the slice is empty.
pub fn slice_box(mu: i64, j: RadialInterval, eta: f64, delta: f64) -> Option<((f64, f64), (f64, f64))> {
    let h = delta.sqrt();
    let r_lo = j.alpha.max(eta - delta);
    let r_hi = j.beta.min(eta + delta);
    (r_lo <= r_hi).then(|| ((mu as f64 * h, (mu + 1) as f64 * h), (r_lo, r_hi)))
}

/// Boundary-biased draw: each coordinate lands on an endpoint with
/// probability 1/2.
pub(crate) fn biased<R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    match rng.gen_range(0..4) {
        0 => lo,
        1 => hi,
        _ => rng.gen_range(lo..=hi),
    }
}

/// Corners of a slice box followed by `n` boundary-biased samples.
pub(crate) fn slice_points<R: Rng + ?Sized>(
    bx: ((f64, f64), (f64, f64)),
    n: usize,
    rng: &mut R,
) -> Vec<Point2> {
    let ((t0, t1), (r0, r1)) = bx;
    let mut out: Vec<Point2> = [(t0, r0), (t0, r1), (t1, r0), (t1, r1)]
        .iter()
        .map(|&(t, r)| Point2::polar(r, t))
        .collect();
    out.extend((0..n).map(|_| Point2::polar(biased(rng, r0, r1), biased(rng, t0, t1))));
    out
}

/// Outcome of [`check_diam_bound`].
#[derive(Clone, Debug, PartialEq)]
pub struct DiamReport {
    /// Largest sampled spread of P₁ over all (η′, η″) splits.
    pub spread: f64,
    pub bound: f64,
    pub pass: bool,
}

/// diam P₁(u^{η′}_{μ,J₁} + u^{η″}_{ν,J₂}) ≤ 12(ℓ+m+1)δ with μ = ℓ+m,
/// ν = −ℓ−m, over 5 × 5 heights (η′, η″) ∈ J̃₁ × J̃₂.
pub fn check_diam_bound(
    params: &DecompositionParams,
    j1: RadialInterval,
    j2: RadialInterval,
    ell: u64,
    m: u64,
    samples: usize,
    seed: u64,
) -> Result<DiamReport> {
    let mu = (ell + m) as i64;
    for idx in [mu, -mu] {
        if !params.contains_index(idx) {
            return Err(Error::IndexOutOfRange(idx));
        }
    }
    let delta = params.delta();
    let bound = 12.0 * (ell + m + 1) as f64 * delta;
    let (a1, b1) = j1.thickened(delta);
    let (a2, b2) = j2.thickened(delta);
    let per_cell = (samples / 25).max(1);
    let mut rng = rng_for(seed, ell * 1_000_003 + m);
    let mut spread: f64 = 0.0;
    for ep in splits(a1, b1, 5) {
        for epp in splits(a2, b2, 5) {
            let (Some(s1), Some(s2)) = (slice_box(mu, j1, ep, delta), slice_box(-mu, j2, epp, delta)) else {
                continue;
            };
            let xs = slice_points(s1, per_cell, &mut rng);
            let ys = slice_points(s2, per_cell, &mut rng);
            let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
            for (x, y) in xs.iter().zip(ys.iter().cycle().skip(1)) {
                let v = x.x1 + y.x1;
                lo = lo.min(v);
                hi = hi.max(v);
            }
            // Corner pairs, so the extremes of the separable sum are hit.
            for x in &xs[..4] {
                for y in &ys[..4] {
                    let v = x.x1 + y.x1;
                    lo = lo.min(v);
                    hi = hi.max(v);
                }
            }
            spread = spread.max(hi - lo);
        }
    }
    Ok(DiamReport {
        spread,
        bound,
        pass: spread <= bound,
    })
}

/// Largest integer m ≥ 0 with m² + 2(ℓ − 3π²)m − 2π²(6ℓ+7) ≤ 0.
pub fn check_quadratic_gap(ell: u64) -> u64 {
    let l = ell as f64;
    let pi2 = PI * PI;
    let q = |m: f64| m * m + 2.0 * (l - 3.0 * pi2) * m - 2.0 * pi2 * (6.0 * l + 7.0);
    let b = l - 3.0 * pi2;
    let root = -b + (b * b + 2.0 * pi2 * (6.0 * l + 7.0)).sqrt();
    let mut m = root.floor().max(0.0);
    while q(m + 1.0) <= 0.0 {
        m += 1.0;
    }
    while m > 0.0 && q(m) > 0.0 {
        m -= 1.0;
    }
    m as u64
}

/// Maximum of [`check_quadratic_gap`] over ℓ ∈ [0, ell_max] and the first
/// ℓ attaining it.
pub fn quadratic_gap_sweep(ell_max: u64) -> (u64, u64) {
    (0..=ell_max)
        .map(|l| (check_quadratic_gap(l), l))
        .fold((0, 0), |best, (m, l)| if m > best.0 { (m, l) } else { best })
}
