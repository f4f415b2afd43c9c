//! Planar containments: slice sums in rectangles, ellipse arcs in annuli,
//! rectangles in annuli, and the rotation separation of the arc families.

use std::f64::consts::PI;

use rand::Rng;
use rayon::prelude::*;

use super::displayed::{slice_box, slice_points};
use super::{ell_max, ell_star, ell_sweep, p_point, split_range, splits, EllipseArc};
use crate::cone::{DecompositionParams, RadialInterval};
use crate::error::{Error, Result};
use crate::geom::{rect_norm_range, rotate, Point2, Rect2};
use crate::overlap::ClassIndex;
use crate::sampling::rng_for;

/// Relative tolerance for comparisons against proved bounds.
const REL_TOL: f64 = 1e-9;

/// Largest deviations of `pts` from `p`, scaled to (ℓ*δ, √δ) units.
fn scaled_deviation(pts: impl IntoIterator<Item = Point2>, p: Point2, ell: f64, delta: f64) -> (f64, f64) {
    let (sx, sy) = (ell_star(ell) * delta, delta.sqrt());
    pts.into_iter().fold((0.0f64, 0.0f64), |(a, b), q| {
        (a.max((q.x1 - p.x1).abs() / sx), b.max((q.x2 - p.x2).abs() / sy))
    })
}

/// Outcome of [`check_slice_rectangle`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SliceRectReport {
    pub pass: bool,
    /// Tightest constants covering every sample.
    pub c1: f64,
    pub c2: f64,
    pub samples: usize,
}

/// Sector pair (μ, ν) = (a + ℓ, a − ℓ), validated.
fn pair_indices(params: &DecompositionParams, a: ClassIndex, ell: f64) -> Result<(i64, i64)> {
    let twice_ell = 2.0 * ell;
    if ell < 0.0 || twice_ell.fract() != 0.0 || (a.twice() + twice_ell as i64) % 2 != 0 {
        return Err(Error::InvalidParams(format!("a ± ℓ must be integers (a = {a}, ℓ = {ell})")));
    }
    let t = twice_ell as i64;
    let (mu, nu) = ((a.twice() + t) / 2, (a.twice() - t) / 2);
    for idx in [mu, nu] {
        if !params.contains_index(idx) {
            return Err(Error::IndexOutOfRange(idx));
        }
    }
    Ok((mu, nu))
}

/// ℛ_{−a√δ}(u^{η′}_{μ,J₁} + u^{η″}_{ν,J₂}) ⊂ R(p_{ℓ,δ}(η′,η″); c₁ℓ*δ, c₂√δ)
/// with μ = a+ℓ, ν = a−ℓ.
#[allow(clippy::too_many_arguments)]
pub fn check_slice_rectangle(
    params: &DecompositionParams,
    a: ClassIndex,
    ell: f64,
    j1: RadialInterval,
    j2: RadialInterval,
    eta_p: f64,
    eta_pp: f64,
    c1: f64,
    c2: f64,
    samples: usize,
    seed: u64,
) -> Result<SliceRectReport> {
    let (mu, nu) = pair_indices(params, a, ell)?;
    let delta = params.delta();
    let (Some(b1), Some(b2)) = (slice_box(mu, j1, eta_p, delta), slice_box(nu, j2, eta_pp, delta)) else {
        return Ok(SliceRectReport { pass: true, c1: 0.0, c2: 0.0, samples: 0 });
    };
    let mut rng = rng_for(seed, (mu as u64) << 32 ^ nu as u64);
    let xs = slice_points(b1, samples, &mut rng);
    let ys = slice_points(b2, samples, &mut rng);
    let back = -a.value() * params.sqrt_delta();
    let mut sums: Vec<Point2> = xs.iter().zip(ys.iter().cycle().skip(1)).map(|(x, y)| *x + *y).collect();
    for x in &xs[..4] {
        sums.extend(ys[..4].iter().map(|y| *x + *y));
    }
    let p = p_point(ell, delta, eta_p, eta_pp);
    let (t1, t2) = scaled_deviation(sums.iter().map(|&s| rotate(s, back)), p, ell, delta);
    Ok(SliceRectReport {
        pass: t1 <= c1 && t2 <= c2,
        c1: t1,
        c2: t2,
        samples: sums.len(),
    })
}

/// Maxima of a sweep of [`check_slice_rectangle`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SliceRectSweep {
    pub c1: f64,
    pub c2: f64,
    pub cells: usize,
    pub pass: bool,
}

/// Sweeps a ∈ {0, 1/2, ±3, ±10}, ℓ over [`ell_sweep`] (shifted by 1/2
/// where the parity of a requires it) and 5 × 5 heights.
pub fn slice_rectangle_sweep(
    params: &DecompositionParams,
    j1: RadialInterval,
    j2: RadialInterval,
    c1: f64,
    c2: f64,
    samples: usize,
    seed: u64,
) -> Result<SliceRectSweep> {
    let delta = params.delta();
    let (a1, b1) = j1.thickened(delta);
    let (a2, b2) = j2.thickened(delta);
    let per = (samples / 25).max(1);
    let mut cells = Vec::new();
    for twice_a in [0i64, 1, 6, -6, 20, -20] {
        let a = ClassIndex::from_twice(twice_a);
        for ell in ell_sweep(ell_max(delta) + 0.5) {
            let ell = if twice_a % 2 == 0 { ell.floor() } else { ell.floor() + 0.5 };
            if pair_indices(params, a, ell).is_err() {
                continue;
            }
            for ep in splits(a1, b1, 5) {
                for epp in splits(a2, b2, 5) {
                    cells.push((a, ell, ep, epp));
                }
            }
        }
    }
    cells.dedup();
    let reports = cells
        .par_iter()
        .enumerate()
        .map(|(i, &(a, ell, ep, epp))| {
            check_slice_rectangle(params, a, ell, j1, j2, ep, epp, c1, c2, per, seed ^ i as u64)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SliceRectSweep {
        c1: reports.iter().map(|r| r.c1).fold(0.0, f64::max),
        c2: reports.iter().map(|r| r.c2).fold(0.0, f64::max),
        cells: reports.len(),
        pass: reports.iter().all(|r| r.pass),
    })
}

/// Points of the augmented arc inside the annulus [r_lo, r_hi]: both ends
/// of each range plus `n` equispaced interior points.
fn arc_points_in_annulus(arc: &EllipseArc, r_lo: f64, r_hi: f64, n: usize) -> Vec<Point2> {
    let mut out = Vec::new();
    if let Some((t0, t1)) = arc.t_range_in_annulus(r_lo, r_hi) {
        out.extend(splits(t0, t1, n.max(2)).into_iter().map(|t| arc.at(t)));
    }
    if let Some((x0, x1)) = arc.segment_in_annulus(r_lo, r_hi) {
        out.extend(splits(x0, x1, (n / 10).max(2)).into_iter().map(|x| Point2::new(x, 0.0)));
    }
    out
}

/// Outcome of [`check_lemma_3_1`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Lemma31Report {
    pub b2: f64,
    pub b3: f64,
    pub pass: bool,
}

/// A(|p| − b₁ℓ*δ, |p| + b₁ℓ*δ) ∩ 𝓔̃ ⊂ R(p; b₂ℓ*δ, b₃√δ) with p = p_{ℓ,δ};
/// reports the smallest (b₂, b₃) covering the sampled arc.
pub fn check_lemma_3_1(
    b1: f64,
    ell: f64,
    delta: f64,
    eta_p: f64,
    eta_pp: f64,
    samples: usize,
) -> Result<Lemma31Report> {
    let p = p_point(ell, delta, eta_p, eta_pp);
    let w = b1 * ell_star(ell) * delta;
    let (r_lo, r_hi) = (p.norm() - w, p.norm() + w);
    if r_lo <= (eta_p - eta_pp).abs() {
        return Err(Error::HypothesisViolated(format!(
            "|p| − b1·ℓ*·δ = {r_lo} ≤ |η′ − η″| = {}",
            (eta_p - eta_pp).abs()
        )));
    }
    let arc = EllipseArc::new(eta_p, eta_pp, true);
    let pts = arc_points_in_annulus(&arc, r_lo, r_hi, samples);
    let (b2, b3) = scaled_deviation(pts, p, ell, delta);
    Ok(Lemma31Report {
        b2,
        b3,
        pass: b2.is_finite() && b3.is_finite(),
    })
}

/// Maxima of a sweep of [`check_lemma_3_1`], with the skipped cells.
#[derive(Clone, Debug, PartialEq)]
pub struct Lemma31Sweep {
    pub b2: f64,
    pub b3: f64,
    pub cells: usize,
    /// (ℓ, η′, η″) cells where the hypothesis fails.
    pub skipped: Vec<(f64, f64, f64)>,
}

/// ℓ over [`ell_sweep`], 5 × 5 heights (η′, η″) ∈ J̃₁ × J̃₂.
pub fn lemma_3_1_sweep(
    params: &DecompositionParams,
    j1: RadialInterval,
    j2: RadialInterval,
    b1: f64,
    samples: usize,
) -> Result<Lemma31Sweep> {
    let delta = params.delta();
    let (a1, e1) = j1.thickened(delta);
    let (a2, e2) = j2.thickened(delta);
    let mut out = Lemma31Sweep { b2: 0.0, b3: 0.0, cells: 0, skipped: Vec::new() };
    for ell in ell_sweep(ell_max(delta)) {
        for ep in splits(a1, e1, 5) {
            for epp in splits(a2, e2, 5) {
                match check_lemma_3_1(b1, ell, delta, ep, epp, samples) {
                    Ok(r) => {
                        out.cells += 1;
                        out.b2 = out.b2.max(r.b2);
                        out.b3 = out.b3.max(r.b3);
                    }
                    Err(Error::HypothesisViolated(_)) => out.skipped.push((ell, ep, epp)),
                    Err(e) => return Err(e),
                }
            }
        }
    }
    Ok(out)
}

/// Outcome of [`check_lemma_3_2`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Lemma32Report {
    pub pass: bool,
    /// c₀′ = 10c₁ + c₁² + 3c₂ + 2c₂².
    pub c0_prime: f64,
    /// Smallest constant that would replace c₀′ on this grid.
    pub c0_measured: f64,
    /// max (|p| − min|ξ|)/(ℓ*δ) and max (max|ξ| − |p|)/(ℓ*δ) over the grid.
    pub c3: f64,
    pub c4: f64,
    pub cells: usize,
}

/// c₀′ = 10c₁ + c₁² + 3c₂ + 2c₂².
pub fn lemma_3_2_constant(c1: f64, c2: f64) -> f64 {
    10.0 * c1 + c1 * c1 + 3.0 * c2 + 2.0 * c2 * c2
}

/// R(p_{ℓ,δ}; c₁ℓ*δ, c₂√δ) ⊂ A(|p| − c₀′ℓ*δ/2m, |p| + c₀′ℓ*δ/2m) with
/// m = p₁ − c₁ℓ*δ, over all half-integers ℓ and a `grid` × `grid` lattice
/// of heights in [1 − δ, 2 + δ].
pub fn check_lemma_3_2(c1: f64, c2: f64, delta: f64, grid: usize) -> Lemma32Report {
    let c0_prime = lemma_3_2_constant(c1, c2);
    let h = delta.sqrt();
    let heights = splits(1.0 - delta, 2.0 + delta, grid);
    let mut rep = Lemma32Report {
        pass: true,
        c0_prime,
        c0_measured: 0.0,
        c3: 0.0,
        c4: 0.0,
        cells: 0,
    };
    let top = (2.0 * ell_max(delta)) as u64;
    for twice in 0..=top {
        let ell = twice as f64 / 2.0;
        let s = ell_star(ell) * delta;
        for &ep in &heights {
            for &epp in &heights {
                let p = p_point(ell, delta, ep, epp);
                let range = rect_norm_range(Rect2::axis_aligned(p, c1 * s, c2 * h));
                let m = p.x1 - c1 * s;
                let n = p.norm();
                let dev = (n - range.lo).max(range.hi - n);
                rep.cells += 1;
                rep.c3 = rep.c3.max((n - range.lo) / s);
                rep.c4 = rep.c4.max((range.hi - n) / s);
                let needed = dev * 2.0 * m / s;
                rep.c0_measured = rep.c0_measured.max(needed);
                if m <= 0.0 || needed > c0_prime * (1.0 + REL_TOL) {
                    rep.pass = false;
                }
            }
        }
    }
    rep
}

/// Outcome of [`check_lemma_3_3`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Lemma33Report {
    pub c1p: f64,
    pub c2p: f64,
    /// Arc samples that fell in a rectangle.
    pub hits: usize,
    pub pass: bool,
}

/// R_{ℓ,δ}(η₀′, η₀″) = p_{ℓ,δ}(η₀′, η₀″) + R₀(c₁ℓ*δ, (c₂+4)√δ).
pub fn big_rectangle(ell: f64, delta: f64, eta0_p: f64, eta0_pp: f64, c1: f64, c2: f64) -> Rect2 {
    Rect2::axis_aligned(
        p_point(ell, delta, eta0_p, eta0_pp),
        c1 * ell_star(ell) * delta,
        (c2 + 4.0) * delta.sqrt(),
    )
}

fn inside_axis_rect(r: &Rect2, q: Point2) -> bool {
    (q.x1 - r.center.x1).abs() <= r.half_width && (q.x2 - r.center.x2).abs() <= r.half_height
}

/// 𝓔̃_a(η′,η″) ∩ R_{ℓ,δ}(η₀′,η₀″) ⊂ ℛ_{a√δ} R(p_{ℓ,δ}(η′,η″); c₁′ℓ*δ, c₂′√δ)
/// over three heights η ∈ J̃₁ + J̃₂ and 5 × 5 compatible splits; reports
/// the tightest (c₁′, c₂′).
#[allow(clippy::too_many_arguments)]
pub fn check_lemma_3_3(
    params: &DecompositionParams,
    a: f64,
    ell: f64,
    j1: RadialInterval,
    j2: RadialInterval,
    c1: f64,
    c2: f64,
    samples: usize,
    seed: u64,
) -> Result<Lemma33Report> {
    if !(0.0..=ell_max(params.delta())).contains(&ell) {
        return Err(Error::IndexOutOfRange(ell.floor() as i64));
    }
    let delta = params.delta();
    let sigma = a * params.sqrt_delta();
    let (a1, e1) = j1.thickened(delta);
    let (a2, e2) = j2.thickened(delta);
    let mut rng = rng_for(seed, (2.0 * ell) as u64);
    let mut rep = Lemma33Report { c1p: 0.0, c2p: 0.0, hits: 0, pass: true };
    for eta in splits(a1 + a2, e1 + e2, 3) {
        let Some((lo, hi)) = split_range(eta, j1, j2, delta) else { continue };
        for ep0 in splits(lo, hi, 5) {
            let rect = big_rectangle(ell, delta, ep0, eta - ep0, c1, c2);
            let range = rect_norm_range(rect);
            for ep in splits(lo, hi, 5) {
                let arc = EllipseArc::new(ep, eta - ep, true);
                let mut pts = arc_points_in_annulus(&arc, range.lo, range.hi, 16);
                if let Some((t0, t1)) = arc.t_range_in_annulus(range.lo, range.hi) {
                    pts.extend((0..samples).map(|_| arc.at(rng.gen_range(t0..=t1))));
                }
                let hits: Vec<Point2> = pts.into_iter().filter(|&q| inside_axis_rect(&rect, rotate(q, sigma))).collect();
                rep.hits += hits.len();
                let (d1, d2) = scaled_deviation(hits, p_point(ell, delta, ep, eta - ep), ell, delta);
                rep.c1p = rep.c1p.max(d1);
                rep.c2p = rep.c2p.max(d2);
            }
        }
    }
    rep.pass = rep.c1p.is_finite() && rep.c2p.is_finite();
    Ok(rep)
}

/// Maxima of [`check_lemma_3_3`] over a ∈ {0, ±10, ±max/2} (kept where
/// |a|√δ ≤ π/8) and ℓ over [`ell_sweep`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Lemma33Sweep {
    pub c1p: f64,
    pub c2p: f64,
    pub hits: usize,
}

pub fn lemma_3_3_sweep(
    params: &DecompositionParams,
    j1: RadialInterval,
    j2: RadialInterval,
    c1: f64,
    c2: f64,
    samples: usize,
) -> Result<Lemma33Sweep> {
    let h = params.sqrt_delta();
    let half = (PI / 8.0 / h / 2.0).floor();
    let mut cells = Vec::new();
    for a in [0.0, 10.0, -10.0, half, -half] {
        if a.abs() * h > PI / 8.0 {
            continue;
        }
        for ell in ell_sweep(ell_max(params.delta())) {
            cells.push((a, ell));
        }
    }
    let reports = cells
        .par_iter()
        .enumerate()
        .map(|(i, &(a, ell))| check_lemma_3_3(params, a, ell, j1, j2, c1, c2, samples, i as u64))
        .collect::<Result<Vec<_>>>()?;
    Ok(Lemma33Sweep {
        c1p: reports.iter().map(|r| r.c1p).fold(0.0, f64::max),
        c2p: reports.iter().map(|r| r.c2p).fold(0.0, f64::max),
        hits: reports.iter().map(|r| r.hits).sum(),
    })
}

/// Region D = {3/2 ≤ |ξ| ≤ 9/2, ξ₁ ≥ 0}.
pub const D_INNER: f64 = 1.5;
pub const D_OUTER: f64 = 4.5;

/// Threshold a₀ (in units of √δ) beyond which B(η, ℓ, δ, c₃) and its
/// rotation by a√δ are disjoint, from the angular extent of the union of
/// balls B(p_{ℓ,δ}(η′, η − η′), c₃√δ) over all admissible splits.
pub fn check_ball_separation(
    params: &DecompositionParams,
    j1: RadialInterval,
    j2: RadialInterval,
    eta: f64,
    ell: f64,
    c3: f64,
) -> Result<f64> {
    let delta = params.delta();
    let h = params.sqrt_delta();
    let (lo, hi) = split_range(eta, j1, j2, delta)
        .ok_or_else(|| Error::InvalidParams(format!("η = {eta} is not a sum of admissible heights")))?;
    // The centers trace a vertical segment x = η cos ℓ√δ.
    let s = (ell * h).sin();
    let x = eta * (ell * h).cos();
    let (y0, y1) = ((2.0 * lo - eta) * s, (2.0 * hi - eta) * s);
    let radius = c3 * h;
    let near = x.hypot(0.0f64.clamp(y0, y1));
    let far = x.hypot(y0).max(x.hypot(y1));
    if near - radius < D_INNER || far + radius > D_OUTER || x - radius < 0.0 {
        return Err(Error::HypothesisViolated(format!(
            "union of balls spans |ξ| ∈ [{}, {}], ξ₁ ≥ {}; outside D",
            near - radius,
            far + radius,
            x - radius
        )));
    }
    let width = y1.atan2(x) - y0.atan2(x) + 2.0 * (radius / near).asin();
    Ok(width / h)
}

/// Outcome of [`check_lemma_3_4`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Lemma34Report {
    /// Smallest grid value of a past which no rotated sample meets Ẽ₀₀^η.
    pub a0: f64,
    /// Whether a = 0 meets Ẽ₀₀^η (it must).
    pub hit_at_zero: bool,
    /// (π/8)δ^{−1/2}; the lemma is vacuous when a0 exceeds it.
    pub a_max: f64,
}

/// Step of the a grid.
pub const A_STEP: f64 = 0.25;

/// Ẽ₀₀^η as one axis-aligned rectangle per ℓ: the union over splits of
/// R_{ℓ,δ} is the rectangle swept by its vertically moving center.
pub fn e00_rectangles(
    params: &DecompositionParams,
    j1: RadialInterval,
    j2: RadialInterval,
    eta: f64,
    c1: f64,
    c2: f64,
) -> Vec<Rect2> {
    let delta = params.delta();
    let h = params.sqrt_delta();
    let Some((lo, hi)) = split_range(eta, j1, j2, delta) else { return Vec::new() };
    let top = (2.0 * ell_max(delta)) as u64;
    (0..=top)
        .map(|twice| {
            let ell = twice as f64 / 2.0;
            let s = (ell * h).sin();
            let (y0, y1) = ((2.0 * lo - eta) * s, (2.0 * hi - eta) * s);
            Rect2::axis_aligned(
                Point2::new(eta * (ell * h).cos(), 0.5 * (y0 + y1)),
                c1 * ell_star(ell) * delta,
                0.5 * (y1 - y0) + (c2 + 4.0) * h,
            )
        })
        .collect()
}

/// Empirical a₀ with 𝓔̃_{±a}(η′,η″) ∩ Ẽ₀₀^η = ∅ for a₀ ≤ a ≤ (π/8)δ^{−1/2},
/// on an a grid of step 1/4 and 5 splits of η. Infinite if rotated arcs
/// still meet Ẽ₀₀^η at a quarter turn.
#[allow(clippy::too_many_arguments)]
pub fn check_lemma_3_4(
    params: &DecompositionParams,
    j1: RadialInterval,
    j2: RadialInterval,
    eta: f64,
    c1: f64,
    c2: f64,
    samples: usize,
    seed: u64,
) -> Result<Lemma34Report> {
    let delta = params.delta();
    let h = params.sqrt_delta();
    let (lo, hi) = split_range(eta, j1, j2, delta)
        .ok_or_else(|| Error::InvalidParams(format!("η = {eta} is not a sum of admissible heights")))?;
    let rects = e00_rectangles(params, j1, j2, eta, c1, c2);
    let (n_lo, n_hi) = rects.iter().fold((f64::INFINITY, 0.0f64), |(a, b), r| {
        let n = rect_norm_range(*r);
        (a.min(n.lo), b.max(n.hi))
    });
    let mut rng = rng_for(seed, 0);
    let mut pts = Vec::new();
    for ep in splits(lo, hi, 5) {
        let arc = EllipseArc::new(ep, eta - ep, true);
        pts.extend(arc_points_in_annulus(&arc, n_lo, n_hi, 32));
        if let Some((t0, t1)) = arc.t_range_in_annulus(n_lo, n_hi) {
            pts.extend((0..samples).map(|_| arc.at(rng.gen_range(t0..=t1))));
        }
    }
    // The scan runs to a quarter turn so that a threshold beyond (π/8)/√δ
    // (a vacuous statement at coarse δ) is still measured.
    let a_max = PI / 8.0 / h;
    let steps = (2.0 * a_max / A_STEP).floor() as usize;
    let grid: Vec<f64> = (0..=steps).map(|i| i as f64 * A_STEP).collect();
    let hit = |a: f64| {
        [a, -a].iter().any(|&s| {
            pts.iter()
                .any(|&q| rects.iter().any(|r| inside_axis_rect(r, rotate(q, s * h))))
        })
    };
    let hits: Vec<bool> = grid.par_iter().map(|&a| hit(a)).collect();
    let last = hits.iter().rposition(|&b| b);
    let a0 = match last {
        Some(i) if i + 1 < grid.len() => grid[i + 1],
        Some(_) => f64::INFINITY,
        None => 0.0,
    };
    Ok(Lemma34Report {
        a0,
        hit_at_zero: hits[0],
        a_max,
    })
}

/// Largest [`check_lemma_3_4`] threshold over three heights η ∈ J̃₁ + J̃₂.
pub fn lemma_3_4_sweep(
    params: &DecompositionParams,
    j1: RadialInterval,
    j2: RadialInterval,
    c1: f64,
    c2: f64,
    samples: usize,
) -> Result<f64> {
    let delta = params.delta();
    let (a1, e1) = j1.thickened(delta);
    let (a2, e2) = j2.thickened(delta);
    let mut a0: f64 = 0.0;
    for (i, eta) in splits(a1 + a2, e1 + e2, 3).into_iter().enumerate() {
        a0 = a0.max(check_lemma_3_4(params, j1, j2, eta, c1, c2, samples, i as u64)?.a0);
    }
    Ok(a0)
}
