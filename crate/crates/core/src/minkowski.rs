//! Membership in Minkowski sums of two slabs.
//!
//! A point p lies in A + B exactly when some q_a ∈ A leaves a residual
//! p − q_a inside B. Parametrizing q_a = (r e(θ), r + s), the vertical offset
//! s enters the residual only through its height, so it can be eliminated:
//! with ρ_ξ = p_ξ − r e(θ), a feasible s exists iff
//!
//! ```text
//! | p_η − r − |ρ_ξ| | ≤ v_a + v_b
//! ```
//!
//! together with the sector and radial conditions of B on ρ_ξ. The certified
//! search is therefore a branch and bound over the (θ, r) rectangle of A.
//! For ε-neighborhood slabs the sum is the open (ρ_a + ρ_b)-neighborhood of
//! the sum of the underlying standard slabs, and the search bounds the
//! distance function instead.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::SQRT_2;

use crate::cone::{distance_pad, ConeSlab, SlabShape};
use crate::error::{Error, Result};
use crate::geom::{iv_eval_norm, Interval, Point2, Point3, DEFAULT_SLACK};

pub use crate::geom::Verdict;

/// Boxes whose upper margin is below this are treated as certainly
/// infeasible. It only absorbs rounding in constants such as cos(μ√δ).
const PRUNE_TOL: f64 = 1e-14;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SearchBudget {
    pub max_boxes: usize,
    /// Smallest box width in scaled coordinates; `None` means 1e−4·δ.
    pub min_box_width: Option<f64>,
}

impl Default for SearchBudget {
    fn default() -> Self {
        Self {
            max_boxes: 100_000,
            min_box_width: None,
        }
    }
}

impl SearchBudget {
    pub fn with_max_boxes(max_boxes: usize) -> Self {
        Self {
            max_boxes: max_boxes.max(1),
            ..Self::default()
        }
    }

    fn min_width(&self, delta: f64) -> f64 {
        self.min_box_width.unwrap_or(1e-4 * delta)
    }
}

/// Ordered pair of slabs whose sum is tested.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SumSpec {
    pub slab_a: ConeSlab,
    pub slab_b: ConeSlab,
}

impl SumSpec {
    pub fn new(slab_a: ConeSlab, slab_b: ConeSlab) -> Result<Self> {
        if slab_a.params.delta() != slab_b.params.delta() {
            return Err(Error::InvalidParams(format!(
                "slabs use different delta: {} vs {}",
                slab_a.params.delta(),
                slab_b.params.delta()
            )));
        }
        Ok(Self { slab_a, slab_b })
    }

    pub fn swapped(&self) -> Self {
        Self {
            slab_a: self.slab_b,
            slab_b: self.slab_a,
        }
    }

    fn delta(&self) -> f64 {
        self.slab_a.params.delta()
    }

    fn inflation(&self) -> f64 {
        self.slab_a.inflation() + self.slab_b.inflation()
    }
}

/// True only if p is outside the sum of the slabs' bounding balls.
pub fn quick_reject(spec: &SumSpec, p: Point3) -> bool {
    let (ca, ra) = spec.slab_a.shape().bounding_center_and_radius();
    let (cb, rb) = spec.slab_b.shape().bounding_center_and_radius();
    p.dist(ca + cb) > (ra + rb) * (1.0 + 1e-12) + 1e-12
}

#[derive(Clone, Copy, Debug)]
struct ParamBox {
    th: (f64, f64),
    r: (f64, f64),
}

impl ParamBox {
    fn center(&self) -> (f64, f64) {
        (0.5 * (self.th.0 + self.th.1), 0.5 * (self.r.0 + self.r.1))
    }

    fn split(&self, h: f64) -> Option<[ParamBox; 2]> {
        let (tc, rc) = self.center();
        let wt = (self.th.1 - self.th.0) / h;
        let wr = (self.r.1 - self.r.0) / h;
        let halves = if wt >= wr {
            [
                ParamBox { th: (self.th.0, tc), r: self.r },
                ParamBox { th: (tc, self.th.1), r: self.r },
            ]
        } else {
            [
                ParamBox { th: self.th, r: (self.r.0, rc) },
                ParamBox { th: self.th, r: (rc, self.r.1) },
            ]
        };
        // Refuse splits that no longer shrink the box in floating point.
        (tc > self.th.0 && tc < self.th.1 || rc > self.r.0 && rc < self.r.1).then_some(halves)
    }

    fn scaled_width(&self, h: f64) -> f64 {
        ((self.th.1 - self.th.0) / h).max((self.r.1 - self.r.0) / h)
    }
}

enum BoxState {
    Feasible,
    Pruned,
    /// Not decided; the score orders the queue (larger is explored first).
    Undecided(f64),
}

struct Queued {
    score: f64,
    seq: u64,
    bx: ParamBox,
}

impl PartialEq for Queued {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Queued {}

impl PartialOrd for Queued {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Queued {
    fn cmp(&self, other: &Self) -> Ordering {
        self.score
            .total_cmp(&other.score)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

/// Best-first branch and bound: boxes whose center comes closest to
/// feasibility are split first, so members are usually certified after a
/// few boxes while Out still requires pruning everything.
fn branch_and_bound(
    root: ParamBox,
    h: f64,
    budget: &SearchBudget,
    min_width: f64,
    mut classify: impl FnMut(&ParamBox) -> BoxState,
) -> Verdict {
    let mut heap = BinaryHeap::new();
    let mut seq = 0u64;
    let mut unresolved = false;
    match classify(&root) {
        BoxState::Feasible => return Verdict::In,
        BoxState::Pruned => return Verdict::Out,
        BoxState::Undecided(score) => heap.push(Queued { score, seq, bx: root }),
    }
    let mut processed = 1usize;
    while let Some(Queued { bx, .. }) = heap.pop() {
        let children = if bx.scaled_width(h) <= min_width { None } else { bx.split(h) };
        let Some(children) = children else {
            unresolved = true;
            continue;
        };
        for child in children {
            if processed >= budget.max_boxes {
                return Verdict::Unknown {
                    budget_exhausted: true,
                };
            }
            processed += 1;
            match classify(&child) {
                BoxState::Feasible => return Verdict::In,
                BoxState::Pruned => {}
                BoxState::Undecided(score) => {
                    seq += 1;
                    heap.push(Queued { score, seq, bx: child });
                }
            }
        }
    }
    if unresolved {
        Verdict::BOUNDARY
    } else {
        Verdict::Out
    }
}

/// Value and (θ, r) gradient enclosures of one function over a box.
#[derive(Clone, Copy)]
struct Graded {
    val: Interval,
    d_th: Interval,
    d_r: Interval,
}

impl Graded {
    /// Mean-value enclosure about the box center, intersected with the
    /// natural one.
    fn tighten(self, at_center: Interval, half_th: f64, half_r: f64) -> Interval {
        let mv = at_center
            + self.d_th * Interval::new(-half_th, half_th)
            + self.d_r * Interval::new(-half_r, half_r);
        self.val.intersect(mv).unwrap_or(self.val)
    }
}

/// The functions constraining the residual ρ_ξ = p_ξ − r e(θ) for B:
/// distances to the two sector edges (≥ 0, the upper one strictly), |ρ_ξ|
/// (in B's radial range) and the height mismatch g = p_η − r − |ρ_ξ|
/// (|g| ≤ v_a + v_b).
fn residual_functions(b: &SlabShape, p: Point3, th: Interval, r: Interval) -> [Graded; 4] {
    let (c, s) = (th.cos(), th.sin());
    let x = Interval::point(p.x1) - r * c;
    let y = Interval::point(p.x2) - r * s;
    let n = iv_eval_norm(x, y);
    let (s_lo, c_lo) = b.ang_lo.sin_cos();
    let (s_hi, c_hi) = b.ang_hi.sin_cos();
    let full = Interval::new(f64::NEG_INFINITY, f64::INFINITY);
    let (dn_th, dn_r) = match n.recip() {
        Some(inv) => {
            let rb = Interval::new(-r.hi, r.hi);
            let unit = Interval::new(-1.0, 1.0);
            let d_th = r * (x * s - y * c) * inv;
            let d_r = -((x * c + y * s) * inv);
            (d_th.intersect(rb).unwrap_or(rb), d_r.intersect(unit).unwrap_or(unit))
        }
        None => (full, full),
    };
    let to_lo = th - b.ang_lo;
    let to_hi = th - b.ang_hi;
    [
        Graded {
            val: y * c_lo - x * s_lo,
            d_th: -(r * to_lo.cos()),
            d_r: -to_lo.sin(),
        },
        Graded {
            val: x * s_hi - y * c_hi,
            d_th: r * to_hi.cos(),
            d_r: to_hi.sin(),
        },
        Graded {
            val: n,
            d_th: dn_th,
            d_r: dn_r,
        },
        Graded {
            val: Interval::point(p.eta) - r - n,
            d_th: -dn_th,
            d_r: -dn_r - 1.0,
        },
    ]
}

/// Margins (≥ 0 inside) of B's conditions given enclosures of the four
/// residual functions.
fn margins(b: &SlabShape, vert: f64, f: [Interval; 4]) -> [Interval; 5] {
    [
        f[0],
        f[1],
        f[2] - b.rad_lo,
        b.rad_hi - f[2],
        vert - f[3].abs(),
    ]
}

fn exact_search(spec: &SumSpec, p: Point3, budget: &SearchBudget) -> Verdict {
    let a = spec.slab_a.shape();
    let b = spec.slab_b.shape();
    let vert = a.vert + b.vert;
    let h = spec.slab_a.params.sqrt_delta();
    let root = ParamBox {
        th: (a.ang_lo, a.ang_hi),
        r: (a.rad_lo, a.rad_hi),
    };
    branch_and_bound(root, h, budget, budget.min_width(spec.delta()), |bx| {
        let (tc, rc) = bx.center();
        let center = residual_functions(&b, p, Interval::point(tc), Interval::point(rc)).map(|g| g.val);
        let at_center = margins(&b, vert, center);
        let score = at_center.iter().map(|m| m.lo).fold(f64::INFINITY, f64::min);
        if tc < a.ang_hi && score >= DEFAULT_SLACK {
            return BoxState::Feasible;
        }
        let th = Interval::new(bx.th.0, bx.th.1);
        let r = Interval::new(bx.r.0, bx.r.1);
        let (half_th, half_r) = (0.5 * th.width(), 0.5 * r.width());
        let graded = residual_functions(&b, p, th, r);
        let mut enclosed = [Interval::point(0.0); 4];
        for i in 0..4 {
            enclosed[i] = graded[i].tighten(center[i], half_th, half_r);
        }
        if margins(&b, vert, enclosed).iter().any(|iv| iv.hi < -PRUNE_TOL) {
            BoxState::Pruned
        } else {
            BoxState::Undecided(score)
        }
    })
}

/// Distance from the residual at (θ, r) to B thickened by A's vertical
/// half-thickness; its minimum over A's parameters is d(p, A + B).
fn residual_distance(b_thick: &SlabShape, p: Point3, theta: f64, r: f64) -> f64 {
    let (s, c) = theta.sin_cos();
    let res = Point3::new(p.x1 - r * c, p.x2 - r * s, p.eta - r);
    b_thick.core_distance(res)
}

fn eps_search(spec: &SumSpec, p: Point3, budget: &SearchBudget) -> Verdict {
    let a = spec.slab_a.shape();
    let b_thick = spec.slab_b.shape().thickened(a.vert);
    let t = spec.inflation();
    let pad = distance_pad(p);
    let h = spec.slab_a.params.sqrt_delta();
    let root = ParamBox {
        th: (a.ang_lo, a.ang_hi),
        r: (a.rad_lo, a.rad_hi),
    };
    let f = |theta: f64, r: f64| residual_distance(&b_thick, p, theta, r);
    let mut best = f64::INFINITY;
    branch_and_bound(root, h, budget, budget.min_width(spec.delta()), |bx| {
        let (tc, rc) = bx.center();
        let d = f(tc, rc);
        if d + pad < t - DEFAULT_SLACK {
            return BoxState::Feasible;
        }
        // The minimum is often attained along a curve in parameter space,
        // which breadth-like refinement covers slowly; polish each new best
        // center locally.
        if d < best {
            best = d;
            let (d_local, theta) = compass_descent(&f, &root, (tc, rc), d);
            if theta < a.ang_hi && d_local + pad < t - DEFAULT_SLACK {
                return BoxState::Feasible;
            }
        }
        // Lipschitz bound: ∂/∂θ is at most r, ∂/∂r at most √2.
        let reach = a.rad_hi * 0.5 * (bx.th.1 - bx.th.0) + SQRT_2 * 0.5 * (bx.r.1 - bx.r.0);
        if d - pad - reach * (1.0 + 1e-12) >= t {
            BoxState::Pruned
        } else {
            BoxState::Undecided(-d)
        }
    })
}

/// Compass search for a smaller value of `f` inside `bounds`, starting at
/// `start`. Returns the best value and the angle where it was found.
fn compass_descent(f: &impl Fn(f64, f64) -> f64, bounds: &ParamBox, start: (f64, f64), f0: f64) -> (f64, f64) {
    let (mut th, mut r) = start;
    let mut best = f0;
    let mut step = (
        0.25 * (bounds.th.1 - bounds.th.0),
        0.25 * (bounds.r.1 - bounds.r.0),
    );
    for _ in 0..80 {
        let mut moved = false;
        for (dt, dr) in [(step.0, 0.0), (-step.0, 0.0), (0.0, step.1), (0.0, -step.1)] {
            let cand = (
                (th + dt).clamp(bounds.th.0, bounds.th.1),
                (r + dr).clamp(bounds.r.0, bounds.r.1),
            );
            let v = f(cand.0, cand.1);
            if v < best {
                best = v;
                (th, r) = cand;
                moved = true;
                break;
            }
        }
        if !moved {
            step = (0.5 * step.0, 0.5 * step.1);
        }
    }
    (best, th)
}

/// Certified three-valued membership of `p` in `slab_a + slab_b`.
pub fn sum_contains_certified(spec: &SumSpec, p: Point3, budget: &SearchBudget) -> Verdict {
    if !p.is_finite() {
        return Verdict::BOUNDARY;
    }
    if quick_reject(spec, p) {
        return Verdict::Out;
    }
    if spec.inflation() > 0.0 {
        eps_search(spec, p, budget)
    } else {
        exact_search(spec, p, budget)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BruteMode {
    /// Exact predicate of B on each sampled residual.
    Strict,
    /// Predicate relaxed by the grid's covering radius times the
    /// predicate's Lipschitz constant, so that any genuine interior witness
    /// is caught.
    Widened,
}

/// Grid search over A's (θ, r, s) cell centers. Returns the parameter of
/// A's point whose residual passes B's test in the given mode.
pub fn bruteforce_witness(
    spec: &SumSpec,
    p: Point3,
    grid_per_axis: usize,
    mode: BruteMode,
) -> Option<Point3> {
    let g = grid_per_axis.max(2);
    let a = spec.slab_a.shape();
    let b = spec.slab_b.shape();
    let t = spec.inflation();
    let step = |lo: f64, hi: f64| (hi - lo) / g as f64;
    let (dt, dr, ds) = (
        step(a.ang_lo, a.ang_hi),
        step(a.rad_lo, a.rad_hi),
        step(-a.vert, a.vert),
    );
    let cover = 0.5 * (a.rad_hi * dt + SQRT_2 * dr + ds);
    for i in 0..g {
        let theta = a.ang_lo + dt * (i as f64 + 0.5);
        for k in 0..g {
            let r = a.rad_lo + dr * (k as f64 + 0.5);
            for m in 0..g {
                let s = -a.vert + ds * (m as f64 + 0.5);
                let qa = a.point(theta, r, s);
                let res = p - qa;
                let ok = if t > 0.0 {
                    let d = b.core_distance(res);
                    match mode {
                        BruteMode::Strict => d < t,
                        BruteMode::Widened => d < t + cover,
                    }
                } else {
                    let margin = b.core_margin(res);
                    match mode {
                        BruteMode::Strict => margin >= 0.0,
                        BruteMode::Widened => margin >= -2.5 * cover,
                    }
                };
                if ok {
                    return Some(qa);
                }
            }
        }
    }
    None
}

/// Widened grid oracle: true when some grid sample of A leaves a residual
/// within the covering slack of B.
pub fn sum_contains_bruteforce(spec: &SumSpec, p: Point3, grid_per_axis: usize) -> bool {
    bruteforce_witness(spec, p, grid_per_axis, BruteMode::Widened).is_some()
}

/// Sum of two on-cone points at the given angles and radii.
pub fn doubled_point(theta_a: f64, r_a: f64, theta_b: f64, r_b: f64) -> Point3 {
    Point3::from_parts(Point2::polar(r_a, theta_a), r_a) + Point3::from_parts(Point2::polar(r_b, theta_b), r_b)
}
