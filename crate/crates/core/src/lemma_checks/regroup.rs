//! Regrouping δ-sectors into blocks of N = ⌊δ^{−ε/2}⌋ at the coarser scale
//! δ_ε = δN².

use rand::Rng;

use super::displayed::biased;
use crate::cone::{ConeSlab, DecompositionParams, RadialInterval, SlabVariant, STARRED_SECTOR_BOUND};
use crate::error::{Error, Result};
use crate::geom::{Point3, Verdict};
use crate::sampling::{rng_for, uniform_in_ball};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RegroupParams {
    pub delta: f64,
    pub epsilon: f64,
    pub n: u64,
    pub delta_eps: f64,
}

impl RegroupParams {
    pub fn new(delta: f64, epsilon: f64) -> Result<Self> {
        SlabVariant::eps(epsilon)?;
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::InvalidParams(format!("delta must lie in (0, 1), got {delta}")));
        }
        let n = delta.powf(-epsilon / 2.0).floor().max(1.0) as u64;
        Ok(Self {
            delta,
            epsilon,
            n,
            delta_eps: delta * (n * n) as f64,
        })
    }

    /// δ^{1−ε}, the neighborhood radius of the ε slabs.
    pub fn rho(&self) -> f64 {
        self.delta.powf(1.0 - self.epsilon)
    }

    /// δ^{1−ε}/2 ≤ δ_ε ≤ δ^{1−ε}.
    pub fn bracket_holds(&self) -> bool {
        let rho = self.rho();
        rho / 2.0 <= self.delta_eps && self.delta_eps <= rho
    }

    /// μ = ℓN + k with 0 ≤ k < N.
    pub fn decompose(&self, mu: i64) -> (i64, i64) {
        let n = self.n as i64;
        (mu.div_euclid(n), mu.rem_euclid(n))
    }

    /// (π/7)δ_ε^{−1/2} − 1, the bound on |ℓ| for 𝒩* at scale δ_ε.
    pub fn coarse_bound(&self) -> f64 {
        STARRED_SECTOR_BOUND / self.delta_eps.sqrt() - 1.0
    }

    /// All μ of 𝒩 at scale δ.
    fn fine_indices(&self) -> Result<std::ops::RangeInclusive<i64>> {
        let params = DecompositionParams::standard(self.delta)?;
        let m = params.index_bound().unwrap_or(-1);
        Ok(-m..=m)
    }
}

/// Γ_{ℓN+k} ⊂ [ℓδ_ε^{1/2}, (ℓ+1)δ_ε^{1/2}) for every μ of 𝒩, by integer
/// endpoint comparison, together with δ_ε^{1/2} = Nδ^{1/2} to rounding.
pub fn check_regroup_4_3(delta: f64, epsilon: f64) -> Result<bool> {
    let rp = RegroupParams::new(delta, epsilon)?;
    let n = rp.n as i64;
    let ok_idx = rp.fine_indices()?.all(|mu| {
        let (ell, k) = rp.decompose(mu);
        ell * n + k == mu && ell * n <= mu && mu < (ell + 1) * n
    });
    let scale = rp.n as f64 * delta.sqrt();
    let ok_scale = (rp.delta_eps.sqrt() - scale).abs() <= 4.0 * f64::EPSILON * scale;
    Ok(ok_idx && ok_scale)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Regroup45Report {
    pub pass: bool,
    pub n: u64,
    pub bound: f64,
    /// μ whose coarse index ℓ = ⌊μ/N⌋ exceeds the bound.
    pub failures: Vec<(i64, i64)>,
    pub worst_ell: i64,
}

/// Every μ ∈ 𝒩^{(δ)} has ℓ = ⌊μ/N⌋ in 𝒩*^{(δ_ε)}.
pub fn check_regroup_4_5(delta: f64, epsilon: f64) -> Result<Regroup45Report> {
    let rp = RegroupParams::new(delta, epsilon)?;
    let bound = rp.coarse_bound();
    let mut failures = Vec::new();
    let mut worst_ell = 0i64;
    for mu in rp.fine_indices()? {
        let (ell, _) = rp.decompose(mu);
        if ell.abs() > worst_ell.abs() {
            worst_ell = ell;
        }
        if ell.abs() as f64 > bound {
            failures.push((mu, ell));
        }
    }
    Ok(Regroup45Report {
        pass: failures.is_empty(),
        n: rp.n,
        bound,
        failures,
        worst_ell,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Regroup44Report {
    pub pass: bool,
    pub ell: i64,
    pub samples: usize,
    /// Samples not certified In the enlarged coarse slab.
    pub failures: usize,
    /// Failures among the purely vertical offsets.
    pub vertical_failures: usize,
    /// max |arg ξ − arg ξ₀| / δ_ε^{1/2}.
    pub max_angle_ratio: f64,
}

/// ũ_{μ,J} ⊂ (u^{(δ_ε)}_{ℓ,J})* with ℓ = ⌊μ/N⌋: samples slab points offset
/// by less than δ^{1−ε} (random, near-sphere and purely vertical) and
/// checks each against the enlarged slab at scale δ_ε and against the
/// angle estimate |arg ξ − arg ξ₀| ≤ δ_ε^{1/2}.
pub fn check_regroup_4_4(
    delta: f64,
    epsilon: f64,
    mu: i64,
    j: RadialInterval,
    samples: usize,
    seed: u64,
) -> Result<Regroup44Report> {
    let rp = RegroupParams::new(delta, epsilon)?;
    let (ell, _) = rp.decompose(mu);
    if ell.abs() as f64 > rp.coarse_bound() {
        return Err(Error::HypothesisViolated(format!(
            "ℓ = {ell} outside 𝒩* at δ_ε = {} (bound {})",
            rp.delta_eps,
            rp.coarse_bound()
        )));
    }
    let fine = ConeSlab::standard(DecompositionParams::standard(delta)?, mu, j)?;
    let coarse = ConeSlab::new(
        DecompositionParams::derived(rp.delta_eps, STARRED_SECTOR_BOUND)?,
        ell,
        j,
        SlabVariant::Enlarged,
    )?;
    let sh = fine.shape();
    let rho = rp.rho();
    let h_eps = rp.delta_eps.sqrt();
    let theta_top = sh.ang_lo + (sh.ang_hi - sh.ang_lo) * (1.0 - 1e-9);
    let mut rng = rng_for(seed, mu as u64);

    let mut rep = Regroup44Report {
        pass: true,
        ell,
        samples: 0,
        failures: 0,
        vertical_failures: 0,
        max_angle_ratio: 0.0,
    };
    let record = |rep: &mut Regroup44Report, base: Point3, off: Point3, vertical: bool| {
        let q = base + off;
        rep.samples += 1;
        let ratio = (q.xi().arg() - base.xi().arg()).abs() / h_eps;
        rep.max_angle_ratio = rep.max_angle_ratio.max(ratio);
        if coarse.contains(q) != Verdict::In || ratio > 1.0 {
            rep.failures += 1;
            if vertical {
                rep.vertical_failures += 1;
            }
        }
    };

    let scale = 1.0 - 1e-9;
    for &theta in &[sh.ang_lo, theta_top] {
        for &r in &[sh.rad_lo, sh.rad_hi] {
            for &s in &[-sh.vert, 0.0, sh.vert] {
                let base = sh.point(theta, r, s);
                record(&mut rep, base, Point3::new(0.0, 0.0, 0.0), false);
                for sign in [-1.0, 1.0] {
                    record(&mut rep, base, Point3::new(0.0, 0.0, sign * 0.99 * rho), true);
                }
            }
        }
    }
    for i in 0..samples {
        let base = sh.point(
            biased(&mut rng, sh.ang_lo, theta_top),
            biased(&mut rng, sh.rad_lo, sh.rad_hi),
            biased(&mut rng, -sh.vert, sh.vert),
        );
        let off = match i % 3 {
            0 => uniform_in_ball(rho * scale, &mut rng),
            1 => {
                let v = uniform_in_ball(1.0, &mut rng);
                let n = v.norm();
                if n == 0.0 {
                    v
                } else {
                    v * (rng.gen_range(0.99..scale) * rho / n)
                }
            }
            _ => Point3::new(0.0, 0.0, rng.gen_range(-scale..=scale) * rho),
        };
        record(&mut rep, base, off, i % 3 == 2);
    }
    rep.pass = rep.failures == 0;
    Ok(rep)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Regroup44Sweep {
    pub pass: bool,
    pub samples: usize,
    pub failures: usize,
    pub vertical_failures: usize,
    pub tested: Vec<i64>,
    /// μ whose coarse index violates the hypothesis (see 4.5).
    pub skipped: Vec<i64>,
}

/// [`check_regroup_4_4`] at μ ∈ {−M, −M/2, 0, M/2, M} with J = [α, α+√δ],
/// splitting `samples` evenly.
pub fn regroup_4_4_sweep(delta: f64, epsilon: f64, alpha: f64, samples: usize, seed: u64) -> Result<Regroup44Sweep> {
    let params = DecompositionParams::standard(delta)?;
    let j = RadialInterval::pinned(alpha, &params)?;
    let m = params.index_bound().unwrap_or(0);
    let mut mus = vec![-m, -m / 2, 0, m / 2, m];
    mus.dedup();
    let per = samples / mus.len();
    let mut out = Regroup44Sweep {
        pass: true,
        samples: 0,
        failures: 0,
        vertical_failures: 0,
        tested: Vec::new(),
        skipped: Vec::new(),
    };
    for mu in mus {
        match check_regroup_4_4(delta, epsilon, mu, j, per, seed) {
            Ok(r) => {
                out.samples += r.samples;
                out.failures += r.failures;
                out.vertical_failures += r.vertical_failures;
                out.tested.push(mu);
            }
            Err(Error::HypothesisViolated(_)) => out.skipped.push(mu),
            Err(e) => return Err(e),
        }
    }
    out.pass = out.failures == 0;
    Ok(out)
}
