//! Seeded random sampling helpers shared by scans and tests.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cone::{SlabParam, SlabShape};
use crate::geom::Point3;

/// Independent generator for stream `stream` under `seed`.
///
/// Streams let parallel workers draw per-item randomness that does not
/// depend on scheduling.
pub fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Uniform parameter of `shape`, kept `inset` (as a fraction of each
/// range) away from the faces.
pub fn interior_param<R: Rng + ?Sized>(shape: &SlabShape, inset: f64, rng: &mut R) -> SlabParam {
    let pick = |rng: &mut R, lo: f64, hi: f64| {
        let m = (hi - lo) * inset;
        rng.gen_range(lo + m..=hi - m)
    };
    SlabParam {
        theta: pick(rng, shape.ang_lo, shape.ang_hi),
        r: pick(rng, shape.rad_lo, shape.rad_hi),
        s: pick(rng, -shape.vert, shape.vert),
    }
}

/// Point of `shape` at parameter `q` (no range check).
pub fn param_point(shape: &SlabShape, q: SlabParam) -> Point3 {
    shape.point(q.theta, q.r, q.s)
}

/// Uniform point in the closed ball of the given radius about the origin.
pub fn uniform_in_ball<R: Rng + ?Sized>(radius: f64, rng: &mut R) -> Point3 {
    loop {
        let v = Point3::new(
            rng.gen_range(-1.0..=1.0),
            rng.gen_range(-1.0..=1.0),
            rng.gen_range(-1.0..=1.0),
        );
        if v.norm() <= 1.0 {
            return v * radius;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_independent_and_reproducible() {
        let a: Vec<u64> = (0..4).map(|_| rng_for(7, 1).gen()).collect();
        let b: Vec<u64> = (0..4).map(|_| rng_for(7, 1).gen()).collect();
        assert_eq!(a, b);
        let x: u64 = rng_for(7, 1).gen();
        let y: u64 = rng_for(7, 2).gen();
        assert_ne!(x, y);
    }

    #[test]
    fn ball_samples_stay_in_ball() {
        let mut rng = rng_for(1, 0);
        for _ in 0..1000 {
            assert!(uniform_in_ball(0.5, &mut rng).norm() <= 0.5);
        }
    }
}
