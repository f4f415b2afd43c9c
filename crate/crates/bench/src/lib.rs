//! Fixtures shared by the benchmarks.

use cone_overlap::cone::{ConeSlab, DecompositionParams, RadialInterval, SlabVariant};
use cone_overlap::minkowski::SumSpec;
use cone_overlap::sampling::{interior_param, param_point, rng_for, uniform_in_ball};
use cone_overlap::Point3;

/// Sum of sectors μ and μ + gap with J_i pinned at 1.3 and 1.5.
pub fn sum_spec(delta: f64, mu: i64, gap: i64, variant: SlabVariant) -> SumSpec {
    let params = DecompositionParams::standard(delta).expect("valid delta");
    let j1 = RadialInterval::pinned(1.3, &params).expect("valid interval");
    let j2 = RadialInterval::pinned(1.5, &params).expect("valid interval");
    SumSpec::new(
        ConeSlab::new(params, mu, j1, variant).expect("valid slab"),
        ConeSlab::new(params, mu + gap, j2, variant).expect("valid slab"),
    )
    .expect("same delta")
}

/// Points near the sum: a sum of interior points plus a jitter of radius 4δ.
pub fn near_sum_points(spec: &SumSpec, n: usize, seed: u64) -> Vec<Point3> {
    let (a, b) = (spec.slab_a.shape(), spec.slab_b.shape());
    let delta = spec.slab_a.params.delta();
    let mut rng = rng_for(seed, 0);
    (0..n)
        .map(|_| {
            param_point(&a, interior_param(&a, 0.0, &mut rng))
                + param_point(&b, interior_param(&b, 0.0, &mut rng))
                + uniform_in_ball(4.0 * delta, &mut rng)
        })
        .collect()
}
