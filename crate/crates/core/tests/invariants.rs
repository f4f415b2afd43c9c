use std::collections::HashSet;

use proptest::prelude::*;

use cone_overlap::cone::{slab_contains, slab_param_point, ConeSlab, DecompositionParams, RadialInterval, SlabVariant};
use cone_overlap::geom::{iv_eval_norm, rotate, Interval, Point2};
use cone_overlap::lemma_checks::{
    check_regroup_4_3, ellipse_graph, ell_max, p_point, EllipseArc, RegroupParams,
};
use cone_overlap::overlap::{class_range, fiber, k0};
use cone_overlap::sampling::{interior_param, param_point, rng_for};
use cone_overlap::Verdict;

fn delta_strategy() -> impl Strategy<Value = f64> {
    (-5.0..-2.0f64).prop_map(|e| 10f64.powf(e))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rotation_round_trip(x1 in -5.0..5.0f64, x2 in -5.0..5.0f64, sigma in -4.0..4.0f64) {
        let p = Point2::new(x1, x2);
        let q = rotate(rotate(p, sigma), -sigma);
        prop_assert!(p.dist(q) <= 1e-12 * p.norm().max(1.0));
        prop_assert!((rotate(p, sigma).norm() - p.norm()).abs() <= 1e-12 * p.norm().max(1.0));
    }

    #[test]
    fn norm_enclosure_contains_samples(
        x in -3.0..3.0f64, y in -3.0..3.0f64,
        w in 0.0..1.0f64, v in 0.0..1.0f64,
        s in 0.0..1.0f64, t in 0.0..1.0f64,
    ) {
        let iv = iv_eval_norm(Interval::new(x, x + w), Interval::new(y, y + v));
        let p = Point2::new(x + s * w, y + t * v);
        prop_assert!(iv.contains(p.norm()));
    }

    #[test]
    fn p_point_on_arc(
        delta in delta_strategy(),
        ep in 1.0..2.0f64, epp in 1.0..2.0f64,
        frac in 0.0..1.0f64,
    ) {
        let ell = (2.0 * frac * ell_max(delta)).floor() / 2.0;
        let p = p_point(ell, delta, ep, epp);
        prop_assume!(p.x1 >= 1.0);
        let phi = ellipse_graph(&EllipseArc::new(ep, epp, false), p.x1).unwrap();
        prop_assert!((phi - p.x2).abs() < 1e-12);
    }

    #[test]
    fn fibers_partition_the_index_square(delta in delta_strategy()) {
        let params = DecompositionParams::standard(delta).unwrap();
        let m = params.index_bound().unwrap();
        let mut seen = HashSet::new();
        for a in class_range(&params) {
            for (mu, nu) in fiber(a, &params).pairs {
                prop_assert_eq!(k0(mu, nu), a);
                prop_assert!(seen.insert((mu.0, nu.0)));
            }
        }
        prop_assert_eq!(seen.len() as i64, (2 * m + 1) * (2 * m + 1));
    }

    #[test]
    fn regroup_bracket_for_nontrivial_blocks(delta in 1e-6..1e-2f64, eps in 0.1..0.45f64) {
        let rp = RegroupParams::new(delta, eps).unwrap();
        prop_assume!(rp.n >= 3);
        prop_assert!(rp.bracket_holds());
    }

    #[test]
    fn regroup_decomposition_is_exact(delta in 1e-6..1e-2f64, eps in 0.1..0.45f64, mu in -2000i64..2000) {
        let rp = RegroupParams::new(delta, eps).unwrap();
        let (ell, j) = rp.decompose(mu);
        prop_assert_eq!(ell * rp.n as i64 + j, mu);
        prop_assert!((0..rp.n as i64).contains(&j));
    }

    #[test]
    fn interior_parameters_are_members(seed in 0u64..1000, mu in -3i64..=3, which in 0usize..3) {
        let variant = [SlabVariant::Standard, SlabVariant::Enlarged, SlabVariant::EpsNeighborhood(0.3)][which];
        let params = DecompositionParams::standard(1e-3).unwrap();
        let j = RadialInterval::pinned(1.4, &params).unwrap();
        let slab = ConeSlab::new(params, mu, j, variant).unwrap();
        let mut rng = rng_for(seed, 0);
        let q = interior_param(&slab.shape(), 0.01, &mut rng);
        let p = param_point(&slab.shape(), q);
        if which < 2 {
            prop_assert_eq!(slab_param_point(&slab, q).unwrap(), p);
        }
        prop_assert_eq!(slab.contains(p), Verdict::In);
        if which < 2 {
            prop_assert_eq!(slab_contains(&slab, p).unwrap(), Verdict::In);
        }
    }
}

#[test]
fn regroup_4_3_on_lattice() {
    for delta in [1e-3, 1e-4, 1e-6] {
        for eps in [0.1, 0.3, 0.45] {
            assert!(check_regroup_4_3(delta, eps).unwrap(), "{delta} {eps}");
        }
    }
}
