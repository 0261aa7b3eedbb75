mod common;

use common::*;
use helly_core::contraction::{glue_constant, glue_contractions, sigma_table, GlueOutcome};
use helly_core::generate::{
    random_cactus, random_close_family, random_glue_instance, random_median_graph, random_metric,
    random_radius_function, random_tree, MedianKind,
};
use helly_core::hull::{hull_distance, minimize_radius, HullPoint};
use helly_core::hyperbolic::{cdv_point, HyperbolicGraph};
use helly_core::median::{linf_chain, linf_distance, ChainContraction};
use helly_core::metric::four_point_delta;
use helly_core::shortcut::{verify_circle, CircleMap};
use helly_core::{CoarseMedianData, FiniteMetric, Graph, MedianGraph, QiParams};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const KINDS: [MedianKind; 4] = [MedianKind::Tree, MedianKind::Grid, MedianKind::CubeRetract, MedianKind::Box];

fn median_graph(seed: u64, max_n: usize) -> (MedianGraph, ChaCha8Rng) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = random_median_graph(KINDS[(seed % 4) as usize], max_n, &mut rng);
    (g, rng)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn median_axioms(seed in any::<u64>()) {
        let (g, mut rng) = median_graph(seed, 16);
        let n = g.n();
        for _ in 0..200 {
            let (x, y, z, w) = (rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n));
            let m = g.median(x, y, z);
            prop_assert_eq!(m, g.median(y, x, z));
            prop_assert_eq!(m, g.median(z, y, x));
            prop_assert_eq!(g.median(x, x, y), x);
            prop_assert_eq!(
                g.median(g.median(x, w, y), w, z),
                g.median(x, w, g.median(y, w, z))
            );
        }
    }

    #[test]
    fn chain_contractions_are_exact(seed in any::<u64>()) {
        let (g, mut rng) = median_graph(seed, 14);
        let n = g.n();
        let chain = linf_chain(&g, rng.gen_range(0..n), rng.gen_range(0..n));
        prop_assume!(!chain.is_empty());
        let psi = ChainContraction::oriented(&g, chain).unwrap();
        let phi: Vec<_> = psi.values(&g).into_iter().map(q).collect();
        prop_assert!(is_k_contraction(|x, y| q(g.d1().get(x, y) as i64), |x, y, z| g.median(x, y, z), &phi, q(0)));
    }

    #[test]
    fn linf_is_sandwiched(seed in any::<u64>()) {
        let (g, _) = median_graph(seed, 20);
        let nu = g.nu().max(1) as u32;
        for x in 0..g.n() {
            for y in 0..g.n() {
                let l = linf_distance(&g, x, y);
                let d = g.d1().get(x, y);
                prop_assert!(l <= d && d <= nu * l);
                prop_assert_eq!(l, linf_distance(&g, y, x));
            }
        }
    }

    #[test]
    fn minimize_gives_dominated_minimal(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = random_metric(rng.gen_range(1..=9), 5, &mut rng);
        let f = random_radius_function(&m, &mut rng);
        let g = minimize_radius(&m, &f).unwrap();
        prop_assert!(is_minimal_oracle(&m, &g.values));
        prop_assert!((0..m.n()).all(|x| g.values[x] <= f[x]));
        let again = minimize_radius(&m, &g.values).unwrap();
        prop_assert_eq!(again, g);
    }

    #[test]
    fn hull_embedding_is_isometric(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = random_metric(rng.gen_range(1..=9), 5, &mut rng);
        let g = minimize_radius(&m, &random_radius_function(&m, &mut rng)).unwrap();
        for x in 0..m.n() {
            let ex = HullPoint::embed(&m, x);
            prop_assert_eq!(hull_distance(&ex.values, &g.values).unwrap(), g.values[x]);
            for y in 0..m.n() {
                let ey = HullPoint::embed(&m, y);
                prop_assert_eq!(hull_distance(&ex.values, &ey.values).unwrap(), m.d(x, y));
            }
        }
    }

    #[test]
    fn circle_check_ignores_rotation_and_reflection(seed in any::<u64>(), shift in 0usize..10) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_cactus(4, 2, &mut rng);
        let m = FiniteMetric::from_graph(&g).unwrap();
        let len = rng.gen_range(3..=10);
        let targets: Vec<usize> = (0..len).map(|_| rng.gen_range(0..m.n())).collect();
        let p = QiParams::new(q(1) + q(rng.gen_range(0..2)) / q(2), q(rng.gen_range(0..3))).unwrap();
        let base = verify_circle(&m, &CircleMap::integer(&targets, p)).unwrap().holds;
        let mut rotated = targets.clone();
        rotated.rotate_left(shift % len);
        prop_assert_eq!(base, verify_circle(&m, &CircleMap::integer(&rotated, p)).unwrap().holds);
        let mut reflected = targets;
        reflected.reverse();
        prop_assert_eq!(base, verify_circle(&m, &CircleMap::integer(&reflected, p)).unwrap().holds);
    }

    #[test]
    fn trees_are_zero_hyperbolic(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = random_tree(rng.gen_range(1..=14), &mut rng);
        prop_assert_eq!(four_point_delta(&FiniteMetric::from_graph(&t).unwrap()), q(0));
    }

    #[test]
    fn cdv_center_is_close_on_trees(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = random_tree(rng.gen_range(4..=24), &mut rng);
        let hg = HyperbolicGraph::with_constant(&t, q(1)).unwrap();
        let r = q(rng.gen_range(0..=3));
        let family = random_close_family(&hg, rng.gen_range(2..=8), r, &mut rng);
        for y in 0..hg.n() {
            let res = cdv_point(&hg, &family, y, r).unwrap();
            prop_assert!(res.holds);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn sigma_is_a_metric_below_d_plus_k(seed in any::<u64>()) {
        let (g, _) = median_graph(seed, 7);
        let cm = CoarseMedianData::from_median_graph(&g);
        let k = q(1) / q(2);
        let s = sigma_table(&cm, k).unwrap();
        prop_assert!(metric_axioms(&s));
        for a in 0..g.n() {
            for b in 0..g.n() {
                prop_assert!(s.d(a, b) <= q(g.d1().get(a, b) as i64) + k);
            }
        }
    }

    #[test]
    fn glued_maps_are_contractions(seed in any::<u64>()) {
        let (g, mut rng) = median_graph(seed, 18);
        let cm = CoarseMedianData::from_median_graph(&g);
        let inst = random_glue_instance(&g, |k| glue_constant(&cm, k), &mut rng);
        prop_assume!(inst.is_some());
        let inst = inst.unwrap();
        match glue_contractions(&cm, &inst.phi1, &inst.phi2, inst.params).unwrap() {
            GlueOutcome::Glued(res) => {
                prop_assert!(res.report.is_empty() && res.gap_bound_holds);
                prop_assert!(is_k_contraction(
                    |x, y| q(g.d1().get(x, y) as i64),
                    |x, y, z| g.median(x, y, z),
                    &res.map.values,
                    inst.params.k,
                ));
            }
            GlueOutcome::HypothesisFailed { witness, .. } => prop_assert!(false, "overlap at {}", witness),
        }
    }
}

#[test]
fn median_recognition_rejects_cycles() {
    for n in [5usize, 6, 7] {
        assert!(MedianGraph::recognize(&Graph::cycle(n)).is_err());
    }
    assert!(MedianGraph::recognize(&Graph::cycle(4)).is_ok());
}
