use grassmann_core::interp::{
    amsallem, interpolate, karcher_objective, neville, standard, two_point_barycenter, Method,
    ParameterSampleSet,
};
use grassmann_core::manifold::{distance, exp_map, make_point, GrassmannPoint};
use grassmann_core::sampling::{random_invertible, random_nearby, random_point, random_tangent};
use grassmann_core::testbed::AnalyticFamily;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const METHODS: [Method; 3] = [Method::Neville, Method::Amsallem, Method::Standard];

/// Increasing nodes in `[0, 1]` with gaps of at least `0.5 / count`.
fn nodes(rng: &mut ChaCha8Rng, count: usize) -> Vec<f64> {
    let gap = 0.5 / count as f64;
    let mut lam = 0.0;
    (0..count)
        .map(|_| {
            let v = lam;
            lam += gap + rng.random::<f64>() * gap;
            v
        })
        .collect()
}

/// Samples scattered around a common centre, with raw bases `Y_k A_k`.
fn scattered(seed: u64, n: usize, m: usize, count: usize) -> ParameterSampleSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let centre = random_point(&mut rng, n, m);
    let params = nodes(&mut rng, count);
    let points: Vec<GrassmannPoint> = (0..count)
        .map(|_| random_nearby(&mut rng, &centre, 0.4, 0.7))
        .collect();
    let raw = points
        .iter()
        .map(|p| p.representative() * random_invertible(&mut rng, m, 5.0))
        .collect();
    ParameterSampleSet::new(params, points)
        .unwrap()
        .with_raw_bases(raw)
        .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn every_method_reproduces_nodes(seed in any::<u64>(), n in 4usize..20, m in 1usize..4, count in 1usize..=9) {
        prop_assume!(2 * m <= n);
        let samples = scattered(seed, n, m, count);
        for method in METHODS {
            for (k, &lam) in samples.params().iter().enumerate() {
                let r = interpolate(method, &samples, lam, None).unwrap();
                prop_assert_eq!((r.point.n(), r.point.m()), (n, m));
                let d = distance(&r.point, &samples.points()[k]).unwrap();
                prop_assert!(d <= 1e-8, "{method} node {k}: {d}");
            }
        }
    }

    #[test]
    fn neville_is_exact_on_geodesic_families(seed in any::<u64>(), n in 4usize..16, count in 2usize..=9, target in 0.0f64..1.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = rng.random_range(1..=n / 2);
        let rates = (0..m).map(|_| rng.random_range(-1.3..1.3)).collect();
        let family = AnalyticFamily::planar_rotation_seeded(n, rates, (-1.0, 2.0), seed).unwrap();
        let params = nodes(&mut rng, count);
        let points = params.iter().map(|&l| family.eval(l).unwrap()).collect();
        let samples = ParameterSampleSet::new(params.clone(), points).unwrap();
        let lam = params[0] + target * (params[count - 1] - params[0]);
        let r = neville(&samples, lam).unwrap();
        prop_assert!(distance(&r.point, &family.eval(lam).unwrap()).unwrap() <= 1e-8);
    }

    #[test]
    fn single_interval_neville_is_the_barycenter(seed in any::<u64>(), n in 2usize..20, lam in -0.5f64..1.5) {
        let samples = scattered(seed, n, 1, 2);
        let p = samples.params();
        let y = samples.points();
        let direct = two_point_barycenter(p[0], p[1], &y[0], &y[1], lam).unwrap();
        let via = neville(&samples, lam).unwrap();
        prop_assert!(distance(&direct, &via.point).unwrap() <= 1e-12);
    }

    #[test]
    fn two_point_amsallem_matches_neville_on_geodesics(seed in any::<u64>(), lam in 0.0f64..1.0, reference in 0usize..2) {
        let family = AnalyticFamily::planar_rotation_seeded(8, vec![0.9, -0.4, 0.2], (0.0, 1.0), seed).unwrap();
        let points = vec![family.eval(0.0).unwrap(), family.eval(1.0).unwrap()];
        let samples = ParameterSampleSet::new(vec![0.0, 1.0], points).unwrap();
        let a = amsallem(&samples, lam, Some(reference)).unwrap();
        let b = neville(&samples, lam).unwrap();
        prop_assert!(distance(&a.point, &b.point).unwrap() <= 1e-8);
    }

    #[test]
    fn barycenter_minimizes_the_karcher_objective(seed in any::<u64>(), n in 3usize..12) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = rng.random_range(1..=n / 2);
        let x = random_point(&mut rng, n, m);
        let y = random_nearby(&mut rng, &x, 0.6, 1.0);
        for alpha in [0.25, 0.5, 0.75] {
            let b = two_point_barycenter(0.0, 1.0, &x, &y, alpha).unwrap();
            let best = karcher_objective(&b, &x, &y, alpha).unwrap();
            for _ in 0..50 {
                let eps = rng.random_range(0.0..0.1);
                let delta = random_tangent(&mut rng, &b, eps);
                let other = exp_map(&b, &delta).unwrap();
                prop_assert!(best <= karcher_objective(&other, &x, &y, alpha).unwrap() + 1e-9);
            }
        }
    }
}

#[test]
fn neville_converges_on_the_cubic_frame() {
    let family = AnalyticFamily::cubic_frame((0.0, 0.8));
    let grid: Vec<f64> = (0..50).map(|k| 0.8 * k as f64 / 49.0).collect();
    let errors: Vec<f64> = [0.4f64, 0.2, 0.1]
        .iter()
        .map(|&h| {
            let count = (0.8 / h).round() as usize + 1;
            let params: Vec<f64> = (0..count).map(|k| k as f64 * h).collect();
            let points = params.iter().map(|&l| family.eval(l).unwrap()).collect();
            let samples = ParameterSampleSet::new(params, points).unwrap();
            grid.iter()
                .map(|&l| {
                    distance(
                        &neville(&samples, l).unwrap().point,
                        &family.eval(l).unwrap(),
                    )
                    .unwrap()
                })
                .fold(0.0, f64::max)
        })
        .collect();
    assert!(errors[1] <= 0.5 * errors[0], "{errors:?}");
    assert!(errors[2] <= 0.5 * errors[1], "{errors:?}");
}

#[test]
fn standard_blend_of_distinct_lines_misses_the_geodesic() {
    let line = |t: f64| {
        make_point(&nalgebra::DMatrix::from_column_slice(
            3,
            1,
            &[t.cos(), t.sin(), 0.0],
        ))
        .unwrap()
    };
    let samples = ParameterSampleSet::new(vec![0.0, 1.0], vec![line(0.0), line(1.2)]).unwrap();
    let blend = standard(&samples, 0.25).unwrap();
    let geo = neville(&samples, 0.25).unwrap();
    assert!(distance(&geo.point, &line(0.3)).unwrap() < 1e-12);
    assert!(distance(&blend.point, &line(0.3)).unwrap() > 1e-3);
}
