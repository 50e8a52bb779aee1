use grassmann_core::linalg::{orthonormality_defect, thin_svd};
use grassmann_core::manifold::distance;
use grassmann_core::pod::{
    correlation_spectrum, dynamic_error, projection_error, snapshots_pod, split_mean, PodBasis,
    RomTrajectory, SnapshotEnsemble,
};
use grassmann_core::sampling::{gaussian_matrix, random_point};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Low-rank-plus-noise snapshots with a decaying spectrum.
fn ensemble(seed: u64, n: usize, count: usize) -> SnapshotEnsemble {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rank = count.min(n);
    let left = gaussian_matrix(&mut rng, n, rank);
    let right = gaussian_matrix(&mut rng, rank, count);
    let decay = DMatrix::from_diagonal(&DVector::from_fn(rank, |k, _| 0.6f64.powi(k as i32)));
    let raw = left * decay * right + DMatrix::from_element(n, count, rng.random::<f64>());
    let times: Vec<f64> = (0..count).map(|k| k as f64).collect();
    split_mean(&raw, &times).unwrap()
}

fn ensemble_params() -> impl Strategy<Value = (u64, usize, usize)> {
    (any::<u64>(), 4usize..=200, 4usize..=50)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn pod_beats_random_subspaces((seed, n, count) in ensemble_params(), pick in 0.0f64..1.0) {
        let ens = ensemble(seed, n, count);
        let modes = 1 + ((count.min(n).min(20) - 2) as f64 * pick) as usize;
        let pod = snapshots_pod(&ens, modes).unwrap();
        let best = projection_error(&pod, &ens).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(!seed);
        for _ in 0..20 {
            let q = random_point(&mut rng, n, modes);
            let other = PodBasis::from_subspace(&q, ens.mean().clone()).unwrap();
            prop_assert!(best <= projection_error(&other, &ens).unwrap());
        }
    }

    #[test]
    fn error_equals_the_eigenvalue_tail((seed, n, count) in ensemble_params(), pick in 0.0f64..1.0) {
        let ens = ensemble(seed, n, count);
        let modes = 1 + ((count.min(n).min(20) - 2) as f64 * pick) as usize;
        let pod = snapshots_pod(&ens, modes).unwrap();
        let mu = correlation_spectrum(&ens);
        let tail = mu[modes..].iter().sum::<f64>() / mu.iter().sum::<f64>();
        prop_assert!((projection_error(&pod, &ens).unwrap() - tail).abs() <= 1e-10);
        prop_assert!(orthonormality_defect(pod.modes()) <= 1e-12);
        let eig = pod.eigenvalues().unwrap();
        prop_assert!(eig.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn snapshot_method_matches_a_direct_svd((seed, n, count) in ensemble_params()) {
        let ens = ensemble(seed, n, count);
        let modes = 3.min(count - 1);
        let pod = snapshots_pod(&ens, modes).unwrap();
        let (u, sigma, _) = thin_svd(ens.snapshots());
        let scale = ens.len() as f64;
        for (s, eig) in sigma.iter().zip(pod.eigenvalues().unwrap()) {
            let mu = s * s / scale;
            prop_assert!((eig - mu).abs() <= 1e-10 * mu.max(1.0));
        }
        let direct = grassmann_core::manifold::make_point(&u.columns(0, modes).into_owned()).unwrap();
        prop_assert!(distance(&direct, &pod.to_point().unwrap()).unwrap() <= 1e-8);
    }

    #[test]
    fn any_trajectory_is_no_better_than_projection((seed, n, count) in ensemble_params(), noise in 0.0f64..1.0) {
        let ens = ensemble(seed, n, count);
        let pod = snapshots_pod(&ens, 2).unwrap();
        let exact = RomTrajectory::projected(&pod, &ens);
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(1));
        let perturbed = RomTrajectory {
            coefficients: &exact.coefficients + gaussian_matrix(&mut rng, 2, count) * noise,
            times: exact.times.clone(),
        };
        let p = projection_error(&pod, &ens).unwrap();
        prop_assert!((dynamic_error(&pod, &exact, &ens).unwrap() - p).abs() <= 1e-12);
        prop_assert!(dynamic_error(&pod, &perturbed, &ens).unwrap() >= p - 1e-12);
    }
}
