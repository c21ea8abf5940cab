//! Finite-M distance and kernel identities, which hold exactly for any fixed
//! map.

mod common;

use grnf::features::{build_grnf, DistributionConfig};
use grnf::metrics::{distance_estimate, gram_matrix, kernel_estimate};
use grnf::{DenseTensor, Graph};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn graphs(seed: u64, count: usize) -> Vec<Graph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let p = 0.2 + 0.6 * rng.random::<f64>();
            common::random_graph(&mut rng, 1 + i % 8, p)
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn polarization_identity(seed in any::<u64>()) {
        let map = build_grnf(64, &DistributionConfig::default(), seed).unwrap();
        let gs = graphs(seed ^ 1, 2);
        let (z1, z2) = (map.embed(&gs[0]).unwrap(), map.embed(&gs[1]).unwrap());
        let (c1, c2) = (map.embed_centered(&gs[0]).unwrap(), map.embed_centered(&gs[1]).unwrap());
        let d2 = distance_estimate(&z1, &z2).unwrap().squared;
        let k = |a: &[f64], b: &[f64]| kernel_estimate(a, b).unwrap();
        prop_assert!((d2 - (k(&c1, &c1) - 2.0 * k(&c1, &c2) + k(&c2, &c2))).abs() <= 1e-12);
        let dc2 = distance_estimate(&c1, &c2).unwrap().squared;
        prop_assert!((d2 - dc2).abs() <= 1e-12);
    }

    #[test]
    fn triangle_inequality_and_symmetry(seed in any::<u64>()) {
        let map = build_grnf(32, &DistributionConfig::default(), seed).unwrap();
        let z: Vec<Vec<f64>> = graphs(seed ^ 2, 3).iter().map(|g| map.embed(g).unwrap()).collect();
        let d = |i: usize, j: usize| distance_estimate(&z[i], &z[j]).unwrap().value;
        prop_assert_eq!(d(0, 1), d(1, 0));
        prop_assert_eq!(d(0, 0), 0.0);
        prop_assert!(d(0, 2) <= d(0, 1) + d(1, 2) + 1e-15);
    }
}

#[test]
fn gram_matrix_is_psd_and_of_negative_type() {
    let gs = graphs(31, 20);
    let map = build_grnf(128, &DistributionConfig::default(), 4).unwrap();
    let gram = gram_matrix(&map, &gs).unwrap();
    assert!(gram.is_symmetric());
    assert!(gram.min_eigenvalue() >= -1e-8);

    let z: Vec<Vec<f64>> = gs.iter().map(|g| map.embed(g).unwrap()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..50 {
        let mut c: Vec<f64> = (0..gs.len()).map(|_| rng.random_range(-1.0..1.0)).collect();
        let mean = c.iter().sum::<f64>() / c.len() as f64;
        c.iter_mut().for_each(|x| *x -= mean);
        let mut total = 0.0;
        for i in 0..gs.len() {
            for j in 0..gs.len() {
                total += c[i] * c[j] * distance_estimate(&z[i], &z[j]).unwrap().squared;
            }
        }
        assert!(total <= 1e-10, "negative-type sum {total}");
    }
}

#[test]
fn null_graph_has_zero_kernel() {
    let map = build_grnf(64, &DistributionConfig::default(), 2).unwrap();
    let null = map
        .embed_centered_tensor(&DenseTensor::null_graph(1))
        .unwrap();
    for g in graphs(5, 5) {
        assert_eq!(
            kernel_estimate(&null, &map.embed_centered(&g).unwrap()).unwrap(),
            0.0
        );
    }
    let single = gram_matrix(&map, &graphs(6, 1)).unwrap();
    let c = map.embed_centered(&graphs(6, 1)[0]).unwrap();
    assert_eq!(single.size(), 1);
    assert!((single.get(0, 0) - kernel_estimate(&c, &c).unwrap()).abs() <= 1e-15);
}
