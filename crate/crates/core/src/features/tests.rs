use super::*;
use crate::graph::Graph;
use crate::maps::Normalization;
use crate::tensor::{DenseTensor, Permutation};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_graph(rng: &mut ChaCha8Rng, n: usize, p: f64) -> Graph {
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.random::<f64>() < p {
                edges.push((i, j));
            }
        }
    }
    Graph::unattributed(n, edges).unwrap()
}

fn path(n: usize) -> Graph {
    Graph::unattributed(n, (1..n).map(|i| (i - 1, i)).collect()).unwrap()
}

#[test]
fn zero_parameters_give_half() {
    let cfg = DistributionConfig::default();
    for k in 1..=3 {
        let w = FeatureParams::zeros(k, 1);
        assert_eq!(psi(&path(4), &w, &cfg).unwrap(), 0.5);
        assert_eq!(psi(&path(1), &w, &cfg).unwrap(), 0.5);
    }
}

#[test]
fn plain_weights() {
    let map = build_grnf(4, &DistributionConfig::default(), 3).unwrap();
    assert_eq!(map.weights(), &[0.5; 4]);
    assert!(!map.is_weighted());
    assert!(build_grnf(0, &DistributionConfig::default(), 3).is_err());
}

#[test]
fn smaller_maps_are_prefixes() {
    let cfg = DistributionConfig::default();
    let big = build_grnf(50, &cfg, 11).unwrap();
    let small = build_grnf(20, &cfg, 11).unwrap();
    assert_eq!(&big.params()[..20], small.params());
    assert_eq!(big.prefix(20).unwrap(), small);
    let g = path(5);
    let zb = big.prefix(20).unwrap().embed(&g).unwrap();
    assert_eq!(zb, small.embed(&g).unwrap());
}

#[test]
fn embedding_is_labelling_invariant_bitwise() {
    let cfg = DistributionConfig::default();
    let map = build_grnf(40, &cfg, 5).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..10 {
        let n = rng.random_range(1..9);
        let g = random_graph(&mut rng, n, 0.4);
        let pi = Permutation::random(n, &mut rng);
        let a = map.embed(&g).unwrap();
        let b = map.embed(&g.relabel(&pi).unwrap()).unwrap();
        assert!(a.iter().zip(&b).all(|(x, y)| x.to_bits() == y.to_bits()));
    }
}

#[test]
fn batch_matches_single() {
    let cfg = DistributionConfig::default();
    let map = build_grnf(30, &cfg, 9).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let graphs: Vec<Graph> = (0..6)
        .map(|i| random_graph(&mut rng, 3 + i % 3, 0.5))
        .collect();
    let batch = map.embed_many(&graphs).unwrap();
    for (g, z) in graphs.iter().zip(&batch) {
        assert_eq!(&map.embed(g).unwrap(), z);
        let direct: Vec<f64> = map
            .params()
            .iter()
            .zip(map.weights())
            .map(|(w, c)| c * psi(g, w, &cfg).unwrap())
            .collect();
        assert_eq!(&direct, z);
    }
}

#[test]
fn sigmoid_features_are_bounded() {
    let cfg = DistributionConfig {
        sigma: 5.0,
        ..Default::default()
    };
    let map = build_grnf(200, &cfg, 2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..5 {
        let g = random_graph(&mut rng, 7, 0.3);
        let z = map.embed(&g).unwrap();
        assert!(z.iter().all(|&x| (0.0..=map.weights()[0]).contains(&x)));
        let norm2: f64 = z.iter().map(|x| x * x).sum();
        assert!(norm2 <= 1.0 + 1e-12);
    }
}

#[test]
fn centered_null_graph_is_origin() {
    let map = build_grnf(25, &DistributionConfig::default(), 6).unwrap();
    let c0 = map
        .embed_centered_tensor(&DenseTensor::null_graph(1))
        .unwrap();
    assert!(c0.iter().all(|&x| x == 0.0));
    let c = map.embed_centered(&path(3)).unwrap();
    assert!(c.iter().any(|&x| x != 0.0));
}

#[test]
fn proposal_equal_to_target_gives_plain_weights() {
    let cfg = DistributionConfig::default();
    let plain = build_grnf(64, &cfg, 21).unwrap();
    let weighted = build_weighted_grnf(64, &cfg, &cfg, 21).unwrap();
    assert_eq!(plain.params(), weighted.params());
    assert_eq!(plain.weights(), weighted.weights());
}

#[test]
fn incompatible_proposals_are_rejected() {
    let target = DistributionConfig::default();
    let narrow = DistributionConfig {
        k_max: 2,
        ..Default::default()
    };
    assert!(build_weighted_grnf(8, &target, &narrow, 0).is_err());
    let sum = DistributionConfig {
        normalization: Normalization::Sum,
        ..Default::default()
    };
    assert!(build_weighted_grnf(8, &target, &sum, 0).is_err());
}

#[test]
fn wide_proposal_log_weights_are_finite() {
    let target = DistributionConfig::default();
    let proposal = DistributionConfig {
        sigma: 2.0,
        lambda: 2.0,
        ..Default::default()
    };
    let map = build_weighted_grnf(1000, &target, &proposal, 77).unwrap();
    assert!(map.weights().iter().all(|w| w.is_finite() && *w > 0.0));
    assert!(map.is_weighted());
    let prefix = map.prefix(100).unwrap();
    assert_eq!(
        prefix,
        build_weighted_grnf(100, &target, &proposal, 77).unwrap()
    );
}

#[test]
fn json_round_trip_is_exact() {
    let target = DistributionConfig::default();
    let proposal = DistributionConfig {
        sigma: 1.5,
        ..Default::default()
    };
    for map in [
        build_grnf(30, &target, 123).unwrap(),
        build_weighted_grnf(30, &target, &proposal, 5).unwrap(),
    ] {
        let back = GrnfMap::from_json(&map.to_json().unwrap()).unwrap();
        assert_eq!(back, map);
        for (a, b) in back.params().iter().zip(map.params()) {
            assert!(a
                .coefficients()
                .zip(b.coefficients())
                .all(|(x, y)| x.to_bits() == y.to_bits()));
        }
    }
}

#[test]
fn json_rejects_bad_shapes() {
    let map = build_grnf(2, &DistributionConfig::default(), 1).unwrap();
    let json: serde_json::Value = serde_json::from_str(&map.to_json().unwrap()).unwrap();
    let mut bad = json.clone();
    bad["params"][0]["theta_F"].as_array_mut().unwrap().pop();
    assert!(GrnfMap::from_json(&bad.to_string()).is_err());
    let mut bad = json.clone();
    bad["M"] = 3.into();
    assert!(GrnfMap::from_json(&bad.to_string()).is_err());
    let mut bad = json;
    bad["version"] = 99.into();
    assert!(GrnfMap::from_json(&bad.to_string()).is_err());
}

#[test]
fn channel_mismatch_is_an_error() {
    let map = build_grnf(3, &DistributionConfig::default(), 1).unwrap();
    let g = Graph::new(
        2,
        vec![vec![1.0, 2.0], vec![0.0, 1.0]],
        vec![(0, 1)],
        vec![],
        false,
    )
    .unwrap();
    assert!(map.embed(&g).is_err());
    let wide = DistributionConfig {
        channels: 3,
        ..Default::default()
    };
    let map = build_grnf(3, &wide, 1).unwrap();
    assert_eq!(map.embed(&g).unwrap().len(), 3);
}

#[test]
fn fused_evaluation_matches_layer_composition() {
    use crate::maps::{affine_equivariant_apply, affine_invariant_apply};
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for (act, norm) in [
        (Activation::Sigmoid, Normalization::Mean),
        (Activation::Sigmoid, Normalization::Sum),
        (Activation::Tanh, Normalization::Mean),
    ] {
        let cfg = DistributionConfig {
            activation_e: act,
            normalization: norm,
            ..Default::default()
        };
        for n in [1, 2, 3, 5, 7] {
            let g = random_graph(&mut rng, n, 0.5);
            let a = feature_input(&g, &cfg).unwrap();
            for _ in 0..20 {
                let w = cfg.sample_parameter(&mut rng);
                let mut f = affine_equivariant_apply(&w.theta_f, &a, norm).unwrap();
                for x in f.data_mut() {
                    *x = act.apply(*x);
                }
                let h = affine_invariant_apply(&w.theta_h, &f, norm).unwrap();
                let expected = cfg.activation_i.apply(h);
                let got = psi(&g, &w, &cfg).unwrap();
                assert!(
                    (got - expected).abs() < 1e-12,
                    "{act:?} {norm:?} n={n} k={}: {got} vs {expected}",
                    w.k
                );
            }
        }
    }
}
