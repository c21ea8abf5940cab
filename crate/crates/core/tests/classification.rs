//! Downstream classifiers and the accuracy-versus-dimension experiment.

use grnf::classify::{accuracy, knn_classify, RidgeModel};
use grnf::experiments::{run_accuracy_vs_m, AccuracySettings, Classifier};
use grnf::generators::{sbm_generate, SbmParams};
use grnf::{build_grnf, DistributionConfig, Graph};
use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn sbm_corpus(per_class: usize, seed: u64, p: f64) -> (Vec<Graph>, Vec<i64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dense = SbmParams::single(10, p);
    let split = SbmParams {
        n: 10,
        blocks: vec![5, 5],
        p_in: 0.8,
        p_out: 0.1,
    };
    let mut graphs = sbm_generate(&dense, per_class, &mut rng).unwrap();
    graphs.extend(sbm_generate(&split, per_class, &mut rng).unwrap());
    let labels = (0..2 * per_class).map(|i| (i / per_class) as i64).collect();
    (graphs, labels)
}

fn gaussian_rows(rng: &mut ChaCha8Rng, n: usize, p: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|_| (0..p).map(|_| rng.random_range(-1.0..1.0)).collect())
        .collect()
}

#[test]
fn shuffled_labels_give_chance_accuracy() {
    let (graphs, labels) = sbm_corpus(100, 1, 0.15);
    let map = build_grnf(64, &DistributionConfig::default(), 2).unwrap();
    let z = map.embed_many(&graphs).unwrap();
    let truth: Vec<usize> = labels.iter().map(|&l| l as usize).collect();
    let (train, test) = (0..z.len()).partition::<Vec<usize>, _>(|i| i % 5 != 0);
    let rows = |idx: &[usize]| idx.iter().map(|&i| z[i].clone()).collect::<Vec<_>>();

    let real = knn_classify(
        &rows(&train),
        &train.iter().map(|&i| truth[i]).collect::<Vec<_>>(),
        &rows(&test),
        5,
    )
    .unwrap();
    let test_y: Vec<usize> = test.iter().map(|&i| truth[i]).collect();
    let real_acc = accuracy(&real, &test_y);
    assert!(real_acc > 0.9, "true-label accuracy {real_acc}");

    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut total = 0.0;
    for _ in 0..20 {
        let mut shuffled = truth.clone();
        shuffled.shuffle(&mut rng);
        let pred = knn_classify(
            &rows(&train),
            &train.iter().map(|&i| shuffled[i]).collect::<Vec<_>>(),
            &rows(&test),
            5,
        )
        .unwrap();
        total += accuracy(
            &pred,
            &test.iter().map(|&i| shuffled[i]).collect::<Vec<_>>(),
        );
    }
    let mean = total / 20.0;
    assert!((mean - 0.5).abs() <= 0.1, "shuffled accuracy {mean}");
}

fn normal_equation_residual(x: &[Vec<f64>], labels: &[usize], classes: usize, lambda: f64) -> f64 {
    let model = RidgeModel::fit(x, labels, classes, lambda).unwrap();
    let (n, p) = (x.len(), x[0].len());
    let xm = DMatrix::from_fn(n, p, |i, j| x[i][j]);
    let y = DMatrix::from_fn(n, classes, |i, c| f64::from(labels[i] == c));
    let lhs = (xm.transpose() * &xm + DMatrix::identity(p, p) * lambda) * model.weights();
    let rhs = xm.transpose() * y;
    (lhs - &rhs).norm() / (1.0 + rhs.norm())
}

#[test]
fn ridge_satisfies_normal_equations() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for (n, p) in [(50, 32), (20, 40)] {
        for _ in 0..10 {
            let x = gaussian_rows(&mut rng, n, p);
            let labels: Vec<usize> = (0..n).map(|_| rng.random_range(0..3)).collect();
            let lambda = 10f64.powf(rng.random_range(-3.0..1.0));
            let r = normal_equation_residual(&x, &labels, 3, lambda);
            assert!(r <= 1e-8, "{n}x{p}, λ = {lambda}: residual {r}");
        }
    }
}

#[test]
fn huge_ridge_penalty_predicts_lowest_label() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let x = gaussian_rows(&mut rng, 30, 8);
    let labels: Vec<usize> = (0..30).map(|i| 1 + i % 2).collect();
    let model = RidgeModel::fit(&x, &labels, 3, 1e300).unwrap();
    assert_eq!(model.predict(&x).unwrap(), vec![0; 30]);
}

#[test]
fn separated_clusters_are_classified_exactly() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let centres = [[0.0, 0.0, 0.0], [10.0, 0.0, 0.0], [0.0, 10.0, 0.0]];
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for _ in 0..40 {
        let c = rng.random_range(0..3);
        rows.push(
            centres[c]
                .iter()
                .map(|v| v + rng.random_range(-1.0..1.0))
                .chain([1.0])
                .collect::<Vec<f64>>(),
        );
        labels.push(c);
    }
    let (train, test) = rows.split_at(30);
    let (ytr, yte) = labels.split_at(30);
    let knn = knn_classify(train, ytr, test, 3).unwrap();
    assert_eq!(accuracy(&knn, yte), 1.0);
    let ridge = RidgeModel::fit(train, ytr, 3, 1e-3)
        .unwrap()
        .predict(test)
        .unwrap();
    assert_eq!(accuracy(&ridge, yte), 1.0);
}

#[test]
fn accuracy_experiment_is_deterministic_and_reuses_prefixes() {
    let (graphs, labels) = sbm_corpus(20, 7, 0.4);
    for classifier in [Classifier::Knn { k: 3 }, Classifier::Ridge { lambda: 1e-2 }] {
        let settings = AccuracySettings {
            m_grid: vec![4, 16, 32],
            reference_m: Some(16),
            reps: 3,
            seed: 11,
            classifier,
            ..Default::default()
        };
        let a = run_accuracy_vs_m(&graphs, &labels, &settings).unwrap();
        let b = run_accuracy_vs_m(&graphs, &labels, &settings).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_csv(), b.to_csv());
        assert_eq!((a.train_size, a.test_size), (32, 8));
        // The reference column is the 16-feature prefix of the same maps.
        assert_eq!(a.per_rep[1], a.reference);
        assert!(a.per_rep.iter().flatten().all(|v| (0.0..=1.0).contains(v)));
    }
}

#[test]
fn accuracy_experiment_rejects_bad_settings() {
    let (graphs, labels) = sbm_corpus(5, 8, 0.4);
    let bad = [
        AccuracySettings {
            m_grid: vec![],
            ..Default::default()
        },
        AccuracySettings {
            m_grid: vec![0],
            ..Default::default()
        },
        AccuracySettings {
            reps: 0,
            ..Default::default()
        },
        AccuracySettings {
            split: 1.0,
            ..Default::default()
        },
        AccuracySettings {
            classifier: Classifier::Knn { k: 0 },
            ..Default::default()
        },
        AccuracySettings {
            classifier: Classifier::Ridge { lambda: -1.0 },
            ..Default::default()
        },
    ];
    for s in bad {
        assert!(run_accuracy_vs_m(&graphs, &labels, &s).is_err(), "{s:?}");
    }
    assert!(run_accuracy_vs_m(&graphs, &labels[1..], &AccuracySettings::default()).is_err());
}
