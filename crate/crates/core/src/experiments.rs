//! Classification accuracy as a function of the embedding dimension.
//!
//! A single train/test split is drawn once; every repetition draws a fresh
//! map. Within a repetition the features are computed once for the largest
//! dimension, and smaller maps are prefixes of it (identical to building them
//! with the same seed).

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::classify::{accuracy, knn_classify, RidgeModel};
use crate::error::{GrnfError, Result};
use crate::features::{build_grnf, feature_input, DistributionConfig};
use crate::graph::Graph;
use crate::seeds::derive_seed;
use crate::tensor::DenseTensor;

pub const ACCURACY_CSV_HEADER: &str =
    "M,mean_accuracy,std_accuracy,ref_mean_accuracy,ref_std_accuracy";

const SPLIT_TAG: u64 = 0x5b11;
const REP_TAG: u64 = 0x4e9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Classifier {
    Knn { k: usize },
    Ridge { lambda: f64 },
}

impl Classifier {
    fn validate(&self) -> Result<()> {
        match *self {
            Classifier::Knn { k } if k == 0 => {
                Err(GrnfError::InvalidArgument("kNN needs k ≥ 1".into()))
            }
            Classifier::Ridge { lambda } if !(lambda > 0.0 && lambda.is_finite()) => Err(
                GrnfError::InvalidArgument(format!("ridge lambda must be > 0, got {lambda}")),
            ),
            _ => Ok(()),
        }
    }

    fn run(
        &self,
        train: &[Vec<f64>],
        train_y: &[usize],
        test: &[Vec<f64>],
        classes: usize,
    ) -> Result<Vec<usize>> {
        match *self {
            Classifier::Knn { k } => knn_classify(train, train_y, test, k),
            Classifier::Ridge { lambda } => {
                RidgeModel::fit(train, train_y, classes, lambda)?.predict(test)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AccuracySettings {
    pub m_grid: Vec<usize>,
    /// Dimension of the reference column; `None` skips it.
    pub reference_m: Option<usize>,
    pub reps: usize,
    pub seed: u64,
    /// Fraction of graphs used for training.
    pub split: f64,
    pub classifier: Classifier,
    pub config: DistributionConfig,
}

impl Default for AccuracySettings {
    fn default() -> Self {
        Self {
            m_grid: vec![8, 16, 32, 64, 128, 256, 512, 1024, 2048, 4096],
            reference_m: Some(10_000),
            reps: 10,
            seed: 0,
            split: 0.8,
            classifier: Classifier::Knn { k: 5 },
            config: DistributionConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AccuracyRow {
    pub m: usize,
    pub mean: f64,
    pub std: f64,
    pub ref_mean: f64,
    pub ref_std: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AccuracyTable {
    pub rows: Vec<AccuracyRow>,
    /// Accuracy per repetition, per grid dimension.
    pub per_rep: Vec<Vec<f64>>,
    /// Accuracy per repetition at the reference dimension (empty without it).
    pub reference: Vec<f64>,
    pub train_size: usize,
    pub test_size: usize,
}

impl AccuracyTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(ACCURACY_CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                r.m, r.mean, r.std, r.ref_mean, r.ref_std
            ));
        }
        out
    }
}

/// Mean and sample standard deviation (0 for a single value).
fn mean_std(v: &[f64]) -> (f64, f64) {
    if v.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    if v.len() < 2 {
        return (mean, 0.0);
    }
    let var = v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (v.len() - 1) as f64;
    (mean, var.sqrt())
}

/// Maps arbitrary labels to `0..classes` in increasing label order.
pub fn class_ids(labels: &[i64]) -> (Vec<usize>, Vec<i64>) {
    let values: Vec<i64> = labels
        .iter()
        .copied()
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .collect();
    let index: BTreeMap<i64, usize> = values.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    (labels.iter().map(|l| index[l]).collect(), values)
}

/// Indices of the training and test graphs.
pub fn train_test_split(count: usize, split: f64, seed: u64) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(split > 0.0 && split < 1.0) {
        return Err(GrnfError::InvalidArgument(format!(
            "split must be in (0, 1), got {split}"
        )));
    }
    let train_size = ((count as f64) * split).round() as usize;
    if train_size == 0 || train_size == count {
        return Err(GrnfError::InvalidArgument(format!(
            "a split of {split} leaves an empty train or test set for {count} graphs"
        )));
    }
    let mut order: Vec<usize> = (0..count).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let test = order.split_off(train_size);
    Ok((order, test))
}

pub fn run_accuracy_vs_m(
    graphs: &[Graph],
    labels: &[i64],
    settings: &AccuracySettings,
) -> Result<AccuracyTable> {
    if graphs.len() != labels.len() {
        return Err(GrnfError::Shape(format!(
            "{} labels for {} graphs",
            labels.len(),
            graphs.len()
        )));
    }
    settings.config.validate()?;
    settings.classifier.validate()?;
    if settings.m_grid.is_empty() || settings.m_grid.contains(&0) || settings.reference_m == Some(0)
    {
        return Err(GrnfError::InvalidArgument(
            "embedding dimensions must be positive".into(),
        ));
    }
    if settings.reps == 0 {
        return Err(GrnfError::InvalidArgument(
            "at least one repetition is needed".into(),
        ));
    }
    let (y, values) = class_ids(labels);
    let classes = values.len();
    let (train_idx, test_idx) = train_test_split(
        graphs.len(),
        settings.split,
        derive_seed(settings.seed, &[SPLIT_TAG]),
    )?;
    let tensors: Vec<DenseTensor> = graphs
        .iter()
        .map(|g| feature_input(g, &settings.config))
        .collect::<Result<_>>()?;
    let train_y: Vec<usize> = train_idx.iter().map(|&i| y[i]).collect();
    let test_y: Vec<usize> = test_idx.iter().map(|&i| y[i]).collect();

    let max_m = settings
        .m_grid
        .iter()
        .copied()
        .chain(settings.reference_m)
        .max()
        .expect("non-empty grid");
    let mut per_rep = vec![Vec::with_capacity(settings.reps); settings.m_grid.len()];
    let mut reference = Vec::new();
    for rep in 0..settings.reps {
        let map = build_grnf(
            max_m,
            &settings.config,
            derive_seed(settings.seed, &[REP_TAG, rep as u64]),
        )?;
        let psi = map.psi_matrix(&tensors)?;
        let score = |m: usize| -> Result<f64> {
            let w = (1.0 / m as f64).sqrt();
            let embed = |idx: &[usize]| -> Vec<Vec<f64>> {
                idx.iter()
                    .map(|&i| psi[i][..m].iter().map(|x| x * w).collect())
                    .collect()
            };
            let pred = settings.classifier.run(
                &embed(&train_idx),
                &train_y,
                &embed(&test_idx),
                classes,
            )?;
            Ok(accuracy(&pred, &test_y))
        };
        for (gi, &m) in settings.m_grid.iter().enumerate() {
            per_rep[gi].push(score(m)?);
        }
        if let Some(m) = settings.reference_m {
            reference.push(score(m)?);
        }
        log::info!(
            "accuracy experiment: repetition {} of {} done",
            rep + 1,
            settings.reps
        );
    }

    let (ref_mean, ref_std) = mean_std(&reference);
    let rows = settings
        .m_grid
        .iter()
        .zip(&per_rep)
        .map(|(&m, acc)| {
            let (mean, std) = mean_std(acc);
            AccuracyRow {
                m,
                mean,
                std,
                ref_mean,
                ref_std,
            }
        })
        .collect();
    Ok(AccuracyTable {
        rows,
        per_rep,
        reference,
        train_size: train_idx.len(),
        test_size: test_idx.len(),
    })
}
