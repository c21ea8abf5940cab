//! Downstream classifiers on embeddings: k-nearest neighbours and a
//! closed-form ridge readout.

use nalgebra::{DMatrix, DVector};

use crate::error::{GrnfError, Result};

/// Scores closer than this are treated as tied in the ridge argmax.
const SCORE_TIE: f64 = 1e-12;

fn check_rows(rows: &[Vec<f64>], what: &str) -> Result<usize> {
    let dim = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != dim) {
        return Err(GrnfError::Shape(format!(
            "{what} rows have inconsistent lengths"
        )));
    }
    Ok(dim)
}

/// Fraction of matching entries; `NaN` for empty input.
pub fn accuracy(predicted: &[usize], truth: &[usize]) -> f64 {
    let hits = predicted.iter().zip(truth).filter(|(a, b)| a == b).count();
    hits as f64 / truth.len() as f64
}

/// Euclidean k-nearest-neighbour majority vote. Neighbours at equal distance
/// are taken in training order; a tied vote goes to the class with the
/// smallest summed distance, then to the lowest label.
pub fn knn_classify(
    train: &[Vec<f64>],
    labels: &[usize],
    test: &[Vec<f64>],
    k: usize,
) -> Result<Vec<usize>> {
    if train.is_empty() {
        return Err(GrnfError::InvalidArgument(
            "kNN needs a non-empty training set".into(),
        ));
    }
    if k == 0 {
        return Err(GrnfError::InvalidArgument("kNN needs k ≥ 1".into()));
    }
    if labels.len() != train.len() {
        return Err(GrnfError::Shape(format!(
            "{} labels for {} training rows",
            labels.len(),
            train.len()
        )));
    }
    let dim = check_rows(train, "training")?;
    if test.iter().any(|t| t.len() != dim) {
        return Err(GrnfError::Shape(
            "test rows differ in length from training rows".into(),
        ));
    }
    let classes = labels.iter().max().map_or(0, |m| m + 1);
    let k = k.min(train.len());
    Ok(test
        .iter()
        .map(|x| {
            let mut dist: Vec<(f64, usize)> = train
                .iter()
                .enumerate()
                .map(|(i, t)| {
                    (
                        t.iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum::<f64>(),
                        i,
                    )
                })
                .collect();
            dist.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            let mut votes = vec![0usize; classes];
            let mut summed = vec![0.0; classes];
            for &(d2, i) in &dist[..k] {
                votes[labels[i]] += 1;
                summed[labels[i]] += d2.sqrt();
            }
            (0..classes)
                .filter(|&c| votes[c] > 0)
                .min_by(|&a, &b| {
                    votes[b]
                        .cmp(&votes[a])
                        .then(summed[a].total_cmp(&summed[b]))
                        .then(a.cmp(&b))
                })
                .expect("k ≥ 1 neighbours vote")
        })
        .collect())
}

/// Linear readout `scores = x W` fitted by ridge regression on one-hot
/// targets, without intercept.
#[derive(Debug, Clone)]
pub struct RidgeModel {
    weights: DMatrix<f64>,
}

fn design(rows: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    let dim = check_rows(rows, "design")?;
    Ok(DMatrix::from_fn(rows.len(), dim, |i, j| rows[i][j]))
}

fn solve_spd(a: DMatrix<f64>, b: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let chol = a.cholesky().ok_or_else(|| {
        GrnfError::InvalidArgument("ridge system is not positive definite".into())
    })?;
    Ok(chol.solve(b))
}

impl RidgeModel {
    /// Solves `(XᵀX + λI) W = XᵀY`, through the equivalent dual system
    /// `W = Xᵀ (XXᵀ + λI)⁻¹ Y` when there are more features than samples.
    pub fn fit(rows: &[Vec<f64>], labels: &[usize], classes: usize, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(GrnfError::InvalidArgument(format!(
                "ridge lambda must be > 0, got {lambda}"
            )));
        }
        if rows.is_empty() || rows.len() != labels.len() {
            return Err(GrnfError::Shape(format!(
                "{} labels for {} rows",
                labels.len(),
                rows.len()
            )));
        }
        if labels.iter().any(|&l| l >= classes) {
            return Err(GrnfError::InvalidArgument(
                "label outside the class range".into(),
            ));
        }
        let x = design(rows)?;
        let y = DMatrix::from_fn(
            rows.len(),
            classes,
            |i, c| if labels[i] == c { 1.0 } else { 0.0 },
        );
        let (n, p) = x.shape();
        let weights = if p <= n {
            let a = x.transpose() * &x + DMatrix::identity(p, p) * lambda;
            solve_spd(a, &(x.transpose() * &y))?
        } else {
            let a = &x * x.transpose() + DMatrix::identity(n, n) * lambda;
            x.transpose() * solve_spd(a, &y)?
        };
        Ok(Self { weights })
    }

    /// `features × classes` coefficient matrix.
    pub fn weights(&self) -> &DMatrix<f64> {
        &self.weights
    }

    pub fn scores(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.weights.nrows() {
            return Err(GrnfError::Shape(format!(
                "model expects {} features, got {}",
                self.weights.nrows(),
                x.len()
            )));
        }
        let v = DVector::from_column_slice(x);
        Ok((self.weights.transpose() * v).iter().copied().collect())
    }

    /// Highest-scoring class; near-ties go to the lowest label.
    pub fn predict(&self, rows: &[Vec<f64>]) -> Result<Vec<usize>> {
        rows.iter()
            .map(|x| {
                let s = self.scores(x)?;
                let best = s.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                Ok(s.iter().position(|&v| v >= best - SCORE_TIE).unwrap_or(0))
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_nearest_neighbour_recovers_training_labels() {
        let train = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 5.0]];
        let labels = vec![2, 0, 1];
        assert_eq!(knn_classify(&train, &labels, &train, 1).unwrap(), labels);
    }

    #[test]
    fn knn_tie_breaks() {
        // k = 2 with one vote each: the closer class wins.
        let train = vec![vec![0.0], vec![3.0]];
        assert_eq!(
            knn_classify(&train, &[1, 0], &[vec![1.0]], 2).unwrap(),
            vec![1]
        );
        // Equal votes and equal summed distance: the lowest label wins.
        assert_eq!(
            knn_classify(&train, &[1, 0], &[vec![1.5]], 2).unwrap(),
            vec![0]
        );
        assert!(knn_classify(&[], &[], &[vec![1.0]], 1).is_err());
        assert!(knn_classify(&train, &[0, 1], &[vec![1.0]], 0).is_err());
    }

    #[test]
    fn ridge_fits_separable_data() {
        let rows = vec![
            vec![1.0, 0.0],
            vec![0.9, 0.1],
            vec![0.0, 1.0],
            vec![0.2, 0.8],
        ];
        let labels = vec![0, 0, 1, 1];
        let model = RidgeModel::fit(&rows, &labels, 2, 1e-6).unwrap();
        assert_eq!(model.predict(&rows).unwrap(), labels);
        let flat = RidgeModel::fit(&rows, &labels, 2, 1e300).unwrap();
        assert_eq!(flat.predict(&rows).unwrap(), vec![0; 4]);
        assert!(flat.weights().iter().all(|w| w.abs() < 1e-290));
        assert!(RidgeModel::fit(&rows, &labels, 2, 0.0).is_err());
    }

    #[test]
    fn primal_and_dual_agree() {
        let rows: Vec<Vec<f64>> = (0..4)
            .map(|i| (0..6).map(|j| ((i * 7 + j * 3) % 5) as f64 - 2.0).collect())
            .collect();
        let labels = vec![0, 1, 2, 1];
        let dual = RidgeModel::fit(&rows, &labels, 3, 0.5).unwrap();
        // Same problem through the primal system.
        let x = design(&rows).unwrap();
        let y = DMatrix::from_fn(4, 3, |i, c| if labels[i] == c { 1.0 } else { 0.0 });
        let primal = solve_spd(
            x.transpose() * &x + DMatrix::identity(6, 6) * 0.5,
            &(x.transpose() * y),
        )
        .unwrap();
        assert!((dual.weights() - primal).amax() < 1e-10);
    }
}
