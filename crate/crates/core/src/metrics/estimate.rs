use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{GrnfError, Result};
use crate::features::GrnfMap;
use crate::graph::Graph;

/// `‖z₁ − z₂‖` together with its square, which is the unbiased quantity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistanceEstimate {
    pub value: f64,
    pub squared: f64,
    pub m: usize,
}

fn check_lengths(a: &[f64], b: &[f64]) -> Result<()> {
    if a.len() != b.len() {
        return Err(GrnfError::Shape(format!(
            "embedding lengths differ: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    Ok(())
}

pub fn distance_estimate(z1: &[f64], z2: &[f64]) -> Result<DistanceEstimate> {
    check_lengths(z1, z2)?;
    let squared: f64 = z1.iter().zip(z2).map(|(a, b)| (a - b) * (a - b)).sum();
    Ok(DistanceEstimate {
        value: squared.sqrt(),
        squared,
        m: z1.len(),
    })
}

/// Inner product of two centred embeddings.
pub fn kernel_estimate(zc1: &[f64], zc2: &[f64]) -> Result<f64> {
    check_lengths(zc1, zc2)?;
    Ok(zc1.iter().zip(zc2).map(|(a, b)| a * b).sum())
}

/// Symmetric matrix of kernel estimates between graphs.
#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix {
    size: usize,
    /// Row-major entries.
    entries: Vec<f64>,
    ids: Vec<String>,
}

impl GramMatrix {
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.size + j]
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn with_ids(mut self, ids: Vec<String>) -> Result<Self> {
        if ids.len() != self.size {
            return Err(GrnfError::Shape(format!(
                "{} identifiers for a {}x{} Gram matrix",
                ids.len(),
                self.size,
                self.size
            )));
        }
        self.ids = ids;
        Ok(self)
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.entries.chunks(self.size)
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.size).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    /// Smallest eigenvalue of the symmetrised matrix.
    pub fn min_eigenvalue(&self) -> f64 {
        let m = DMatrix::from_fn(self.size, self.size, |i, j| {
            0.5 * (self.get(i, j) + self.get(j, i))
        });
        SymmetricEigen::new(m)
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }
}

/// Gram matrix of already-centred embeddings.
pub fn gram_from_centered(centered: &[Vec<f64>]) -> Result<GramMatrix> {
    if centered.is_empty() {
        return Err(GrnfError::InvalidArgument(
            "Gram matrix of an empty list".into(),
        ));
    }
    let s = centered.len();
    let mut entries = vec![0.0; s * s];
    for i in 0..s {
        for j in 0..=i {
            let v = kernel_estimate(&centered[i], &centered[j])?;
            entries[i * s + j] = v;
            entries[j * s + i] = v;
        }
    }
    Ok(GramMatrix {
        size: s,
        entries,
        ids: (0..s).map(|i| i.to_string()).collect(),
    })
}

/// Kernel estimates of `map` between every pair of `graphs`.
pub fn gram_matrix(map: &GrnfMap, graphs: &[Graph]) -> Result<GramMatrix> {
    if graphs.is_empty() {
        return Err(GrnfError::InvalidArgument(
            "Gram matrix of an empty list".into(),
        ));
    }
    let z = map.embed_many(graphs)?;
    let z0 = map.embed_tensor(&crate::tensor::DenseTensor::null_graph(
        map.config().channels,
    ))?;
    let centered: Vec<Vec<f64>> = z
        .into_iter()
        .map(|zi| zi.iter().zip(&z0).map(|(a, b)| a - b).collect())
        .collect();
    gram_from_centered(&centered)
}
