//! Finite-dimensional GRNF maps `z(g) = (w_m ψ(g; w_m))_m`.

use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{GrnfError, Result};
use crate::graph::Graph;
use crate::maps::{EquivariantLayerParams, InvariantLayerParams};
use crate::partition::bell_usize;
use crate::tensor::DenseTensor;

use super::distribution::{DistributionConfig, FeatureParams};
use super::psi::{feature_input, input_sums, prepare, psi_column};

pub const MAP_FORMAT_VERSION: u32 = 1;

/// A sampled feature map: `M` parameter vectors and their weights.
#[derive(Debug, Clone, PartialEq)]
pub struct GrnfMap {
    seed: u64,
    config: DistributionConfig,
    proposal: Option<DistributionConfig>,
    params: Vec<FeatureParams>,
    weights: Vec<f64>,
}

/// Samples `m` features i.i.d. from `config`. The draws are sequential from
/// one stream, so the map for `m` is a prefix of the map for any larger `m`
/// with the same seed.
pub fn build_grnf(m: usize, config: &DistributionConfig, seed: u64) -> Result<GrnfMap> {
    config.validate()?;
    check_m(m)?;
    let params = draw(m, config, seed);
    let weights = vec![plain_weight(m); m];
    Ok(GrnfMap {
        seed,
        config: config.clone(),
        proposal: None,
        params,
        weights,
    })
}

/// Samples `m` features from `proposal` and weights them by
/// `sqrt(p(w) / p̄(w) / m)` so that inner products estimate the kernel of
/// `target`.
///
/// The two distributions must agree on everything but `lambda` and `sigma`;
/// in particular `proposal` must cover every order `target` can produce.
pub fn build_weighted_grnf(
    m: usize,
    target: &DistributionConfig,
    proposal: &DistributionConfig,
    seed: u64,
) -> Result<GrnfMap> {
    target.validate()?;
    proposal.validate()?;
    check_m(m)?;
    check_compatible(target, proposal)?;
    let params = draw(m, proposal, seed);
    let weights = importance_weights(target, proposal, &params, m)?;
    Ok(GrnfMap {
        seed,
        config: target.clone(),
        proposal: Some(proposal.clone()),
        params,
        weights,
    })
}

fn check_m(m: usize) -> Result<()> {
    if m == 0 {
        return Err(GrnfError::InvalidArgument("M must be positive".into()));
    }
    Ok(())
}

fn check_compatible(target: &DistributionConfig, proposal: &DistributionConfig) -> Result<()> {
    if target.activation_e != proposal.activation_e
        || target.activation_i != proposal.activation_i
        || target.normalization != proposal.normalization
        || target.channels != proposal.channels
    {
        return Err(GrnfError::InvalidArgument(
            "target and proposal must share activations, normalization and channels".into(),
        ));
    }
    if target.k_max != proposal.k_max {
        return Err(GrnfError::InvalidArgument(format!(
            "target (k_max = {}) and proposal (k_max = {}) must have the same support",
            target.k_max, proposal.k_max
        )));
    }
    Ok(())
}

fn draw(m: usize, config: &DistributionConfig, seed: u64) -> Vec<FeatureParams> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..m).map(|_| config.sample_parameter(&mut rng)).collect()
}

fn plain_weight(m: usize) -> f64 {
    (1.0 / m as f64).sqrt()
}

fn importance_weights(
    target: &DistributionConfig,
    proposal: &DistributionConfig,
    params: &[FeatureParams],
    m: usize,
) -> Result<Vec<f64>> {
    params
        .iter()
        .map(|w| {
            let log_p = target.log_density(w);
            let log_q = proposal.log_density(w);
            if !log_q.is_finite() || !log_p.is_finite() {
                return Err(GrnfError::ImportanceWeight(format!(
                    "density ratio undefined at an order-{} sample (log p = {log_p}, log p̄ = {log_q})",
                    w.k
                )));
            }
            let weight = ((log_p - log_q).exp() / m as f64).sqrt();
            if !(weight.is_finite() && weight > 0.0) {
                return Err(GrnfError::ImportanceWeight(format!(
                    "importance weight {weight} at an order-{} sample is not a positive finite number",
                    w.k
                )));
            }
            Ok(weight)
        })
        .collect()
}

impl GrnfMap {
    /// Map from explicit parameters and weights.
    pub fn from_parts(
        config: DistributionConfig,
        params: Vec<FeatureParams>,
        weights: Vec<f64>,
    ) -> Result<Self> {
        config.validate()?;
        check_m(params.len())?;
        if weights.len() != params.len() {
            return Err(GrnfError::Shape(format!(
                "{} features but {} weights",
                params.len(),
                weights.len()
            )));
        }
        for w in &params {
            w.validate(config.channels)?;
        }
        if weights.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(GrnfError::InvalidArgument(
                "weights must be positive and finite".into(),
            ));
        }
        Ok(Self {
            seed: 0,
            config,
            proposal: None,
            params,
            weights,
        })
    }

    /// Embedding dimension `M`.
    pub fn m(&self) -> usize {
        self.params.len()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Target distribution; also fixes activations and normalization.
    pub fn config(&self) -> &DistributionConfig {
        &self.config
    }

    /// Sampling distribution of an importance-weighted map.
    pub fn proposal(&self) -> Option<&DistributionConfig> {
        self.proposal.as_ref()
    }

    pub fn is_weighted(&self) -> bool {
        self.proposal.is_some()
    }

    pub fn params(&self) -> &[FeatureParams] {
        &self.params
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// The first `m` features, reweighted as if built with dimension `m`.
    /// Identical to building with the same seed and dimension `m`.
    pub fn prefix(&self, m: usize) -> Result<GrnfMap> {
        check_m(m)?;
        if m > self.m() {
            return Err(GrnfError::InvalidArgument(format!(
                "prefix of {m} features from a map with {}",
                self.m()
            )));
        }
        let params = self.params[..m].to_vec();
        let weights = match &self.proposal {
            None => vec![plain_weight(m); m],
            Some(q) => importance_weights(&self.config, q, &params, m)?,
        };
        Ok(GrnfMap {
            seed: self.seed,
            config: self.config.clone(),
            proposal: self.proposal.clone(),
            params,
            weights,
        })
    }

    /// Unweighted feature values `ψ(g; w_m)`.
    pub fn psi_values(&self, g: &Graph) -> Result<Vec<f64>> {
        self.psi_values_tensor(&feature_input(g, &self.config)?)
    }

    pub fn psi_values_tensor(&self, a: &DenseTensor) -> Result<Vec<f64>> {
        let rows = self.psi_matrix(std::slice::from_ref(a))?;
        Ok(rows.into_iter().next().expect("one row per tensor"))
    }

    /// `ψ(g_i; w_m)` for every tensor (rows) and feature (columns).
    pub fn psi_matrix(&self, tensors: &[DenseTensor]) -> Result<Vec<Vec<f64>>> {
        let tensors: Vec<DenseTensor> = tensors
            .iter()
            .map(|a| prepare(a.clone(), &self.config))
            .collect::<Result<_>>()?;
        let sums = input_sums(&tensors);
        let columns: Vec<Vec<f64>> = self
            .params
            .par_iter()
            .map(|w| psi_column(&tensors, &sums, w, &self.config))
            .collect::<Result<_>>()?;
        Ok((0..tensors.len())
            .map(|i| columns.iter().map(|col| col[i]).collect())
            .collect())
    }

    /// `z(g)`.
    pub fn embed(&self, g: &Graph) -> Result<Vec<f64>> {
        self.embed_tensor(&feature_input(g, &self.config)?)
    }

    pub fn embed_tensor(&self, a: &DenseTensor) -> Result<Vec<f64>> {
        Ok(self.apply_weights(self.psi_values_tensor(a)?))
    }

    /// `z(g)` for every graph, in input order.
    pub fn embed_many(&self, graphs: &[Graph]) -> Result<Vec<Vec<f64>>> {
        let tensors: Vec<DenseTensor> = graphs
            .iter()
            .map(|g| feature_input(g, &self.config))
            .collect::<Result<_>>()?;
        self.embed_many_tensors(&tensors)
    }

    pub fn embed_many_tensors(&self, tensors: &[DenseTensor]) -> Result<Vec<Vec<f64>>> {
        Ok(self
            .psi_matrix(tensors)?
            .into_iter()
            .map(|row| self.apply_weights(row))
            .collect())
    }

    /// `z(g) - z(g_0)` with `g_0` the one-node graph with a zero tensor, so
    /// that the null graph maps to the origin.
    pub fn embed_centered(&self, g: &Graph) -> Result<Vec<f64>> {
        self.embed_centered_tensor(&feature_input(g, &self.config)?)
    }

    pub fn embed_centered_tensor(&self, a: &DenseTensor) -> Result<Vec<f64>> {
        let z = self.embed_tensor(a)?;
        let z0 = self.embed_tensor(&DenseTensor::null_graph(self.config.channels))?;
        Ok(z.iter().zip(&z0).map(|(a, b)| a - b).collect())
    }

    /// Multiplies feature values by the map's weights.
    pub fn apply_weights(&self, mut psi: Vec<f64>) -> Vec<f64> {
        for (x, w) in psi.iter_mut().zip(&self.weights) {
            *x *= w;
        }
        psi
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&MapFile::from(self))?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let file: MapFile = serde_json::from_str(s).map_err(|e| GrnfError::Parse(e.to_string()))?;
        file.into_map()
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let s = std::fs::read_to_string(path)
            .map_err(|e| GrnfError::MissingFile(format!("{}: {e}", path.display())))?;
        Self::from_json(&s)
    }
}

#[derive(Serialize, Deserialize)]
struct MapFile {
    version: u32,
    #[serde(rename = "M")]
    m: usize,
    seed: u64,
    config: DistributionConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    proposal: Option<DistributionConfig>,
    params: Vec<ParamFile>,
    weights: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct ParamFile {
    k: usize,
    /// Linear coefficients followed by the bias coefficients.
    #[serde(rename = "theta_F")]
    theta_f: Vec<f64>,
    /// Linear coefficients followed by the bias.
    #[serde(rename = "theta_H")]
    theta_h: Vec<f64>,
}

impl From<&GrnfMap> for MapFile {
    fn from(map: &GrnfMap) -> Self {
        let params = map
            .params
            .iter()
            .map(|w| ParamFile {
                k: w.k,
                theta_f: w
                    .theta_f
                    .theta_lin
                    .iter()
                    .chain(&w.theta_f.theta_bias)
                    .copied()
                    .collect(),
                theta_h: w
                    .theta_h
                    .theta
                    .iter()
                    .copied()
                    .chain(std::iter::once(w.theta_h.bias))
                    .collect(),
            })
            .collect();
        MapFile {
            version: MAP_FORMAT_VERSION,
            m: map.m(),
            seed: map.seed,
            config: map.config.clone(),
            proposal: map.proposal.clone(),
            params,
            weights: map.weights.clone(),
        }
    }
}

impl MapFile {
    fn into_map(self) -> Result<GrnfMap> {
        if self.version != MAP_FORMAT_VERSION {
            return Err(GrnfError::Parse(format!(
                "unsupported map format version {} (expected {MAP_FORMAT_VERSION})",
                self.version
            )));
        }
        if self.params.len() != self.m {
            return Err(GrnfError::Parse(format!(
                "map declares M = {} but lists {} features",
                self.m,
                self.params.len()
            )));
        }
        let d = self.config.channels;
        let params = self
            .params
            .into_iter()
            .map(|p| {
                if p.k == 0 || p.k > crate::maps::K_MAX {
                    return Err(GrnfError::Parse(format!(
                        "feature order {} out of range",
                        p.k
                    )));
                }
                let lin = bell_usize(p.k + 2) * d;
                let bk = bell_usize(p.k);
                if p.theta_f.len() != lin + bk || p.theta_h.len() != bk + 1 {
                    return Err(GrnfError::Parse(format!(
                        "order-{} feature needs {} + {} coefficients, found {} + {}",
                        p.k,
                        lin + bk,
                        bk + 1,
                        p.theta_f.len(),
                        p.theta_h.len()
                    )));
                }
                let mut theta_lin = p.theta_f;
                let theta_bias = theta_lin.split_off(lin);
                let mut theta = p.theta_h;
                let bias = theta.pop().expect("non-empty");
                Ok(FeatureParams {
                    k: p.k,
                    theta_f: EquivariantLayerParams {
                        k: p.k,
                        theta_lin,
                        theta_bias,
                    },
                    theta_h: InvariantLayerParams {
                        k: p.k,
                        theta,
                        bias,
                    },
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let mut map = GrnfMap::from_parts(self.config, params, self.weights)?;
        map.seed = self.seed;
        if let Some(q) = self.proposal {
            q.validate()?;
            check_compatible(&map.config, &q)?;
            map.proposal = Some(q);
        }
        Ok(map)
    }
}
