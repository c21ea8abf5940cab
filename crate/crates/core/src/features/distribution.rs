//! The sampling distribution over feature parameters `w = (k, θ_F, θ_H)`.
//!
//! The tensor order is `1 + Poisson(λ)`, truncated to `1..=k_max` and
//! renormalised; every coefficient is an independent centred Gaussian.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{GrnfError, Result};
use crate::maps::{EquivariantLayerParams, InvariantLayerParams, Normalization, K_MAX};
use crate::partition::bell_usize;

/// Component-wise activation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    #[default]
    Sigmoid,
    Tanh,
    Relu,
}

impl Activation {
    #[inline]
    pub fn apply(self, x: f64) -> f64 {
        match self {
            Activation::Sigmoid => crate::fastexp::sigmoid(x),
            Activation::Tanh => x.tanh(),
            Activation::Relu => x.max(0.0),
        }
    }

    /// Bounded, monotone, with finite limits at ±∞.
    pub fn is_squashing(self) -> bool {
        matches!(self, Activation::Sigmoid | Activation::Tanh)
    }
}

impl std::str::FromStr for Activation {
    type Err = GrnfError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sigmoid" => Ok(Self::Sigmoid),
            "tanh" => Ok(Self::Tanh),
            "relu" => Ok(Self::Relu),
            other => Err(GrnfError::InvalidArgument(format!(
                "unknown activation '{other}' (expected sigmoid|tanh|relu)"
            ))),
        }
    }
}

/// Parameters of one graph neural feature.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureParams {
    pub k: usize,
    pub theta_f: EquivariantLayerParams,
    pub theta_h: InvariantLayerParams,
}

impl FeatureParams {
    /// All coefficients in draw order: `θ_F` linear, `θ_F` bias, `θ_H` linear,
    /// `θ_H` bias.
    pub fn coefficients(&self) -> impl Iterator<Item = f64> + '_ {
        self.theta_f
            .theta_lin
            .iter()
            .chain(&self.theta_f.theta_bias)
            .chain(&self.theta_h.theta)
            .copied()
            .chain(std::iter::once(self.theta_h.bias))
    }

    /// Every coefficient zero; ψ is then the same constant for all graphs.
    pub fn zeros(k: usize, channels: usize) -> Self {
        Self {
            k,
            theta_f: EquivariantLayerParams {
                k,
                theta_lin: vec![0.0; bell_usize(k + 2) * channels],
                theta_bias: vec![0.0; bell_usize(k)],
            },
            theta_h: InvariantLayerParams {
                k,
                theta: vec![0.0; bell_usize(k)],
                bias: 0.0,
            },
        }
    }

    /// Checks the coefficient counts against `k` and `channels`.
    pub fn validate(&self, channels: usize) -> Result<()> {
        let k = self.k;
        if k == 0 || k > K_MAX || self.theta_f.k != k || self.theta_h.k != k {
            return Err(GrnfError::InvalidArgument(format!(
                "feature order {k} outside 1..={K_MAX} or inconsistent layer orders"
            )));
        }
        if self.theta_f.channels()? != channels || self.theta_h.channels()? != 1 {
            return Err(GrnfError::Shape(format!(
                "feature of order {k} expects |θ_F| = {} and |θ_H| = {}",
                bell_usize(k + 2) * channels + bell_usize(k),
                bell_usize(k) + 1
            )));
        }
        if self.coefficients().any(|x| !x.is_finite()) {
            return Err(GrnfError::InvalidArgument(
                "non-finite feature coefficient".into(),
            ));
        }
        Ok(())
    }
}

/// Distribution `P` over feature parameters, plus the fixed parts of the
/// feature definition (activations, normalization, input channels).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionConfig {
    /// Poisson rate of `k - 1`.
    pub lambda: f64,
    pub k_max: usize,
    /// Standard deviation of every coefficient.
    pub sigma: f64,
    pub activation_e: Activation,
    pub activation_i: Activation,
    pub normalization: Normalization,
    /// Channel count of the input graph tensors.
    pub channels: usize,
}

impl Default for DistributionConfig {
    fn default() -> Self {
        Self {
            lambda: 1.0,
            k_max: 3,
            sigma: 1.0,
            activation_e: Activation::Sigmoid,
            activation_i: Activation::Sigmoid,
            normalization: Normalization::Mean,
            channels: 1,
        }
    }
}

impl DistributionConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(GrnfError::InvalidArgument(format!(
                "lambda must be > 0, got {}",
                self.lambda
            )));
        }
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(GrnfError::InvalidArgument(format!(
                "sigma must be > 0, got {}",
                self.sigma
            )));
        }
        if !(1..=K_MAX).contains(&self.k_max) {
            return Err(GrnfError::InvalidArgument(format!(
                "k_max must be in 1..={K_MAX}, got {}",
                self.k_max
            )));
        }
        if self.channels == 0 {
            return Err(GrnfError::InvalidArgument(
                "channels must be positive".into(),
            ));
        }
        if !self.activation_e.is_squashing() {
            return Err(GrnfError::InvalidArgument(
                "the equivariant-stage activation must be squashing (sigmoid or tanh)".into(),
            ));
        }
        Ok(())
    }

    /// Probability of each order `k = 1..=k_max`.
    pub fn k_masses(&self) -> Vec<f64> {
        // λ^(k-1) / (k-1)!, the common e^-λ cancels in the renormalisation.
        let mut w = Vec::with_capacity(self.k_max);
        let mut term = 1.0;
        for j in 0..self.k_max {
            if j > 0 {
                term *= self.lambda / j as f64;
            }
            w.push(term);
        }
        let total: f64 = w.iter().sum();
        w.iter().map(|x| x / total).collect()
    }

    /// Coefficient standard deviation for order-`k` features. In sum mode the
    /// scale shrinks by `sqrt(bell(k + 2))`.
    pub fn theta_sigma(&self, k: usize) -> f64 {
        match self.normalization {
            Normalization::Mean => self.sigma,
            Normalization::Sum => self.sigma / (bell_usize(k + 2) as f64).sqrt(),
        }
    }

    /// Draws one parameter vector. Draw order: `k`, then `θ_F` linear, `θ_F`
    /// bias, `θ_H` linear, `θ_H` bias.
    pub fn sample_parameter<R: Rng + ?Sized>(&self, rng: &mut R) -> FeatureParams {
        let masses = self.k_masses();
        let u: f64 = rng.random();
        let mut k = self.k_max;
        let mut cum = 0.0;
        for (i, m) in masses.iter().enumerate() {
            cum += m;
            if u < cum {
                k = i + 1;
                break;
            }
        }
        let s = self.theta_sigma(k);
        let mut draw = |len: usize| -> Vec<f64> {
            (0..len)
                .map(|_| s * rng.sample::<f64, _>(StandardNormal))
                .collect()
        };
        let theta_lin = draw(bell_usize(k + 2) * self.channels);
        let theta_bias = draw(bell_usize(k));
        let theta = draw(bell_usize(k));
        let bias = draw(1)[0];
        FeatureParams {
            k,
            theta_f: EquivariantLayerParams {
                k,
                theta_lin,
                theta_bias,
            },
            theta_h: InvariantLayerParams { k, theta, bias },
        }
    }

    /// `log p(w) = log p_k(k) + log p_θ(θ | k)`; `-inf` outside the support.
    pub fn log_density(&self, w: &FeatureParams) -> f64 {
        if w.k == 0 || w.k > self.k_max {
            return f64::NEG_INFINITY;
        }
        let log_pk = self.k_masses()[w.k - 1].ln();
        let s = self.theta_sigma(w.k);
        let log_norm = -0.5 * (2.0 * std::f64::consts::PI).ln() - s.ln();
        w.coefficients()
            .fold(log_pk, |acc, x| acc + log_norm - 0.5 * (x / s) * (x / s))
    }
}
