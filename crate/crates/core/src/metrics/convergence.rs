//! Empirical check of the concentration bounds on a pair of graphs.
//!
//! For every dimension `M` on the grid, `trials` independent pairs of maps are
//! drawn. `Δ(W)` is the squared distance estimate of map `W`, and `Δ_*` the
//! estimate of a much larger reference map, which stands in for the exact
//! distance.

use rayon::prelude::*;

use crate::error::{GrnfError, Result};
use crate::features::{build_grnf, feature_input, DistributionConfig};
use crate::graph::Graph;
use crate::seeds::derive_seed;
use crate::tensor::DenseTensor;

use super::bounds::{delta_bounds, delta_clt};

pub const CONVERGENCE_CSV_HEADER: &str =
    "M,delta_hat_M,delta_M,delta_hat_star,delta_star,delta_clt,epsilon";

/// Seed tag of the reference map.
const REFERENCE_TAG: u64 = u64::MAX;

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceSettings {
    pub m_grid: Vec<usize>,
    pub reference_m: usize,
    pub trials: usize,
    pub seed: u64,
    /// Tolerance; defaults to a quarter of `Δ_*`.
    pub epsilon: Option<f64>,
    pub config: DistributionConfig,
}

impl Default for ConvergenceSettings {
    fn default() -> Self {
        Self {
            m_grid: vec![16, 64, 256, 1024, 4096],
            reference_m: 100_000,
            trials: 500,
            seed: 0,
            epsilon: None,
            config: DistributionConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub m: usize,
    /// Frequency of `|Δ(W₁) − Δ(W₂)| ≥ ε`.
    pub delta_hat_m: f64,
    pub delta_m: f64,
    /// Frequency of `|Δ(W) − Δ_*| ≥ ε`, over both maps of every trial.
    pub delta_hat_star: f64,
    pub delta_star: f64,
    /// `NaN` when the reference features do not vary.
    pub delta_clt: f64,
    pub epsilon: f64,
    /// Median of `|Δ(W) − Δ_*|` over both maps of every trial.
    pub median_abs_error: f64,
    /// Sample variance of `Δ(W)` over both maps of every trial.
    pub variance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceTable {
    /// `Δ_*`; `NaN` when no trials were run.
    pub reference_distance: f64,
    /// Standard deviation of a single reference term `(ψ(g₁; w) − ψ(g₂; w))²`.
    pub sigma_hat: f64,
    pub epsilon: f64,
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(CONVERGENCE_CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                r.m,
                r.delta_hat_m,
                r.delta_m,
                r.delta_hat_star,
                r.delta_star,
                r.delta_clt,
                r.epsilon
            ));
        }
        out
    }
}

/// Per-feature squared differences `(ψ(g₁; w_m) − ψ(g₂; w_m))²` for the first
/// `m` features drawn with `seed`.
fn squared_terms(
    a: &[DenseTensor; 2],
    m: usize,
    config: &DistributionConfig,
    seed: u64,
) -> Result<Vec<f64>> {
    let map = build_grnf(m, config, seed)?;
    let rows = map.psi_matrix(a)?;
    Ok(rows[0]
        .iter()
        .zip(&rows[1])
        .map(|(x, y)| (x - y) * (x - y))
        .collect())
}

/// `Δ` for every prefix length on `grid`, from one vector of terms.
fn prefix_means(terms: &[f64], grid: &[usize]) -> Vec<f64> {
    let mut sorted: Vec<usize> = grid.to_vec();
    sorted.sort_unstable();
    let mut sums = std::collections::HashMap::new();
    let mut acc = 0.0;
    let mut next = 0;
    for (i, t) in terms.iter().enumerate() {
        acc += t;
        while next < sorted.len() && sorted[next] == i + 1 {
            sums.insert(sorted[next], acc);
            next += 1;
        }
    }
    grid.iter().map(|m| sums[m] / *m as f64).collect()
}

fn median(mut v: Vec<f64>) -> f64 {
    if v.is_empty() {
        return f64::NAN;
    }
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

fn sample_variance(v: &[f64]) -> f64 {
    if v.len() < 2 {
        return f64::NAN;
    }
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (v.len() - 1) as f64
}

pub fn convergence_diagnostics(
    g1: &Graph,
    g2: &Graph,
    settings: &ConvergenceSettings,
) -> Result<ConvergenceTable> {
    let config = &settings.config;
    config.validate()?;
    if settings.m_grid.iter().any(|&m| m == 0) || settings.reference_m == 0 {
        return Err(GrnfError::InvalidArgument(
            "embedding dimensions must be positive".into(),
        ));
    }
    if settings.trials == 0 || settings.m_grid.is_empty() {
        return Ok(ConvergenceTable {
            reference_distance: f64::NAN,
            sigma_hat: f64::NAN,
            epsilon: settings.epsilon.unwrap_or(f64::NAN),
            rows: Vec::new(),
        });
    }
    let a = [feature_input(g1, config)?, feature_input(g2, config)?];

    let reference = squared_terms(
        &a,
        settings.reference_m,
        config,
        derive_seed(settings.seed, &[REFERENCE_TAG]),
    )?;
    let n_ref = reference.len() as f64;
    let delta_ref = reference.iter().sum::<f64>() / n_ref;
    let sigma_hat = (reference
        .iter()
        .map(|t| (t - delta_ref) * (t - delta_ref))
        .sum::<f64>()
        / n_ref)
        .sqrt();

    let epsilon =
        match settings.epsilon {
            Some(e) => e,
            None if delta_ref > 0.0 => 0.25 * delta_ref,
            None => return Err(GrnfError::InvalidArgument(
                "reference distance is zero, so the default tolerance is undefined; pass epsilon"
                    .into(),
            )),
        };

    let max_m = *settings.m_grid.iter().max().expect("non-empty grid");
    // Per trial: estimates of both maps at every grid dimension.
    let estimates: Vec<[Vec<f64>; 2]> = (0..settings.trials as u64)
        .into_par_iter()
        .map(|t| -> Result<[Vec<f64>; 2]> {
            let d1 = prefix_means(
                &squared_terms(&a, max_m, config, derive_seed(settings.seed, &[t, 1]))?,
                &settings.m_grid,
            );
            let d2 = prefix_means(
                &squared_terms(&a, max_m, config, derive_seed(settings.seed, &[t, 2]))?,
                &settings.m_grid,
            );
            Ok([d1, d2])
        })
        .collect::<Result<_>>()?;

    let trials = settings.trials as f64;
    let rows = settings
        .m_grid
        .iter()
        .enumerate()
        .map(|(gi, &m)| -> Result<ConvergenceRow> {
            let pairs = estimates.iter().map(|e| (e[0][gi], e[1][gi]));
            let disagree = pairs
                .clone()
                .filter(|(x, y)| (x - y).abs() >= epsilon)
                .count();
            let all: Vec<f64> = pairs.flat_map(|(x, y)| [x, y]).collect();
            let errors: Vec<f64> = all.iter().map(|x| (x - delta_ref).abs()).collect();
            let far = errors.iter().filter(|&&e| e >= epsilon).count();
            let bounds = delta_bounds(m, epsilon, None)?;
            Ok(ConvergenceRow {
                m,
                delta_hat_m: disagree as f64 / trials,
                delta_m: bounds.delta_m,
                delta_hat_star: far as f64 / all.len() as f64,
                delta_star: bounds.delta_star,
                delta_clt: if sigma_hat > 0.0 {
                    delta_clt(m, epsilon, sigma_hat)?
                } else {
                    f64::NAN
                },
                epsilon,
                median_abs_error: median(errors),
                variance: sample_variance(&all),
            })
        })
        .collect::<Result<_>>()?;

    Ok(ConvergenceTable {
        reference_distance: delta_ref,
        sigma_hat,
        epsilon,
        rows,
    })
}
