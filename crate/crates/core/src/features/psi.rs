//! Evaluation of a single graph neural feature
//! `ψ(g; w) = ρ_i(H_k(ρ_e(F_{2,k}(A_g; θ_F)); θ_H))`.

use std::collections::HashMap;

use crate::error::{GrnfError, Result};
use crate::fastexp::sigmoid;
use crate::graph::{graph_to_tensor, Graph};
use crate::maps::{affine_invariant_apply, EquivariantPlan, InputSums, RowScratch};
use crate::tensor::DenseTensor;

use super::distribution::{Activation, DistributionConfig, FeatureParams};

/// Tensor of `g`, padded to the channel count the features expect.
pub fn feature_input(g: &Graph, config: &DistributionConfig) -> Result<DenseTensor> {
    prepare(graph_to_tensor(g), config)
}

pub(crate) fn prepare(a: DenseTensor, config: &DistributionConfig) -> Result<DenseTensor> {
    if a.order() != 2 {
        return Err(GrnfError::Shape(format!(
            "graph tensors have order 2, got {}",
            a.order()
        )));
    }
    if a.channels() > config.channels {
        return Err(GrnfError::Shape(format!(
            "graph has {} channels but the features take {}",
            a.channels(),
            config.channels
        )));
    }
    if a.channels() == config.channels {
        Ok(a)
    } else {
        a.pad_channels(config.channels)
    }
}

/// `ψ(g; w)` for a graph tensor already padded to `config.channels`.
pub fn psi_tensor(a: &DenseTensor, w: &FeatureParams, config: &DistributionConfig) -> Result<f64> {
    let a = prepare(a.clone(), config)?;
    let plan = EquivariantPlan::new(&w.theta_f, a.n(), config.normalization)?;
    finish(
        &plan,
        &a,
        &InputSums::new(&a),
        &mut RowScratch::default(),
        w,
        config,
    )
}

/// `ψ(g; w)`.
pub fn psi(g: &Graph, w: &FeatureParams, config: &DistributionConfig) -> Result<f64> {
    psi_tensor(&graph_to_tensor(g), w, config)
}

fn finish(
    plan: &EquivariantPlan,
    a: &DenseTensor,
    sums: &InputSums,
    scratch: &mut RowScratch,
    w: &FeatureParams,
    config: &DistributionConfig,
) -> Result<f64> {
    let norm = config.normalization;
    let pooled = match config.activation_e {
        Activation::Sigmoid if plan.supports_pooled() => {
            plan.pooled_activation(sums, scratch, norm, |v| {
                for x in v {
                    *x = sigmoid(*x);
                }
            })?
        }
        Activation::Tanh if plan.supports_pooled() => {
            plan.pooled_activation(sums, scratch, norm, |v| {
                for x in v {
                    *x = x.tanh();
                }
            })?
        }
        _ => {
            let mut f = plan.apply(a)?;
            for x in f.data_mut() {
                *x = config.activation_e.apply(*x);
            }
            let h = affine_invariant_apply(&w.theta_h, &f, norm)?;
            return Ok(config.activation_i.apply(h));
        }
    };
    if pooled.len() != w.theta_h.theta.len() {
        return Err(GrnfError::Shape(format!(
            "invariant layer has {} coefficients for {} patterns",
            w.theta_h.theta.len(),
            pooled.len()
        )));
    }
    let h = w
        .theta_h
        .theta
        .iter()
        .zip(&pooled)
        .fold(w.theta_h.bias, |acc, (t, s)| acc + t * s);
    Ok(config.activation_i.apply(h))
}

/// Pooled input sums for every tensor, computed once and reused across
/// features.
pub(crate) fn input_sums(tensors: &[DenseTensor]) -> Vec<InputSums> {
    tensors.iter().map(InputSums::new).collect()
}

/// Evaluates one feature on many tensors, building the equivariant plan once
/// per distinct node count.
pub(crate) fn psi_column(
    tensors: &[DenseTensor],
    sums: &[InputSums],
    w: &FeatureParams,
    config: &DistributionConfig,
) -> Result<Vec<f64>> {
    let mut plans: HashMap<usize, EquivariantPlan> = HashMap::new();
    let mut scratch = RowScratch::default();
    tensors
        .iter()
        .zip(sums)
        .map(|(a, s)| {
            let n = a.n();
            if !plans.contains_key(&n) {
                plans.insert(
                    n,
                    EquivariantPlan::new(&w.theta_f, n, config.normalization)?,
                );
            }
            finish(&plans[&n], a, s, &mut scratch, w, config)
        })
        .collect()
}
