//! Linear permutation-invariant and -equivariant maps on node-indexed tensors.
//!
//! Both bases are indexed by set partitions. For an order-`k` tensor the
//! invariant basis element `I_γ` (γ a partition of the `k` index positions)
//! sums the tensor over the index tuples whose equality pattern is exactly γ:
//! indices in one block are equal, indices in different blocks are distinct.
//! The equivariant basis element `E_γ` from order 2 to order `k` uses a
//! partition of `k + 2` positions, the first two being input indices and the
//! rest output indices. Strict patterns have disjoint supports, so every
//! index tuple belongs to exactly one basis element.
//!
//! [`Normalization::Mean`] divides each basis sum by the number of terms it
//! sums, which keeps outputs on the scale of the inputs regardless of `n`.
//!
//! Coefficient vectors are laid out partition-major, channel-minor: the
//! coefficient of basis element `γ` on input channel `c` sits at
//! `γ_index * channels + c`, with `γ_index` the position of γ in
//! [`enumerate_partitions`](crate::partition::enumerate_partitions).

mod oracle;
mod plan;

pub use oracle::{naive_equivariant_apply, naive_invariant_apply};

use serde::{Deserialize, Serialize};

use crate::error::{GrnfError, Result};
use crate::partition::{bell_usize, enumerate_partitions, Partition, PatternIndex};
use crate::tensor::{for_each_tuple, DenseTensor};

pub(crate) use plan::{invariant_pattern_sums, EquivariantPlan, InputSums, RowScratch};

/// Largest tensor order handled by the feature layers.
pub const K_MAX: usize = 3;

/// How basis sums are scaled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Normalization {
    /// Raw sums over matching index tuples.
    Sum,
    /// Sums divided by the number of matching index tuples.
    #[default]
    Mean,
}

impl std::str::FromStr for Normalization {
    type Err = GrnfError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sum" => Ok(Self::Sum),
            "mean" => Ok(Self::Mean),
            other => Err(GrnfError::InvalidArgument(format!(
                "unknown normalization '{other}' (expected sum|mean)"
            ))),
        }
    }
}

/// `n (n-1) ... (n-b+1)`: the number of tuples of `b` distinct indices.
pub(crate) fn falling_factorial(n: usize, b: usize) -> f64 {
    if b > n {
        return 0.0;
    }
    (0..b).map(|i| (n - i) as f64).product()
}

/// Coefficients of an affine invariant map `T^k -> R`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvariantLayerParams {
    pub k: usize,
    /// `bell(k) * channels` linear coefficients.
    pub theta: Vec<f64>,
    pub bias: f64,
}

impl InvariantLayerParams {
    pub fn channels(&self) -> Result<usize> {
        channels_for(self.theta.len(), bell_checked(self.k)?, "invariant")
    }
}

/// Coefficients of an affine equivariant map `T^2 -> T^k` with one output
/// channel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivariantLayerParams {
    pub k: usize,
    /// `bell(k + 2) * channels` coefficients of the basis `E_γ`.
    pub theta_lin: Vec<f64>,
    /// `bell(k)` coefficients of the constant invariant tensors.
    pub theta_bias: Vec<f64>,
}

impl EquivariantLayerParams {
    pub fn channels(&self) -> Result<usize> {
        if self.theta_bias.len() != bell_checked(self.k)? {
            return Err(GrnfError::Shape(format!(
                "equivariant bias has {} coefficients, expected bell({}) = {}",
                self.theta_bias.len(),
                self.k,
                bell_usize(self.k)
            )));
        }
        channels_for(
            self.theta_lin.len(),
            bell_checked(self.k + 2)?,
            "equivariant",
        )
    }
}

fn bell_checked(m: usize) -> Result<usize> {
    Ok(crate::partition::bell(m)? as usize)
}

fn channels_for(len: usize, basis: usize, what: &str) -> Result<usize> {
    if len == 0 || len % basis != 0 {
        return Err(GrnfError::Shape(format!(
            "{what} layer has {len} coefficients, not a positive multiple of {basis}"
        )));
    }
    Ok(len / basis)
}

/// `I_γ T` for each channel of `T`.
pub fn invariant_basis_apply(
    gamma: &Partition,
    t: &DenseTensor,
    norm: Normalization,
) -> Result<Vec<f64>> {
    if t.order() == 0 || gamma.len() != t.order() {
        return Err(GrnfError::Shape(format!(
            "partition of {} positions applied to an order-{} tensor",
            gamma.len(),
            t.order()
        )));
    }
    let index = PatternIndex::new(t.order())?.index_of(gamma);
    let sums = invariant_pattern_sums(t, norm)?;
    let d = t.channels();
    Ok(sums[index * d..(index + 1) * d].to_vec())
}

/// `E_γ A` for each channel of the order-2 tensor `A`, as an order-`k`
/// tensor with the same channel count.
pub fn equivariant_basis_apply(
    gamma: &Partition,
    a: &DenseTensor,
    k: usize,
    norm: Normalization,
) -> Result<DenseTensor> {
    check_equivariant_input(a)?;
    if k == 0 || gamma.len() != k + 2 {
        return Err(GrnfError::Shape(format!(
            "partition of {} positions used for an order-2 to order-{k} map",
            gamma.len()
        )));
    }
    let parts = enumerate_partitions(k + 2)?;
    let gamma_index = parts
        .iter()
        .position(|p| p == gamma)
        .expect("enumeration is complete");
    let d = a.channels();
    let mut out = DenseTensor::zeros(k, a.n(), d)?;
    for c in 0..d {
        let mut theta_lin = vec![0.0; parts.len() * d];
        theta_lin[gamma_index * d + c] = 1.0;
        let params = EquivariantLayerParams {
            k,
            theta_lin,
            theta_bias: vec![0.0; bell_usize(k)],
        };
        let single = EquivariantPlan::new(&params, a.n(), norm)?.apply(a)?;
        for (dst, &v) in out
            .data_mut()
            .iter_mut()
            .skip(c)
            .step_by(d)
            .zip(single.data())
        {
            *dst = v;
        }
    }
    Ok(out)
}

/// Constant tensor that is 1 exactly on the index tuples with pattern γ.
pub fn bias_basis_tensor(gamma: &Partition, k: usize, n: usize) -> Result<DenseTensor> {
    if gamma.len() != k {
        return Err(GrnfError::Shape(format!(
            "partition of {} positions for an order-{k} tensor",
            gamma.len()
        )));
    }
    let mut out = DenseTensor::zeros(k, n, 1)?;
    let data = out.data_mut();
    for_each_tuple(k, n, |off, j| {
        if gamma.matches(j) {
            data[off] = 1.0;
        }
    });
    Ok(out)
}

/// `H_k(T; θ) = Σ_γ Σ_c θ_{γ,c} (I_γ T)_c + θ'_0`.
pub fn affine_invariant_apply(
    params: &InvariantLayerParams,
    t: &DenseTensor,
    norm: Normalization,
) -> Result<f64> {
    if params.k != t.order() || params.k == 0 {
        return Err(GrnfError::Shape(format!(
            "order-{} invariant layer applied to an order-{} tensor",
            params.k,
            t.order()
        )));
    }
    if params.channels()? != t.channels() {
        return Err(GrnfError::Shape(format!(
            "invariant layer sized for {} channels, tensor has {}",
            params.channels()?,
            t.channels()
        )));
    }
    let sums = invariant_pattern_sums(t, norm)?;
    Ok(params
        .theta
        .iter()
        .zip(&sums)
        .fold(params.bias, |acc, (w, s)| acc + w * s))
}

/// `F_{2,k}(A; θ) = Σ_γ Σ_c θ_{γ,c} (E_γ A)_c + Σ_{γ'} θ'_{γ'} I_{γ'}`.
pub fn affine_equivariant_apply(
    params: &EquivariantLayerParams,
    a: &DenseTensor,
    norm: Normalization,
) -> Result<DenseTensor> {
    check_equivariant_input(a)?;
    EquivariantPlan::new(params, a.n(), norm)?.apply(a)
}

fn check_equivariant_input(a: &DenseTensor) -> Result<()> {
    if a.order() != 2 {
        return Err(GrnfError::Shape(format!(
            "equivariant layers take order-2 input, got order {}",
            a.order()
        )));
    }
    Ok(())
}
