//! Reference implementations by literal enumeration.
//!
//! These walk every index tuple, test its equality pattern against γ
//! explicitly and accumulate in plain `f64`. They share nothing with the
//! pooled fast path beyond the tensor type and exist to check it.

use crate::error::{GrnfError, Result};
use crate::partition::Partition;
use crate::tensor::DenseTensor;

use super::Normalization;

fn tuples(order: usize, n: usize) -> Vec<Vec<usize>> {
    let mut all = vec![Vec::new()];
    for _ in 0..order {
        all = all
            .into_iter()
            .flat_map(|t| {
                (0..n).map(move |i| {
                    let mut next = t.clone();
                    next.push(i);
                    next
                })
            })
            .collect();
    }
    all
}

/// `I_γ T` per channel, by enumerating all `n^k` tuples.
pub fn naive_invariant_apply(
    gamma: &Partition,
    t: &DenseTensor,
    norm: Normalization,
) -> Result<Vec<f64>> {
    if t.order() == 0 || gamma.len() != t.order() {
        return Err(GrnfError::Shape(
            "partition size does not match tensor order".into(),
        ));
    }
    let d = t.channels();
    let mut sums = vec![0.0; d];
    let mut count = 0usize;
    for tuple in tuples(t.order(), t.n()) {
        if gamma.matches(&tuple) {
            count += 1;
            for (c, s) in sums.iter_mut().enumerate() {
                *s += t.get(&tuple, c);
            }
        }
    }
    if norm == Normalization::Mean {
        for s in &mut sums {
            *s = if count == 0 { 0.0 } else { *s / count as f64 };
        }
    }
    Ok(sums)
}

/// `E_γ A` per channel, by enumerating all `n^(k+2)` tuples
/// `(i_1, i_2, j_1, .., j_k)`.
pub fn naive_equivariant_apply(
    gamma: &Partition,
    a: &DenseTensor,
    k: usize,
    norm: Normalization,
) -> Result<DenseTensor> {
    if a.order() != 2 || k == 0 || gamma.len() != k + 2 {
        return Err(GrnfError::Shape(
            "partition size does not match k + 2".into(),
        ));
    }
    let n = a.n();
    let d = a.channels();
    let mut out = DenseTensor::zeros(k, n, d)?;
    let mut counts = vec![0usize; n.pow(k as u32)];
    for tuple in tuples(k + 2, n) {
        if !gamma.matches(&tuple) {
            continue;
        }
        let (input, output) = tuple.split_at(2);
        let off = out.offset(output);
        counts[off] += 1;
        for c in 0..d {
            let v = out.get(output, c) + a.get(input, c);
            out.set(output, c, v);
        }
    }
    if norm == Normalization::Mean {
        for output in tuples(k, n) {
            let cnt = counts[out.offset(&output)];
            for c in 0..d {
                let v = if cnt == 0 {
                    0.0
                } else {
                    out.get(&output, c) / cnt as f64
                };
                out.set(&output, c, v);
            }
        }
    }
    Ok(out)
}
