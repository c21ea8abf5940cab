//! Order-independent summation.
//!
//! Sums over node-indexed entries are visited in an order that depends on the
//! node labelling. Plain `f64` addition is not associative, so two labellings
//! of the same graph would round differently. Values are instead rounded once
//! onto a fixed-point grid and accumulated in `i128`, which makes every sum a
//! pure function of the multiset of its terms. The grid is derived from the
//! largest magnitude and the count of terms, both of which are themselves
//! labelling-invariant.
//!
//! Each term is truncated to a 63-bit integer (hardware conversion) and
//! accumulated in `i128`, so the quantisation error per term is at most
//! `max_abs * 2^-62` and overflow would need more than `2^64` terms.

/// Fixed-point grid shared by all sums taken over one tensor.
#[derive(Debug, Clone, Copy)]
pub(crate) struct FixedGrid {
    scale: f64,
    inv_scale: f64,
}

// |term| * scale stays below 2^TERM_BITS < 2^63.
const TERM_BITS: i32 = 62;

impl FixedGrid {
    /// Grid for summing terms of magnitude at most `max_abs`.
    pub(crate) fn new(max_abs: f64) -> Self {
        let mag_bits = if max_abs > 0.0 && max_abs.is_finite() {
            max_abs.log2().floor() as i32 + 1
        } else {
            0
        };
        let shift = (TERM_BITS - mag_bits).clamp(-1000, 1000);
        let scale = 2f64.powi(shift);
        Self {
            scale,
            inv_scale: 2f64.powi(-shift),
        }
    }

    #[inline]
    pub(crate) fn to_fixed(self, x: f64) -> i128 {
        (x * self.scale) as i64 as i128
    }

    #[inline]
    pub(crate) fn to_f64(self, acc: i128) -> f64 {
        acc as f64 * self.inv_scale
    }

    #[cfg(test)]
    pub(crate) fn sum(self, values: impl IntoIterator<Item = f64>) -> f64 {
        self.to_f64(values.into_iter().map(|x| self.to_fixed(x)).sum())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sum_is_order_independent() {
        let vals = [0.1, 1e-9, -3.75, 2.0 / 3.0, 7.123456789, -1e-12, 9.999];
        let grid = FixedGrid::new(10.0);
        let forward = grid.sum(vals.iter().copied());
        let backward = grid.sum(vals.iter().rev().copied());
        assert_eq!(forward.to_bits(), backward.to_bits());
        let naive: f64 = vals.iter().sum();
        assert!((forward - naive).abs() < 1e-14);
    }

    #[test]
    fn extreme_magnitudes() {
        let grid = FixedGrid::new(1e300);
        assert!((grid.sum([1e300, -1e300, 5e299]) - 5e299).abs() < 1e285);
        let tiny = FixedGrid::new(1e-200);
        assert!((tiny.sum([1e-200, 1e-200]) - 2e-200).abs() < 1e-214);
        assert_eq!(FixedGrid::new(0.0).sum([0.0, 0.0]), 0.0);
    }
}
