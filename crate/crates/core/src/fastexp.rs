//! Branch-free `exp` and logistic sigmoid that the compiler can vectorise.
//!
//! Range reduction `x = k ln 2 + r` with `|r| <= ln 2 / 2`, a degree-13
//! Taylor polynomial for `e^r` and exponent-bit scaling by `2^k`. Inputs are
//! clamped to `[-708, 709]`, where the result stays normal. Relative error is
//! a few ulp across the range.

const LOG2_E: f64 = std::f64::consts::LOG2_E;
const LN2_HI: f64 = 6.931_471_803_691_238_2e-1;
const LN2_LO: f64 = 1.908_214_929_270_587_7e-10;
// Adding and subtracting 1.5 * 2^52 rounds to the nearest integer.
const ROUND: f64 = 6_755_399_441_055_744.0;

#[inline(always)]
pub(crate) fn exp(x: f64) -> f64 {
    let x = x.max(-708.0).min(709.0);
    let t = x * LOG2_E + ROUND;
    let k = t - ROUND;
    let ki = (t.to_bits() as i64).wrapping_sub(ROUND.to_bits() as i64);
    let r = (x - k * LN2_HI) - k * LN2_LO;
    let mut p = 1.0 / 6_227_020_800.0;
    p = p * r + 1.0 / 479_001_600.0;
    p = p * r + 1.0 / 39_916_800.0;
    p = p * r + 1.0 / 3_628_800.0;
    p = p * r + 1.0 / 362_880.0;
    p = p * r + 1.0 / 40_320.0;
    p = p * r + 1.0 / 5_040.0;
    p = p * r + 1.0 / 720.0;
    p = p * r + 1.0 / 120.0;
    p = p * r + 1.0 / 24.0;
    p = p * r + 1.0 / 6.0;
    p = p * r + 0.5;
    p = p * r + 1.0;
    p = p * r + 1.0;
    let scale = f64::from_bits(((ki + 1023) as u64) << 52);
    p * scale
}

/// `1 / (1 + e^{-x})`, always in `[0, 1]`.
#[inline(always)]
pub(crate) fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + exp(-x))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_std_exp() {
        let mut worst: f64 = 0.0;
        for i in -69_000..=69_000 {
            let x = i as f64 * 0.010_123;
            let rel = (exp(x) - x.exp()).abs() / x.exp();
            worst = worst.max(rel);
        }
        assert!(worst < 1e-15, "worst relative error {worst}");
        assert_eq!(exp(0.0), 1.0);
    }

    #[test]
    fn sigmoid_limits() {
        assert_eq!(sigmoid(0.0), 0.5);
        assert_eq!(sigmoid(1e6), 1.0);
        assert!(sigmoid(-1e6) >= 0.0 && sigmoid(-1e6) < 1e-300);
        for i in -400..=400 {
            let x = i as f64 * 0.1;
            let reference = 1.0 / (1.0 + (-x).exp());
            assert!((sigmoid(x) - reference).abs() <= 1e-15 * reference.max(1e-300) + 1e-300);
        }
    }
}
