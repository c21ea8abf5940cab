//! Seed derivation for reproducible parallel work.
//!
//! Every independent unit of randomness (a trial, a repetition, a generated
//! graph) gets its own seed derived from the base seed and integer tags, so
//! results never depend on scheduling.

/// SplitMix64 finaliser.
#[inline]
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Deterministic seed for the unit identified by `parts` under `base`.
pub fn derive_seed(base: u64, parts: &[u64]) -> u64 {
    parts
        .iter()
        .fold(mix(base.wrapping_add(0x9e37_79b9_7f4a_7c15)), |h, &p| {
            mix(h ^ mix(p.wrapping_add(0x9e37_79b9_7f4a_7c15)))
        })
}
