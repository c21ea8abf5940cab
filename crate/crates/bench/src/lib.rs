//! Shared fixtures for the criterion benchmarks.

use grnf::generators::{sbm_generate, SbmParams};
use grnf::{DenseTensor, Graph};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Order-2 tensor on `n` nodes with `channels` uniform entries in [-1, 1).
pub fn random_matrix(n: usize, channels: usize, seed: u64) -> DenseTensor {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data = (0..n * n * channels)
        .map(|_| rng.random_range(-1.0..1.0))
        .collect();
    DenseTensor::from_data(2, n, channels, data).expect("consistent shape")
}

/// `count` SBM graphs with two planted blocks.
pub fn sbm_graphs(n: usize, count: usize, seed: u64) -> Vec<Graph> {
    let params = SbmParams {
        n,
        blocks: vec![n / 2, n - n / 2],
        p_in: 0.8,
        p_out: 0.1,
    };
    sbm_generate(&params, count, &mut ChaCha8Rng::seed_from_u64(seed)).expect("valid params")
}
