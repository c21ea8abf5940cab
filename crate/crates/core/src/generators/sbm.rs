use rand::Rng;

use crate::error::{GrnfError, Result};
use crate::graph::Graph;

/// Undirected stochastic block model with contiguous blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct SbmParams {
    pub n: usize,
    pub blocks: Vec<usize>,
    pub p_in: f64,
    pub p_out: f64,
}

impl SbmParams {
    /// One community of `n` nodes.
    pub fn single(n: usize, p: f64) -> Self {
        Self {
            n,
            blocks: vec![n],
            p_in: p,
            p_out: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(GrnfError::InvalidArgument(
                "SBM graphs need at least one node".into(),
            ));
        }
        if self.blocks.iter().sum::<usize>() != self.n || self.blocks.contains(&0) {
            return Err(GrnfError::InvalidArgument(format!(
                "block sizes {:?} must be positive and sum to n = {}",
                self.blocks, self.n
            )));
        }
        for (what, p) in [("p_in", self.p_in), ("p_out", self.p_out)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(GrnfError::InvalidArgument(format!(
                    "{what} = {p} is not a probability"
                )));
            }
        }
        Ok(())
    }

    fn block_of(&self) -> Vec<usize> {
        self.blocks
            .iter()
            .enumerate()
            .flat_map(|(b, &size)| std::iter::repeat_n(b, size))
            .collect()
    }
}

/// `count` graphs; each pair `i < j`, in lexicographic order, consumes one
/// uniform draw.
pub fn sbm_generate<R: Rng + ?Sized>(
    params: &SbmParams,
    count: usize,
    rng: &mut R,
) -> Result<Vec<Graph>> {
    params.validate()?;
    let block = params.block_of();
    let n = params.n;
    (0..count)
        .map(|_| {
            let mut edges = Vec::new();
            for i in 0..n {
                for j in i + 1..n {
                    let p = if block[i] == block[j] {
                        params.p_in
                    } else {
                        params.p_out
                    };
                    if rng.random::<f64>() < p {
                        edges.push((i, j));
                    }
                }
            }
            Graph::unattributed(n, edges)
        })
        .collect()
}
