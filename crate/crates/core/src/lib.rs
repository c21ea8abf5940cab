//! Graph random neural features.
//!
//! A training-free map from attributed graphs to `R^M`: each coordinate is a
//! randomly parameterised permutation-invariant network
//! `ρ_i ∘ H_k ∘ ρ_e ∘ F_{2,k}` evaluated on the graph's adjacency tensor.
//! Squared Euclidean distances between embeddings estimate, without bias, the
//! expected squared feature discrepancy between graphs, and inner products of
//! centred embeddings estimate the matching kernel.

mod accum;
pub mod classify;
pub mod error;
pub mod experiments;
mod fastexp;
pub mod features;
pub mod generators;
pub mod graph;
pub mod io;
pub mod maps;
pub mod metrics;
pub mod partition;
pub mod seeds;
pub mod tensor;

pub use error::{GrnfError, Result};
pub use features::{
    build_grnf, build_weighted_grnf, Activation, DistributionConfig, FeatureParams, GrnfMap,
};
pub use graph::{graph_to_tensor, Graph};
pub use partition::{bell, enumerate_partitions, Partition};
pub use tensor::{apply_permutation, DenseTensor, Permutation};
