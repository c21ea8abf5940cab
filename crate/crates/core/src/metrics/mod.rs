//! Estimators built on GRNF embeddings: distances, kernels, Gram matrices,
//! dimension selection and the concentration diagnostics.

mod bounds;
mod convergence;
mod estimate;

pub use bounds::{delta_bounds, delta_clt, embedding_dim_for, normal_cdf, BoundKind, DeltaBounds};
pub use convergence::{
    convergence_diagnostics, ConvergenceRow, ConvergenceSettings, ConvergenceTable,
    CONVERGENCE_CSV_HEADER,
};
pub use estimate::{
    distance_estimate, gram_from_centered, gram_matrix, kernel_estimate, DistanceEstimate,
    GramMatrix,
};
