//! Graph random neural features: parameter distribution, single features and
//! the finite-dimensional map `z(g)`.

mod distribution;
mod map;
mod psi;

pub use distribution::{Activation, DistributionConfig, FeatureParams};
pub use map::{build_grnf, build_weighted_grnf, GrnfMap, MAP_FORMAT_VERSION};
pub use psi::{feature_input, psi, psi_tensor};

#[cfg(test)]
mod tests;
