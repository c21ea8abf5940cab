//! Synthetic graph families: stochastic block models and Delaunay
//! triangulations of perturbed planar point sets.

mod delaunay;
mod sbm;

pub use delaunay::{
    delaunay_classification, delaunay_generate, delaunay_triangles, delaunay_triangulation,
    random_seed_points, DelaunayParams, DelaunayTask, Point,
};
pub use sbm::{sbm_generate, SbmParams};
