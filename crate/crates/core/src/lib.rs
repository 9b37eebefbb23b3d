//! Persistence diagrams from point clouds, kernels on diagrams, and kernel
//! methods over the resulting Gram matrices.
//!
//! The pipeline runs point cloud → filtration → persistence diagram →
//! Gram matrix → SVM / kernel PCA / KFDR. Exact Gram matrices can be
//! replaced by random Fourier features (PWGK) or a Nyström approximation
//! (PSSK) when the number of diagrams or points grows.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod filtration;
pub mod fmt;
pub mod geometry;
pub mod kernels;
pub mod learn;
mod par;
pub mod persistence;
pub mod rff;
pub mod rng;
pub mod synth;

pub use error::{Error, Result};
pub use filtration::{build_cech2d, build_rips, Filtration, FiltrationMode, Simplex};
pub use geometry::{hausdorff_distance, PointCloud};
pub use kernels::{gram, GramMatrix, KernelSpec, KernelSpecJson};
pub use persistence::{
    bottleneck_distance, compute_persistence, PersistenceDiagram, PersistencePair,
};
pub use rng::RandomSource;
