//! Persistence Weighted Gaussian Kernel (PWGK), the persistence scale space
//! kernel (PSSK), RKHS-level linear and Gaussian kernels, Gram matrices and
//! the median parameter heuristics.

mod embedding;
mod gram;
pub(crate) mod heuristics;
mod spec;

pub(crate) use embedding::pssk_mirror_kernel;
pub use embedding::{
    embedding_inner_weighted_kernel, embedding_inner_weighted_measure, kernel_gaussian_rkhs,
    kernel_linear, kernel_pssk, kernel_value, measure_inner, rkhs_distance_sq, w_arc,
    GaussianPointKernel, PointKernel, WeightedPointKernel,
};
pub(crate) use gram::apply_rkhs;
pub use gram::{cross_gram, gram, GramMatrix};
pub use heuristics::{median, median_heuristics, median_rkhs_distance, MedianHeuristics};
pub use spec::{BaseKernel, KernelSpec, KernelSpecJson, ParamValue, Rkhs, WeightParams, DEFAULT_P};
