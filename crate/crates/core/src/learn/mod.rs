//! Kernel methods on precomputed Gram matrices.

mod cv;
mod eig;
mod kfdr;
mod kpca;
mod svm;

pub use cv::{cross_validate, stratified_folds, CvOutcome};
pub use eig::eig_sym;
pub use kfdr::{change_point_scan, kfdr, KfdrParams, KfdrScan};
pub use kpca::{center_gram, kernel_pca};
pub use svm::{svm_predict, svm_train, svm_train_with, LabeledGram, SvmModel, SvmParams};
