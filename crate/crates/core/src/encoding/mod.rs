//! Video-level representations and event classifiers: average pooling with
//! l1 normalization, VLAD over a k-means codebook, the exponential
//! chi-squared kernel, and an SMO-trained kernel SVM.

mod container;
mod frames;
mod kernel;
mod kmeans;
mod pool;
mod svm;
mod table;
mod vlad;

pub use container::{
    decode_codebook, decode_model, encode_codebook, encode_model, StoredModel, FORMAT_VERSION,
    MAGIC,
};
pub use frames::FrameMatrix;
pub use kernel::{chi2_distance, chi2_kernel, default_gamma, KernelConfig, DEFAULT_EPSILON};
pub use kmeans::{kmeans_fit, Codebook, MAX_ITERATIONS, MOVE_TOLERANCE};
pub use pool::{average_pool, l1_normalize, Normalized};
pub use svm::{svm_score, train_kernel_svm, train_kernel_svm_with, SvmModel, SvmParams};
pub use table::{FeatureTable, GramMatrix};
pub use vlad::vlad_encode;

/// Regularization used for every event classifier.
pub const DEFAULT_C: f64 = 100.0;
