//! Hierarchy reorganization for classifier pre-training, and the video-level
//! pipeline that consumes the resulting features.
//!
//! * [`taxonomy`]: parse `is_a`/count metadata and canonicalize it to a tree.
//! * [`reorg`]: bottom-up roll / bind / promote / subsample.
//! * [`topdown`]: breadth-first selection of general classes.
//! * [`labelmap`]: the synset-to-class mapping both produce.
//! * [`encoding`]: average pooling, VLAD, the chi-squared kernel and a kernel SVM.
//! * [`evaluation`]: average precision, mAP and late fusion.
//! * [`cli`]: the `taxreorg` command line.

pub mod cli;
pub mod encoding;
pub mod error;
pub mod evaluation;
pub mod labelmap;
pub mod reorg;
pub mod taxonomy;
pub mod topdown;

pub use error::{Error, Result};
