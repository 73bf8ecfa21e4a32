//! Feature preprocessing: per-dimension min-max rescaling followed by an
//! optional PCA projection fitted on the rescaled database.

mod minmax;
mod pca;

pub use minmax::{apply_minmax, fit_minmax, NormalizationStats};
pub use pca::{apply_pca, fit_pca, PcaTransform, DEFAULT_VARIANCE_THRESHOLD};

pub(crate) use pca::check_threshold;
