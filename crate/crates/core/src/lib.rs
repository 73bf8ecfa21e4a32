//! Feature-space classification engine.
//!
//! Feature vectors exported by an external extractor are stored as
//! [`FeatureSet`]s, rescaled per dimension with min-max statistics learned
//! from a database, optionally projected with variance-thresholded PCA, and
//! classified by exact k-nearest-neighbor majority vote under one of four
//! [`MetricKind`]s. The [`eval`] module measures accuracy and confusion over
//! a labeled test set and sweeps the metric x k x PCA grid.
//!
//! ```
//! use featknn::{FeatureSet, KnnModel, MetricKind, PipelineConfig};
//!
//! let db = FeatureSet::from_rows(
//!     vec![vec![0.0, 1.0], vec![0.2, 0.9], vec![5.0, 0.1], vec![5.2, 0.0]],
//!     vec![0, 0, 1, 1],
//!     vec!["liver".into(), "kidney".into()],
//! )?;
//! let model = KnnModel::fit(&db, &PipelineConfig::with_pca(false))?;
//! let p = model.classify(&[4.9, 0.2], 3, MetricKind::CityBlock)?;
//! assert_eq!(db.class_name(p.predicted_class), "kidney");
//! # Ok::<(), featknn::Error>(())
//! ```

mod codec;
pub mod error;
pub mod eval;
pub mod feature_store;
pub mod knn;
pub mod metrics;
pub mod preprocess;

pub use error::{Error, Result};
pub use eval::{evaluate, sweep, ConfusionMatrix, EvaluationReport};
pub use feature_store::{ClassId, FeatureSet, SplitSpec};
pub use knn::{KnnModel, Neighbor, PipelineConfig, Prediction};
pub use metrics::MetricKind;
pub use preprocess::{NormalizationStats, PcaTransform};
