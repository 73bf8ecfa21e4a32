//! Exact k-nearest-neighbor classification over a frozen, preprocessed
//! database.
//!
//! Queries arrive as raw feature vectors and go through the same pipeline
//! that produced the stored database rows: min-max rescaling, then the
//! optional PCA projection, then rounding to `f32`. Because both sides share
//! that code path, a query equal to a raw database vector lands exactly on
//! its stored row.

mod model_file;

pub use model_file::{read_knnm, write_knnm, KNNM_MAGIC, KNNM_VERSION};

use std::cmp::Ordering;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::feature_store::{ClassId, FeatureSet};
use crate::metrics::MetricKind;
use crate::preprocess::{self, NormalizationStats, PcaTransform, DEFAULT_VARIANCE_THRESHOLD};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub use_pca: bool,
    pub variance_threshold: f64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            use_pca: true,
            variance_threshold: DEFAULT_VARIANCE_THRESHOLD,
        }
    }
}

impl PipelineConfig {
    pub fn with_pca(use_pca: bool) -> Self {
        Self {
            use_pca,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Neighbor {
    pub index: usize,
    pub distance: f64,
    pub label: ClassId,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub predicted_class: ClassId,
    /// Neighbor count per class, indexed by class.
    pub votes: Vec<usize>,
    /// Ascending by distance, ties by database index.
    pub neighbors: Vec<Neighbor>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KnnModel {
    stats: NormalizationStats,
    pca: Option<PcaTransform>,
    /// Threshold the PCA was fitted with. Not persisted in model files.
    variance_threshold: Option<f64>,
    /// Processed database, `labels.len() x width`, row-major.
    database: Vec<f32>,
    width: usize,
    labels: Vec<ClassId>,
    class_names: Vec<String>,
}

impl KnnModel {
    pub fn fit(database: &FeatureSet, config: &PipelineConfig) -> Result<Self> {
        preprocess::check_threshold(config.variance_threshold)?;
        let stats = NormalizationStats::fit(database)?;
        let pca = if config.use_pca {
            if database.len() < 2 {
                return Err(Error::InsufficientData(format!(
                    "PCA needs at least 2 database vectors, got {}",
                    database.len()
                )));
            }
            let mut normalized = Vec::with_capacity(database.len() * database.dim());
            for row in database.rows() {
                normalized.extend(stats.apply(row)?);
            }
            Some(PcaTransform::fit(
                &normalized,
                database.dim(),
                config.variance_threshold,
            )?)
        } else {
            None
        };
        let width = pca.as_ref().map_or(database.dim(), PcaTransform::n_components);
        let mut model = Self {
            stats,
            pca,
            variance_threshold: config.use_pca.then_some(config.variance_threshold),
            database: Vec::new(),
            width,
            labels: database.labels().to_vec(),
            class_names: database.class_names().to_vec(),
        };
        let rows = database
            .as_slice()
            .par_chunks_exact(database.dim())
            .map(|row| model.apply_pipeline(row))
            .collect::<Result<Vec<_>>>()?;
        model.database = rows.concat();
        Ok(model)
    }

    pub(crate) fn from_parts(
        stats: NormalizationStats,
        pca: Option<PcaTransform>,
        database: Vec<f32>,
        labels: Vec<ClassId>,
        class_names: Vec<String>,
    ) -> Result<Self> {
        crate::feature_store::validate_class_names(&class_names)?;
        if let Some(p) = &pca {
            Error::check_dim(stats.dim(), p.dim())?;
        }
        let width = pca.as_ref().map_or(stats.dim(), PcaTransform::n_components);
        if labels.is_empty() {
            return Err(Error::InvalidData("model database is empty".into()));
        }
        Error::check_dim(labels.len() * width, database.len())?;
        if let Some(bad) = labels.iter().find(|&&l| l as usize >= class_names.len()) {
            return Err(Error::InvalidData(format!(
                "label {bad} out of range for {} classes",
                class_names.len()
            )));
        }
        if database.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidData("non-finite database value".into()));
        }
        Ok(Self {
            stats,
            pca,
            variance_threshold: None,
            database,
            width,
            labels,
            class_names,
        })
    }

    pub fn stats(&self) -> &NormalizationStats {
        &self.stats
    }

    pub fn pca(&self) -> Option<&PcaTransform> {
        self.pca.as_ref()
    }

    pub fn use_pca(&self) -> bool {
        self.pca.is_some()
    }

    /// The threshold used at fit time; `None` without PCA or for models read
    /// back from disk.
    pub fn variance_threshold(&self) -> Option<f64> {
        self.variance_threshold
    }

    pub fn raw_dim(&self) -> usize {
        self.stats.dim()
    }

    /// Width of the processed vectors (PCA components, or the raw dimension).
    pub fn processed_dim(&self) -> usize {
        self.width
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[ClassId] {
        &self.labels
    }

    pub fn class_names(&self) -> &[String] {
        &self.class_names
    }

    pub fn database(&self) -> &[f32] {
        &self.database
    }

    pub fn database_row(&self, i: usize) -> &[f32] {
        &self.database[i * self.width..(i + 1) * self.width]
    }

    /// Raw feature vector to the space the database is stored in.
    pub fn apply_pipeline(&self, x: &[f32]) -> Result<Vec<f32>> {
        let normalized = self.stats.apply(x)?;
        let processed = match &self.pca {
            Some(pca) => pca.apply(&normalized)?,
            None => normalized,
        };
        Ok(processed.into_iter().map(|v| v as f32).collect())
    }

    /// The `k` database entries closest to `x` by exhaustive scan.
    pub fn neighbors(&self, x: &[f32], k: usize, metric: MetricKind) -> Result<Vec<Neighbor>> {
        self.check_k(k)?;
        let query = self.apply_pipeline(x)?;
        self.neighbors_processed(&query, k, metric)
    }

    pub fn classify(&self, x: &[f32], k: usize, metric: MetricKind) -> Result<Prediction> {
        let neighbors = self.neighbors(x, k, metric)?;
        Ok(vote(neighbors, self.class_names.len()))
    }

    fn check_k(&self, k: usize) -> Result<()> {
        if k == 0 || k > self.len() {
            return Err(Error::Parameter(format!(
                "k must be in 1..={}, got {k}",
                self.len()
            )));
        }
        Ok(())
    }

    fn neighbors_processed(
        &self,
        query: &[f32],
        k: usize,
        metric: MetricKind,
    ) -> Result<Vec<Neighbor>> {
        let mut scored = self
            .database
            .chunks_exact(self.width)
            .enumerate()
            .map(|(i, row)| Ok((metric.distance(query, row)?, i)))
            .collect::<Result<Vec<(f64, usize)>>>()?;

        let by_distance = |a: &(f64, usize), b: &(f64, usize)| -> Ordering {
            a.0.total_cmp(&b.0).then(a.1.cmp(&b.1))
        };
        if k < scored.len() {
            scored.select_nth_unstable_by(k - 1, by_distance);
            scored.truncate(k);
        }
        scored.sort_unstable_by(by_distance);
        Ok(scored
            .into_iter()
            .map(|(distance, index)| Neighbor {
                index,
                distance,
                label: self.labels[index],
            })
            .collect())
    }
}

/// Unweighted majority vote. Ties go to the class with the smallest summed
/// neighbor distance, then to the smallest class index.
fn vote(neighbors: Vec<Neighbor>, n_classes: usize) -> Prediction {
    let mut votes = vec![0usize; n_classes];
    let mut sums = vec![0.0f64; n_classes];
    for n in &neighbors {
        votes[n.label as usize] += 1;
        sums[n.label as usize] += n.distance;
    }
    let mut best = 0;
    for c in 1..n_classes {
        let better = votes[c] > votes[best] || (votes[c] == votes[best] && sums[c] < sums[best]);
        if better {
            best = c;
        }
    }
    Prediction {
        predicted_class: best as ClassId,
        votes,
        neighbors,
    }
}

pub fn fit(database: &FeatureSet, config: &PipelineConfig) -> Result<KnnModel> {
    KnnModel::fit(database, config)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(rows: Vec<Vec<f32>>, labels: Vec<ClassId>, n_classes: usize) -> FeatureSet {
        let names = (0..n_classes).map(|c| format!("c{c}")).collect();
        FeatureSet::from_rows(rows, labels, names).unwrap()
    }

    fn no_pca() -> PipelineConfig {
        PipelineConfig::with_pca(false)
    }

    #[test]
    fn fit_without_pca_keeps_raw_width() {
        let db = set(vec![vec![0.0, 10.0], vec![2.0, 20.0], vec![4.0, 30.0]], vec![0, 1, 0], 2);
        let model = fit(&db, &no_pca()).unwrap();
        assert_eq!(model.processed_dim(), 2);
        assert_eq!(model.database_row(1), &[0.5, 0.5]);
        assert_eq!(model.variance_threshold(), None);
        let expect: Vec<f32> = model
            .stats()
            .apply(&[3.0, 12.0])
            .unwrap()
            .into_iter()
            .map(|v| v as f32)
            .collect();
        assert_eq!(model.apply_pipeline(&[3.0, 12.0]).unwrap(), expect);
    }

    #[test]
    fn collinear_database_projects_to_one_axis() {
        let db = set(vec![vec![1.0, 1.0], vec![2.0, 2.0], vec![3.0, 3.0]], vec![0, 0, 1], 2);
        let model = fit(&db, &PipelineConfig::default()).unwrap();
        assert_eq!(model.processed_dim(), 1);
        assert_eq!(model.variance_threshold(), Some(0.99));
    }

    #[test]
    fn database_rows_reproduce_through_pipeline() {
        let db = set(
            vec![vec![0.3, 1.0, 7.0], vec![2.0, -1.0, 3.5], vec![1.1, 0.2, 0.0], vec![5.0, 4.0, 2.0]],
            vec![0, 1, 1, 0],
            2,
        );
        for cfg in [no_pca(), PipelineConfig::default()] {
            let model = fit(&db, &cfg).unwrap();
            for i in 0..db.len() {
                assert_eq!(model.apply_pipeline(db.row(i)).unwrap(), model.database_row(i));
            }
        }
    }

    #[test]
    fn mean_maps_to_origin_with_pca() {
        // normalized mean is (0.5, 0.5), i.e. raw (1, 1)
        let db = set(vec![vec![0.0, 2.0], vec![2.0, 0.0]], vec![0, 1], 2);
        let model = fit(&db, &PipelineConfig::default()).unwrap();
        let y = model.apply_pipeline(&[1.0, 1.0]).unwrap();
        assert!(y.iter().all(|v| *v == 0.0), "{y:?}");
    }

    #[test]
    fn self_query_returns_own_row_first() {
        let rows: Vec<Vec<f32>> =
            (0..20).map(|i| vec![i as f32, (i * i % 7) as f32 + 20.0 - i as f32]).collect();
        let labels = (0..20).map(|i| (i % 3) as ClassId).collect();
        let db = set(rows.clone(), labels, 3);
        let model = fit(&db, &no_pca()).unwrap();
        for metric in MetricKind::ALL {
            let nn = model.neighbors(&rows[17], 1, metric).unwrap();
            assert_eq!(nn[0].index, 17);
            assert_eq!(nn[0].distance, 0.0);
            assert_eq!(nn[0].label, db.label(17));
        }
    }

    #[test]
    fn equidistant_rows_listed_by_index() {
        let db = set(vec![vec![2.0], vec![0.0], vec![1.0], vec![0.0]], vec![0, 1, 2, 1], 3);
        let model = fit(&db, &no_pca()).unwrap();
        let nn = model.neighbors(&[1.0], 3, MetricKind::Euclidean).unwrap();
        let idx: Vec<usize> = nn.iter().map(|n| n.index).collect();
        assert_eq!(idx, vec![2, 0, 1]);
        let nn = model.neighbors(&[0.0], 2, MetricKind::CityBlock).unwrap();
        assert_eq!(nn.iter().map(|n| n.index).collect::<Vec<_>>(), vec![1, 3]);
    }

    #[test]
    fn majority_vote() {
        let db = set(vec![vec![0.0], vec![1.0], vec![2.0], vec![10.0]], vec![0, 0, 1, 1], 2);
        let model = fit(&db, &no_pca()).unwrap();
        let p = model.classify(&[0.0], 3, MetricKind::Euclidean).unwrap();
        assert_eq!(p.predicted_class, 0);
        assert_eq!(p.votes, vec![2, 1]);
        assert_eq!(p.neighbors.len(), 3);
        let p = model.classify(&[9.0], 1, MetricKind::Euclidean).unwrap();
        assert_eq!(p.predicted_class, 1);
    }

    #[test]
    fn three_way_tie_goes_to_smallest_distance_sum() {
        let mk = |index, distance, label| Neighbor { index, distance, label };
        let p = vote(vec![mk(4, 1.0, 2), mk(0, 2.0, 0), mk(9, 3.0, 1)], 3);
        assert_eq!(p.predicted_class, 2);
        assert_eq!(p.votes, vec![1, 1, 1]);
        // equal sums fall back to the smaller class index
        let p = vote(vec![mk(0, 1.0, 1), mk(1, 1.0, 0)], 2);
        assert_eq!(p.predicted_class, 0);
    }

    #[test]
    fn k_out_of_range() {
        let db = set(vec![vec![0.0], vec![1.0]], vec![0, 1], 2);
        let model = fit(&db, &no_pca()).unwrap();
        assert!(matches!(model.classify(&[0.0], 0, MetricKind::Cosine), Err(Error::Parameter(_))));
        assert!(matches!(model.classify(&[0.0], 3, MetricKind::Cosine), Err(Error::Parameter(_))));
        assert!(matches!(
            model.classify(&[0.0, 1.0], 1, MetricKind::Euclidean),
            Err(Error::Dimension { .. })
        ));
    }

    #[test]
    fn pca_needs_two_vectors() {
        let db = set(vec![vec![0.0, 1.0]], vec![0], 1);
        assert!(matches!(fit(&db, &PipelineConfig::default()), Err(Error::InsufficientData(_))));
        assert!(fit(&db, &no_pca()).is_ok());
        let bad = PipelineConfig { use_pca: false, variance_threshold: 1.5 };
        assert!(matches!(fit(&db, &bad), Err(Error::Parameter(_))));
    }
}
