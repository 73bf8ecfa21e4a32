//! Accuracy, confusion matrices, timing and the metric x k x PCA sweep.

mod render;

pub use render::{
    best_per_metric, render_report, render_report_with, render_sweep, BestCell, RenderOptions,
    ReportFormat,
};

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::feature_store::{ClassId, FeatureSet};
use crate::knn::{KnnModel, PipelineConfig, Prediction};
use crate::metrics::MetricKind;

/// Neighbor counts searched by default, matching the odd values used for
/// majority voting.
pub const DEFAULT_KS: [usize; 5] = [1, 3, 5, 7, 9];

/// Rows are true classes, columns predicted classes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ConfusionMatrix {
    counts: Vec<Vec<usize>>,
}

impl ConfusionMatrix {
    pub fn new(n_classes: usize) -> Self {
        Self {
            counts: vec![vec![0; n_classes]; n_classes],
        }
    }

    pub fn record(&mut self, truth: ClassId, predicted: ClassId) {
        self.counts[truth as usize][predicted as usize] += 1;
    }

    pub fn n_classes(&self) -> usize {
        self.counts.len()
    }

    pub fn counts(&self) -> &[Vec<usize>] {
        &self.counts
    }

    pub fn get(&self, truth: usize, predicted: usize) -> usize {
        self.counts[truth][predicted]
    }

    pub fn total(&self) -> usize {
        self.counts.iter().flatten().sum()
    }

    pub fn trace(&self) -> usize {
        (0..self.n_classes()).map(|c| self.counts[c][c]).sum()
    }

    pub fn row_sum(&self, truth: usize) -> usize {
        self.counts[truth].iter().sum()
    }

    pub fn accuracy(&self) -> f64 {
        self.trace() as f64 / self.total() as f64
    }

    /// Recall per true class; `None` for classes absent from the evaluated set.
    pub fn per_class_accuracy(&self) -> Vec<Option<f64>> {
        (0..self.n_classes())
            .map(|c| match self.row_sum(c) {
                0 => None,
                n => Some(self.counts[c][c] as f64 / n as f64),
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub accuracy: f64,
    pub confusion: ConfusionMatrix,
    pub class_names: Vec<String>,
    pub per_class_accuracy: Vec<Option<f64>>,
    pub k: usize,
    pub metric: MetricKind,
    pub use_pca: bool,
    pub variance_threshold: Option<f64>,
    pub n_components: Option<usize>,
    /// Mean wall time of one classify call; feature extraction not included.
    pub mean_query_seconds: f64,
    pub median_query_seconds: f64,
}

impl EvaluationReport {
    pub fn n_samples(&self) -> usize {
        self.confusion.total()
    }

    pub fn n_correct(&self) -> usize {
        self.confusion.trace()
    }

    /// Equality on everything except the timing fields.
    pub fn same_outcome(&self, other: &Self) -> bool {
        let strip = |r: &Self| Self {
            mean_query_seconds: 0.0,
            median_query_seconds: 0.0,
            ..r.clone()
        };
        strip(self) == strip(other)
    }
}

/// Classifies every test vector and returns the report together with the
/// per-sample predictions in test-set order.
pub fn evaluate_with_predictions(
    model: &KnnModel,
    test: &FeatureSet,
    k: usize,
    metric: MetricKind,
) -> Result<(EvaluationReport, Vec<Prediction>)> {
    check_vocabulary(model.class_names(), test.class_names())?;

    let timed = test
        .as_slice()
        .par_chunks_exact(test.dim())
        .map(|row| {
            let start = Instant::now();
            let prediction = model.classify(row, k, metric)?;
            Ok((prediction, start.elapsed().as_secs_f64()))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut confusion = ConfusionMatrix::new(model.class_names().len());
    for (i, (prediction, _)) in timed.iter().enumerate() {
        confusion.record(test.label(i), prediction.predicted_class);
    }
    let mut seconds: Vec<f64> = timed.iter().map(|(_, s)| *s).collect();
    let mean = seconds.iter().sum::<f64>() / seconds.len() as f64;
    seconds.sort_by(f64::total_cmp);
    let mid = seconds.len() / 2;
    let median = if seconds.len() % 2 == 1 {
        seconds[mid]
    } else {
        (seconds[mid - 1] + seconds[mid]) / 2.0
    };

    let report = EvaluationReport {
        accuracy: confusion.accuracy(),
        per_class_accuracy: confusion.per_class_accuracy(),
        confusion,
        class_names: model.class_names().to_vec(),
        k,
        metric,
        use_pca: model.use_pca(),
        variance_threshold: model.variance_threshold(),
        n_components: model.pca().map(|p| p.n_components()),
        mean_query_seconds: mean,
        median_query_seconds: median,
    };
    let predictions = timed.into_iter().map(|(p, _)| p).collect();
    Ok((report, predictions))
}

pub fn evaluate(
    model: &KnnModel,
    test: &FeatureSet,
    k: usize,
    metric: MetricKind,
) -> Result<EvaluationReport> {
    evaluate_with_predictions(model, test, k, metric).map(|(report, _)| report)
}

/// One report per (PCA option, metric, k), in that nesting order. A model is
/// fitted once per PCA option and shared across metrics and k.
pub fn sweep(
    train: &FeatureSet,
    test: &FeatureSet,
    metrics: &[MetricKind],
    ks: &[usize],
    pca_options: &[bool],
    variance_threshold: f64,
) -> Result<Vec<EvaluationReport>> {
    if metrics.is_empty() || ks.is_empty() || pca_options.is_empty() {
        return Err(Error::Parameter(
            "sweep needs at least one metric, one k and one PCA option".into(),
        ));
    }
    check_vocabulary(train.class_names(), test.class_names())?;
    let mut reports = Vec::with_capacity(pca_options.len() * metrics.len() * ks.len());
    for &use_pca in pca_options {
        let config = PipelineConfig {
            use_pca,
            variance_threshold,
        };
        let model = KnnModel::fit(train, &config)?;
        for &metric in metrics {
            for &k in ks {
                reports.push(evaluate(&model, test, k, metric)?);
            }
        }
    }
    Ok(reports)
}

fn check_vocabulary(model: &[String], test: &[String]) -> Result<()> {
    if model == test {
        return Ok(());
    }
    let missing: Vec<&str> = test
        .iter()
        .filter(|c| !model.contains(c))
        .map(String::as_str)
        .collect();
    let extra: Vec<&str> = model
        .iter()
        .filter(|c| !test.contains(c))
        .map(String::as_str)
        .collect();
    let detail = if missing.is_empty() && extra.is_empty() {
        format!("same classes in a different order: model {model:?}, test {test:?}")
    } else {
        format!("test-only classes {missing:?}, model-only classes {extra:?}")
    };
    Err(Error::Vocabulary(detail))
}
