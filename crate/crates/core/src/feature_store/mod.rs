//! Labeled feature-vector containers and their on-disk formats.
//!
//! A [`FeatureSet`] is the unit of all I/O in this crate: a dense row-major
//! matrix of `f32` activations, one class index per row, and the class
//! vocabulary those indices point into.

mod csv_io;
mod fset;
mod split;

pub use csv_io::{export_csv, import_csv};
pub use fset::{read_fset, write_fset, FSET_MAGIC, FSET_VERSION};
pub use split::{split_indices, stratified_split, SplitSpec};

use crate::error::{Error, Result};

/// Class index as stored on disk.
pub type ClassId = u16;

/// Largest number of classes a feature set can carry.
pub const MAX_CLASSES: usize = ClassId::MAX as usize + 1;

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureSet {
    vectors: Vec<f32>,
    dim: usize,
    labels: Vec<ClassId>,
    class_names: Vec<String>,
}

impl FeatureSet {
    /// Builds a feature set from a row-major buffer of `labels.len() * dim`
    /// values, validating every container invariant.
    pub fn new(
        vectors: Vec<f32>,
        dim: usize,
        labels: Vec<ClassId>,
        class_names: Vec<String>,
    ) -> Result<Self> {
        validate_class_names(&class_names)?;
        if dim == 0 {
            return Err(Error::InvalidData("feature dimension must be at least 1".into()));
        }
        if labels.is_empty() {
            return Err(Error::InvalidData("feature set has no vectors".into()));
        }
        if vectors.len() != labels.len() * dim {
            return Err(Error::InvalidData(format!(
                "{} values cannot form {} rows of dimension {dim}",
                vectors.len(),
                labels.len()
            )));
        }
        if let Some(pos) = vectors.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidData(format!(
                "non-finite value at row {}, column {}",
                pos / dim,
                pos % dim
            )));
        }
        if let Some((row, &label)) = labels
            .iter()
            .enumerate()
            .find(|(_, &l)| l as usize >= class_names.len())
        {
            return Err(Error::InvalidData(format!(
                "label {label} at row {row} is out of range for {} classes",
                class_names.len()
            )));
        }
        Ok(Self {
            vectors,
            dim,
            labels,
            class_names,
        })
    }

    /// Convenience constructor from owned rows.
    pub fn from_rows(
        rows: Vec<Vec<f32>>,
        labels: Vec<ClassId>,
        class_names: Vec<String>,
    ) -> Result<Self> {
        let dim = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().position(|r| r.len() != dim) {
            return Err(Error::InvalidData(format!(
                "row {bad} has dimension {}, expected {dim}",
                rows[bad].len()
            )));
        }
        Self::new(rows.concat(), dim, labels, class_names)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    /// Always false for a constructed set; present for API symmetry.
    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_classes(&self) -> usize {
        self.class_names.len()
    }

    pub fn row(&self, i: usize) -> &[f32] {
        &self.vectors[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[f32]> + '_ {
        self.vectors.chunks_exact(self.dim)
    }

    pub fn label(&self, i: usize) -> ClassId {
        self.labels[i]
    }

    pub fn labels(&self) -> &[ClassId] {
        &self.labels
    }

    pub fn class_names(&self) -> &[String] {
        &self.class_names
    }

    pub fn class_name(&self, class: ClassId) -> &str {
        &self.class_names[class as usize]
    }

    /// Row-major values, `len() * dim()` entries.
    pub fn as_slice(&self) -> &[f32] {
        &self.vectors
    }

    /// Number of rows per class, indexed by class.
    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.n_classes()];
        for &l in &self.labels {
            counts[l as usize] += 1;
        }
        counts
    }

    /// A new set made of the given rows, in the given order, sharing this
    /// set's class vocabulary.
    pub fn select(&self, indices: &[usize]) -> Result<Self> {
        let mut vectors = Vec::with_capacity(indices.len() * self.dim);
        let mut labels = Vec::with_capacity(indices.len());
        for &i in indices {
            if i >= self.len() {
                return Err(Error::Parameter(format!(
                    "row index {i} out of range for {} rows",
                    self.len()
                )));
            }
            vectors.extend_from_slice(self.row(i));
            labels.push(self.labels[i]);
        }
        Self::new(vectors, self.dim, labels, self.class_names.clone())
    }
}

pub(crate) fn validate_class_names(names: &[String]) -> Result<()> {
    if names.is_empty() {
        return Err(Error::InvalidData("class vocabulary is empty".into()));
    }
    if names.len() > MAX_CLASSES {
        return Err(Error::InvalidData(format!(
            "{} classes exceed the limit of {MAX_CLASSES}",
            names.len()
        )));
    }
    for (i, name) in names.iter().enumerate() {
        if name.is_empty() {
            return Err(Error::InvalidData(format!("class {i} has an empty name")));
        }
        if names[..i].contains(name) {
            return Err(Error::InvalidData(format!("duplicate class name {name:?}")));
        }
    }
    Ok(())
}
