//! Seeded, class-stratified train/test split.
//!
//! The procedure is fixed so that other implementations can replicate it:
//!
//! 1. Seed a ChaCha8 generator with `seed` (`SeedableRng::seed_from_u64`).
//! 2. For each class in class-index order, list its row indices ascending and
//!    shuffle them with a Fisher-Yates pass: for `i` from `len - 1` down to 1,
//!    draw `r = next_u64()`, set `j = (r as u128 * (i + 1) as u128) >> 64` and
//!    swap positions `i` and `j`. The generator carries over between classes.
//! 3. The first `per_class_train` shuffled indices go to the training set, the
//!    next `per_class_test` to the test set.
//! 4. Both outputs list their rows in ascending original index.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use super::FeatureSet;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SplitSpec {
    pub per_class_train: usize,
    pub per_class_test: usize,
    pub seed: u64,
}

impl SplitSpec {
    pub fn new(per_class_train: usize, per_class_test: usize, seed: u64) -> Result<Self> {
        if per_class_train == 0 {
            return Err(Error::Parameter("per_class_train must be at least 1".into()));
        }
        Ok(Self {
            per_class_train,
            per_class_test,
            seed,
        })
    }
}

pub fn stratified_split(set: &FeatureSet, spec: &SplitSpec) -> Result<(FeatureSet, FeatureSet)> {
    if spec.per_class_train == 0 {
        return Err(Error::Parameter("per_class_train must be at least 1".into()));
    }
    if spec.per_class_test == 0 {
        return Err(Error::Parameter(
            "per_class_test is 0, so the test set would be empty; use split_indices".into(),
        ));
    }
    let (train_idx, test_idx) = split_indices(set, spec)?;
    Ok((set.select(&train_idx)?, set.select(&test_idx)?))
}

/// The row indices selected for (train, test), each ascending. Unlike
/// [`stratified_split`] this accepts `per_class_test == 0`.
pub fn split_indices(set: &FeatureSet, spec: &SplitSpec) -> Result<(Vec<usize>, Vec<usize>)> {
    let needed = spec.per_class_train + spec.per_class_test;
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); set.n_classes()];
    for (i, &l) in set.labels().iter().enumerate() {
        members[l as usize].push(i);
    }
    for (c, rows) in members.iter().enumerate() {
        if rows.len() < needed {
            return Err(Error::InsufficientData(format!(
                "class {:?} has {} vectors, split needs {needed}",
                set.class_names()[c],
                rows.len()
            )));
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut train = Vec::with_capacity(spec.per_class_train * members.len());
    let mut test = Vec::with_capacity(spec.per_class_test * members.len());
    for mut rows in members {
        for i in (1..rows.len()).rev() {
            let j = ((rng.next_u64() as u128 * (i as u128 + 1)) >> 64) as usize;
            rows.swap(i, j);
        }
        train.extend_from_slice(&rows[..spec.per_class_train]);
        test.extend_from_slice(&rows[spec.per_class_train..needed]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok((train, test))
}
