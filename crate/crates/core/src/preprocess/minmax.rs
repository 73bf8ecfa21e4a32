use crate::error::{Error, Result};
use crate::feature_store::FeatureSet;

/// Per-dimension minimum and maximum of a database, used to rescale every
/// feature to `(x - min) / (max - min)`.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizationStats {
    min_vals: Vec<f64>,
    max_vals: Vec<f64>,
}

impl NormalizationStats {
    pub fn fit(database: &FeatureSet) -> Result<Self> {
        let dim = database.dim();
        let mut min_vals = vec![f64::INFINITY; dim];
        let mut max_vals = vec![f64::NEG_INFINITY; dim];
        for (i, row) in database.rows().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                if !v.is_finite() {
                    return Err(Error::InvalidData(format!(
                        "non-finite value at row {i}, column {j}"
                    )));
                }
                let v = f64::from(v);
                min_vals[j] = min_vals[j].min(v);
                max_vals[j] = max_vals[j].max(v);
            }
        }
        Ok(Self { min_vals, max_vals })
    }

    /// Rebuilds stats from stored bounds.
    pub fn from_parts(min_vals: Vec<f64>, max_vals: Vec<f64>) -> Result<Self> {
        Error::check_dim(min_vals.len(), max_vals.len())?;
        if min_vals.is_empty() {
            return Err(Error::InvalidData("normalization stats are empty".into()));
        }
        for (j, (lo, hi)) in min_vals.iter().zip(&max_vals).enumerate() {
            if !lo.is_finite() || !hi.is_finite() || lo > hi {
                return Err(Error::InvalidData(format!(
                    "invalid bounds [{lo}, {hi}] for dimension {j}"
                )));
            }
        }
        Ok(Self { min_vals, max_vals })
    }

    pub fn dim(&self) -> usize {
        self.min_vals.len()
    }

    pub fn min_vals(&self) -> &[f64] {
        &self.min_vals
    }

    pub fn max_vals(&self) -> &[f64] {
        &self.max_vals
    }

    /// Rescales `x` with the stored bounds. Values outside the database range
    /// map outside `[0, 1]`; constant columns map to 0.
    pub fn apply(&self, x: &[f32]) -> Result<Vec<f64>> {
        Error::check_dim(self.dim(), x.len())?;
        Ok(x.iter()
            .zip(self.min_vals.iter().zip(&self.max_vals))
            .map(|(&v, (&lo, &hi))| {
                if hi > lo {
                    (f64::from(v) - lo) / (hi - lo)
                } else {
                    0.0
                }
            })
            .collect())
    }
}

pub fn fit_minmax(database: &FeatureSet) -> Result<NormalizationStats> {
    NormalizationStats::fit(database)
}

pub fn apply_minmax(stats: &NormalizationStats, x: &[f32]) -> Result<Vec<f64>> {
    stats.apply(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn column(values: &[f32]) -> FeatureSet {
        FeatureSet::new(values.to_vec(), 1, vec![0; values.len()], vec!["c".into()]).unwrap()
    }

    #[test]
    fn fits_per_column_bounds() {
        let stats = fit_minmax(&column(&[2.0, 4.0, 6.0])).unwrap();
        assert_eq!(stats.min_vals(), &[2.0]);
        assert_eq!(stats.max_vals(), &[6.0]);

        let stats = fit_minmax(&column(&[5.0, 5.0, 5.0])).unwrap();
        assert_eq!((stats.min_vals()[0], stats.max_vals()[0]), (5.0, 5.0));
    }

    #[test]
    fn single_vector_database() {
        let set = FeatureSet::new(vec![1.5, -2.0, 0.0], 3, vec![0], vec!["c".into()]).unwrap();
        let stats = fit_minmax(&set).unwrap();
        assert_eq!(stats.min_vals(), &[1.5, -2.0, 0.0]);
        assert_eq!(stats.min_vals(), stats.max_vals());
        assert_eq!(stats.apply(set.row(0)).unwrap(), vec![0.0; 3]);
    }

    #[test]
    fn rescales_and_extrapolates() {
        let stats = fit_minmax(&column(&[2.0, 4.0, 6.0])).unwrap();
        assert_eq!(apply_minmax(&stats, &[4.0]).unwrap(), vec![0.5]);
        assert_eq!(apply_minmax(&stats, &[8.0]).unwrap(), vec![1.5]);
        assert_eq!(apply_minmax(&stats, &[0.0]).unwrap(), vec![-0.5]);
    }

    #[test]
    fn constant_column_maps_to_zero() {
        let stats = fit_minmax(&column(&[5.0, 5.0])).unwrap();
        for x in [-100.0, 5.0, 1e6] {
            assert_eq!(stats.apply(&[x]).unwrap(), vec![0.0]);
        }
    }

    #[test]
    fn dimension_mismatch() {
        let stats = fit_minmax(&column(&[1.0, 2.0])).unwrap();
        assert!(matches!(
            stats.apply(&[1.0, 2.0]),
            Err(Error::Dimension { expected: 1, actual: 2 })
        ));
    }

    #[test]
    fn from_parts_validates() {
        assert!(NormalizationStats::from_parts(vec![0.0], vec![1.0]).is_ok());
        assert!(NormalizationStats::from_parts(vec![2.0], vec![1.0]).is_err());
        assert!(NormalizationStats::from_parts(vec![0.0], vec![f64::NAN]).is_err());
        assert!(NormalizationStats::from_parts(vec![0.0, 0.0], vec![1.0]).is_err());
    }
}
