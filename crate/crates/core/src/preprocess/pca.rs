//! Principal component analysis with a cumulative explained-variance cutoff.
//!
//! Axes come from the singular value decomposition of the mean-centered
//! data, which gives the same axes as an eigendecomposition of the sample
//! covariance without forming the `dim x dim` matrix. Each axis is signed so
//! that its largest-magnitude entry is positive (lowest index wins ties),
//! which makes fits reproducible regardless of the solver's sign choices.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

pub const DEFAULT_VARIANCE_THRESHOLD: f64 = 0.99;

#[derive(Debug, Clone, PartialEq)]
pub struct PcaTransform {
    mean: Vec<f64>,
    /// `n_components x dim`, row-major, rows orthonormal.
    components: Vec<f64>,
    explained_variance_ratio: Vec<f64>,
}

impl PcaTransform {
    /// Fits on a row-major `n x dim` matrix, keeping the fewest leading axes
    /// whose explained-variance ratios add up to at least `threshold`.
    ///
    /// The count is additionally capped at the numerical rank of the centered
    /// data (never more than `n - 1`), so a threshold of 1.0 does not pull in
    /// axes that only carry rounding noise.
    pub fn fit(data: &[f64], dim: usize, threshold: f64) -> Result<Self> {
        check_threshold(threshold)?;
        if dim == 0 || !data.len().is_multiple_of(dim) {
            return Err(Error::InvalidData(format!(
                "{} values do not form rows of dimension {dim}",
                data.len()
            )));
        }
        let n = data.len() / dim;
        if n < 2 {
            return Err(Error::InsufficientData(format!(
                "PCA needs at least 2 rows, got {n}"
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidData("non-finite value in PCA input".into()));
        }
        let first = &data[..dim];
        if data.chunks_exact(dim).all(|row| row == first) {
            return Err(Error::DegenerateData(
                "all rows are identical, total variance is zero".into(),
            ));
        }

        let mut mean = vec![0.0; dim];
        for row in data.chunks_exact(dim) {
            for (m, &v) in mean.iter_mut().zip(row) {
                *m += v;
            }
        }
        for m in &mut mean {
            *m /= n as f64;
        }

        let centered = DMatrix::from_fn(n, dim, |i, j| data[i * dim + j] - mean[j]);
        let svd = centered.svd(false, true);
        let v_t = svd.v_t.expect("right singular vectors were requested");
        let singular = svd.singular_values;

        let mut order: Vec<usize> = (0..singular.len()).collect();
        order.sort_by(|&a, &b| singular[b].total_cmp(&singular[a]).then(a.cmp(&b)));

        let eigen: Vec<f64> = order.iter().map(|&i| singular[i] * singular[i]).collect();
        let total: f64 = eigen.iter().sum();
        if total <= 0.0 {
            return Err(Error::DegenerateData("total variance is zero".into()));
        }
        let s_max = singular[order[0]];
        let rank_tol = s_max * (n.max(dim) as f64) * f64::EPSILON;
        let rank = order
            .iter()
            .take_while(|&&i| singular[i] > rank_tol)
            .count()
            .clamp(1, n - 1);

        let ratios: Vec<f64> = eigen.iter().map(|e| e / total).collect();
        let mut cumulative = 0.0;
        let mut n_components = ratios.len();
        for (m, r) in ratios.iter().enumerate() {
            cumulative += r;
            if cumulative >= threshold {
                n_components = m + 1;
                break;
            }
        }
        let n_components = n_components.min(rank);

        let mut components = Vec::with_capacity(n_components * dim);
        for &i in &order[..n_components] {
            let mut axis: Vec<f64> = v_t.row(i).iter().copied().collect();
            orient(&mut axis);
            components.extend_from_slice(&axis);
        }

        Ok(Self {
            mean,
            components,
            explained_variance_ratio: ratios[..n_components].to_vec(),
        })
    }

    /// Rebuilds a transform from stored parts. Orthonormality is not
    /// re-verified.
    pub fn from_parts(
        mean: Vec<f64>,
        components: Vec<f64>,
        explained_variance_ratio: Vec<f64>,
    ) -> Result<Self> {
        let dim = mean.len();
        let m = explained_variance_ratio.len();
        if dim == 0 || m == 0 || m > dim {
            return Err(Error::InvalidData(format!(
                "{m} components cannot describe dimension {dim}"
            )));
        }
        Error::check_dim(m * dim, components.len())?;
        if mean.iter().chain(&components).any(|v| !v.is_finite()) {
            return Err(Error::InvalidData("non-finite PCA parameter".into()));
        }
        if explained_variance_ratio
            .iter()
            .any(|r| !(r.is_finite() && *r > 0.0 && *r <= 1.0))
        {
            return Err(Error::InvalidData(
                "explained-variance ratios must lie in (0, 1]".into(),
            ));
        }
        Ok(Self {
            mean,
            components,
            explained_variance_ratio,
        })
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn n_components(&self) -> usize {
        self.explained_variance_ratio.len()
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    pub fn components(&self) -> &[f64] {
        &self.components
    }

    pub fn component(&self, i: usize) -> &[f64] {
        let d = self.dim();
        &self.components[i * d..(i + 1) * d]
    }

    pub fn explained_variance_ratio(&self) -> &[f64] {
        &self.explained_variance_ratio
    }

    pub fn cumulative_variance(&self) -> f64 {
        self.explained_variance_ratio.iter().sum()
    }

    /// Projects `x - mean` onto the retained axes.
    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        Error::check_dim(self.dim(), x.len())?;
        let centered: Vec<f64> = x.iter().zip(&self.mean).map(|(v, m)| v - m).collect();
        Ok(self
            .components
            .chunks_exact(self.dim())
            .map(|axis| axis.iter().zip(&centered).map(|(a, c)| a * c).sum())
            .collect())
    }
}

pub fn fit_pca(data: &[f64], dim: usize, variance_threshold: f64) -> Result<PcaTransform> {
    PcaTransform::fit(data, dim, variance_threshold)
}

pub fn apply_pca(transform: &PcaTransform, x: &[f64]) -> Result<Vec<f64>> {
    transform.apply(x)
}

pub(crate) fn check_threshold(threshold: f64) -> Result<()> {
    if threshold > 0.0 && threshold <= 1.0 {
        Ok(())
    } else {
        Err(Error::Parameter(format!(
            "variance threshold must be in (0,1], got {threshold}"
        )))
    }
}

fn orient(axis: &mut [f64]) {
    let mut best = 0;
    for (i, v) in axis.iter().enumerate() {
        if v.abs() > axis[best].abs() {
            best = i;
        }
    }
    if axis[best] < 0.0 {
        for v in axis.iter_mut() {
            *v = -*v;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SQRT_HALF: f64 = std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn collinear_points_give_one_axis() {
        let pca = fit_pca(&[1.0, 1.0, 2.0, 2.0, 3.0, 3.0], 2, 0.99).unwrap();
        assert_eq!(pca.n_components(), 1);
        let axis = pca.component(0);
        assert!((axis[0] - SQRT_HALF).abs() < 1e-12 && (axis[1] - SQRT_HALF).abs() < 1e-12);
        assert!((pca.explained_variance_ratio()[0] - 1.0).abs() < 1e-12);
        assert_eq!(pca.mean(), &[2.0, 2.0]);
    }

    #[test]
    fn symmetric_cross_needs_both_axes() {
        let data = [1.0, 0.0, 0.0, 1.0, -1.0, 0.0, 0.0, -1.0];
        let pca = fit_pca(&data, 2, 0.99).unwrap();
        assert_eq!(pca.n_components(), 2);
        for r in pca.explained_variance_ratio() {
            assert!((r - 0.5).abs() < 1e-12);
        }
        // at 0.5 one axis is enough
        assert_eq!(fit_pca(&data, 2, 0.5).unwrap().n_components(), 1);
    }

    #[test]
    fn mean_projects_to_origin() {
        let data = [0.0, 1.0, 2.0, 4.0, 1.0, 0.5, 3.0, 3.0, -1.0];
        let pca = fit_pca(&data, 3, 0.99).unwrap();
        let y = pca.apply(pca.mean()).unwrap();
        assert_eq!(y.len(), pca.n_components());
        assert!(y.iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn first_axis_projects_to_unit_vector() {
        let data = [0.0, 1.0, 2.0, 4.0, 1.0, 0.5, 3.0, 3.0, -1.0, 1.0, 1.0, 1.0];
        let pca = fit_pca(&data, 3, 1.0).unwrap();
        let x: Vec<f64> = pca.mean().iter().zip(pca.component(0)).map(|(m, c)| m + c).collect();
        let y = pca.apply(&x).unwrap();
        assert!((y[0] - 1.0).abs() < 1e-12);
        assert!(y[1..].iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn components_are_orthonormal_and_oriented() {
        let data: Vec<f64> = (0..40).map(|i| ((i * 37 % 11) as f64).sin() * 3.0).collect();
        let pca = fit_pca(&data, 4, 1.0).unwrap();
        for i in 0..pca.n_components() {
            let a = pca.component(i);
            let peak = a.iter().copied().fold(0.0f64, |m, v| if v.abs() > m.abs() { v } else { m });
            assert!(peak > 0.0);
            for j in 0..pca.n_components() {
                let dot: f64 = a.iter().zip(pca.component(j)).map(|(x, y)| x * y).sum();
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((dot - want).abs() < 1e-10, "<c{i}, c{j}> = {dot}");
            }
        }
        let r = pca.explained_variance_ratio();
        assert!(r.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn rank_bounds_component_count() {
        // 3 points in 5 dims span at most 2 directions
        let data = [1.0, 0.0, 3.0, 2.0, 5.0, 0.0, 1.0, 1.0, 0.0, 2.0, 4.0, 4.0, 0.0, 1.0, 1.0];
        let pca = fit_pca(&data, 5, 1.0).unwrap();
        assert!(pca.n_components() <= 2);
        assert!((pca.cumulative_variance() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn repeated_fits_are_bit_identical() {
        let data: Vec<f64> = (0..60).map(|i| ((i * 7919) % 101) as f64 / 7.0).collect();
        assert_eq!(fit_pca(&data, 6, 0.9).unwrap(), fit_pca(&data, 6, 0.9).unwrap());
    }

    #[test]
    fn error_paths() {
        assert!(matches!(fit_pca(&[1.0, 2.0], 2, 0.99), Err(Error::InsufficientData(_))));
        assert!(matches!(
            fit_pca(&[1.0, 2.0, 1.0, 2.0, 1.0, 2.0], 2, 0.99),
            Err(Error::DegenerateData(_))
        ));
        assert!(matches!(fit_pca(&[0.0, 1.0, 1.0, 0.0], 2, 0.0), Err(Error::Parameter(_))));
        assert!(matches!(fit_pca(&[0.0, 1.0, 1.0, 0.0], 2, 1.5), Err(Error::Parameter(_))));
        let pca = fit_pca(&[0.0, 1.0, 1.0, 0.0], 2, 0.99).unwrap();
        assert!(matches!(pca.apply(&[1.0]), Err(Error::Dimension { .. })));
    }

    #[test]
    fn from_parts_validates() {
        assert!(PcaTransform::from_parts(vec![0.0, 0.0], vec![1.0, 0.0], vec![0.9]).is_ok());
        assert!(PcaTransform::from_parts(vec![0.0, 0.0], vec![1.0], vec![0.9]).is_err());
        assert!(PcaTransform::from_parts(vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0]).is_err());
        assert!(PcaTransform::from_parts(vec![], vec![], vec![]).is_err());
    }
}
