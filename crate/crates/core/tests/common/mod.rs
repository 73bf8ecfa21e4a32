//! Reference implementations used as test oracles.
//!
//! Nothing here calls into the crate's preprocessing, metric or neighbor
//! code: each routine is a deliberately plain re-derivation from the
//! defining formulas.

#![allow(dead_code)]

use featknn::{ClassId, FeatureSet};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rand_distr::{Distribution, Normal};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

// ---------------------------------------------------------------------------
// metrics
// ---------------------------------------------------------------------------

pub fn oracle_distance(metric: &str, x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len();
    match metric {
        "euclidean" => {
            let mut s = 0.0;
            for i in 0..n {
                s += (x[i] - y[i]) * (x[i] - y[i]);
            }
            Some(s.sqrt())
        }
        "cityblock" => {
            let mut s = 0.0;
            for i in 0..n {
                s += (x[i] - y[i]).abs();
            }
            Some(s)
        }
        "canberra" => {
            let mut s = 0.0;
            for i in 0..n {
                let den = x[i].abs() + y[i].abs();
                if den != 0.0 {
                    s += (x[i] - y[i]).abs() / den;
                }
            }
            Some(s)
        }
        "cosine" => {
            let (mut xy, mut xx, mut yy) = (0.0, 0.0, 0.0);
            for i in 0..n {
                xy += x[i] * y[i];
                xx += x[i] * x[i];
                yy += y[i] * y[i];
            }
            if xx == 0.0 || yy == 0.0 {
                return None;
            }
            Some((1.0 - xy / (xx * yy).sqrt()).clamp(0.0, 2.0))
        }
        other => panic!("unknown metric {other}"),
    }
}

// ---------------------------------------------------------------------------
// symmetric eigendecomposition (cyclic Jacobi)
// ---------------------------------------------------------------------------

/// Eigenvalues (descending) and matching unit eigenvectors of a symmetric
/// `n x n` row-major matrix.
pub fn jacobi_eigen(a: &[f64], n: usize) -> (Vec<f64>, Vec<Vec<f64>>) {
    let mut m = a.to_vec();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    for _sweep in 0..100 {
        let mut off = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                off += m[p * n + q] * m[p * n + q];
            }
        }
        let scale: f64 = (0..n).map(|i| m[i * n + i].abs()).sum::<f64>().max(1e-300);
        if off.sqrt() <= 1e-15 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[p * n + q];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let app = m[p * n + p];
                let aqq = m[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[k * n + p];
                    let mkq = m[k * n + q];
                    m[k * n + p] = c * mkp - s * mkq;
                    m[k * n + q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[p * n + k];
                    let mqk = m[q * n + k];
                    m[p * n + k] = c * mpk - s * mqk;
                    m[q * n + k] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[j * n + j].partial_cmp(&m[i * n + i]).unwrap());
    let values = order.iter().map(|&i| m[i * n + i]).collect();
    let vectors = order
        .iter()
        .map(|&i| (0..n).map(|k| v[k * n + i]).collect())
        .collect();
    (values, vectors)
}

/// Explicit PCA: covariance (divisor n-1), Jacobi eigensolve, ratios over the
/// eigenvalue sum. Returns (mean, eigenvalues, axes, ratios) for all `dim`
/// axes; axes signed so their largest-magnitude entry is positive.
pub struct OraclePca {
    pub mean: Vec<f64>,
    pub eigenvalues: Vec<f64>,
    pub axes: Vec<Vec<f64>>,
    pub ratios: Vec<f64>,
}

pub fn oracle_pca(data: &[f64], dim: usize) -> OraclePca {
    let n = data.len() / dim;
    let mut mean = vec![0.0; dim];
    for i in 0..n {
        for j in 0..dim {
            mean[j] += data[i * dim + j];
        }
    }
    for m in &mut mean {
        *m /= n as f64;
    }
    let mut cov = vec![0.0; dim * dim];
    for i in 0..n {
        for a in 0..dim {
            let da = data[i * dim + a] - mean[a];
            for b in 0..dim {
                cov[a * dim + b] += da * (data[i * dim + b] - mean[b]);
            }
        }
    }
    for c in &mut cov {
        *c /= (n - 1) as f64;
    }
    let (eigenvalues, mut axes) = jacobi_eigen(&cov, dim);
    for axis in &mut axes {
        let mut best = 0;
        for i in 0..dim {
            if axis[i].abs() > axis[best].abs() {
                best = i;
            }
        }
        if axis[best] < 0.0 {
            axis.iter_mut().for_each(|v| *v = -*v);
        }
    }
    let trace: f64 = (0..dim).map(|i| cov[i * dim + i]).sum();
    let ratios = eigenvalues.iter().map(|e| e.max(0.0) / trace).collect();
    OraclePca {
        mean,
        eigenvalues,
        axes,
        ratios,
    }
}

/// Smallest m whose leading ratios sum to at least `threshold`.
pub fn oracle_component_count(ratios: &[f64], threshold: f64) -> usize {
    let mut acc = 0.0;
    for (i, r) in ratios.iter().enumerate() {
        acc += r;
        if acc >= threshold {
            return i + 1;
        }
    }
    ratios.len()
}

// ---------------------------------------------------------------------------
// k-NN
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub struct OraclePrediction {
    pub predicted: usize,
    pub votes: Vec<usize>,
    /// (index, distance, label)
    pub neighbors: Vec<(usize, f64, usize)>,
}

/// Full stable sort of every distance, then a majority vote with ties
/// resolved by smallest distance sum and then smallest class index.
/// `None` when the metric is undefined for some pair (cosine on a zero vector).
pub fn oracle_classify(
    metric: &str,
    database: &[Vec<f64>],
    labels: &[usize],
    n_classes: usize,
    query: &[f64],
    k: usize,
) -> Option<OraclePrediction> {
    let mut all: Vec<(usize, f64)> = Vec::new();
    for (i, row) in database.iter().enumerate() {
        all.push((i, oracle_distance(metric, query, row)?));
    }
    // stable: equal distances keep ascending index order
    all.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
    let neighbors: Vec<(usize, f64, usize)> =
        all[..k].iter().map(|&(i, d)| (i, d, labels[i])).collect();

    let mut votes = vec![0usize; n_classes];
    let mut sums = vec![0.0f64; n_classes];
    for &(_, d, l) in &neighbors {
        votes[l] += 1;
        sums[l] += d;
    }
    let top = *votes.iter().max().unwrap();
    let mut tied: Vec<usize> = (0..n_classes).filter(|&c| votes[c] == top).collect();
    tied.sort_by(|&a, &b| sums[a].partial_cmp(&sums[b]).unwrap().then(a.cmp(&b)));
    Some(OraclePrediction {
        predicted: tied[0],
        votes,
        neighbors,
    })
}

/// Min-max rescaling re-derived from the raw rows; constant columns map to 0.
pub fn oracle_minmax(rows: &[Vec<f32>]) -> impl Fn(&[f32]) -> Vec<f64> {
    let dim = rows[0].len();
    let mut lo = vec![f64::INFINITY; dim];
    let mut hi = vec![f64::NEG_INFINITY; dim];
    for r in rows {
        for j in 0..dim {
            lo[j] = lo[j].min(r[j] as f64);
            hi[j] = hi[j].max(r[j] as f64);
        }
    }
    move |x: &[f32]| {
        (0..dim)
            .map(|j| {
                if hi[j] > lo[j] {
                    (x[j] as f64 - lo[j]) / (hi[j] - lo[j])
                } else {
                    0.0
                }
            })
            .collect()
    }
}

// ---------------------------------------------------------------------------
// data generators
// ---------------------------------------------------------------------------

pub fn class_names(n: usize) -> Vec<String> {
    (0..n).map(|c| format!("class{c}")).collect()
}

pub const ORGANS: [&str; 6] = ["bladder", "bowel", "gallbladder", "kidney", "liver", "spleen"];

/// `n_classes` isotropic Gaussian clusters; returns (train, test).
pub fn gaussian_clusters(
    seed: u64,
    n_classes: usize,
    dim: usize,
    per_class_train: usize,
    per_class_test: usize,
    center_spread: f64,
    noise_sd: f64,
) -> (FeatureSet, FeatureSet) {
    let mut r = rng(seed);
    let noise = Normal::new(0.0, noise_sd).unwrap();
    let centers: Vec<Vec<f64>> = (0..n_classes)
        .map(|_| (0..dim).map(|_| r.random_range(0.0..center_spread)).collect())
        .collect();
    let sample = |count: usize, r: &mut StdRng| {
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        for (c, center) in centers.iter().enumerate() {
            for _ in 0..count {
                rows.push(center.iter().map(|m| (m + noise.sample(r)) as f32).collect());
                labels.push(c as ClassId);
            }
        }
        (rows, labels)
    };
    let names: Vec<String> = if n_classes == 6 {
        ORGANS.iter().map(|s| s.to_string()).collect()
    } else {
        class_names(n_classes)
    };
    let (tr, trl) = sample(per_class_train, &mut r);
    let (te, tel) = sample(per_class_test, &mut r);
    (
        FeatureSet::from_rows(tr, trl, names.clone()).unwrap(),
        FeatureSet::from_rows(te, tel, names).unwrap(),
    )
}

pub fn random_set(r: &mut StdRng, n: usize, dim: usize, n_classes: usize) -> FeatureSet {
    let rows: Vec<Vec<f32>> = (0..n)
        .map(|_| (0..dim).map(|_| r.random_range(-5.0f32..5.0)).collect())
        .collect();
    let labels = (0..n).map(|i| (i % n_classes) as ClassId).collect();
    FeatureSet::from_rows(rows, labels, class_names(n_classes)).unwrap()
}

/// Round each coordinate through f32, as stored processed vectors are.
pub fn round_f32(v: &[f64]) -> Vec<f64> {
    v.iter().map(|&x| x as f32 as f64).collect()
}
