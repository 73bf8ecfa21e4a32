//! The four dissimilarity measures used for neighbor search.
//!
//! Inputs may be `f32` or `f64`; every sum is accumulated in `f64`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MetricKind {
    Euclidean,
    CityBlock,
    Canberra,
    Cosine,
}

impl MetricKind {
    pub const ALL: [MetricKind; 4] = [
        MetricKind::Euclidean,
        MetricKind::CityBlock,
        MetricKind::Canberra,
        MetricKind::Cosine,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MetricKind::Euclidean => "euclidean",
            MetricKind::CityBlock => "cityblock",
            MetricKind::Canberra => "canberra",
            MetricKind::Cosine => "cosine",
        }
    }

    pub fn distance<T: Copy + Into<f64>>(self, x: &[T], y: &[T]) -> Result<f64> {
        match self {
            MetricKind::Euclidean => euclidean(x, y),
            MetricKind::CityBlock => city_block(x, y),
            MetricKind::Canberra => canberra(x, y),
            MetricKind::Cosine => cosine(x, y),
        }
    }
}

impl fmt::Display for MetricKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MetricKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        MetricKind::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| {
                Error::Parameter(format!(
                    "unknown metric {s:?}, expected one of euclidean, cityblock, canberra, cosine"
                ))
            })
    }
}

fn pairs<'a, T: Copy + Into<f64>>(
    x: &'a [T],
    y: &'a [T],
) -> Result<impl Iterator<Item = (f64, f64)> + 'a> {
    Error::check_dim(x.len(), y.len())?;
    Ok(x.iter().zip(y).map(|(&a, &b)| (a.into(), b.into())))
}

pub fn euclidean<T: Copy + Into<f64>>(x: &[T], y: &[T]) -> Result<f64> {
    Ok(pairs(x, y)?
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt())
}

pub fn city_block<T: Copy + Into<f64>>(x: &[T], y: &[T]) -> Result<f64> {
    Ok(pairs(x, y)?.map(|(a, b)| (a - b).abs()).sum())
}

/// Terms where both coordinates are zero contribute 0.
pub fn canberra<T: Copy + Into<f64>>(x: &[T], y: &[T]) -> Result<f64> {
    Ok(pairs(x, y)?
        .map(|(a, b)| {
            let denom = a.abs() + b.abs();
            if denom == 0.0 {
                0.0
            } else {
                (a - b).abs() / denom
            }
        })
        .sum())
}

/// One minus the cosine of the angle between `x` and `y`, clamped to
/// `[0, 2]`. Fails with [`Error::ZeroVector`] if either input has zero norm.
pub fn cosine<T: Copy + Into<f64>>(x: &[T], y: &[T]) -> Result<f64> {
    let (mut dot, mut xx, mut yy) = (0.0, 0.0, 0.0);
    for (a, b) in pairs(x, y)? {
        dot += a * b;
        xx += a * a;
        yy += b * b;
    }
    if xx == 0.0 || yy == 0.0 {
        return Err(Error::ZeroVector);
    }
    Ok((1.0 - dot / (xx * yy).sqrt()).clamp(0.0, 2.0))
}

pub fn distance<T: Copy + Into<f64>>(kind: MetricKind, x: &[T], y: &[T]) -> Result<f64> {
    kind.distance(x, y)
}
