//! KNNM model container, version 1. All integers little-endian.
//!
//! ```text
//! magic "KNNM"
//! u32 version (1)
//! u32 flags              bit 0: PCA present; other bits must be zero
//! u32 n_classes, then n_classes x (u16 byte length, UTF-8 bytes)
//! u32 raw_dim
//! raw_dim x f64          per-dimension minimum
//! raw_dim x f64          per-dimension maximum
//! if PCA:
//!   u32 n_components
//!   raw_dim x f64        mean
//!   n_components x raw_dim x f64   components, row-major
//!   n_components x f64   explained-variance ratios
//! u32 n
//! n x u16                labels
//! n x m x f32            processed database, m = n_components or raw_dim
//! ```

use std::io::{Read, Write};

use super::KnnModel;
use crate::codec::{self, ByteReader, ByteWriter};
use crate::error::{Error, Result};
use crate::feature_store::MAX_CLASSES;
use crate::preprocess::{NormalizationStats, PcaTransform};

pub const KNNM_MAGIC: &[u8; 4] = b"KNNM";
pub const KNNM_VERSION: u32 = 1;

const FLAG_PCA: u32 = 1;

pub fn write_knnm<W: Write>(model: &KnnModel, sink: W) -> Result<u64> {
    let mut w = ByteWriter::new(sink);
    w.bytes(KNNM_MAGIC)?;
    w.u32(KNNM_VERSION)?;
    w.u32(if model.use_pca() { FLAG_PCA } else { 0 })?;
    w.u32(codec::count_u32(model.class_names().len(), "class count")?)?;
    codec::write_class_names(&mut w, model.class_names())?;
    w.u32(codec::count_u32(model.raw_dim(), "raw dimension")?)?;
    for &v in model.stats().min_vals() {
        w.f64(v)?;
    }
    for &v in model.stats().max_vals() {
        w.f64(v)?;
    }
    if let Some(pca) = model.pca() {
        w.u32(codec::count_u32(pca.n_components(), "component count")?)?;
        for &v in pca.mean().iter().chain(pca.components()).chain(pca.explained_variance_ratio()) {
            w.f64(v)?;
        }
    }
    w.u32(codec::count_u32(model.len(), "database size")?)?;
    for &l in model.labels() {
        w.u16(l)?;
    }
    for &v in model.database() {
        w.f32(v)?;
    }
    w.flush()?;
    Ok(w.written())
}

pub fn read_knnm<R: Read>(source: R) -> Result<KnnModel> {
    let mut r = ByteReader::new(source);
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic, "magic")
        .map_err(|_| Error::Format("not a KNNM file".into()))?;
    if &magic != KNNM_MAGIC {
        return Err(Error::Format("not a KNNM file".into()));
    }
    let version = r.u32("version")?;
    if version != KNNM_VERSION {
        return Err(Error::UnsupportedVersion {
            format: "KNNM",
            version,
        });
    }
    let at = r.offset();
    let flags = r.u32("flags")?;
    if flags & !FLAG_PCA != 0 {
        return Err(Error::corrupt(at, format!("unknown flag bits {flags:#x}")));
    }
    let at = r.offset();
    let n_classes = r.u32("class count")? as usize;
    if n_classes == 0 || n_classes > MAX_CLASSES {
        return Err(Error::corrupt(at, format!("class count {n_classes} out of range")));
    }
    let class_names = codec::read_class_names(&mut r, n_classes)?;

    let at = r.offset();
    let raw_dim = r.u32("raw dimension")? as usize;
    if raw_dim == 0 {
        return Err(Error::corrupt(at, "raw dimension is zero"));
    }
    let at = r.offset();
    let min_vals = read_f64s(&mut r, raw_dim, "minimum")?;
    let max_vals = read_f64s(&mut r, raw_dim, "maximum")?;
    let stats = NormalizationStats::from_parts(min_vals, max_vals)
        .map_err(|e| Error::corrupt(at, e.to_string()))?;

    let pca = if flags & FLAG_PCA != 0 {
        let at = r.offset();
        let m = r.u32("component count")? as usize;
        if m == 0 || m > raw_dim {
            return Err(Error::corrupt(at, format!("component count {m} out of range")));
        }
        let mean = read_f64s(&mut r, raw_dim, "PCA mean")?;
        let components = read_f64s(&mut r, m * raw_dim, "PCA components")?;
        let ratios = read_f64s(&mut r, m, "explained-variance ratios")?;
        Some(
            PcaTransform::from_parts(mean, components, ratios)
                .map_err(|e| Error::corrupt(at, e.to_string()))?,
        )
    } else {
        None
    };
    let width = pca.as_ref().map_or(raw_dim, PcaTransform::n_components);

    let at = r.offset();
    let n = r.u32("database size")? as usize;
    if n == 0 {
        return Err(Error::corrupt(at, "database is empty"));
    }
    let mut labels = Vec::with_capacity(n.min(1 << 20));
    for _ in 0..n {
        let at = r.offset();
        let l = r.u16("labels")?;
        if l as usize >= n_classes {
            return Err(Error::corrupt(
                at,
                format!("label {l} out of range for {n_classes} classes"),
            ));
        }
        labels.push(l);
    }
    let total = n
        .checked_mul(width)
        .ok_or_else(|| Error::corrupt(at, "database size overflows"))?;
    let mut database = Vec::with_capacity(total.min(1 << 24));
    for _ in 0..total {
        database.push(r.finite_f32("database")?);
    }
    r.expect_eof()?;

    KnnModel::from_parts(stats, pca, database, labels, class_names)
        .map_err(|e| Error::corrupt(r.offset(), e.to_string()))
}

fn read_f64s<R: Read>(r: &mut ByteReader<R>, count: usize, what: &str) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(count.min(1 << 24));
    for _ in 0..count {
        out.push(r.finite_f64(what)?);
    }
    Ok(out)
}
