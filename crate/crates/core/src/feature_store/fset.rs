//! FSET binary container, version 1.
//!
//! All integers are little-endian.
//!
//! ```text
//! 0..4    magic "FSET"
//! 4..8    u32 version (1)
//! 8..12   u32 n_vectors
//! 12..16  u32 dim
//! 16..20  u32 n_classes
//!         class table: n_classes x (u16 byte length, UTF-8 bytes)
//!         labels:      n_vectors x u16 class index
//!         data:        n_vectors x dim x f32, row-major
//! ```

use std::io::{Read, Write};

use super::{ClassId, FeatureSet};
use crate::codec::{self, ByteReader, ByteWriter};
use crate::error::{Error, Result};

pub const FSET_MAGIC: &[u8; 4] = b"FSET";
pub const FSET_VERSION: u32 = 1;

/// Serializes `set` and returns the number of bytes written.
pub fn write_fset<W: Write>(set: &FeatureSet, sink: W) -> Result<u64> {
    let mut w = ByteWriter::new(sink);
    w.bytes(FSET_MAGIC)?;
    w.u32(FSET_VERSION)?;
    w.u32(codec::count_u32(set.len(), "vector count")?)?;
    w.u32(codec::count_u32(set.dim(), "dimension")?)?;
    w.u32(codec::count_u32(set.n_classes(), "class count")?)?;
    codec::write_class_names(&mut w, set.class_names())?;
    for &label in set.labels() {
        w.u16(label)?;
    }
    for &v in set.as_slice() {
        w.f32(v)?;
    }
    w.flush()?;
    Ok(w.written())
}

/// Parses a complete FSET stream. Trailing bytes after the data block are
/// rejected.
pub fn read_fset<R: Read>(source: R) -> Result<FeatureSet> {
    let mut r = ByteReader::new(source);
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic, "magic")
        .map_err(|_| Error::Format("not an FSET file".into()))?;
    if &magic != FSET_MAGIC {
        return Err(Error::Format("not an FSET file".into()));
    }
    let version = r.u32("version")?;
    if version != FSET_VERSION {
        return Err(Error::UnsupportedVersion {
            format: "FSET",
            version,
        });
    }
    let header_at = r.offset();
    let n_vectors = r.u32("vector count")? as usize;
    let dim = r.u32("dimension")? as usize;
    let n_classes = r.u32("class count")? as usize;
    if n_vectors == 0 {
        return Err(Error::corrupt(header_at, "vector count is zero"));
    }
    if dim == 0 {
        return Err(Error::corrupt(header_at + 4, "dimension is zero"));
    }
    if n_classes == 0 || n_classes > super::MAX_CLASSES {
        return Err(Error::corrupt(
            header_at + 8,
            format!("class count {n_classes} outside 1..={}", super::MAX_CLASSES),
        ));
    }

    let class_names = codec::read_class_names(&mut r, n_classes)?;

    let mut labels: Vec<ClassId> = Vec::with_capacity(n_vectors.min(1 << 20));
    for _ in 0..n_vectors {
        let at = r.offset();
        let label = r.u16("labels")?;
        if label as usize >= n_classes {
            return Err(Error::corrupt(
                at,
                format!("label {label} out of range for {n_classes} classes"),
            ));
        }
        labels.push(label);
    }

    let total = n_vectors
        .checked_mul(dim)
        .ok_or_else(|| Error::corrupt(header_at, "vector count times dimension overflows"))?;
    let mut vectors = Vec::with_capacity(total.min(1 << 24));
    for _ in 0..total {
        vectors.push(r.finite_f32("vector data")?);
    }
    r.expect_eof()?;

    FeatureSet::new(vectors, dim, labels, class_names)
        .map_err(|e| Error::corrupt(r.offset(), e.to_string()))
}
