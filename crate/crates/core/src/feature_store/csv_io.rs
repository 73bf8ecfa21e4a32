//! CSV interchange: a `label,f0,f1,...` header followed by one row per vector.

use std::io::{Read, Write};

use super::{ClassId, FeatureSet, MAX_CLASSES};
use crate::error::{Error, Result};

/// Parses labeled vectors from CSV. Class indices are assigned in order of
/// first appearance; values are rounded to the nearest `f32`.
pub fn import_csv<R: Read>(source: R) -> Result<FeatureSet> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(source);

    let header = reader.headers().map_err(csv_error)?.clone();
    if header.is_empty() || &header[0] != "label" {
        return Err(Error::Format(
            "line 1: header must start with a `label` column".into(),
        ));
    }
    let dim = header.len() - 1;
    if dim == 0 {
        return Err(Error::Format("line 1: header declares no feature columns".into()));
    }

    let mut class_names: Vec<String> = Vec::new();
    let mut labels: Vec<ClassId> = Vec::new();
    let mut vectors: Vec<f32> = Vec::new();
    let mut record = csv::StringRecord::new();
    while reader.read_record(&mut record).map_err(csv_error)? {
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != header.len() {
            return Err(Error::Format(format!(
                "line {line}: expected {} fields, found {}",
                header.len(),
                record.len()
            )));
        }
        let name = &record[0];
        if name.is_empty() {
            return Err(Error::Format(format!("line {line}: empty label")));
        }
        let class = match class_names.iter().position(|c| c == name) {
            Some(c) => c,
            None => {
                if class_names.len() == MAX_CLASSES {
                    return Err(Error::Format(format!(
                        "line {line}: more than {MAX_CLASSES} classes"
                    )));
                }
                class_names.push(name.to_string());
                class_names.len() - 1
            }
        };
        labels.push(class as ClassId);
        for (col, field) in record.iter().enumerate().skip(1) {
            let value: f32 = field.parse().map_err(|_| {
                Error::Format(format!(
                    "line {line}, column {}: cannot parse {field:?} as a number",
                    col + 1
                ))
            })?;
            if !value.is_finite() {
                return Err(Error::Format(format!(
                    "line {line}, column {}: non-finite value {field:?}",
                    col + 1
                )));
            }
            vectors.push(value);
        }
    }
    if labels.is_empty() {
        return Err(Error::Format("no vectors".into()));
    }
    FeatureSet::new(vectors, dim, labels, class_names)
}

/// Writes `set` in the layout accepted by [`import_csv`]. Values use the
/// shortest decimal form that parses back to the same `f32`.
pub fn export_csv<W: Write>(set: &FeatureSet, sink: W) -> Result<()> {
    let mut writer = csv::Writer::from_writer(sink);
    let mut header = Vec::with_capacity(set.dim() + 1);
    header.push("label".to_string());
    header.extend((0..set.dim()).map(|j| format!("f{j}")));
    writer.write_record(&header).map_err(csv_error)?;

    let mut fields = Vec::with_capacity(set.dim() + 1);
    for (i, row) in set.rows().enumerate() {
        fields.clear();
        fields.push(set.class_name(set.label(i)).to_string());
        fields.extend(row.iter().map(|v| v.to_string()));
        writer.write_record(&fields).map_err(csv_error)?;
    }
    writer.flush().map_err(|source| Error::Io { offset: 0, source })?;
    Ok(())
}

fn csv_error(e: csv::Error) -> Error {
    let line = e.position().map(|p| p.line());
    match e.into_kind() {
        csv::ErrorKind::Io(source) => Error::Io {
            offset: 0,
            source,
        },
        kind => match line {
            Some(line) => Error::Format(format!("line {line}: {kind:?}")),
            None => Error::Format(format!("{kind:?}")),
        },
    }
}
