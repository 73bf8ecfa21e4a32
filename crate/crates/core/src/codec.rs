//! Little-endian primitives shared by the FSET and KNNM containers.
//!
//! Both wrappers track the current byte offset so that failures can be
//! reported against a position in the stream.

use std::io::{self, Read, Write};

use crate::error::{Error, Result};

pub(crate) struct ByteReader<R> {
    inner: R,
    offset: u64,
}

impl<R: Read> ByteReader<R> {
    pub fn new(inner: R) -> Self {
        Self { inner, offset: 0 }
    }

    pub fn offset(&self) -> u64 {
        self.offset
    }

    pub fn read_exact(&mut self, buf: &mut [u8], what: &str) -> Result<()> {
        match self.inner.read_exact(buf) {
            Ok(()) => {
                self.offset += buf.len() as u64;
                Ok(())
            }
            Err(e) if e.kind() == io::ErrorKind::UnexpectedEof => Err(Error::corrupt(
                self.offset,
                format!("truncated stream while reading {what}"),
            )),
            Err(source) => Err(Error::Io {
                offset: self.offset,
                source,
            }),
        }
    }

    pub fn u16(&mut self, what: &str) -> Result<u16> {
        let mut b = [0u8; 2];
        self.read_exact(&mut b, what)?;
        Ok(u16::from_le_bytes(b))
    }

    pub fn u32(&mut self, what: &str) -> Result<u32> {
        let mut b = [0u8; 4];
        self.read_exact(&mut b, what)?;
        Ok(u32::from_le_bytes(b))
    }

    pub fn f32(&mut self, what: &str) -> Result<f32> {
        let mut b = [0u8; 4];
        self.read_exact(&mut b, what)?;
        Ok(f32::from_le_bytes(b))
    }

    pub fn f64(&mut self, what: &str) -> Result<f64> {
        let mut b = [0u8; 8];
        self.read_exact(&mut b, what)?;
        Ok(f64::from_le_bytes(b))
    }

    pub fn finite_f32(&mut self, what: &str) -> Result<f32> {
        let at = self.offset;
        let v = self.f32(what)?;
        if !v.is_finite() {
            return Err(Error::corrupt(at, format!("non-finite value in {what}")));
        }
        Ok(v)
    }

    pub fn finite_f64(&mut self, what: &str) -> Result<f64> {
        let at = self.offset;
        let v = self.f64(what)?;
        if !v.is_finite() {
            return Err(Error::corrupt(at, format!("non-finite value in {what}")));
        }
        Ok(v)
    }

    /// Errors unless the underlying stream is exhausted.
    pub fn expect_eof(&mut self) -> Result<()> {
        let mut probe = [0u8; 1];
        loop {
            match self.inner.read(&mut probe) {
                Ok(0) => return Ok(()),
                Ok(_) => return Err(Error::corrupt(self.offset, "trailing data after payload")),
                Err(e) if e.kind() == io::ErrorKind::Interrupted => continue,
                Err(source) => {
                    return Err(Error::Io {
                        offset: self.offset,
                        source,
                    })
                }
            }
        }
    }
}

pub(crate) struct ByteWriter<W> {
    inner: W,
    offset: u64,
}

impl<W: Write> ByteWriter<W> {
    pub fn new(inner: W) -> Self {
        Self { inner, offset: 0 }
    }

    pub fn written(&self) -> u64 {
        self.offset
    }

    pub fn bytes(&mut self, buf: &[u8]) -> Result<()> {
        self.inner.write_all(buf).map_err(|source| Error::Io {
            offset: self.offset,
            source,
        })?;
        self.offset += buf.len() as u64;
        Ok(())
    }

    pub fn u16(&mut self, v: u16) -> Result<()> {
        self.bytes(&v.to_le_bytes())
    }

    pub fn u32(&mut self, v: u32) -> Result<()> {
        self.bytes(&v.to_le_bytes())
    }

    pub fn f32(&mut self, v: f32) -> Result<()> {
        self.bytes(&v.to_le_bytes())
    }

    pub fn f64(&mut self, v: f64) -> Result<()> {
        self.bytes(&v.to_le_bytes())
    }

    pub fn flush(&mut self) -> Result<()> {
        self.inner.flush().map_err(|source| Error::Io {
            offset: self.offset,
            source,
        })
    }
}

pub(crate) fn count_u32(n: usize, what: &str) -> Result<u32> {
    u32::try_from(n).map_err(|_| Error::InvalidData(format!("{what} {n} exceeds u32 range")))
}

/// Class table: `count` entries of (u16 byte length, UTF-8 bytes).
pub(crate) fn write_class_names<W: Write>(w: &mut ByteWriter<W>, names: &[String]) -> Result<()> {
    for name in names {
        let len = u16::try_from(name.len()).map_err(|_| {
            Error::InvalidData(format!("class name longer than 65535 bytes: {name:?}"))
        })?;
        w.u16(len)?;
        w.bytes(name.as_bytes())?;
    }
    Ok(())
}

pub(crate) fn read_class_names<R: Read>(r: &mut ByteReader<R>, count: usize) -> Result<Vec<String>> {
    let mut names: Vec<String> = Vec::with_capacity(count.min(1 << 16));
    for _ in 0..count {
        let at = r.offset();
        let len = r.u16("class name length")? as usize;
        let mut buf = vec![0u8; len];
        r.read_exact(&mut buf, "class name")?;
        let name = String::from_utf8(buf)
            .map_err(|_| Error::corrupt(at, "class name is not valid UTF-8"))?;
        if name.is_empty() {
            return Err(Error::corrupt(at, "empty class name"));
        }
        if names.contains(&name) {
            return Err(Error::corrupt(at, format!("duplicate class name {name:?}")));
        }
        names.push(name);
    }
    Ok(names)
}
