//! Binary container shared by every persisted table.
//!
//! Layout: an 8-byte magic tag, a little-endian `u64` format version, then
//! kind-specific header words (each 8 bytes, little-endian `u64` or `f64`),
//! then raw little-endian arrays. Readers reject a wrong tag or version,
//! which is how stale caches are detected.

use std::fs::File;
use std::io::{BufReader, BufWriter, ErrorKind, Read, Write};
use std::path::Path;

use crate::{Error, Result};

pub const FORMAT_VERSION: u64 = 1;

pub struct ContainerWriter<W: Write> {
    inner: W,
}

impl<W: Write> ContainerWriter<W> {
    pub fn new(mut inner: W, magic: &[u8; 8]) -> Result<Self> {
        inner.write_all(magic)?;
        inner.write_all(&FORMAT_VERSION.to_le_bytes())?;
        Ok(ContainerWriter { inner })
    }

    pub fn put_u64(&mut self, v: u64) -> Result<()> {
        self.inner.write_all(&v.to_le_bytes())?;
        Ok(())
    }

    pub fn put_f64(&mut self, v: f64) -> Result<()> {
        self.inner.write_all(&v.to_le_bytes())?;
        Ok(())
    }

    pub fn put_f64s(&mut self, values: &[f64]) -> Result<()> {
        let mut buf = Vec::with_capacity(values.len() * 8);
        for v in values {
            buf.extend_from_slice(&v.to_le_bytes());
        }
        self.inner.write_all(&buf)?;
        Ok(())
    }

    pub fn put_u32s(&mut self, values: &[u32]) -> Result<()> {
        let mut buf = Vec::with_capacity(values.len() * 4);
        for v in values {
            buf.extend_from_slice(&v.to_le_bytes());
        }
        self.inner.write_all(&buf)?;
        Ok(())
    }

    pub fn finish(mut self) -> Result<W> {
        self.inner.flush()?;
        Ok(self.inner)
    }
}

pub struct ContainerReader<R: Read> {
    inner: R,
}

impl<R: Read> ContainerReader<R> {
    pub fn open(mut inner: R, magic: &[u8; 8]) -> Result<Self> {
        let mut tag = [0u8; 8];
        inner.read_exact(&mut tag).map_err(|e| match e.kind() {
            ErrorKind::UnexpectedEof => Error::Format("missing tag".into()),
            _ => Error::Io(e),
        })?;
        if &tag != magic {
            return Err(Error::Format(format!(
                "expected tag {:?}, found {:?}",
                String::from_utf8_lossy(magic),
                String::from_utf8_lossy(&tag)
            )));
        }
        let mut reader = ContainerReader { inner };
        let version = reader.get_u64()?;
        if version != FORMAT_VERSION {
            return Err(Error::Format(format!(
                "unsupported version {version}, expected {FORMAT_VERSION}"
            )));
        }
        Ok(reader)
    }

    fn fill(&mut self, buf: &mut [u8]) -> Result<()> {
        self.inner.read_exact(buf).map_err(|e| match e.kind() {
            ErrorKind::UnexpectedEof => Error::Format("truncated payload".into()),
            _ => Error::Io(e),
        })
    }

    pub fn get_u64(&mut self) -> Result<u64> {
        let mut b = [0u8; 8];
        self.fill(&mut b)?;
        Ok(u64::from_le_bytes(b))
    }

    pub fn get_f64(&mut self) -> Result<f64> {
        let mut b = [0u8; 8];
        self.fill(&mut b)?;
        Ok(f64::from_le_bytes(b))
    }

    pub fn get_f64s(&mut self, len: usize) -> Result<Vec<f64>> {
        let mut raw = vec![0u8; len * 8];
        self.fill(&mut raw)?;
        Ok(raw
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
            .collect())
    }

    pub fn get_u32s(&mut self, len: usize) -> Result<Vec<u32>> {
        let mut raw = vec![0u8; len * 4];
        self.fill(&mut raw)?;
        Ok(raw
            .chunks_exact(4)
            .map(|c| u32::from_le_bytes(c.try_into().expect("4-byte chunk")))
            .collect())
    }

    /// Fails unless the stream is exhausted.
    pub fn expect_end(mut self) -> Result<()> {
        let mut probe = [0u8; 1];
        match self.inner.read(&mut probe)? {
            0 => Ok(()),
            _ => Err(Error::Format("trailing bytes after payload".into())),
        }
    }
}

/// Reads `path` with `read` if it exists and holds what `fits` expects;
/// otherwise builds the value and writes it (via a temporary file) so the
/// next call finds it. Malformed or mismatched files are replaced.
pub fn load_or_rebuild<T>(
    path: &Path,
    read: impl FnOnce(BufReader<File>) -> Result<T>,
    fits: impl FnOnce(&T) -> bool,
    build: impl FnOnce() -> Result<T>,
    write: impl FnOnce(&T, BufWriter<File>) -> Result<()>,
) -> Result<T> {
    if path.exists() {
        match read(BufReader::new(File::open(path)?)) {
            Ok(v) if fits(&v) => return Ok(v),
            Ok(_) | Err(Error::Format(_)) => {}
            Err(e) => return Err(e),
        }
    }
    let v = build()?;
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    let tmp = path.with_extension("tmp");
    write(&v, BufWriter::new(File::create(&tmp)?))?;
    std::fs::rename(&tmp, path)?;
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_words_and_arrays_survive_a_round_trip() {
        let mut w = ContainerWriter::new(Vec::new(), b"TESTTEST").unwrap();
        w.put_u64(42).unwrap();
        w.put_f64(-0.125).unwrap();
        w.put_f64s(&[1.5, f64::MIN_POSITIVE]).unwrap();
        w.put_u32s(&[7, u32::MAX]).unwrap();
        let bytes = w.finish().unwrap();
        assert_eq!(&bytes[..8], b"TESTTEST");
        assert_eq!(&bytes[8..16], &1u64.to_le_bytes());

        let mut r = ContainerReader::open(bytes.as_slice(), b"TESTTEST").unwrap();
        assert_eq!(r.get_u64().unwrap(), 42);
        assert_eq!(r.get_f64().unwrap(), -0.125);
        assert_eq!(r.get_f64s(2).unwrap(), vec![1.5, f64::MIN_POSITIVE]);
        assert_eq!(r.get_u32s(2).unwrap(), vec![7, u32::MAX]);
        r.expect_end().unwrap();
    }

    #[test]
    fn wrong_tag_or_version_is_rejected() {
        let bytes = ContainerWriter::new(Vec::new(), b"AAAAAAAA")
            .unwrap()
            .finish()
            .unwrap();
        assert!(matches!(
            ContainerReader::open(bytes.as_slice(), b"BBBBBBBB"),
            Err(Error::Format(_))
        ));
        let mut bumped = bytes.clone();
        bumped[8] = 9;
        assert!(matches!(
            ContainerReader::open(bumped.as_slice(), b"AAAAAAAA"),
            Err(Error::Format(_))
        ));
    }

    #[test]
    fn stale_or_truncated_files_are_rebuilt() {
        let dir = std::env::temp_dir().join(format!("friable-container-{}", std::process::id()));
        let path = dir.join("value.bin");
        let read = |r: BufReader<File>| {
            let mut c = ContainerReader::open(r, b"VALUEVAL")?;
            let v = c.get_u64()?;
            c.expect_end()?;
            Ok(v)
        };
        let write = |v: &u64, w: BufWriter<File>| {
            let mut c = ContainerWriter::new(w, b"VALUEVAL")?;
            c.put_u64(*v)?;
            c.finish()?.flush().map_err(Into::into)
        };
        let mut builds = 0;
        let mut get = |want: u64| {
            load_or_rebuild(&path, read, |v| *v == want, || { builds += 1; Ok(want) }, write).unwrap()
        };
        assert_eq!(get(5), 5);
        assert_eq!(get(5), 5);
        assert_eq!(get(6), 6);
        std::fs::write(&path, b"VALUEV").unwrap();
        assert_eq!(get(6), 6);
        assert_eq!(get(6), 6);
        assert_eq!(builds, 3);
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
