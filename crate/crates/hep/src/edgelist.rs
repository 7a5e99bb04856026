//! Binary edge lists: consecutive `(u, v)` records of little-endian ids, 4 or
//! 8 bytes each, no header. Also reads whitespace-separated text lists for
//! conversion.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::marker::PhantomData;
use std::path::{Path, PathBuf};

use hep_core::{EdgeSource, VertexId};

use crate::error::FileError;

const BUF_BYTES: usize = 1 << 20;

#[inline]
pub(crate) fn decode_id<I: VertexId>(bytes: &[u8]) -> I {
    let mut wide = [0u8; 8];
    wide[..I::BYTES].copy_from_slice(&bytes[..I::BYTES]);
    I::try_from_u64(u64::from_le_bytes(wide)).expect("id decoded at its own width")
}

#[inline]
pub(crate) fn encode_id<I: VertexId>(id: I, out: &mut [u8]) {
    out[..I::BYTES].copy_from_slice(&id.to_u64().to_le_bytes()[..I::BYTES]);
}

/// Record count of a headerless file of fixed-width records, or an error
/// naming the offset of a trailing partial record.
pub(crate) fn record_count(path: &Path, body_offset: u64, record_bytes: usize) -> Result<u64, FileError> {
    let len = std::fs::metadata(path).map_err(|e| FileError::io(path, e))?.len();
    if len < body_offset {
        return Err(FileError::format(
            path,
            format!("file is {len} bytes, shorter than its {body_offset}-byte header"),
        ));
    }
    let body = len - body_offset;
    let rem = body % record_bytes as u64;
    if rem != 0 {
        return Err(FileError::PartialRecord {
            path: path.to_path_buf(),
            offset: len - rem,
            len,
            record_bytes,
        });
    }
    Ok(body / record_bytes as u64)
}

/// Edge list on disk, read sequentially on every pass.
#[derive(Debug, Clone)]
pub struct EdgeFile<I> {
    path: PathBuf,
    records: u64,
    _id: PhantomData<I>,
}

impl<I: VertexId> EdgeFile<I> {
    pub fn open(path: impl AsRef<Path>) -> Result<Self, FileError> {
        let path = path.as_ref().to_path_buf();
        let records = record_count(&path, 0, 2 * I::BYTES)?;
        Ok(EdgeFile {
            path,
            records,
            _id: PhantomData,
        })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn len(&self) -> u64 {
        self.records
    }

    pub fn is_empty(&self) -> bool {
        self.records == 0
    }

    pub fn read_all(&self) -> Result<Vec<(I, I)>, FileError> {
        let mut out = Vec::with_capacity(self.records as usize);
        for e in EdgeReader::<I>::open(&self.path, 0, self.records)? {
            out.push(e?);
        }
        Ok(out)
    }
}

impl<I: VertexId> EdgeSource<I> for EdgeFile<I> {
    type Error = FileError;
    type Edges<'a> = EdgeReader<I>;

    fn edges(&mut self) -> Result<EdgeReader<I>, FileError> {
        // the file may have changed since open
        let records = record_count(&self.path, 0, 2 * I::BYTES)?;
        EdgeReader::open(&self.path, 0, records)
    }
}

/// Iterator over the records of an edge file.
pub struct EdgeReader<I> {
    path: PathBuf,
    reader: BufReader<File>,
    remaining: u64,
    _id: PhantomData<I>,
}

impl<I: VertexId> EdgeReader<I> {
    pub(crate) fn open(path: &Path, skip_bytes: u64, records: u64) -> Result<Self, FileError> {
        let mut file = File::open(path).map_err(|e| FileError::io(path, e))?;
        if skip_bytes > 0 {
            use std::io::{Seek, SeekFrom};
            file.seek(SeekFrom::Start(skip_bytes))
                .map_err(|e| FileError::io(path, e))?;
        }
        Ok(EdgeReader {
            path: path.to_path_buf(),
            reader: BufReader::with_capacity(BUF_BYTES, file),
            remaining: records,
            _id: PhantomData,
        })
    }
}

impl<I: VertexId> Iterator for EdgeReader<I> {
    type Item = Result<(I, I), FileError>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.remaining == 0 {
            return None;
        }
        self.remaining -= 1;
        let mut buf = [0u8; 16];
        let rec = &mut buf[..2 * I::BYTES];
        if let Err(e) = self.reader.read_exact(rec) {
            self.remaining = 0;
            return Some(Err(FileError::io(&self.path, e)));
        }
        Some(Ok((decode_id(rec), decode_id(&rec[I::BYTES..]))))
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.remaining as usize;
        (n, Some(n))
    }
}

/// Buffered writer of binary edge records.
pub struct EdgeWriter<I> {
    path: PathBuf,
    writer: BufWriter<File>,
    written: u64,
    _id: PhantomData<I>,
}

impl<I: VertexId> EdgeWriter<I> {
    pub fn create(path: impl AsRef<Path>) -> Result<Self, FileError> {
        let path = path.as_ref().to_path_buf();
        let file = File::create(&path).map_err(|e| FileError::io(&path, e))?;
        Ok(EdgeWriter {
            writer: BufWriter::with_capacity(BUF_BYTES, file),
            path,
            written: 0,
            _id: PhantomData,
        })
    }

    pub fn write(&mut self, u: I, v: I) -> Result<(), FileError> {
        let mut buf = [0u8; 16];
        encode_id(u, &mut buf);
        encode_id(v, &mut buf[I::BYTES..]);
        self.writer
            .write_all(&buf[..2 * I::BYTES])
            .map_err(|e| FileError::io(&self.path, e))?;
        self.written += 1;
        Ok(())
    }

    pub fn written(&self) -> u64 {
        self.written
    }

    pub fn finish(mut self) -> Result<u64, FileError> {
        self.writer.flush().map_err(|e| FileError::io(&self.path, e))?;
        Ok(self.written)
    }
}

pub fn write_edge_list<I: VertexId>(
    path: impl AsRef<Path>,
    edges: impl IntoIterator<Item = (I, I)>,
) -> Result<u64, FileError> {
    let mut w = EdgeWriter::create(path)?;
    for (u, v) in edges {
        w.write(u, v)?;
    }
    w.finish()
}

/// Parses a text edge list: one `u v` pair per line, separated by
/// whitespace or a comma. Blank lines and lines starting with `#` or `%` are
/// skipped.
pub fn read_text_edge_list<I: VertexId>(path: impl AsRef<Path>) -> Result<Vec<(I, I)>, FileError> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| FileError::io(path, e))?;
    let mut edges = Vec::new();
    for (lineno, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| FileError::io(path, e))?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with('%') {
            continue;
        }
        let parse_err = |msg: String| FileError::Parse {
            path: path.to_path_buf(),
            line: lineno as u64 + 1,
            msg,
        };
        let mut fields = line
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|f| !f.is_empty());
        let mut id = || -> Result<I, FileError> {
            let field = fields
                .next()
                .ok_or_else(|| parse_err("expected two vertex ids".into()))?;
            let raw: u64 = field
                .parse()
                .map_err(|_| parse_err(format!("invalid vertex id {field:?}")))?;
            I::try_from_u64(raw).ok_or_else(|| parse_err(format!("vertex id {raw} does not fit {} bytes", I::BYTES)))
        };
        let u = id()?;
        let v = id()?;
        edges.push((u, v));
    }
    Ok(edges)
}
