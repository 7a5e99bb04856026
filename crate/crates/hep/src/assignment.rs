//! Assignment files.
//!
//! Layout, little-endian:
//!
//! ```text
//! magic     8 bytes  "HEPASSGN"
//! version   u32      1
//! k         u32
//! id_bytes  u32      4 or 8
//! records   u64
//! then `records` times: u, v (id_bytes each), partition (u32)
//! ```

use std::fs::File;
use std::io::{self, BufWriter, Read, Seek, SeekFrom, Write};
use std::marker::PhantomData;
use std::path::{Path, PathBuf};

use hep_core::{AssignmentSink, Record, VertexId};

use crate::edgelist::{decode_id, encode_id, record_count};
use crate::error::FileError;

pub const MAGIC: [u8; 8] = *b"HEPASSGN";
pub const VERSION: u32 = 1;
pub const HEADER_BYTES: u64 = 28;
const COUNT_OFFSET: u64 = 20;

pub const fn record_bytes(id_bytes: usize) -> usize {
    2 * id_bytes + 4
}

/// Streams records to disk. Write errors are kept and reported by
/// [`AssignmentWriter::finish`]; later records are dropped.
pub struct AssignmentWriter<I> {
    path: PathBuf,
    writer: BufWriter<File>,
    written: u64,
    error: Option<io::Error>,
    _id: PhantomData<I>,
}

impl<I: VertexId> AssignmentWriter<I> {
    pub fn create(path: impl AsRef<Path>, k: u32) -> Result<Self, FileError> {
        let path = path.as_ref().to_path_buf();
        let file = File::create(&path).map_err(|e| FileError::io(&path, e))?;
        let mut writer = BufWriter::with_capacity(1 << 20, file);
        write_header(&mut writer, k, I::BYTES as u32, 0).map_err(|e| FileError::io(&path, e))?;
        Ok(AssignmentWriter {
            path,
            writer,
            written: 0,
            error: None,
            _id: PhantomData,
        })
    }

    pub fn written(&self) -> u64 {
        self.written
    }

    /// Flushes and patches the record count into the header.
    pub fn finish(mut self) -> Result<u64, FileError> {
        if let Some(e) = self.error.take() {
            return Err(FileError::io(&self.path, e));
        }
        let path = self.path.clone();
        let written = self.written;
        let mut file = self
            .writer
            .into_inner()
            .map_err(|e| FileError::io(&path, e.into_error()))?;
        file.seek(SeekFrom::Start(COUNT_OFFSET))
            .and_then(|_| file.write_all(&written.to_le_bytes()))
            .and_then(|_| file.flush())
            .map_err(|e| FileError::io(&path, e))?;
        Ok(written)
    }
}

impl<I: VertexId> AssignmentSink<I> for AssignmentWriter<I> {
    fn assign(&mut self, u: I, v: I, partition: u32) {
        if self.error.is_some() {
            return;
        }
        let mut buf = [0u8; 20];
        encode_id(u, &mut buf);
        encode_id(v, &mut buf[I::BYTES..]);
        let p = 2 * I::BYTES;
        buf[p..p + 4].copy_from_slice(&partition.to_le_bytes());
        match self.writer.write_all(&buf[..p + 4]) {
            Ok(()) => self.written += 1,
            Err(e) => self.error = Some(e),
        }
    }
}

fn write_header(w: &mut impl Write, k: u32, id_bytes: u32, records: u64) -> io::Result<()> {
    w.write_all(&MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&k.to_le_bytes())?;
    w.write_all(&id_bytes.to_le_bytes())?;
    w.write_all(&records.to_le_bytes())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Header {
    pub version: u32,
    pub k: u32,
    pub id_bytes: u32,
    pub records: u64,
}

pub fn read_header(path: impl AsRef<Path>) -> Result<Header, FileError> {
    let path = path.as_ref();
    let mut file = File::open(path).map_err(|e| FileError::io(path, e))?;
    let mut buf = [0u8; HEADER_BYTES as usize];
    file.read_exact(&mut buf).map_err(|e| {
        if e.kind() == io::ErrorKind::UnexpectedEof {
            FileError::format(path, "truncated header")
        } else {
            FileError::io(path, e)
        }
    })?;
    if buf[..8] != MAGIC {
        return Err(FileError::format(path, "not an assignment file (bad magic)"));
    }
    let word = |at: usize| u32::from_le_bytes(buf[at..at + 4].try_into().unwrap());
    let header = Header {
        version: word(8),
        k: word(12),
        id_bytes: word(16),
        records: u64::from_le_bytes(buf[20..28].try_into().unwrap()),
    };
    if header.version != VERSION {
        return Err(FileError::format(
            path,
            format!("unsupported version {}", header.version),
        ));
    }
    if header.id_bytes != 4 && header.id_bytes != 8 {
        return Err(FileError::format(
            path,
            format!("unsupported id width {}", header.id_bytes),
        ));
    }
    let body = record_count(path, HEADER_BYTES, record_bytes(header.id_bytes as usize))?;
    if body != header.records {
        return Err(FileError::format(
            path,
            format!("header declares {} records, file holds {body}", header.records),
        ));
    }
    Ok(header)
}

/// Reads every record; the id type must match the header's width.
pub fn read_records<I: VertexId>(path: impl AsRef<Path>) -> Result<(Header, Vec<Record<I>>), FileError> {
    let path = path.as_ref();
    let header = read_header(path)?;
    if header.id_bytes as usize != I::BYTES {
        return Err(FileError::format(
            path,
            format!("file uses {}-byte ids, expected {}", header.id_bytes, I::BYTES),
        ));
    }
    let mut file = File::open(path).map_err(|e| FileError::io(path, e))?;
    file.seek(SeekFrom::Start(HEADER_BYTES))
        .map_err(|e| FileError::io(path, e))?;
    let mut reader = io::BufReader::with_capacity(1 << 20, file);
    let width = record_bytes(I::BYTES);
    let mut records = Vec::with_capacity(header.records as usize);
    let mut buf = [0u8; 20];
    for _ in 0..header.records {
        reader
            .read_exact(&mut buf[..width])
            .map_err(|e| FileError::io(path, e))?;
        let p = 2 * I::BYTES;
        records.push(Record {
            u: decode_id(&buf),
            v: decode_id(&buf[I::BYTES..]),
            partition: u32::from_le_bytes(buf[p..p + 4].try_into().unwrap()),
        });
    }
    Ok((header, records))
}
