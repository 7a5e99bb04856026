//! On-disk store for high-to-high edges, in the edge-list record format.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::marker::PhantomData;
use std::path::{Path, PathBuf};

use hep_core::pipeline::SpillStore;
use hep_core::{SpillSink, VertexId};

use crate::edgelist::{encode_id, EdgeReader};
use crate::error::FileError;

pub struct SpillFile<I> {
    path: PathBuf,
    writer: Option<BufWriter<File>>,
    count: u64,
    keep: bool,
    succeeded: bool,
    _id: PhantomData<I>,
}

impl<I: VertexId> SpillFile<I> {
    /// Creates (truncates) the spill file. With `keep == false` it is removed
    /// when dropped after [`SpillFile::mark_success`]; on failure it stays
    /// for inspection.
    pub fn create(path: impl AsRef<Path>, keep: bool) -> Result<Self, FileError> {
        let path = path.as_ref().to_path_buf();
        let file = File::create(&path).map_err(|e| FileError::io(&path, e))?;
        Ok(SpillFile {
            writer: Some(BufWriter::with_capacity(1 << 20, file)),
            path,
            count: 0,
            keep,
            succeeded: false,
            _id: PhantomData,
        })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn len(&self) -> u64 {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    pub fn mark_success(&mut self) {
        self.succeeded = true;
    }

    fn flush(&mut self) -> Result<(), FileError> {
        if let Some(mut w) = self.writer.take() {
            w.flush().map_err(|e| FileError::io(&self.path, e))?;
        }
        Ok(())
    }
}

impl<I: VertexId> SpillSink<I> for SpillFile<I> {
    type Error = FileError;

    fn push(&mut self, u: I, v: I) -> Result<(), FileError> {
        let w = self
            .writer
            .as_mut()
            .ok_or_else(|| FileError::format(&self.path, "spill file already sealed for replay"))?;
        let mut buf = [0u8; 16];
        encode_id(u, &mut buf);
        encode_id(v, &mut buf[I::BYTES..]);
        w.write_all(&buf[..2 * I::BYTES])
            .map_err(|e| FileError::io(&self.path, e))?;
        self.count += 1;
        Ok(())
    }
}

impl<I: VertexId> SpillStore<I> for SpillFile<I> {
    type Replay<'a> = EdgeReader<I>;

    fn replay(&mut self) -> Result<EdgeReader<I>, FileError> {
        self.flush()?;
        EdgeReader::open(&self.path, 0, self.count)
    }
}

impl<I> Drop for SpillFile<I> {
    fn drop(&mut self) {
        if self.succeeded && !self.keep {
            self.writer = None;
            let _ = std::fs::remove_file(&self.path);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn replay_and_cleanup() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("spill.bin");
        {
            let mut s = SpillFile::<u32>::create(&p, false).unwrap();
            s.push(1, 2).unwrap();
            s.push(3, 4).unwrap();
            let got: Vec<_> = s.replay().unwrap().map(Result::unwrap).collect();
            assert_eq!(got, [(1, 2), (3, 4)]);
            assert!(s.push(5, 6).is_err());
            s.mark_success();
        }
        assert!(!p.exists());
        {
            let mut s = SpillFile::<u32>::create(&p, false).unwrap();
            s.push(1, 2).unwrap();
        }
        assert!(p.exists(), "kept after an unsuccessful run");
        {
            let mut s = SpillFile::<u64>::create(&p, true).unwrap();
            s.push(1, 2).unwrap();
            s.replay().unwrap();
            s.mark_success();
        }
        assert_eq!(std::fs::metadata(&p).unwrap().len(), 16);
    }
}
