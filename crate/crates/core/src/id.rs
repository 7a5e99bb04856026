use core::fmt::Debug;
use core::hash::Hash;

/// Fixed-width unsigned vertex id as stored in edge lists and CSR arrays.
///
/// Index and size arrays of the pruned CSR use the same width, so the id type
/// also bounds the number of column entries.
pub trait VertexId: Copy + Ord + Hash + Debug + Default + Send + Sync + 'static {
    /// Width in bytes on disk and in memory.
    const BYTES: usize;

    fn index(self) -> usize;

    /// Converts a dense index back into an id. Callers guarantee it fits.
    fn from_index(index: usize) -> Self;

    fn try_from_u64(value: u64) -> Option<Self>;

    fn to_u64(self) -> u64;

    fn max_value() -> u64;
}

impl VertexId for u32 {
    const BYTES: usize = 4;

    #[inline]
    fn index(self) -> usize {
        self as usize
    }

    #[inline]
    fn from_index(index: usize) -> Self {
        debug_assert!(index <= u32::MAX as usize);
        index as u32
    }

    #[inline]
    fn try_from_u64(value: u64) -> Option<Self> {
        u32::try_from(value).ok()
    }

    #[inline]
    fn to_u64(self) -> u64 {
        self as u64
    }

    fn max_value() -> u64 {
        u32::MAX as u64
    }
}

impl VertexId for u64 {
    const BYTES: usize = 8;

    #[inline]
    fn index(self) -> usize {
        self as usize
    }

    #[inline]
    fn from_index(index: usize) -> Self {
        index as u64
    }

    #[inline]
    fn try_from_u64(value: u64) -> Option<Self> {
        Some(value)
    }

    #[inline]
    fn to_u64(self) -> u64 {
        self
    }

    fn max_value() -> u64 {
        u64::MAX
    }
}
