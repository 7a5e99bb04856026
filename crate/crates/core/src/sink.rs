use alloc::vec::Vec;

use crate::id::VertexId;

/// One assigned edge. `u` and `v` keep the orientation of the input record.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Record<I> {
    pub u: I,
    pub v: I,
    pub partition: u32,
}

/// Append-only consumer of edge assignments.
///
/// Assignment happens deep inside tight loops, so the call is infallible;
/// sinks backed by fallible storage keep the first error and surface it when
/// they are finished.
pub trait AssignmentSink<I: VertexId> {
    fn assign(&mut self, u: I, v: I, partition: u32);
}

impl<I: VertexId> AssignmentSink<I> for Vec<Record<I>> {
    #[inline]
    fn assign(&mut self, u: I, v: I, partition: u32) {
        self.push(Record { u, v, partition });
    }
}

impl<I: VertexId, S: AssignmentSink<I> + ?Sized> AssignmentSink<I> for &mut S {
    #[inline]
    fn assign(&mut self, u: I, v: I, partition: u32) {
        (**self).assign(u, v, partition)
    }
}

/// Wraps a sink and keeps per-partition record counts.
#[derive(Debug)]
pub struct CountingSink<S> {
    inner: S,
    counts: Vec<u64>,
}

impl<S> CountingSink<S> {
    pub fn new(inner: S, k: usize) -> Self {
        CountingSink {
            inner,
            counts: alloc::vec![0; k],
        }
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn into_parts(self) -> (S, Vec<u64>) {
        (self.inner, self.counts)
    }
}

impl<I: VertexId, S: AssignmentSink<I>> AssignmentSink<I> for CountingSink<S> {
    #[inline]
    fn assign(&mut self, u: I, v: I, partition: u32) {
        self.counts[partition as usize] += 1;
        self.inner.assign(u, v, partition);
    }
}

/// Discards records.
#[derive(Debug, Default, Clone, Copy)]
pub struct NullSink;

impl<I: VertexId> AssignmentSink<I> for NullSink {
    #[inline]
    fn assign(&mut self, _: I, _: I, _: u32) {}
}
