//! Binary min-heap of external degrees with a position table for
//! decrease-key.

use alloc::vec;
use alloc::vec::Vec;

const ABSENT: usize = usize::MAX;

/// Min-heap over `(external degree, vertex)` pairs.
///
/// Ordering is lexicographic, so among equal keys the lower vertex id comes
/// out first. `positions[v]` holds the slot of `v` in `entries`, or `ABSENT`.
#[derive(Clone, Debug)]
pub struct ExternalDegreeHeap {
    entries: Vec<(u64, usize)>,
    positions: Vec<usize>,
}

impl ExternalDegreeHeap {
    pub fn new(num_vertices: usize) -> Self {
        ExternalDegreeHeap {
            entries: Vec::new(),
            positions: vec![ABSENT; num_vertices],
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    #[inline]
    pub fn contains(&self, v: usize) -> bool {
        self.positions[v] != ABSENT
    }

    pub fn key(&self, v: usize) -> Option<u64> {
        match self.positions[v] {
            ABSENT => None,
            slot => Some(self.entries[slot].0),
        }
    }

    pub fn peek(&self) -> Option<(usize, u64)> {
        self.entries.first().map(|&(k, v)| (v, k))
    }

    pub fn push(&mut self, v: usize, key: u64) {
        debug_assert!(!self.contains(v), "vertex {v} already in heap");
        let slot = self.entries.len();
        self.entries.push((key, v));
        self.positions[v] = slot;
        self.sift_up(slot);
    }

    pub fn pop(&mut self) -> Option<(usize, u64)> {
        let last = self.entries.len().checked_sub(1)?;
        self.swap(0, last);
        let (key, v) = self.entries.pop().unwrap();
        self.positions[v] = ABSENT;
        if !self.entries.is_empty() {
            self.sift_down(0);
        }
        Some((v, key))
    }

    /// Decrements the key of `v` by one.
    pub fn decrement(&mut self, v: usize) {
        let slot = self.positions[v];
        debug_assert!(slot != ABSENT);
        let key = &mut self.entries[slot].0;
        debug_assert!(*key > 0, "external degree underflow for {v}");
        *key -= 1;
        self.sift_up(slot);
    }

    /// Removes all entries; cost is proportional to the current size.
    pub fn clear(&mut self) {
        for &(_, v) in &self.entries {
            self.positions[v] = ABSENT;
        }
        self.entries.clear();
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, u64)> + '_ {
        self.entries.iter().map(|&(k, v)| (v, k))
    }

    /// Bytes of the heap array at its current capacity plus the position table.
    pub fn bytes(&self) -> usize {
        self.entries.capacity() * core::mem::size_of::<(u64, usize)>()
            + self.positions.len() * core::mem::size_of::<usize>()
    }

    fn swap(&mut self, a: usize, b: usize) {
        self.entries.swap(a, b);
        self.positions[self.entries[a].1] = a;
        self.positions[self.entries[b].1] = b;
    }

    fn sift_up(&mut self, mut slot: usize) {
        while slot > 0 {
            let parent = (slot - 1) / 2;
            if self.entries[slot] < self.entries[parent] {
                self.swap(slot, parent);
                slot = parent;
            } else {
                break;
            }
        }
    }

    fn sift_down(&mut self, mut slot: usize) {
        let n = self.entries.len();
        loop {
            let left = 2 * slot + 1;
            if left >= n {
                break;
            }
            let right = left + 1;
            let child = if right < n && self.entries[right] < self.entries[left] {
                right
            } else {
                left
            };
            if self.entries[child] < self.entries[slot] {
                self.swap(slot, child);
                slot = child;
            } else {
                break;
            }
        }
    }

    #[cfg(test)]
    fn check(&self) {
        for (slot, &(_, v)) in self.entries.iter().enumerate() {
            assert_eq!(self.positions[v], slot);
            if slot > 0 {
                assert!(self.entries[(slot - 1) / 2] <= self.entries[slot]);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::collections::BTreeSet;
    use proptest::prelude::*;

    #[test]
    fn lower_id_wins_ties() {
        let mut h = ExternalDegreeHeap::new(10);
        h.push(7, 2);
        h.push(3, 2);
        h.push(5, 4);
        assert_eq!(h.pop(), Some((3, 2)));
        assert_eq!(h.pop(), Some((7, 2)));
        assert_eq!(h.pop(), Some((5, 4)));
        assert_eq!(h.pop(), None);
    }

    #[test]
    fn decrement_reorders() {
        let mut h = ExternalDegreeHeap::new(4);
        h.push(0, 3);
        h.push(1, 1);
        h.decrement(0);
        h.decrement(0);
        h.check();
        // keys now tie at 1; lower id first
        assert_eq!(h.pop(), Some((0, 1)));
        assert!(!h.contains(0));
    }

    #[test]
    fn clear_resets_positions() {
        let mut h = ExternalDegreeHeap::new(4);
        h.push(2, 1);
        h.push(3, 0);
        h.clear();
        assert!(h.is_empty());
        assert!(!h.contains(2) && !h.contains(3));
        h.push(2, 5);
        assert_eq!(h.key(2), Some(5));
    }

    #[derive(Debug, Clone)]
    enum Op {
        Push(usize, u64),
        Pop,
        Dec(usize),
    }

    fn op() -> impl Strategy<Value = Op> {
        prop_oneof![
            (0usize..32, 0u64..20).prop_map(|(v, k)| Op::Push(v, k)),
            Just(Op::Pop),
            (0usize..32).prop_map(Op::Dec),
        ]
    }

    proptest! {
        #[test]
        fn matches_ordered_set_model(ops in proptest::collection::vec(op(), 0..200)) {
            let mut h = ExternalDegreeHeap::new(32);
            let mut model: BTreeSet<(u64, usize)> = BTreeSet::new();
            let mut keys = [None::<u64>; 32];
            for op in ops {
                match op {
                    Op::Push(v, k) => if keys[v].is_none() {
                        h.push(v, k);
                        model.insert((k, v));
                        keys[v] = Some(k);
                    },
                    Op::Pop => {
                        let expect = model.pop_first().map(|(k, v)| (v, k));
                        if let Some((v, _)) = expect { keys[v] = None; }
                        prop_assert_eq!(h.pop(), expect);
                    }
                    Op::Dec(v) => if let Some(k) = keys[v] {
                        if k > 0 {
                            h.decrement(v);
                            model.remove(&(k, v));
                            model.insert((k - 1, v));
                            keys[v] = Some(k - 1);
                        }
                    },
                }
                h.check();
                prop_assert_eq!(h.len(), model.len());
            }
        }
    }
}
