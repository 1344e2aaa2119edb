use rustc_hash::FxHashMap;

use crate::seed::Sampler;

/// The set of values in `[0, size)` not yet used, stored as a virtual
/// array that starts as the identity and shrinks by swap-remove.
///
/// Only positions that differ from the identity are materialized, so memory
/// is proportional to the number of removals, not to `size`.
#[derive(Clone, Debug)]
pub(crate) struct SparsePool {
    remaining: u128,
    // position -> value, where it differs from the identity
    slot: FxHashMap<u64, u64>,
    // value -> position, where it differs from the identity
    position: FxHashMap<u64, u64>,
}

impl SparsePool {
    pub fn new(size: u128) -> Self {
        debug_assert!(size <= 1 << 64);
        Self {
            remaining: size,
            slot: FxHashMap::default(),
            position: FxHashMap::default(),
        }
    }

    pub fn remaining(&self) -> u128 {
        self.remaining
    }

    fn value_at(&self, pos: u64) -> u64 {
        self.slot.get(&pos).copied().unwrap_or(pos)
    }

    fn position_of(&self, value: u64) -> u64 {
        self.position.get(&value).copied().unwrap_or(value)
    }

    pub fn contains(&self, value: u64) -> bool {
        let pos = self.position_of(value);
        u128::from(pos) < self.remaining && self.value_at(pos) == value
    }

    fn set(&mut self, pos: u64, value: u64) {
        if pos == value {
            self.slot.remove(&pos);
            self.position.remove(&value);
        } else {
            self.slot.insert(pos, value);
            self.position.insert(value, pos);
        }
    }

    fn take_at(&mut self, pos: u64) -> u64 {
        debug_assert!(u128::from(pos) < self.remaining);
        let value = self.value_at(pos);
        let last = (self.remaining - 1) as u64;
        if pos != last {
            let moved = self.value_at(last);
            self.set(pos, moved);
        }
        self.slot.remove(&last);
        self.position.remove(&value);
        self.remaining -= 1;
        value
    }

    /// Removes and returns a uniformly chosen unused value.
    pub fn draw(&mut self, sampler: &mut impl Sampler) -> u64 {
        assert!(self.remaining > 0, "draw from an exhausted pool");
        let pos = sampler.below(self.remaining) as u64;
        self.take_at(pos)
    }

    /// Removes a specific value. The caller guarantees it is still unused.
    pub fn remove(&mut self, value: u64) {
        debug_assert!(self.contains(value), "value {value} already used");
        let pos = self.position_of(value);
        self.take_at(pos);
    }

    #[cfg(test)]
    pub fn overrides(&self) -> usize {
        self.slot.len() + self.position.len()
    }
}
