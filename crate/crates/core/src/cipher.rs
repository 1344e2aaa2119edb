//! The ideal block cipher: one independent uniform permutation of the block
//! space per key, sampled lazily.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pool::SparsePool;
use crate::seed::{Sampler, SeededSampler};

/// Largest key or block width; values are stored in a `u64`.
pub const MAX_BITS: u32 = 64;

/// Largest key and block width accepted by [`eager_sample`].
pub const EAGER_MAX_BITS: u32 = 8;

/// Key length `kappa` and block length `n` of a cipher in `BC(kappa, n)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CipherParams {
    kappa: u32,
    n: u32,
}

impl CipherParams {
    pub fn new(kappa: u32, n: u32) -> Result<Self> {
        if kappa == 0 || n == 0 {
            return Err(Error::InvalidParams(format!(
                "kappa and n must be at least 1 (got kappa={kappa}, n={n})"
            )));
        }
        if kappa > MAX_BITS || n > MAX_BITS {
            return Err(Error::InvalidParams(format!(
                "kappa and n must be at most {MAX_BITS} (got kappa={kappa}, n={n})"
            )));
        }
        Ok(Self { kappa, n })
    }

    pub fn kappa(&self) -> u32 {
        self.kappa
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// `2^kappa`.
    pub fn key_space(&self) -> u128 {
        1u128 << self.kappa
    }

    /// `2^n`.
    pub fn block_space(&self) -> u128 {
        1u128 << self.n
    }

    pub fn check_key(&self, k: u64) -> Result<()> {
        if u128::from(k) < self.key_space() {
            Ok(())
        } else {
            Err(Error::Domain {
                what: "key",
                value: k,
                bits: self.kappa,
            })
        }
    }

    pub fn check_block(&self, x: u64) -> Result<()> {
        if u128::from(x) < self.block_space() {
            Ok(())
        } else {
            Err(Error::Domain {
                what: "block",
                value: x,
                bits: self.n,
            })
        }
    }
}

/// A permutation of `[0, 2^n)` fixed one point at a time.
///
/// Each fresh point is drawn uniformly from the values still free on the
/// other side, which is exactly the conditional distribution of a uniform
/// permutation given the points fixed so far.
#[derive(Clone, Debug)]
pub struct LazyPermutation {
    forward: FxHashMap<u64, u64>,
    inverse: FxHashMap<u64, u64>,
    unused_range: SparsePool,
    unused_domain: SparsePool,
    domain_size: u128,
}

impl LazyPermutation {
    /// Empty permutation on `n`-bit blocks.
    pub fn new(n: u32) -> Self {
        assert!((1..=MAX_BITS).contains(&n));
        let domain_size = 1u128 << n;
        Self {
            forward: FxHashMap::default(),
            inverse: FxHashMap::default(),
            unused_range: SparsePool::new(domain_size),
            unused_domain: SparsePool::new(domain_size),
            domain_size,
        }
    }

    pub fn domain_size(&self) -> u128 {
        self.domain_size
    }

    /// Number of fixed points.
    pub fn len(&self) -> usize {
        self.forward.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forward.is_empty()
    }

    pub fn peek_forward(&self, x: u64) -> Option<u64> {
        self.forward.get(&x).copied()
    }

    pub fn peek_inverse(&self, y: u64) -> Option<u64> {
        self.inverse.get(&y).copied()
    }

    pub fn forward(&mut self, x: u64, sampler: &mut impl Sampler) -> u64 {
        debug_assert!(u128::from(x) < self.domain_size);
        if let Some(&y) = self.forward.get(&x) {
            return y;
        }
        let y = self.unused_range.draw(sampler);
        self.unused_domain.remove(x);
        self.forward.insert(x, y);
        self.inverse.insert(y, x);
        y
    }

    pub fn inverse(&mut self, y: u64, sampler: &mut impl Sampler) -> u64 {
        debug_assert!(u128::from(y) < self.domain_size);
        if let Some(&x) = self.inverse.get(&y) {
            return x;
        }
        let x = self.unused_domain.draw(sampler);
        self.unused_range.remove(y);
        self.forward.insert(x, y);
        self.inverse.insert(y, x);
        x
    }

    /// Checks that the forward and inverse maps form one partial bijection
    /// and that the free pools are exactly the complements.
    pub fn check_consistency(&self) -> std::result::Result<(), String> {
        if self.forward.len() != self.inverse.len() {
            return Err(format!(
                "forward has {} entries, inverse has {}",
                self.forward.len(),
                self.inverse.len()
            ));
        }
        if self.forward.len() as u128 > self.domain_size {
            return Err("more fixed points than the domain holds".into());
        }
        for (&x, &y) in &self.forward {
            if self.inverse.get(&y) != Some(&x) {
                return Err(format!("forward[{x}]={y} but inverse disagrees"));
            }
            if self.unused_domain.contains(x) || self.unused_range.contains(y) {
                return Err(format!("fixed pair ({x},{y}) still in a free pool"));
            }
        }
        let free = self.domain_size - self.forward.len() as u128;
        if self.unused_domain.remaining() != free || self.unused_range.remaining() != free {
            return Err("free pool sizes disagree with the number of fixed points".into());
        }
        Ok(())
    }
}

/// Anything that answers `F` and `F^-1` queries for a cipher in `BC(kappa, n)`.
pub trait BlockCipherOracle {
    fn params(&self) -> CipherParams;
    fn forward(&mut self, k: u64, x: u64) -> Result<u64>;
    fn inverse(&mut self, k: u64, y: u64) -> Result<u64>;
}

/// Anything that answers queries to a single permutation of the block space.
pub trait PermutationOracle {
    fn apply(&mut self, x: u64) -> u64;
}

/// Lazily sampled ideal cipher: rows are created on first touch.
#[derive(Clone, Debug)]
pub struct IdealCipherState<S = SeededSampler> {
    params: CipherParams,
    rows: FxHashMap<u64, LazyPermutation>,
    sampler: S,
}

/// Fresh lazily sampled ideal cipher with its own seeded stream.
pub fn new_ideal_cipher(params: CipherParams, seed: u64) -> IdealCipherState {
    IdealCipherState::with_sampler(params, SeededSampler::new(seed))
}

impl<S: Sampler> IdealCipherState<S> {
    pub fn with_sampler(params: CipherParams, sampler: S) -> Self {
        Self {
            params,
            rows: FxHashMap::default(),
            sampler,
        }
    }

    pub fn params(&self) -> CipherParams {
        self.params
    }

    /// Total number of fixed `(k, x, y)` entries across all rows.
    pub fn sampled_entries(&self) -> usize {
        self.rows.values().map(LazyPermutation::len).sum()
    }

    pub fn touched_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn row(&self, k: u64) -> Option<&LazyPermutation> {
        self.rows.get(&k)
    }

    pub fn rows(&self) -> impl Iterator<Item = (u64, &LazyPermutation)> {
        self.rows.iter().map(|(k, r)| (*k, r))
    }

    fn row_mut(&mut self, k: u64) -> &mut LazyPermutation {
        let n = self.params.n();
        self.rows.entry(k).or_insert_with(|| LazyPermutation::new(n))
    }

    pub fn f_forward(&mut self, k: u64, x: u64) -> Result<u64> {
        self.params.check_key(k)?;
        self.params.check_block(x)?;
        let n = self.params.n();
        let row = self.rows.entry(k).or_insert_with(|| LazyPermutation::new(n));
        Ok(row.forward(x, &mut self.sampler))
    }

    pub fn f_inverse(&mut self, k: u64, y: u64) -> Result<u64> {
        self.params.check_key(k)?;
        self.params.check_block(y)?;
        let n = self.params.n();
        let row = self.rows.entry(k).or_insert_with(|| LazyPermutation::new(n));
        Ok(row.inverse(y, &mut self.sampler))
    }

    /// Fixes `F(k, x) = y` directly. Test hook for forced-value scenarios.
    pub fn force(&mut self, k: u64, x: u64, y: u64) -> Result<()> {
        self.params.check_key(k)?;
        self.params.check_block(x)?;
        self.params.check_block(y)?;
        let row = self.row_mut(k);
        match (row.peek_forward(x), row.peek_inverse(y)) {
            (Some(v), _) if v == y => return Ok(()),
            (None, None) => {}
            _ => {
                return Err(Error::InvalidParams(format!(
                    "F({k}, {x}) = {y} conflicts with fixed entries"
                )))
            }
        }
        row.unused_range.remove(y);
        row.unused_domain.remove(x);
        row.forward.insert(x, y);
        row.inverse.insert(y, x);
        Ok(())
    }
}

impl<S: Sampler> BlockCipherOracle for IdealCipherState<S> {
    fn params(&self) -> CipherParams {
        self.params
    }

    fn forward(&mut self, k: u64, x: u64) -> Result<u64> {
        self.f_forward(k, x)
    }

    fn inverse(&mut self, k: u64, y: u64) -> Result<u64> {
        self.f_inverse(k, y)
    }
}

/// A lazily sampled permutation bundled with its randomness source.
#[derive(Clone, Debug)]
pub struct SampledPermutation<S = SeededSampler> {
    perm: LazyPermutation,
    sampler: S,
}

impl<S: Sampler> SampledPermutation<S> {
    pub fn new(n: u32, sampler: S) -> Self {
        Self {
            perm: LazyPermutation::new(n),
            sampler,
        }
    }

    pub fn permutation(&self) -> &LazyPermutation {
        &self.perm
    }
}

impl<S: Sampler> PermutationOracle for SampledPermutation<S> {
    fn apply(&mut self, x: u64) -> u64 {
        self.perm.forward(x, &mut self.sampler)
    }
}

/// A fully materialized permutation, `table[x] = pi(x)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FixedPermutation(pub Vec<u64>);

impl PermutationOracle for FixedPermutation {
    fn apply(&mut self, x: u64) -> u64 {
        self.0[x as usize]
    }
}

impl PermutationOracle for &FixedPermutation {
    fn apply(&mut self, x: u64) -> u64 {
        self.0[x as usize]
    }
}

/// A complete cipher table: row `k` is the permutation `F_k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CipherTable {
    params: CipherParams,
    rows: Vec<Vec<u64>>,
    inverse_rows: Vec<Vec<u64>>,
}

impl CipherTable {
    pub fn from_rows(params: CipherParams, rows: Vec<Vec<u64>>) -> Result<Self> {
        if params.kappa() > EAGER_MAX_BITS || params.n() > EAGER_MAX_BITS {
            return Err(Error::Refused(format!(
                "complete tables need kappa, n <= {EAGER_MAX_BITS}"
            )));
        }
        let width = params.block_space() as usize;
        if rows.len() as u128 != params.key_space() {
            return Err(Error::InvalidParams(format!(
                "expected {} rows, got {}",
                params.key_space(),
                rows.len()
            )));
        }
        let mut inverse_rows = Vec::with_capacity(rows.len());
        for (k, row) in rows.iter().enumerate() {
            if row.len() != width {
                return Err(Error::InvalidParams(format!("row {k} has {} entries", row.len())));
            }
            let mut inv = vec![u64::MAX; width];
            for (x, &y) in row.iter().enumerate() {
                if y as usize >= width || inv[y as usize] != u64::MAX {
                    return Err(Error::InvalidParams(format!("row {k} is not a permutation")));
                }
                inv[y as usize] = x as u64;
            }
            inverse_rows.push(inv);
        }
        Ok(Self {
            params,
            rows,
            inverse_rows,
        })
    }

    pub fn params(&self) -> CipherParams {
        self.params
    }

    pub fn rows(&self) -> &[Vec<u64>] {
        &self.rows
    }

    pub fn get(&self, k: u64, x: u64) -> u64 {
        self.rows[k as usize][x as usize]
    }

    pub fn get_inverse(&self, k: u64, y: u64) -> u64 {
        self.inverse_rows[k as usize][y as usize]
    }

    /// JSON array of row permutations, e.g. `[[1,0],[0,1]]`.
    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.rows).expect("rows serialize")
    }

    pub fn from_json(params: CipherParams, json: &str) -> Result<Self> {
        let rows: Vec<Vec<u64>> = serde_json::from_str(json)?;
        Self::from_rows(params, rows)
    }
}

impl BlockCipherOracle for &CipherTable {
    fn params(&self) -> CipherParams {
        self.params
    }

    fn forward(&mut self, k: u64, x: u64) -> Result<u64> {
        self.params.check_key(k)?;
        self.params.check_block(x)?;
        Ok(self.get(k, x))
    }

    fn inverse(&mut self, k: u64, y: u64) -> Result<u64> {
        self.params.check_key(k)?;
        self.params.check_block(y)?;
        Ok(self.get_inverse(k, y))
    }
}

/// Draws every row up front with an independent Fisher-Yates shuffle.
pub fn eager_sample(params: CipherParams, seed: u64) -> Result<CipherTable> {
    if params.kappa() > EAGER_MAX_BITS || params.n() > EAGER_MAX_BITS {
        return Err(Error::Refused(format!(
            "eager sampling needs kappa, n <= {EAGER_MAX_BITS} (got kappa={}, n={})",
            params.kappa(),
            params.n()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let width = params.block_space() as u64;
    let rows = (0..params.key_space())
        .map(|_| {
            let mut row: Vec<u64> = (0..width).collect();
            row.shuffle(&mut rng);
            row
        })
        .collect();
    CipherTable::from_rows(params, rows)
}
