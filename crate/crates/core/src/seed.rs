//! Deterministic randomness.
//!
//! A single 64-bit master seed keys a ChaCha8 generator; every
//! `(world, trial, role)` triple gets its own ChaCha stream. Streams are
//! addressed by counter, never by thread, so any partition of trials across
//! workers reproduces the same draws.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Independent consumers of randomness inside one trial.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[repr(u64)]
pub enum Role {
    Cipher = 0,
    CrucialKeys = 1,
    World2Perm = 2,
    Attack = 3,
}

const ROLES: u64 = 4;

/// Stream index for one `(world, trial, role)` triple. `world` is 1 or 2.
pub fn stream_id(world: u8, trial: u64, role: Role) -> u64 {
    debug_assert!(world == 1 || world == 2);
    debug_assert!(trial < (1 << 61));
    (trial * 2 + u64::from(world - 1)) * ROLES + role as u64
}

/// Generator for one stream of a master seed.
pub fn stream_rng(master: u64, world: u8, trial: u64, role: Role) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(stream_id(world, trial, role));
    rng
}

/// Source of uniform indices. Lazy sampling only ever asks for a uniform
/// element of `[0, bound)`, which lets exact enumeration substitute a
/// scripted source for the random one.
pub trait Sampler {
    /// Uniform value in `[0, bound)`; `bound` is at most `2^64`.
    fn below(&mut self, bound: u128) -> u128;
}

/// [`Sampler`] backed by a ChaCha8 stream.
#[derive(Clone, Debug)]
pub struct SeededSampler {
    rng: ChaCha8Rng,
}

impl SeededSampler {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn from_rng(rng: ChaCha8Rng) -> Self {
        Self { rng }
    }

    pub fn for_stream(master: u64, world: u8, trial: u64, role: Role) -> Self {
        Self::from_rng(stream_rng(master, world, trial, role))
    }

    pub fn rng_mut(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }
}

impl Sampler for SeededSampler {
    fn below(&mut self, bound: u128) -> u128 {
        assert!((1..=1 << 64).contains(&bound), "bound {bound} out of range");
        if bound == 1 << 64 {
            u128::from(self.rng.next_u64())
        } else {
            u128::from(self.rng.random_range(0..bound as u64))
        }
    }
}

impl<S: Sampler + ?Sized> Sampler for &mut S {
    fn below(&mut self, bound: u128) -> u128 {
        (**self).below(bound)
    }
}
