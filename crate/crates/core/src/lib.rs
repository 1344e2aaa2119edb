//! Simulation of the ideal-cipher model for composed block ciphers.
//!
//! The crate samples ideal ciphers lazily, plays the two-world
//! distinguishing game against double, two-key triple and cascade
//! encryption, runs generic attacks under exact query budgets, estimates
//! their advantage, and evaluates the closed-form security bounds.

pub mod attacks;
pub mod bounds;
pub mod cipher;
pub mod equivalence;
pub mod error;
pub mod estimator;
pub mod exact;
pub mod game;
mod pool;
pub mod replay;
pub mod seed;
pub mod stats;
pub mod transcript;
pub mod verify;

pub use cipher::{eager_sample, new_ideal_cipher, CipherParams, CipherTable, IdealCipherState, LazyPermutation};
pub use error::{Error, Result};
pub use game::{build_world, run_adversary, Adversary, GameInstance, Operator, OracleBudget, Oracles, World};
pub use transcript::{bad_event, seen_key_pairs, Transcript};
