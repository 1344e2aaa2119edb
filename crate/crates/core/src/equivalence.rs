//! Statistical comparison of lazily and eagerly sampled ciphers.

use std::collections::BTreeMap;

use rand::RngCore;
use serde::Serialize;

use crate::cipher::{eager_sample, CipherParams, IdealCipherState, EAGER_MAX_BITS};
use crate::error::{Error, Result};
use crate::seed::{stream_rng, Role, SeededSampler};
use crate::stats::{chi_square_homogeneity, ChiSquare};

/// Significance used for every per-cell and joint test.
pub const SIGNIFICANCE: f64 = 0.001;

/// Largest number of distinct complete tables for which the joint test runs.
const JOINT_MAX_OUTCOMES: u128 = 4096;

#[derive(Clone, Debug, Serialize)]
pub struct CellStat {
    pub key: u64,
    pub x: u64,
    pub chi: ChiSquare,
}

#[derive(Clone, Debug, Serialize)]
pub struct EquivalenceReport {
    pub params: CipherParams,
    pub trials: u64,
    pub cells: Vec<CellStat>,
    /// Homogeneity test on whole tables, when the outcome space is small.
    pub joint: Option<ChiSquare>,
}

impl EquivalenceReport {
    pub fn rejected_cells(&self) -> usize {
        self.cells.iter().filter(|c| c.chi.rejects(SIGNIFICANCE)).count()
    }

    pub fn passed(&self) -> bool {
        self.rejected_cells() == 0 && !self.joint.is_some_and(|j| j.rejects(SIGNIFICANCE))
    }
}

fn factorial(n: u128) -> u128 {
    (1..=n)
        .try_fold(1u128, |acc, v| acc.checked_mul(v))
        .unwrap_or(u128::MAX)
}

/// Drives a lazy cipher through a fixed query sequence that touches every
/// cell: per row, forward queries on even blocks and inverse queries on odd
/// ones, then a forward sweep. The resulting table is read off.
fn lazy_table(params: CipherParams, sampler: SeededSampler) -> Vec<Vec<u64>> {
    let mut state = IdealCipherState::with_sampler(params, sampler);
    let width = params.block_space() as u64;
    (0..params.key_space() as u64)
        .map(|k| {
            for i in 0..width {
                if i % 2 == 0 {
                    state.f_forward(k, i).expect("in range");
                } else {
                    state.f_inverse(k, i).expect("in range");
                }
            }
            (0..width).map(|x| state.f_forward(k, x).expect("in range")).collect()
        })
        .collect()
}

/// Compares, cell by cell, the answer distributions of `trials` lazy and
/// `trials` eager samples with a chi-square homogeneity test.
pub fn lazy_eager_equivalence_check(params: CipherParams, trials: u64, seed: u64) -> Result<EquivalenceReport> {
    if params.kappa() > EAGER_MAX_BITS || params.n() > EAGER_MAX_BITS {
        return Err(Error::Refused(format!(
            "equivalence check needs kappa, n <= {EAGER_MAX_BITS}"
        )));
    }
    let rows = params.key_space() as usize;
    let width = params.block_space() as usize;
    if trials == 0 {
        return Ok(EquivalenceReport {
            params,
            trials,
            cells: Vec::new(),
            joint: None,
        });
    }

    let mut lazy_counts = vec![vec![vec![0u64; width]; width]; rows];
    let mut eager_counts = lazy_counts.clone();
    let outcomes = factorial(width as u128).checked_pow(rows as u32).unwrap_or(u128::MAX);
    let track_joint = outcomes <= JOINT_MAX_OUTCOMES;
    let mut joint: BTreeMap<Vec<Vec<u64>>, [u64; 2]> = BTreeMap::new();

    for trial in 0..trials {
        let lazy = lazy_table(params, SeededSampler::for_stream(seed, 1, trial, Role::Cipher));
        let eager_seed = stream_rng(seed, 2, trial, Role::Cipher).next_u64();
        let eager = eager_sample(params, eager_seed)?.rows().to_vec();
        for k in 0..rows {
            for x in 0..width {
                lazy_counts[k][x][lazy[k][x] as usize] += 1;
                eager_counts[k][x][eager[k][x] as usize] += 1;
            }
        }
        if track_joint {
            joint.entry(lazy).or_default()[0] += 1;
            joint.entry(eager).or_default()[1] += 1;
        }
    }

    let mut cells = Vec::with_capacity(rows * width);
    for k in 0..rows {
        for x in 0..width {
            cells.push(CellStat {
                key: k as u64,
                x: x as u64,
                chi: chi_square_homogeneity(&lazy_counts[k][x], &eager_counts[k][x]),
            });
        }
    }
    let joint = track_joint.then(|| {
        let (a, b): (Vec<u64>, Vec<u64>) = joint.values().map(|c| (c[0], c[1])).unzip();
        chi_square_homogeneity(&a, &b)
    });
    Ok(EquivalenceReport {
        params,
        trials,
        cells,
        joint,
    })
}
