//! Exact advantage by exhaustive enumeration at tiny parameters.
//!
//! Two modes compute the same rationals:
//!
//! * [`ExactMode::FullTable`] runs the adversary against every complete
//!   cipher table, every crucial-key tuple (world 1) and every permutation
//!   for `E` (world 2). Slow but easy to audit.
//! * [`ExactMode::PathEnumeration`] replays the lazy game with a scripted
//!   sampler and walks every sequence of sampling choices depth first. Each
//!   path carries weight `prod 1/bound`; only the cells the adversary
//!   actually touches are enumerated.

use std::cell::RefCell;
use std::rc::Rc;

use num::{BigInt, BigRational, One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cipher::{CipherParams, CipherTable, FixedPermutation, IdealCipherState, SampledPermutation};
use crate::error::{Error, Result};
use crate::game::{
    run_adversary, sample_crucial_keys, Adversary, CrucialKeys, GameInstance, Operator, OracleBudget, World,
};
use crate::seed::Sampler;

/// Largest key and block width accepted.
pub const EXACT_MAX_BITS: u32 = 2;

/// Most crucial-key tuples enumerated in world 1 (Cascade(m) grows as 4^m).
const MAX_KEY_TUPLES: u64 = 256;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExactMode {
    FullTable,
    PathEnumeration,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExactAdvantage {
    #[serde(serialize_with = "ser_ratio")]
    pub p1: BigRational,
    #[serde(serialize_with = "ser_ratio")]
    pub p2: BigRational,
    #[serde(serialize_with = "ser_ratio")]
    pub adv: BigRational,
    /// Adversary runs performed.
    pub runs: u64,
}

fn ser_ratio<S: serde::Serializer>(r: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

pub fn ratio_to_f64(r: &BigRational) -> f64 {
    use num::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

impl ExactAdvantage {
    pub fn adv_f64(&self) -> f64 {
        ratio_to_f64(&self.adv)
    }
}

/// Exact `P1`, `P2` and their difference for `attack`.
///
/// Refuses parameters beyond [`EXACT_MAX_BITS`] and attacks that do not
/// expose a finite mixture of deterministic strategies.
pub fn exact_advantage(
    attack: &dyn Adversary,
    op: Operator,
    params: CipherParams,
    budget: OracleBudget,
    mode: ExactMode,
) -> Result<ExactAdvantage> {
    if params.kappa() > EXACT_MAX_BITS || params.n() > EXACT_MAX_BITS {
        return Err(Error::Refused(format!(
            "exact enumeration needs kappa, n <= {EXACT_MAX_BITS} (got kappa={}, n={})",
            params.kappa(),
            params.n()
        )));
    }
    let tuples = (params.key_space() as u64).checked_pow(op.key_count() as u32);
    if tuples.is_none_or(|c| c > MAX_KEY_TUPLES) {
        return Err(Error::Refused(format!("too many crucial-key tuples for {op}")));
    }
    if budget.q_max == 0 {
        return Err(Error::config("q must be at least 1"));
    }
    let strategies = attack.pure_strategies(params).ok_or_else(|| {
        Error::Refused(format!(
            "{} uses randomness that cannot be enumerated; pick a deterministic key mode",
            attack.name()
        ))
    })?;

    let mut p1 = BigRational::zero();
    let mut p2 = BigRational::zero();
    let mut runs = 0;
    for (weight, strategy) in &strategies {
        let (a, b, r) = match mode {
            ExactMode::FullTable => full_table(strategy.as_ref(), op, params, budget)?,
            ExactMode::PathEnumeration => {
                let (a, ra) = enumerate_paths(strategy.as_ref(), World::Composed, op, params, budget)?;
                let (b, rb) = enumerate_paths(strategy.as_ref(), World::Random, op, params, budget)?;
                (a, b, ra + rb)
            }
        };
        p1 += weight * a;
        p2 += weight * b;
        runs += r;
    }
    Ok(ExactAdvantage {
        adv: &p1 - &p2,
        p1,
        p2,
        runs,
    })
}

/// Every permutation of `0..size`, in lexicographic order.
fn permutations(size: u64) -> Vec<Vec<u64>> {
    fn extend(prefix: &mut Vec<u64>, rest: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if rest.is_empty() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..rest.len() {
            let v = rest.remove(i);
            prefix.push(v);
            extend(prefix, rest, out);
            prefix.pop();
            rest.insert(i, v);
        }
    }
    let mut out = Vec::new();
    extend(&mut Vec::new(), &mut (0..size).collect(), &mut out);
    out
}

fn key_tuples(op: Operator, params: CipherParams) -> Vec<Vec<u64>> {
    let keys = params.key_space() as u64;
    let count = keys.pow(op.key_count() as u32);
    (0..count)
        .map(|mut idx| {
            (0..op.key_count())
                .map(|_| {
                    let k = idx % keys;
                    idx /= keys;
                    k
                })
                .collect()
        })
        .collect()
}

fn decide(
    adversary: &dyn Adversary,
    world: World,
    op: Operator,
    table: &CipherTable,
    crucial: &[u64],
    world2: Option<&FixedPermutation>,
    budget: OracleBudget,
) -> Result<bool> {
    let mut game = GameInstance::from_parts(world, op, table, CrucialKeys(crucial.to_vec()), world2, budget)?;
    // pure strategies ignore their coins
    let mut coins = ChaCha8Rng::seed_from_u64(0);
    Ok(run_adversary(&mut game, adversary, &mut coins)?.decision)
}

/// Returns (P1, P2, runs) for one deterministic adversary.
fn full_table(
    adversary: &dyn Adversary,
    op: Operator,
    params: CipherParams,
    budget: OracleBudget,
) -> Result<(BigRational, BigRational, u64)> {
    let perms = permutations(params.block_space() as u64);
    let rows = params.key_space() as u32;
    let table_count = (perms.len() as u64).pow(rows);
    let tuples = key_tuples(op, params);
    let fixed: Vec<FixedPermutation> = perms.iter().cloned().map(FixedPermutation).collect();

    let per_table = |idx: u64| -> Result<(u64, u64)> {
        let mut rest = idx;
        let table_rows: Vec<Vec<u64>> = (0..rows)
            .map(|_| {
                let r = perms[(rest % perms.len() as u64) as usize].clone();
                rest /= perms.len() as u64;
                r
            })
            .collect();
        let table = CipherTable::from_rows(params, table_rows)?;
        let mut ones1 = 0;
        for keys in &tuples {
            ones1 += u64::from(decide(adversary, World::Composed, op, &table, keys, None, budget)?);
        }
        // world 2 never reveals the crucial keys, so one tuple stands for all
        let mut ones2 = 0;
        for pi in &fixed {
            ones2 += u64::from(decide(
                adversary,
                World::Random,
                op,
                &table,
                &tuples[0],
                Some(pi),
                budget,
            )?);
        }
        Ok((ones1, ones2))
    };

    #[cfg(feature = "parallel")]
    let (ones1, ones2) = {
        use rayon::prelude::*;
        (0..table_count)
            .into_par_iter()
            .map(per_table)
            .try_reduce(|| (0, 0), |a, b| Ok((a.0 + b.0, a.1 + b.1)))?
    };
    #[cfg(not(feature = "parallel"))]
    let (ones1, ones2) = (0..table_count).try_fold((0u64, 0u64), |acc, i| {
        let (a, b) = per_table(i)?;
        Ok::<_, Error>((acc.0 + a, acc.1 + b))
    })?;

    let runs1 = table_count * tuples.len() as u64;
    let runs2 = table_count * fixed.len() as u64;
    Ok((
        BigRational::new(BigInt::from(ones1), BigInt::from(runs1)),
        BigRational::new(BigInt::from(ones2), BigInt::from(runs2)),
        runs1 + runs2,
    ))
}

/// Replays recorded choices, then extends the path with zeros.
#[derive(Debug, Default)]
struct Script {
    /// (choice, bound) per sampling call, in call order.
    steps: Vec<(u128, u128)>,
    pos: usize,
}

impl Script {
    /// Moves to the next path in depth-first order. False when exhausted.
    fn advance(&mut self) -> bool {
        self.steps.truncate(self.pos);
        while let Some((choice, bound)) = self.steps.pop() {
            if choice + 1 < bound {
                self.steps.push((choice + 1, bound));
                self.pos = 0;
                return true;
            }
        }
        false
    }

    fn weight(&self) -> BigRational {
        let denom = self.steps[..self.pos]
            .iter()
            .fold(BigInt::one(), |acc, &(_, b)| acc * BigInt::from(b));
        BigRational::new(BigInt::one(), denom)
    }
}

#[derive(Clone, Debug)]
struct ScriptedSampler(Rc<RefCell<Script>>);

impl Sampler for ScriptedSampler {
    fn below(&mut self, bound: u128) -> u128 {
        let mut s = self.0.borrow_mut();
        let pos = s.pos;
        s.pos += 1;
        match s.steps.get(pos) {
            Some(&(choice, b)) => {
                debug_assert_eq!(b, bound, "scripted replay diverged");
                choice
            }
            None => {
                s.steps.push((0, bound));
                0
            }
        }
    }
}

fn enumerate_paths(
    adversary: &dyn Adversary,
    world: World,
    op: Operator,
    params: CipherParams,
    budget: OracleBudget,
) -> Result<(BigRational, u64)> {
    let script = Rc::new(RefCell::new(Script::default()));
    let mut coins = ChaCha8Rng::seed_from_u64(0);
    let mut total = BigRational::zero();
    let mut runs = 0;
    loop {
        let mut sampler = ScriptedSampler(script.clone());
        let crucial = sample_crucial_keys(op, params, &mut sampler);
        let cipher = IdealCipherState::with_sampler(params, sampler.clone());
        let world2 = (world == World::Random).then(|| SampledPermutation::new(params.n(), sampler.clone()));
        let mut game = GameInstance::from_parts(world, op, cipher, crucial, world2, budget)?;
        let decision = run_adversary(&mut game, adversary, &mut coins)?.decision;
        runs += 1;
        if decision {
            total += script.borrow().weight();
        }
        if !script.borrow_mut().advance() {
            break;
        }
    }
    Ok((total, runs))
}
