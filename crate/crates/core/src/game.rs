//! The distinguishing game: two worlds, the `E`/`F`/`F^-1` oracle triple,
//! query budgets and the adversary's transcript.

use std::fmt;
use std::str::FromStr;

use num::BigRational;
use rand::RngCore;
use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use crate::cipher::{BlockCipherOracle, CipherParams, IdealCipherState, PermutationOracle, SampledPermutation};
use crate::error::{BudgetReport, Error, OracleKind, Result};
use crate::seed::{Role, Sampler, SeededSampler};
use crate::transcript::{Entry, Transcript};

/// World 1 answers `E` with the composed cipher at the crucial keys; world 2
/// with an independent uniform permutation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum World {
    Composed,
    Random,
}

impl World {
    /// 1 or 2.
    pub fn number(self) -> u8 {
        match self {
            World::Composed => 1,
            World::Random => 2,
        }
    }

    pub fn from_number(w: u8) -> Result<Self> {
        match w {
            1 => Ok(World::Composed),
            2 => Ok(World::Random),
            _ => Err(Error::config(format!("world must be 1 or 2, got {w}"))),
        }
    }
}

/// How `E` is built from the base cipher in world 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Operator {
    /// `F_k1`
    Single,
    /// `F_k1 ∘ F_k2`
    Double,
    /// `F_k1 ∘ F_k2^-1 ∘ F_k1`
    TwoKeyTriple,
    /// `F_k1 ∘ F_k2 ∘ ... ∘ F_km`
    Cascade(u32),
}

impl Operator {
    pub fn cascade(m: u32) -> Result<Self> {
        if m == 0 {
            Err(Error::config("cascade fold count must be at least 1"))
        } else {
            Ok(Operator::Cascade(m))
        }
    }

    /// Number of crucial base-cipher keys.
    pub fn key_count(self) -> usize {
        match self {
            Operator::Single => 1,
            Operator::Double | Operator::TwoKeyTriple => 2,
            Operator::Cascade(m) => m as usize,
        }
    }

    /// Key length `kappa*` of the composed cipher.
    pub fn composed_key_bits(self, params: CipherParams) -> u32 {
        self.key_count() as u32 * params.kappa()
    }
}

impl fmt::Display for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Operator::Single => f.write_str("single"),
            Operator::Double => f.write_str("dbl"),
            Operator::TwoKeyTriple => f.write_str("trp2"),
            Operator::Cascade(m) => write!(f, "cascade:{m}"),
        }
    }
}

impl FromStr for Operator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "single" => Ok(Operator::Single),
            "dbl" => Ok(Operator::Double),
            "trp2" => Ok(Operator::TwoKeyTriple),
            _ => match s.strip_prefix("cascade:") {
                Some(m) => {
                    let m = m
                        .parse()
                        .map_err(|_| Error::config(format!("bad cascade fold count in {s:?}")))?;
                    Operator::cascade(m)
                }
                None => Err(Error::config(format!(
                    "unknown operator {s:?} (expected single, dbl, trp2 or cascade:m)"
                ))),
            },
        }
    }
}

/// The hidden base-cipher keys `(k1*, k2*, ...)`. Components may coincide.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CrucialKeys(pub Vec<u64>);

impl std::ops::Deref for CrucialKeys {
    type Target = [u64];

    fn deref(&self) -> &[u64] {
        &self.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleBudget {
    pub q_max: u64,
    pub t_max: u64,
    pub q_used: u64,
    pub t_used: u64,
}

impl OracleBudget {
    pub fn new(q_max: u64, t_max: u64) -> Self {
        Self {
            q_max,
            t_max,
            q_used: 0,
            t_used: 0,
        }
    }

    pub fn q_remaining(&self) -> u64 {
        self.q_max - self.q_used
    }

    pub fn t_remaining(&self) -> u64 {
        self.t_max - self.t_used
    }

    fn report(&self, oracle: OracleKind) -> BudgetReport {
        BudgetReport {
            oracle,
            q_used: self.q_used,
            q_max: self.q_max,
            t_used: self.t_used,
            t_max: self.t_max,
        }
    }
}

/// What an adversary sees: the three oracles and its remaining budget.
pub trait Oracles {
    fn params(&self) -> CipherParams;
    fn budget(&self) -> OracleBudget;
    fn e(&mut self, x: u64) -> Result<u64>;
    fn f(&mut self, k: u64, x: u64) -> Result<u64>;
    fn f_inv(&mut self, k: u64, y: u64) -> Result<u64>;
}

/// A distinguisher. `play` may query adaptively and must return its guess
/// (`true` = "world 1"). Randomized adversaries draw only from `coins`.
pub trait Adversary: Send + Sync {
    fn name(&self) -> String;

    fn play(&self, oracles: &mut dyn Oracles, coins: &mut dyn RngCore) -> Result<bool>;

    /// The adversary against `params` as a finite mixture of deterministic
    /// adversaries, or `None` if its coin use cannot be enumerated. Exact
    /// enumeration needs this.
    fn pure_strategies(&self, _params: CipherParams) -> Option<Vec<(BigRational, Box<dyn Adversary>)>> {
        None
    }
}

/// One sampled world with its oracles, budget and transcript.
pub struct GameInstance<C = IdealCipherState, P = SampledPermutation> {
    world: World,
    operator: Operator,
    cipher: C,
    crucial: CrucialKeys,
    world2: Option<P>,
    budget: OracleBudget,
    transcript: Transcript,
    e_cache: FxHashMap<u64, u64>,
    // pairs the adversary already knows, by (key, input) and (key, output)
    f_known: FxHashMap<(u64, u64), u64>,
    finv_known: FxHashMap<(u64, u64), u64>,
    violation: Option<BudgetReport>,
}

pub type SampledGame = GameInstance<IdealCipherState<SeededSampler>, SampledPermutation<SeededSampler>>;

/// Builds world `world` for trial 0 of `seed`.
pub fn build_world(
    world: World,
    op: Operator,
    params: CipherParams,
    budget: OracleBudget,
    seed: u64,
) -> Result<SampledGame> {
    build_world_for_trial(world, op, params, budget, seed, 0)
}

/// Builds one world with all randomness drawn from the `(world, trial)`
/// streams of `master`. Crucial keys are sampled in both worlds.
pub fn build_world_for_trial(
    world: World,
    op: Operator,
    params: CipherParams,
    budget: OracleBudget,
    master: u64,
    trial: u64,
) -> Result<SampledGame> {
    let w = world.number();
    let mut key_sampler = SeededSampler::for_stream(master, w, trial, Role::CrucialKeys);
    let crucial = sample_crucial_keys(op, params, &mut key_sampler);
    let cipher = IdealCipherState::with_sampler(params, SeededSampler::for_stream(master, w, trial, Role::Cipher));
    let world2 = match world {
        World::Composed => None,
        World::Random => Some(SampledPermutation::new(
            params.n(),
            SeededSampler::for_stream(master, w, trial, Role::World2Perm),
        )),
    };
    GameInstance::from_parts(world, op, cipher, crucial, world2, budget)
}

/// Independent uniform keys, one per operator slot.
pub fn sample_crucial_keys(op: Operator, params: CipherParams, sampler: &mut impl Sampler) -> CrucialKeys {
    CrucialKeys(
        (0..op.key_count())
            .map(|_| sampler.below(params.key_space()) as u64)
            .collect(),
    )
}

impl<C: BlockCipherOracle, P: PermutationOracle> GameInstance<C, P> {
    /// Assembles a game from explicit components. `world2` must be present
    /// exactly in world 2.
    pub fn from_parts(
        world: World,
        operator: Operator,
        cipher: C,
        crucial: CrucialKeys,
        world2: Option<P>,
        budget: OracleBudget,
    ) -> Result<Self> {
        if budget.q_max == 0 {
            return Err(Error::config("q must be at least 1"));
        }
        if budget.q_used != 0 || budget.t_used != 0 {
            return Err(Error::config("budget counters must start at zero"));
        }
        if let Operator::Cascade(0) = operator {
            return Err(Error::config("cascade fold count must be at least 1"));
        }
        if crucial.len() != operator.key_count() {
            return Err(Error::config(format!(
                "{operator} needs {} crucial keys, got {}",
                operator.key_count(),
                crucial.len()
            )));
        }
        let params = cipher.params();
        for &k in crucial.iter() {
            params.check_key(k)?;
        }
        if world2.is_some() != (world == World::Random) {
            return Err(Error::config("world-2 permutation must be supplied exactly in world 2"));
        }
        Ok(Self {
            world,
            operator,
            cipher,
            crucial,
            world2,
            budget,
            transcript: Transcript::new(),
            e_cache: FxHashMap::default(),
            f_known: FxHashMap::default(),
            finv_known: FxHashMap::default(),
            violation: None,
        })
    }

    pub fn world(&self) -> World {
        self.world
    }

    pub fn operator(&self) -> Operator {
        self.operator
    }

    pub fn params(&self) -> CipherParams {
        self.cipher.params()
    }

    pub fn crucial(&self) -> &CrucialKeys {
        &self.crucial
    }

    pub fn budget(&self) -> OracleBudget {
        self.budget
    }

    pub fn transcript(&self) -> &Transcript {
        &self.transcript
    }

    pub fn cipher(&self) -> &C {
        &self.cipher
    }

    /// First budget overrun seen during this game, if any.
    pub fn violation(&self) -> Option<&BudgetReport> {
        self.violation.as_ref()
    }

    /// The composed cipher at the crucial keys, evaluated through the
    /// shared cipher state. Neither charged nor recorded.
    fn composed(&mut self, x: u64) -> Result<u64> {
        let keys = &self.crucial.0;
        match self.operator {
            Operator::Single => self.cipher.forward(keys[0], x),
            Operator::Double => {
                let mid = self.cipher.forward(keys[1], x)?;
                self.cipher.forward(keys[0], mid)
            }
            Operator::TwoKeyTriple => {
                let a = self.cipher.forward(keys[0], x)?;
                let b = self.cipher.inverse(keys[1], a)?;
                self.cipher.forward(keys[0], b)
            }
            Operator::Cascade(_) => {
                let mut v = x;
                for &k in keys.iter().rev() {
                    v = self.cipher.forward(k, v)?;
                }
                Ok(v)
            }
        }
    }

    fn exhausted(&mut self, oracle: OracleKind) -> Error {
        let report = self.budget.report(oracle);
        self.violation.get_or_insert_with(|| report.clone());
        Error::Budget(report)
    }

    /// `E(x)`. Repeats are served from cache without charge.
    pub fn e_query(&mut self, x: u64) -> Result<u64> {
        self.params().check_block(x)?;
        if let Some(&y) = self.e_cache.get(&x) {
            return Ok(y);
        }
        if self.budget.q_used >= self.budget.q_max {
            return Err(self.exhausted(OracleKind::Challenge));
        }
        let y = match self.world2.as_mut() {
            None => self.composed(x)?,
            Some(perm) => perm.apply(x),
        };
        self.budget.q_used += 1;
        self.e_cache.insert(x, y);
        self.transcript.push_round(Entry::EQuery { x }, Entry::EReply { x, y });
        Ok(y)
    }

    /// `F(k, x)`. Pairs the adversary already holds (from either direction)
    /// are served without charge.
    pub fn f_query(&mut self, k: u64, x: u64) -> Result<u64> {
        let params = self.params();
        params.check_key(k)?;
        params.check_block(x)?;
        if let Some(&y) = self.f_known.get(&(k, x)) {
            return Ok(y);
        }
        if self.budget.t_used >= self.budget.t_max {
            return Err(self.exhausted(OracleKind::Cipher));
        }
        let y = self.cipher.forward(k, x)?;
        self.budget.t_used += 1;
        self.f_known.insert((k, x), y);
        self.finv_known.insert((k, y), x);
        self.transcript
            .push_round(Entry::FQuery { k, x }, Entry::FReply { k, x, y });
        Ok(y)
    }

    /// `F^-1(k, y)`, with the same caching rule as [`Self::f_query`].
    pub fn finv_query(&mut self, k: u64, y: u64) -> Result<u64> {
        let params = self.params();
        params.check_key(k)?;
        params.check_block(y)?;
        if let Some(&x) = self.finv_known.get(&(k, y)) {
            return Ok(x);
        }
        if self.budget.t_used >= self.budget.t_max {
            return Err(self.exhausted(OracleKind::Cipher));
        }
        let x = self.cipher.inverse(k, y)?;
        self.budget.t_used += 1;
        self.f_known.insert((k, x), y);
        self.finv_known.insert((k, y), x);
        self.transcript
            .push_round(Entry::FInvQuery { k, y }, Entry::FInvReply { k, x, y });
        Ok(x)
    }

    /// World 1 only: recomputes every recorded `E` reply by composing the
    /// cipher at the crucial keys and compares.
    pub fn e_replies_match_composition(&mut self) -> Result<bool> {
        if self.world != World::Composed {
            return Err(Error::config("composition check applies to world 1"));
        }
        let pairs: Vec<(u64, u64)> = self
            .transcript
            .moves()
            .iter()
            .filter_map(|m| match m.entry {
                Entry::EReply { x, y } => Some((x, y)),
                _ => None,
            })
            .collect();
        for (x, y) in pairs {
            if self.composed(x)? != y {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

impl<C: BlockCipherOracle, P: PermutationOracle> Oracles for GameInstance<C, P> {
    fn params(&self) -> CipherParams {
        self.cipher.params()
    }

    fn budget(&self) -> OracleBudget {
        self.budget
    }

    fn e(&mut self, x: u64) -> Result<u64> {
        self.e_query(x)
    }

    fn f(&mut self, k: u64, x: u64) -> Result<u64> {
        self.f_query(k, x)
    }

    fn f_inv(&mut self, k: u64, y: u64) -> Result<u64> {
        self.finv_query(k, y)
    }
}

#[derive(Debug)]
pub struct RunOutcome<'a> {
    pub decision: bool,
    pub transcript: &'a Transcript,
}

/// Plays `adversary` against a fresh game. Any budget overrun, even one the
/// adversary caught and ignored, aborts the run.
pub fn run_adversary<'g, C: BlockCipherOracle, P: PermutationOracle>(
    game: &'g mut GameInstance<C, P>,
    adversary: &dyn Adversary,
    coins: &mut dyn RngCore,
) -> Result<RunOutcome<'g>> {
    if !game.transcript.is_empty() || game.budget.q_used != 0 || game.budget.t_used != 0 {
        return Err(Error::config("run_adversary needs a fresh game"));
    }
    let result = adversary.play(game, coins);
    if let Some(report) = game.violation.clone() {
        return Err(Error::BudgetViolation(report));
    }
    let decision = match result {
        Ok(d) => d,
        Err(Error::Budget(report)) => return Err(Error::BudgetViolation(report)),
        Err(e) => return Err(e),
    };
    Ok(RunOutcome {
        decision,
        transcript: &game.transcript,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::chi_square_independence;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn params(kappa: u32, n: u32) -> CipherParams {
        CipherParams::new(kappa, n).unwrap()
    }

    fn game(world: World, op: Operator, kappa: u32, n: u32, q: u64, t: u64, seed: u64) -> SampledGame {
        build_world(world, op, params(kappa, n), OracleBudget::new(q, t), seed).unwrap()
    }

    struct Constant(bool);

    impl Adversary for Constant {
        fn name(&self) -> String {
            "constant".into()
        }

        fn play(&self, _: &mut dyn Oracles, _: &mut dyn RngCore) -> Result<bool> {
            Ok(self.0)
        }
    }

    struct Greedy;

    impl Adversary for Greedy {
        fn name(&self) -> String {
            "greedy".into()
        }

        fn play(&self, o: &mut dyn Oracles, _: &mut dyn RngCore) -> Result<bool> {
            let q = o.budget().q_max;
            for x in 0..=q {
                o.e(x)?;
            }
            Ok(true)
        }
    }

    /// Swallows the budget error and claims success anyway.
    struct Sneaky;

    impl Adversary for Sneaky {
        fn name(&self) -> String {
            "sneaky".into()
        }

        fn play(&self, o: &mut dyn Oracles, _: &mut dyn RngCore) -> Result<bool> {
            for x in 0..4 {
                let _ = o.f(0, x);
            }
            Ok(true)
        }
    }

    #[test]
    fn operator_names_round_trip() {
        for op in [
            Operator::Single,
            Operator::Double,
            Operator::TwoKeyTriple,
            Operator::Cascade(3),
        ] {
            assert_eq!(op.to_string().parse::<Operator>().unwrap(), op);
        }
        assert!("cascade:0".parse::<Operator>().is_err());
        assert!("triple".parse::<Operator>().is_err());
        assert_eq!(Operator::Double.composed_key_bits(params(56, 64)), 112);
        assert_eq!(Operator::Cascade(3).composed_key_bits(params(5, 8)), 15);
    }

    #[test]
    fn zero_q_rejected() {
        let r = build_world(
            World::Composed,
            Operator::Double,
            params(2, 2),
            OracleBudget::new(0, 4),
            1,
        );
        assert!(matches!(r, Err(Error::Config(_))));
    }

    #[test]
    fn crucial_keys_in_both_worlds() {
        let g1 = game(World::Composed, Operator::Double, 3, 4, 1, 1, 5);
        let g2 = game(World::Random, Operator::Double, 3, 4, 1, 1, 5);
        assert_eq!(g1.crucial().len(), 2);
        assert_eq!(g2.crucial().len(), 2);
        let g3 = game(World::Random, Operator::Cascade(4), 3, 4, 1, 1, 5);
        assert_eq!(g3.crucial().len(), 4);
    }

    #[test]
    fn single_world1_is_f_at_key() {
        let mut g = game(World::Composed, Operator::Single, 3, 4, 16, 16, 11);
        let k = g.crucial()[0];
        for x in 0..16 {
            let y = g.e_query(x).unwrap();
            assert_eq!(g.f_query(k, x).unwrap(), y);
        }
    }

    #[test]
    fn double_world1_exhaustive_composition() {
        for seed in 0..20 {
            let mut g = game(World::Composed, Operator::Double, 1, 1, 2, 8, seed);
            let (k1, k2) = (g.crucial()[0], g.crucial()[1]);
            for x in 0..2 {
                let z = g.e_query(x).unwrap();
                let mid = g.f_query(k2, x).unwrap();
                assert_eq!(g.f_query(k1, mid).unwrap(), z);
            }
        }
    }

    #[test]
    fn double_consistency_kappa1_n2() {
        for seed in 0..50 {
            let mut g = game(World::Composed, Operator::Double, 1, 2, 4, 16, seed);
            let (k1, k2) = (g.crucial()[0], g.crucial()[1]);
            for x in 0..4 {
                let z = g.e_query(x).unwrap();
                let y = g.f_query(k2, x).unwrap();
                assert_eq!(g.f_query(k1, y).unwrap(), z, "seed {seed} x {x}");
            }
        }
    }

    #[test]
    fn triple_world1_exhaustive() {
        for seed in 0..20 {
            let mut g = game(World::Composed, Operator::TwoKeyTriple, 2, 2, 4, 64, seed);
            let (k1, k2) = (g.crucial()[0], g.crucial()[1]);
            for x in 0..4 {
                let e = g.e_query(x).unwrap();
                let a = g.f_query(k1, x).unwrap();
                let b = g.finv_query(k2, a).unwrap();
                assert_eq!(g.f_query(k1, b).unwrap(), e);
            }
            assert!(g.e_replies_match_composition().unwrap());
        }
    }

    #[test]
    fn cascade_applies_last_key_first() {
        let mut g = game(World::Composed, Operator::Cascade(3), 2, 3, 8, 64, 4);
        let keys = g.crucial().0.clone();
        for x in 0..8 {
            let e = g.e_query(x).unwrap();
            let mut v = x;
            for &k in keys.iter().rev() {
                v = g.f_query(k, v).unwrap();
            }
            assert_eq!(v, e);
        }
    }

    #[test]
    fn caching_and_accounting() {
        let mut g = game(World::Composed, Operator::Double, 2, 4, 2, 3, 1);
        let y = g.e_query(5).unwrap();
        assert_eq!(g.e_query(5).unwrap(), y);
        assert_eq!(g.budget().q_used, 1);

        let fy = g.f_query(1, 2).unwrap();
        assert_eq!(g.budget().t_used, 1);
        assert_eq!(g.finv_query(1, fy).unwrap(), 2);
        assert_eq!(g.f_query(1, 2).unwrap(), fy);
        assert_eq!(g.budget().t_used, 1);
        assert_eq!(g.transcript().len(), 4);

        g.f_query(0, 0).unwrap();
        assert_eq!(g.budget().t_used, 2);
    }

    #[test]
    fn e_evaluation_is_free_for_t() {
        let mut g = game(World::Composed, Operator::TwoKeyTriple, 4, 8, 8, 1, 3);
        for x in 0..8 {
            g.e_query(x).unwrap();
        }
        assert_eq!(g.budget().t_used, 0);
        assert_eq!(g.transcript().cipher_queries(), 0);
    }

    #[test]
    fn budget_error_is_distinct_from_domain_error() {
        let mut g = game(World::Random, Operator::Double, 2, 4, 1, 1, 3);
        g.e_query(0).unwrap();
        assert!(matches!(g.e_query(1), Err(Error::Budget(_))));
        assert!(matches!(g.e_query(16), Err(Error::Domain { .. })));
        g.f_query(0, 0).unwrap();
        assert!(matches!(g.finv_query(1, 0), Err(Error::Budget(_))));
        assert!(matches!(g.f_query(4, 0), Err(Error::Domain { .. })));
    }

    #[test]
    fn constant_adversary() {
        let mut g = game(World::Composed, Operator::Double, 2, 4, 1, 1, 3);
        let mut coins = ChaCha8Rng::seed_from_u64(0);
        let out = run_adversary(&mut g, &Constant(false), &mut coins).unwrap();
        assert!(!out.decision);
        assert!(out.transcript.is_empty());
    }

    #[test]
    fn overrun_aborts() {
        let mut coins = ChaCha8Rng::seed_from_u64(0);
        let mut g = game(World::Composed, Operator::Double, 2, 4, 3, 1, 3);
        let err = run_adversary(&mut g, &Greedy, &mut coins).unwrap_err();
        assert!(matches!(
            err,
            Error::BudgetViolation(BudgetReport {
                oracle: OracleKind::Challenge,
                ..
            })
        ));

        let mut g = game(World::Random, Operator::Double, 2, 4, 3, 2, 3);
        let err = run_adversary(&mut g, &Sneaky, &mut coins).unwrap_err();
        assert!(matches!(
            err,
            Error::BudgetViolation(BudgetReport {
                oracle: OracleKind::Cipher,
                ..
            })
        ));
        assert_eq!(g.budget().t_used, 2);
    }

    #[test]
    fn rerun_needs_fresh_game() {
        let mut coins = ChaCha8Rng::seed_from_u64(0);
        let mut g = game(World::Composed, Operator::Double, 2, 4, 1, 1, 3);
        g.e_query(0).unwrap();
        assert!(run_adversary(&mut g, &Constant(true), &mut coins).is_err());
    }

    #[test]
    fn same_seed_same_behaviour() {
        for world in [World::Composed, World::Random] {
            let mut a = game(world, Operator::Double, 3, 6, 4, 8, 77);
            let mut b = game(world, Operator::Double, 3, 6, 4, 8, 77);
            assert_eq!(a.crucial(), b.crucial());
            for i in 0..4 {
                assert_eq!(a.e_query(i).unwrap(), b.e_query(i).unwrap());
                assert_eq!(a.f_query(i, i).unwrap(), b.f_query(i, i).unwrap());
                assert_eq!(a.finv_query(7 - i, i).unwrap(), b.finv_query(7 - i, i).unwrap());
            }
            assert_eq!(a.transcript(), b.transcript());
        }
    }

    #[test]
    fn world2_e_independent_of_f() {
        // E(0) against F(k2*, 0) over fresh world-2 games
        let mut table = vec![vec![0u64; 16]; 16];
        for trial in 0..10_000 {
            let mut g = build_world_for_trial(
                World::Random,
                Operator::Double,
                params(2, 4),
                OracleBudget::new(1, 2),
                9,
                trial,
            )
            .unwrap();
            let k2 = g.crucial()[1];
            let e = g.e_query(0).unwrap();
            let f = g.f_query(k2, 0).unwrap();
            table[e as usize][f as usize] += 1;
        }
        let chi = chi_square_independence(&table);
        assert!(!chi.rejects(0.001), "{chi:?}");
    }
}
