//! Reference adversaries.
//!
//! Every adversary here is parameterized up front and plays through the
//! [`Oracles`] handle only, so the game engine's budget enforcement applies
//! to all of them unchanged.

use std::fmt;
use std::str::FromStr;

use num::{BigRational, One, Zero};
use rand::{Rng, RngCore};
use rustc_hash::{FxHashMap, FxHashSet};

use crate::cipher::CipherParams;
use crate::error::{Error, Result};
use crate::game::{Adversary, OracleBudget, Oracles};
use crate::pool::SparsePool;
use crate::seed::Sampler;

/// How an attack picks its candidate keys.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum KeyChoice {
    /// Uniformly without replacement from the adversary's coins.
    Random,
    /// The smallest keys, in order. Deterministic, for golden tests and
    /// exact enumeration.
    Lexicographic,
    /// Fixed sets supplied by the caller (test hook; may overlap).
    Explicit { first: Vec<u64>, second: Vec<u64> },
}

struct Coins<'a>(&'a mut dyn RngCore);

impl Sampler for Coins<'_> {
    fn below(&mut self, bound: u128) -> u128 {
        if bound == 1 << 64 {
            u128::from(self.0.next_u64())
        } else {
            u128::from(self.0.random_range(0..bound as u64))
        }
    }
}

/// `count` distinct keys, uniform without replacement.
fn distinct_keys(count: u64, params: CipherParams, coins: &mut dyn RngCore) -> Vec<u64> {
    let mut pool = SparsePool::new(params.key_space());
    let mut coins = Coins(coins);
    (0..count).map(|_| pool.draw(&mut coins)).collect()
}

type Mixture = Vec<(BigRational, Box<dyn Adversary>)>;

/// Largest number of pure strategies a random key choice expands into.
const MAX_PURE_STRATEGIES: usize = 1 << 16;

fn deterministic(adv: &(impl Adversary + Clone + 'static)) -> Option<Mixture> {
    Some(vec![(BigRational::one(), Box::new(adv.clone()))])
}

/// Every `m`-element subset of `pool`, in lexicographic order.
fn subsets(pool: &[u64], m: usize) -> Vec<Vec<u64>> {
    if m == 0 {
        return vec![Vec::new()];
    }
    if pool.len() < m {
        return Vec::new();
    }
    let mut with_first: Vec<Vec<u64>> = subsets(&pool[1..], m - 1)
        .into_iter()
        .map(|mut rest| {
            rest.insert(0, pool[0]);
            rest
        })
        .collect();
    with_first.extend(subsets(&pool[1..], m));
    with_first
}

/// Every ordered sequence of `m` distinct elements of `pool`.
fn arrangements(pool: &[u64], m: usize) -> Vec<Vec<u64>> {
    if m == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for (i, &head) in pool.iter().enumerate() {
        let mut rest = pool.to_vec();
        rest.remove(i);
        for mut tail in arrangements(&rest, m - 1) {
            tail.insert(0, head);
            out.push(tail);
        }
    }
    out
}

fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u128, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

/// Uniform mixture over explicit key sets.
fn uniform_mixture<A: Adversary + 'static>(choices: Vec<A>) -> Option<Mixture> {
    if choices.is_empty() {
        return None;
    }
    let weight = BigRational::new(1.into(), choices.len().into());
    Some(
        choices
            .into_iter()
            .map(|a| (weight.clone(), Box::new(a) as Box<dyn Adversary>))
            .collect(),
    )
}

fn key_mode(keys: &KeyChoice) -> &'static str {
    match keys {
        KeyChoice::Random => "",
        KeyChoice::Lexicographic => ",keys=lex",
        KeyChoice::Explicit { .. } => ",keys=explicit",
    }
}

/// Parameters of the meet-in-the-middle attacks: `s` probe plaintexts,
/// `t` cipher queries, `q` challenge queries.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MitmConfig {
    pub s: u64,
    pub t: u64,
    pub q: u64,
}

impl MitmConfig {
    /// `floor(t / 2s)`, the size of each key set.
    pub fn set_size(&self) -> u64 {
        self.t / (2 * self.s)
    }

    fn validate_double(&self, params: CipherParams) -> Result<()> {
        if self.s == 0 {
            return Err(Error::config("mitm-double needs s >= 1"));
        }
        if self.s > self.q {
            return Err(Error::config(format!(
                "mitm-double needs s <= q (s={}, q={})",
                self.s, self.q
            )));
        }
        if self.t < 2 * self.s {
            return Err(Error::config(format!(
                "mitm-double needs t >= 2s (t={}, s={})",
                self.t, self.s
            )));
        }
        if u128::from(self.s) > params.block_space() / 2 {
            return Err(Error::config(format!(
                "mitm-double needs s <= 2^(n-1) (s={}, n={})",
                self.s,
                params.n()
            )));
        }
        if 2 * u128::from(self.set_size()) > params.key_space() {
            return Err(Error::config(format!(
                "two disjoint key sets of size {} do not fit in 2^{} keys",
                self.set_size(),
                params.kappa()
            )));
        }
        Ok(())
    }
}

/// Meet in the middle against the double cipher.
///
/// Queries `E` on the first `s` blocks, then evaluates `F` forward under each
/// key of `K1` and `F^-1` backward under each key of `K2` on those points, and
/// outputs 1 iff some forward vector equals some backward vector.
#[derive(Clone, Debug)]
pub struct MitmDouble {
    cfg: MitmConfig,
    keys: KeyChoice,
}

pub fn mitm_double(cfg: MitmConfig, params: CipherParams) -> Result<MitmDouble> {
    cfg.validate_double(params)?;
    Ok(MitmDouble {
        cfg,
        keys: KeyChoice::Random,
    })
}

impl MitmDouble {
    pub fn with_keys(mut self, keys: KeyChoice) -> Result<Self> {
        if let KeyChoice::Explicit { first, second } = &keys {
            let m = self.cfg.set_size() as usize;
            if first.len() != m || second.len() != m {
                return Err(Error::config(format!("explicit key sets must both have size {m}")));
            }
        }
        self.keys = keys;
        Ok(self)
    }

    pub fn config(&self) -> MitmConfig {
        self.cfg
    }

    fn key_sets(&self, params: CipherParams, coins: &mut dyn RngCore) -> (Vec<u64>, Vec<u64>) {
        let m = self.cfg.set_size();
        match &self.keys {
            KeyChoice::Random => {
                let mut all = distinct_keys(2 * m, params, coins);
                let second = all.split_off(m as usize);
                (all, second)
            }
            KeyChoice::Lexicographic => ((0..m).collect(), (m..2 * m).collect()),
            KeyChoice::Explicit { first, second } => (first.clone(), second.clone()),
        }
    }
}

impl Adversary for MitmDouble {
    fn name(&self) -> String {
        format!("mitm-double:s={}{}", self.cfg.s, key_mode(&self.keys))
    }

    fn play(&self, o: &mut dyn Oracles, coins: &mut dyn RngCore) -> Result<bool> {
        let params = o.params();
        let s = self.cfg.s;
        let xs: Vec<u64> = (0..s).collect();
        let ys = xs.iter().map(|&x| o.e(x)).collect::<Result<Vec<u64>>>()?;
        let (k1s, k2s) = self.key_sets(params, coins);

        let mut forward = Vec::with_capacity(k1s.len());
        let mut backward: FxHashSet<Vec<u64>> = FxHashSet::default();
        for (&k1, &k2) in k1s.iter().zip(&k2s) {
            let mut u = Vec::with_capacity(s as usize);
            let mut v = Vec::with_capacity(s as usize);
            for (&x, &y) in xs.iter().zip(&ys) {
                u.push(o.f(k1, x)?);
                v.push(o.f_inv(k2, y)?);
            }
            forward.push(u);
            backward.insert(v);
        }
        Ok(forward.iter().any(|u| backward.contains(u)))
    }

    fn pure_strategies(&self, params: CipherParams) -> Option<Mixture> {
        if self.keys != KeyChoice::Random {
            return deterministic(self);
        }
        // the decision depends only on the two sets, which are a uniform
        // pair of disjoint m-subsets
        let m = self.cfg.set_size();
        let space = params.key_space();
        if binomial(space, u128::from(m)).saturating_mul(binomial(space, u128::from(m))) > MAX_PURE_STRATEGIES as u128 {
            return None;
        }
        let all: Vec<u64> = (0..space as u64).collect();
        let mut choices = Vec::new();
        for first in subsets(&all, m as usize) {
            let rest: Vec<u64> = all.iter().copied().filter(|k| !first.contains(k)).collect();
            for second in subsets(&rest, m as usize) {
                choices.push(Self {
                    cfg: self.cfg,
                    keys: KeyChoice::Explicit {
                        first: first.clone(),
                        second,
                    },
                });
            }
        }
        uniform_mixture(choices)
    }
}

/// Exhaustive key search against a single key: queries `E` on `probes`
/// blocks, then tries `floor(t / probes)` keys (at most `2^kappa`) on them.
#[derive(Clone, Debug)]
pub struct ExhaustiveSingle {
    t: u64,
    probes: u64,
    keys: KeyChoice,
}

pub fn exhaustive_single(t: u64, probes: u64) -> Result<ExhaustiveSingle> {
    if probes == 0 {
        return Err(Error::config("exhaustive search needs at least one probe"));
    }
    Ok(ExhaustiveSingle {
        t,
        probes,
        keys: KeyChoice::Random,
    })
}

impl ExhaustiveSingle {
    /// Explicit keys are taken from `first`; `second` is ignored.
    pub fn with_keys(mut self, keys: KeyChoice) -> Result<Self> {
        self.keys = keys;
        Ok(self)
    }

    pub fn candidates(&self, params: CipherParams) -> u64 {
        let m = u128::from(self.t / self.probes).min(params.key_space());
        m as u64
    }
}

impl Adversary for ExhaustiveSingle {
    fn name(&self) -> String {
        format!("exhaustive:probes={}{}", self.probes, key_mode(&self.keys))
    }

    fn play(&self, o: &mut dyn Oracles, coins: &mut dyn RngCore) -> Result<bool> {
        let params = o.params();
        if u128::from(self.probes) > params.block_space() {
            return Err(Error::config("more probes than blocks"));
        }
        let xs: Vec<u64> = (0..self.probes).collect();
        let ys = xs.iter().map(|&x| o.e(x)).collect::<Result<Vec<u64>>>()?;
        let m = self.candidates(params);
        let keys = match &self.keys {
            KeyChoice::Lexicographic => (0..m).collect(),
            KeyChoice::Random => distinct_keys(m, params, coins),
            KeyChoice::Explicit { first, .. } => first.clone(),
        };
        let mut found = false;
        for k in keys {
            let mut all = true;
            for (&x, &y) in xs.iter().zip(&ys) {
                all &= o.f(k, x)? == y;
            }
            found |= all;
        }
        Ok(found)
    }

    fn pure_strategies(&self, params: CipherParams) -> Option<Mixture> {
        if self.keys != KeyChoice::Random {
            return deterministic(self);
        }
        let m = self.candidates(params);
        if binomial(params.key_space(), u128::from(m)) > MAX_PURE_STRATEGIES as u128 {
            return None;
        }
        let all: Vec<u64> = (0..params.key_space() as u64).collect();
        uniform_mixture(
            subsets(&all, m as usize)
                .into_iter()
                .map(|first| Self {
                    keys: KeyChoice::Explicit {
                        first,
                        second: Vec::new(),
                    },
                    ..self.clone()
                })
                .collect(),
        )
    }
}

/// Meet in the middle against the two-key triple cipher.
///
/// With `c = E(0)`, the true pair satisfies
/// `F^-1(k2, F(k1, 0)) = F^-1(k1, c)`. The attack tabulates
/// `a = F(k1, 0)` and `b = F^-1(k1, c)` for every `k1` in `K1`, evaluates
/// `F^-1(k2, a)` for every `k2` in `K2` and every distinct `a`, and keeps the
/// pairs where the middle values meet. Each surviving pair is then checked
/// by full triple encryption of blocks `1..=s` against `E`. Outputs 1 iff
/// some pair passes every check.
///
/// Key sets have size `m`, the largest value with `m^2 + 2m <= t - 3s`
/// (capped at `2^kappa`), so at least one full confirmation always fits.
/// Once the remaining budget cannot cover another confirmation step, the
/// remaining candidates are dropped.
#[derive(Clone, Debug)]
pub struct MitmTriple {
    cfg: MitmConfig,
    keys: KeyChoice,
}

pub fn mitm_triple(cfg: MitmConfig, params: CipherParams) -> Result<MitmTriple> {
    if cfg.s == 0 {
        return Err(Error::config("mitm-triple needs s >= 1 confirmation block"));
    }
    if cfg.s + 1 > cfg.q {
        return Err(Error::config(format!(
            "mitm-triple needs q >= s + 1 (s={}, q={})",
            cfg.s, cfg.q
        )));
    }
    if u128::from(cfg.s) >= params.block_space() {
        return Err(Error::config("mitm-triple needs s < 2^n"));
    }
    if MitmTriple::set_size_for(cfg, params) == 0 {
        return Err(Error::config(format!(
            "mitm-triple: t={} too small for s={} (need t >= 3s + 3)",
            cfg.t, cfg.s
        )));
    }
    Ok(MitmTriple {
        cfg,
        keys: KeyChoice::Random,
    })
}

impl MitmTriple {
    fn set_size_for(cfg: MitmConfig, params: CipherParams) -> u64 {
        let Some(avail) = cfg.t.checked_sub(3 * cfg.s) else {
            return 0;
        };
        // largest m with m^2 + 2m <= avail, i.e. (m+1)^2 <= avail + 1
        let mut m = ((avail as f64 + 1.0).sqrt() as u64).saturating_sub(1);
        while (m + 1) * (m + 1) + 2 * (m + 1) <= avail {
            m += 1;
        }
        while m > 0 && m * m + 2 * m > avail {
            m -= 1;
        }
        u128::from(m).min(params.key_space()) as u64
    }

    pub fn set_size(&self, params: CipherParams) -> u64 {
        Self::set_size_for(self.cfg, params)
    }

    pub fn with_keys(mut self, keys: KeyChoice) -> Result<Self> {
        self.keys = keys;
        Ok(self)
    }
}

impl Adversary for MitmTriple {
    fn name(&self) -> String {
        format!("mitm-triple:s={}{}", self.cfg.s, key_mode(&self.keys))
    }

    fn play(&self, o: &mut dyn Oracles, coins: &mut dyn RngCore) -> Result<bool> {
        let params = o.params();
        let m = self.set_size(params);
        let (k1s, k2s): (Vec<u64>, Vec<u64>) = match &self.keys {
            KeyChoice::Random => (distinct_keys(m, params, coins), distinct_keys(m, params, coins)),
            KeyChoice::Lexicographic => ((0..m).collect(), (0..m).collect()),
            KeyChoice::Explicit { first, second } => (first.clone(), second.clone()),
        };

        let c0 = o.e(0)?;
        let mut ends = Vec::with_capacity(k1s.len());
        // distinct a values in first-seen order, with the K1 indices producing them
        let mut groups: Vec<(u64, Vec<usize>)> = Vec::new();
        let mut group_of: FxHashMap<u64, usize> = FxHashMap::default();
        for (i, &k1) in k1s.iter().enumerate() {
            let a = o.f(k1, 0)?;
            ends.push(o.f_inv(k1, c0)?);
            let g = *group_of.entry(a).or_insert_with(|| {
                groups.push((a, Vec::new()));
                groups.len() - 1
            });
            groups[g].1.push(i);
        }

        let mut candidates = Vec::new();
        for &k2 in &k2s {
            for (a, members) in &groups {
                let w = o.f_inv(k2, *a)?;
                for &i in members {
                    if ends[i] == w {
                        candidates.push((k1s[i], k2));
                    }
                }
            }
        }

        let mut checks: Vec<u64> = Vec::with_capacity(self.cfg.s as usize);
        for (k1, k2) in candidates {
            let mut ok = true;
            for j in 1..=self.cfg.s {
                if o.budget().t_remaining() < 3 {
                    return Ok(false);
                }
                if checks.len() < j as usize {
                    checks.push(o.e(j)?);
                }
                let u = o.f(k1, j)?;
                let v = o.f_inv(k2, u)?;
                if o.f(k1, v)? != checks[j as usize - 1] {
                    ok = false;
                    break;
                }
            }
            if ok {
                return Ok(true);
            }
        }
        Ok(false)
    }

    fn pure_strategies(&self, params: CipherParams) -> Option<Mixture> {
        if self.keys != KeyChoice::Random {
            return deterministic(self);
        }
        // candidate order matters once the budget runs short, so enumerate
        // ordered key sequences
        let m = self.set_size(params) as usize;
        let all: Vec<u64> = (0..params.key_space() as u64).collect();
        let per_set: u128 = (0..m as u128).fold(1u128, |acc, i| acc.saturating_mul(params.key_space() - i));
        if per_set.saturating_mul(per_set) > MAX_PURE_STRATEGIES as u128 {
            return None;
        }
        let seqs = arrangements(&all, m);
        let mut choices = Vec::with_capacity(seqs.len() * seqs.len());
        for first in &seqs {
            for second in &seqs {
                choices.push(Self {
                    cfg: self.cfg,
                    keys: KeyChoice::Explicit {
                        first: first.clone(),
                        second: second.clone(),
                    },
                });
            }
        }
        uniform_mixture(choices)
    }
}

/// Makes no queries; outputs 1 with probability `p`.
#[derive(Clone, Debug)]
pub struct BaselineRandom {
    p: f64,
}

pub fn baseline_random(p: f64) -> Result<BaselineRandom> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::config(format!("baseline probability {p} outside [0, 1]")));
    }
    Ok(BaselineRandom { p })
}

impl Adversary for BaselineRandom {
    fn name(&self) -> String {
        format!("baseline:p={}", self.p)
    }

    fn play(&self, _: &mut dyn Oracles, coins: &mut dyn RngCore) -> Result<bool> {
        Ok(coins.random_bool(self.p))
    }

    fn pure_strategies(&self, _: CipherParams) -> Option<Mixture> {
        let p = BigRational::from_float(self.p)?;
        let q = BigRational::one() - &p;
        let mut mix: Vec<(BigRational, Box<dyn Adversary>)> = Vec::new();
        if !p.is_zero() {
            mix.push((p, Box::new(ConstantGuess(true))));
        }
        if !q.is_zero() {
            mix.push((q, Box::new(ConstantGuess(false))));
        }
        Some(mix)
    }
}

/// Always outputs the same bit without querying.
#[derive(Clone, Copy, Debug)]
pub struct ConstantGuess(pub bool);

impl Adversary for ConstantGuess {
    fn name(&self) -> String {
        format!("constant:bit={}", u8::from(self.0))
    }

    fn play(&self, _: &mut dyn Oracles, _: &mut dyn RngCore) -> Result<bool> {
        Ok(self.0)
    }

    fn pure_strategies(&self, _: CipherParams) -> Option<Mixture> {
        deterministic(self)
    }
}

/// A fully adaptive adversary whose next key is derived from the last
/// answer: `k <- E(0) mod 2^kappa`, then `len` cipher queries alternating
/// forward and inverse, each choosing the next key from its reply.
#[derive(Clone, Copy, Debug)]
pub struct ProbeChain {
    len: u64,
}

pub fn probe_chain(len: u64) -> ProbeChain {
    ProbeChain { len }
}

impl Adversary for ProbeChain {
    fn name(&self) -> String {
        format!("chain:len={}", self.len)
    }

    fn play(&self, o: &mut dyn Oracles, _: &mut dyn RngCore) -> Result<bool> {
        let params = o.params();
        let key_mask = (params.key_space() - 1) as u64;
        let block_mask = (params.block_space() - 1) as u64;
        let mut z = o.e(0)?;
        let mut k = z & key_mask;
        for i in 0..self.len {
            if o.budget().t_remaining() == 0 {
                break;
            }
            let input = (z ^ i) & block_mask;
            z = if i % 2 == 0 { o.f(k, input)? } else { o.f_inv(k, input)? };
            k = (z >> 1 ^ k.wrapping_add(1)) & key_mask;
        }
        Ok(z & 1 == 1)
    }

    fn pure_strategies(&self, _: CipherParams) -> Option<Mixture> {
        deterministic(self)
    }
}

/// Attack selected by name and parameter string, e.g. `mitm-double:s=2`,
/// `exhaustive:probes=2,keys=lex`, `mitm-triple:s=2`, `baseline:p=0.5`.
#[derive(Clone, Debug, PartialEq)]
pub enum AttackSpec {
    MitmDouble { s: u64, lexicographic: bool },
    Exhaustive { probes: u64, lexicographic: bool },
    MitmTriple { s: u64, lexicographic: bool },
    Baseline { p: f64 },
    Chain { len: u64 },
    Constant { bit: bool },
}

impl AttackSpec {
    /// Instantiates the attack for the given cipher and budget, checking
    /// every parameter constraint.
    pub fn build(&self, params: CipherParams, budget: OracleBudget) -> Result<Box<dyn Adversary>> {
        let keys = |lex: bool| {
            if lex {
                KeyChoice::Lexicographic
            } else {
                KeyChoice::Random
            }
        };
        let cfg = |s: u64| MitmConfig {
            s,
            t: budget.t_max,
            q: budget.q_max,
        };
        Ok(match *self {
            AttackSpec::MitmDouble { s, lexicographic } => {
                Box::new(mitm_double(cfg(s), params)?.with_keys(keys(lexicographic))?)
            }
            AttackSpec::Exhaustive { probes, lexicographic } => {
                if probes > budget.q_max {
                    return Err(Error::config(format!(
                        "exhaustive needs probes <= q (probes={probes}, q={})",
                        budget.q_max
                    )));
                }
                if u128::from(probes) > params.block_space() {
                    return Err(Error::config("exhaustive needs probes <= 2^n"));
                }
                Box::new(exhaustive_single(budget.t_max, probes)?.with_keys(keys(lexicographic))?)
            }
            AttackSpec::MitmTriple { s, lexicographic } => {
                Box::new(mitm_triple(cfg(s), params)?.with_keys(keys(lexicographic))?)
            }
            AttackSpec::Baseline { p } => Box::new(baseline_random(p)?),
            AttackSpec::Chain { len } => {
                if len > budget.t_max {
                    return Err(Error::config("chain length exceeds t"));
                }
                Box::new(probe_chain(len))
            }
            AttackSpec::Constant { bit } => Box::new(ConstantGuess(bit)),
        })
    }
}

impl fmt::Display for AttackSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lex = |l: bool| if l { ",keys=lex" } else { "" };
        match *self {
            AttackSpec::MitmDouble { s, lexicographic } => write!(f, "mitm-double:s={s}{}", lex(lexicographic)),
            AttackSpec::Exhaustive { probes, lexicographic } => {
                write!(f, "exhaustive:probes={probes}{}", lex(lexicographic))
            }
            AttackSpec::MitmTriple { s, lexicographic } => write!(f, "mitm-triple:s={s}{}", lex(lexicographic)),
            AttackSpec::Baseline { p } => write!(f, "baseline:p={p}"),
            AttackSpec::Chain { len } => write!(f, "chain:len={len}"),
            AttackSpec::Constant { bit } => write!(f, "constant:bit={}", u8::from(bit)),
        }
    }
}

impl FromStr for AttackSpec {
    type Err = Error;

    fn from_str(spec: &str) -> Result<Self> {
        let (name, rest) = spec.split_once(':').unwrap_or((spec, ""));
        let mut opts: FxHashMap<&str, &str> = FxHashMap::default();
        for kv in rest.split(',').filter(|s| !s.is_empty()) {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| Error::config(format!("attack option {kv:?} is not key=value")))?;
            opts.insert(k.trim(), v.trim());
        }
        let allowed: &[&str] = match name {
            "mitm-double" | "mitm-triple" => &["s", "keys"],
            "exhaustive" => &["probes", "keys"],
            "baseline" => &["p"],
            "chain" => &["len"],
            "constant" => &["bit"],
            _ => {
                return Err(Error::config(format!(
                    "unknown attack {name:?} (expected mitm-double, exhaustive, mitm-triple, baseline, chain, constant)"
                )))
            }
        };
        if let Some(k) = opts.keys().find(|k| !allowed.contains(k)) {
            return Err(Error::config(format!("attack {name} has no option {k:?}")));
        }
        let int = |key: &str, default: u64| -> Result<u64> {
            opts.get(key).map_or(Ok(default), |v| {
                v.parse()
                    .map_err(|_| Error::config(format!("option {key}={v:?} is not an integer")))
            })
        };
        let lexicographic = match opts.get("keys").copied() {
            None | Some("random") => false,
            Some("lex") => true,
            Some(other) => return Err(Error::config(format!("keys must be random or lex, got {other:?}"))),
        };
        Ok(match name {
            "mitm-double" => AttackSpec::MitmDouble {
                s: int("s", 1)?,
                lexicographic,
            },
            "mitm-triple" => AttackSpec::MitmTriple {
                s: int("s", 2)?,
                lexicographic,
            },
            "exhaustive" => AttackSpec::Exhaustive {
                probes: int("probes", 1)?,
                lexicographic,
            },
            "baseline" => {
                let p = opts.get("p").map_or(Ok(0.5), |v| {
                    v.parse::<f64>()
                        .map_err(|_| Error::config(format!("option p={v:?} is not a number")))
                })?;
                AttackSpec::Baseline { p }
            }
            "chain" => AttackSpec::Chain { len: int("len", 1)? },
            _ => AttackSpec::Constant {
                bit: int("bit", 0)? != 0,
            },
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{build_world, build_world_for_trial, run_adversary, Operator, World};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn params(kappa: u32, n: u32) -> CipherParams {
        CipherParams::new(kappa, n).unwrap()
    }

    fn cfg(s: u64, t: u64, q: u64) -> MitmConfig {
        MitmConfig { s, t, q }
    }

    #[test]
    fn mitm_double_validation() {
        let p = params(4, 8);
        assert!(mitm_double(cfg(2, 16, 2), p).is_ok());
        assert!(mitm_double(cfg(9, 40, 4), p).is_err());
        assert!(mitm_double(cfg(0, 16, 2), p).is_err());
        assert!(mitm_double(cfg(2, 3, 2), p).is_err());
        // 2 * floor(40/2) = 40 > 16 keys
        assert!(mitm_double(cfg(1, 40, 2), p).is_err());
        // s <= 2^(n-1)
        assert!(mitm_double(cfg(2, 4, 2), params(3, 1)).is_err());
        assert_eq!(cfg(2, 17, 2).set_size(), 4);
    }

    #[test]
    fn mitm_double_accounting() {
        let p = params(2, 4);
        let adv = mitm_double(cfg(1, 4, 1), p).unwrap();
        let mut coins = ChaCha8Rng::seed_from_u64(1);
        for seed in 0..200 {
            for world in [World::Composed, World::Random] {
                let mut g = build_world(world, Operator::Double, p, OracleBudget::new(1, 4), seed).unwrap();
                run_adversary(&mut g, &adv, &mut coins).unwrap();
                assert!(g.budget().t_used <= 4 && g.budget().q_used <= 1);
                assert_eq!(g.budget().t_used, 4);
            }
        }
    }

    #[test]
    fn planted_keys_always_found() {
        let p = params(4, 8);
        let mut coins = ChaCha8Rng::seed_from_u64(1);
        for trial in 0..500 {
            let mut g = build_world_for_trial(World::Composed, Operator::Double, p, OracleBudget::new(2, 16), 3, trial)
                .unwrap();
            // E = F(outer, F(inner, .)); the forward set must hold the inner key
            let (outer, inner) = (g.crucial()[0], g.crucial()[1]);
            let first = vec![inner, (inner + 1) % 16, (inner + 2) % 16, (inner + 3) % 16];
            let second = vec![outer, (outer + 5) % 16, (outer + 6) % 16, (outer + 7) % 16];
            let adv = mitm_double(cfg(2, 16, 2), p)
                .unwrap()
                .with_keys(KeyChoice::Explicit { first, second })
                .unwrap();
            assert!(run_adversary(&mut g, &adv, &mut coins).unwrap().decision);
        }
    }

    #[test]
    fn lexicographic_key_sets() {
        let adv = mitm_double(cfg(1, 4, 1), params(2, 2))
            .unwrap()
            .with_keys(KeyChoice::Lexicographic)
            .unwrap();
        let mut coins = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(adv.key_sets(params(2, 2), &mut coins), (vec![0, 1], vec![2, 3]));
        assert_eq!(adv.pure_strategies(params(2, 2)).unwrap().len(), 1);
        // {a,b} then a disjoint pair from the other two: 6 choices
        let random = mitm_double(cfg(1, 4, 1), params(2, 2)).unwrap();
        assert_eq!(random.pure_strategies(params(2, 2)).unwrap().len(), 6);
        assert!(mitm_double(cfg(1, 64, 1), params(8, 2))
            .unwrap()
            .pure_strategies(params(8, 2))
            .is_none());
    }

    #[test]
    fn random_key_sets_are_disjoint() {
        let adv = mitm_double(cfg(1, 16, 1), params(4, 4)).unwrap();
        let mut coins = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..100 {
            let (a, b) = adv.key_sets(params(4, 4), &mut coins);
            let all: FxHashSet<u64> = a.iter().chain(&b).copied().collect();
            assert_eq!(all.len(), 16);
        }
    }

    #[test]
    fn exhaustive_zero_budget_never_fires() {
        let adv = exhaustive_single(0, 1).unwrap();
        let mut coins = ChaCha8Rng::seed_from_u64(0);
        for seed in 0..100 {
            let mut g = build_world(
                World::Composed,
                Operator::Single,
                params(2, 4),
                OracleBudget::new(1, 0),
                seed,
            )
            .unwrap();
            assert!(!run_adversary(&mut g, &adv, &mut coins).unwrap().decision);
        }
    }

    #[test]
    fn exhaustive_covers_all_keys() {
        // t >= 2^kappa: the true key is always tried
        let adv = exhaustive_single(64, 2).unwrap();
        let mut coins = ChaCha8Rng::seed_from_u64(0);
        for seed in 0..100 {
            let mut g = build_world(
                World::Composed,
                Operator::Single,
                params(3, 6),
                OracleBudget::new(2, 64),
                seed,
            )
            .unwrap();
            assert!(run_adversary(&mut g, &adv, &mut coins).unwrap().decision);
            assert_eq!(g.budget().t_used, 16);
        }
    }

    #[test]
    fn mitm_triple_sizing() {
        let p = params(3, 6);
        let adv = mitm_triple(cfg(2, 160, 3), p).unwrap();
        assert_eq!(adv.set_size(p), 8);
        let adv = mitm_triple(cfg(2, 30, 3), p).unwrap();
        // 24 available: m = 4 (16 + 8 = 24)
        assert_eq!(adv.set_size(p), 4);
        assert!(mitm_triple(cfg(2, 8, 3), p).is_err());
        assert!(mitm_triple(cfg(2, 160, 2), p).is_err());
    }

    #[test]
    fn mitm_triple_respects_budget() {
        let p = params(3, 6);
        let mut coins = ChaCha8Rng::seed_from_u64(0);
        for t in [9, 20, 40, 90, 160] {
            let adv = mitm_triple(cfg(2, t, 3), p).unwrap();
            for seed in 0..50 {
                for world in [World::Composed, World::Random] {
                    let mut g = build_world(world, Operator::TwoKeyTriple, p, OracleBudget::new(3, t), seed).unwrap();
                    run_adversary(&mut g, &adv, &mut coins).unwrap();
                }
            }
        }
    }

    #[test]
    fn baseline_extremes() {
        assert!(baseline_random(1.5).is_err());
        let mut coins = ChaCha8Rng::seed_from_u64(0);
        let mut g = build_world(
            World::Composed,
            Operator::Double,
            params(2, 2),
            OracleBudget::new(1, 1),
            0,
        )
        .unwrap();
        assert!(
            run_adversary(&mut g, &baseline_random(1.0).unwrap(), &mut coins)
                .unwrap()
                .decision
        );
        let mix = baseline_random(0.25).unwrap().pure_strategies(params(1, 1)).unwrap();
        assert_eq!(mix.len(), 2);
        assert_eq!(mix[0].0, BigRational::new(1.into(), 4.into()));
    }

    #[test]
    fn enumeration_helpers() {
        assert_eq!(subsets(&[0, 1, 2], 2), vec![vec![0, 1], vec![0, 2], vec![1, 2]]);
        assert_eq!(arrangements(&[0, 1, 2], 2).len(), 6);
        assert_eq!(binomial(16, 4), 1820);
        let triple = mitm_triple(cfg(1, 11, 2), params(2, 2)).unwrap();
        // m = 2: 12 ordered pairs per set
        assert_eq!(triple.pure_strategies(params(2, 2)).unwrap().len(), 144);
    }

    #[test]
    fn spec_strings() {
        let s: AttackSpec = "mitm-double:s=2".parse().unwrap();
        assert_eq!(
            s,
            AttackSpec::MitmDouble {
                s: 2,
                lexicographic: false
            }
        );
        let s: AttackSpec = "exhaustive:probes=2,keys=lex".parse().unwrap();
        assert_eq!(s.to_string(), "exhaustive:probes=2,keys=lex");
        assert_eq!(
            "baseline:p=0.5".parse::<AttackSpec>().unwrap(),
            AttackSpec::Baseline { p: 0.5 }
        );
        assert!("mitm-triple:s=2".parse::<AttackSpec>().is_ok());
        assert!("mitm-double:z=2".parse::<AttackSpec>().is_err());
        assert!("magic".parse::<AttackSpec>().is_err());
        assert!("mitm-double:s=two".parse::<AttackSpec>().is_err());

        let p = params(4, 8);
        let spec: AttackSpec = "mitm-double:s=9".parse().unwrap();
        assert!(spec.build(p, OracleBudget::new(4, 16)).is_err());
        let spec: AttackSpec = "mitm-double:s=2".parse().unwrap();
        assert_eq!(
            spec.build(p, OracleBudget::new(4, 16)).unwrap().name(),
            "mitm-double:s=2"
        );
    }
}
