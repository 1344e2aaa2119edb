//! Monte Carlo estimation of distinguishing advantage.
//!
//! Trial `i` of world `w` draws all its randomness from the `(w, i)` streams
//! of the master seed, and per-world tallies are plain sums, so the result
//! does not depend on how trials are split across workers.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::cipher::CipherParams;
use crate::error::{Error, Result};
use crate::game::{build_world_for_trial, run_adversary, Adversary, Operator, OracleBudget, World};
use crate::seed::{stream_rng, Role};
use crate::stats::{confidence_interval, diff_std_error, Interval};
use crate::transcript::bad_event;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EstimateOptions {
    /// Tally the bad event (crucial pair seen) in each world.
    pub record_bad: bool,
    /// Confidence level of the reported interval.
    pub level: f64,
    /// Worker threads; 0 uses every available core.
    pub workers: usize,
}

impl Default for EstimateOptions {
    fn default() -> Self {
        Self {
            record_bad: false,
            level: 0.95,
            workers: 0,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct WorldTally {
    pub ones: u64,
    pub bad: u64,
}

impl std::ops::Add for WorldTally {
    type Output = Self;

    fn add(self, o: Self) -> Self {
        Self {
            ones: self.ones + o.ones,
            bad: self.bad + o.bad,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AdvantageEstimate {
    pub attack: String,
    pub op: Operator,
    pub params: CipherParams,
    pub q: u64,
    pub t: u64,
    pub trials: u64,
    pub seed: u64,
    pub world1: WorldTally,
    pub world2: WorldTally,
    pub p1: f64,
    pub p2: f64,
    pub adv: f64,
    pub std_error: f64,
    pub level: f64,
    pub ci: Interval,
    pub bad_freq_w1: Option<f64>,
    pub bad_freq_w2: Option<f64>,
}

/// The flat result record written by the command line.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdvantageRecord {
    pub attack: String,
    pub op: String,
    pub kappa: u32,
    pub n: u32,
    pub q: u64,
    pub t: u64,
    pub trials: u64,
    pub p1: f64,
    pub p2: f64,
    pub adv: f64,
    pub ci: [f64; 2],
    pub bad_w1: Option<f64>,
    pub bad_w2: Option<f64>,
    pub seed: u64,
}

pub const CSV_HEADER: &str = "attack,op,kappa,n,q,t,trials,p1,p2,adv,ci_low,ci_high,bad_w1,bad_w2,seed";

impl AdvantageEstimate {
    pub fn record(&self) -> AdvantageRecord {
        AdvantageRecord {
            attack: self.attack.clone(),
            op: self.op.to_string(),
            kappa: self.params.kappa(),
            n: self.params.n(),
            q: self.q,
            t: self.t,
            trials: self.trials,
            p1: self.p1,
            p2: self.p2,
            adv: self.adv,
            ci: [self.ci.low, self.ci.high],
            bad_w1: self.bad_freq_w1,
            bad_w2: self.bad_freq_w2,
            seed: self.seed,
        }
    }

    /// Standard error of the world-`w` bad-event frequency.
    pub fn bad_std_error(&self, world: World) -> Option<f64> {
        let p = match world {
            World::Composed => self.bad_freq_w1?,
            World::Random => self.bad_freq_w2?,
        };
        Some((p * (1.0 - p) / self.trials as f64).sqrt())
    }
}

impl AdvantageRecord {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("record serializes")
    }

    /// One CSV row matching [`CSV_HEADER`]; absent bad-event columns are empty.
    pub fn to_csv_row(&self) -> String {
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        let mut row = String::new();
        let attack = if self.attack.contains(',') {
            format!("\"{}\"", self.attack)
        } else {
            self.attack.clone()
        };
        write!(
            row,
            "{attack},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.op,
            self.kappa,
            self.n,
            self.q,
            self.t,
            self.trials,
            self.p1,
            self.p2,
            self.adv,
            self.ci[0],
            self.ci[1],
            opt(self.bad_w1),
            opt(self.bad_w2),
            self.seed
        )
        .expect("string write");
        row
    }
}

#[allow(clippy::too_many_arguments)]
fn run_trial(
    attack: &dyn Adversary,
    world: World,
    op: Operator,
    params: CipherParams,
    budget: OracleBudget,
    seed: u64,
    trial: u64,
    record_bad: bool,
) -> Result<WorldTally> {
    let mut game = build_world_for_trial(world, op, params, budget, seed, trial)?;
    let mut coins = stream_rng(seed, world.number(), trial, Role::Attack);
    let crucial = game.crucial().0.clone();
    let outcome = run_adversary(&mut game, attack, &mut coins)?;
    let bad = if record_bad {
        bad_event(outcome.transcript, &crucial, outcome.transcript.len())?
    } else {
        false
    };
    Ok(WorldTally {
        ones: u64::from(outcome.decision),
        bad: u64::from(bad),
    })
}

#[cfg(feature = "parallel")]
fn tally_world(trials: u64, workers: usize, trial: &(dyn Fn(u64) -> Result<WorldTally> + Sync)) -> Result<WorldTally> {
    use rayon::prelude::*;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::config(format!("cannot start worker pool: {e}")))?;
    pool.install(|| {
        (0..trials)
            .into_par_iter()
            .map(trial)
            .try_reduce(WorldTally::default, |a, b| Ok(a + b))
    })
}

#[cfg(not(feature = "parallel"))]
fn tally_world(trials: u64, _workers: usize, trial: &(dyn Fn(u64) -> Result<WorldTally> + Sync)) -> Result<WorldTally> {
    (0..trials).try_fold(WorldTally::default(), |acc, i| Ok(acc + trial(i)?))
}

/// Runs `trials` games in each world and reports the advantage estimate.
///
/// Any budget overrun by the attack aborts the whole estimate with
/// [`Error::BudgetViolation`].
pub fn estimate_advantage(
    attack: &dyn Adversary,
    op: Operator,
    params: CipherParams,
    budget: OracleBudget,
    trials: u64,
    seed: u64,
    opts: EstimateOptions,
) -> Result<AdvantageEstimate> {
    if trials == 0 {
        return Err(Error::config("trials must be at least 1"));
    }
    if opts.record_bad && op.key_count() != 2 {
        return Err(Error::config(format!(
            "bad-event recording needs a two-key operator, {op} has {} keys",
            op.key_count()
        )));
    }
    // fail on an unsupported level before spending time on trials
    crate::stats::z_for_level(opts.level)?;

    let mut tallies = [WorldTally::default(); 2];
    for (slot, world) in tallies.iter_mut().zip([World::Composed, World::Random]) {
        let trial = |i| run_trial(attack, world, op, params, budget, seed, i, opts.record_bad);
        *slot = tally_world(trials, opts.workers, &trial)?;
    }
    let [world1, world2] = tallies;
    let p1 = world1.ones as f64 / trials as f64;
    let p2 = world2.ones as f64 / trials as f64;
    let freq = |bad: u64| opts.record_bad.then(|| bad as f64 / trials as f64);
    Ok(AdvantageEstimate {
        attack: attack.name(),
        op,
        params,
        q: budget.q_max,
        t: budget.t_max,
        trials,
        seed,
        world1,
        world2,
        p1,
        p2,
        adv: p1 - p2,
        std_error: diff_std_error(p1, p2, trials),
        level: opts.level,
        ci: confidence_interval(world1.ones, world2.ones, trials, opts.level)?,
        bad_freq_w1: freq(world1.bad),
        bad_freq_w2: freq(world2.bad),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::attacks::{baseline_random, mitm_double, ConstantGuess, MitmConfig};

    fn params(kappa: u32, n: u32) -> CipherParams {
        CipherParams::new(kappa, n).unwrap()
    }

    #[test]
    fn constant_adversaries_have_zero_advantage() {
        for bit in [false, true] {
            let e = estimate_advantage(
                &ConstantGuess(bit),
                Operator::Double,
                params(2, 2),
                OracleBudget::new(1, 1),
                100,
                1,
                EstimateOptions::default(),
            )
            .unwrap();
            assert_eq!(e.adv, 0.0);
            assert_eq!(e.p1, f64::from(u8::from(bit)));
            assert!(e.ci.contains(0.0));
        }
    }

    #[test]
    fn baseline_ci_covers_zero() {
        let e = estimate_advantage(
            &baseline_random(0.5).unwrap(),
            Operator::Single,
            params(4, 4),
            OracleBudget::new(1, 1),
            100_000,
            11,
            EstimateOptions {
                level: 0.999,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(e.ci.contains(0.0), "{:?}", e.ci);
        assert!((e.p1 - 0.5).abs() < 0.01);
    }

    #[test]
    fn rejects_bad_requests() {
        let a = ConstantGuess(true);
        let b = OracleBudget::new(1, 1);
        let opts = EstimateOptions {
            record_bad: true,
            ..Default::default()
        };
        let cascade = Operator::cascade(3).unwrap();
        assert!(estimate_advantage(&a, cascade, params(2, 2), b, 10, 0, opts).is_err());
        assert!(estimate_advantage(&a, Operator::Double, params(2, 2), b, 0, 0, Default::default()).is_err());
        let odd_level = EstimateOptions {
            level: 0.9,
            ..Default::default()
        };
        assert!(estimate_advantage(&a, Operator::Double, params(2, 2), b, 10, 0, odd_level).is_err());
    }

    #[test]
    fn worker_count_does_not_matter() {
        let p = params(3, 4);
        let adv = mitm_double(MitmConfig { s: 1, t: 6, q: 2 }, p).unwrap();
        let run = |workers| {
            estimate_advantage(
                &adv,
                Operator::Double,
                p,
                OracleBudget::new(2, 6),
                5_000,
                99,
                EstimateOptions {
                    record_bad: true,
                    workers,
                    ..Default::default()
                },
            )
            .unwrap()
        };
        let one = run(1);
        assert_eq!(one, run(4));
        assert_eq!(one.record().to_json(), run(3).record().to_json());
    }

    #[test]
    fn record_shape() {
        let e = estimate_advantage(
            &ConstantGuess(true),
            Operator::TwoKeyTriple,
            params(2, 3),
            OracleBudget::new(2, 3),
            10,
            5,
            EstimateOptions::default(),
        )
        .unwrap();
        let v: serde_json::Value = serde_json::from_str(&e.record().to_json()).unwrap();
        let keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
        let mut want = vec![
            "attack", "op", "kappa", "n", "q", "t", "trials", "p1", "p2", "adv", "ci", "bad_w1", "bad_w2", "seed",
        ];
        want.sort_unstable();
        let mut got = keys.clone();
        got.sort_unstable();
        assert_eq!(got, want);
        assert_eq!(v["op"], "trp2");
        assert!(v["bad_w1"].is_null());
        let row = e.record().to_csv_row();
        assert_eq!(row.split(',').count(), CSV_HEADER.split(',').count());
    }
}
