//! Named verification suites with machine-readable results.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::attacks::{
    baseline_random, exhaustive_single, mitm_double, mitm_triple, probe_chain, KeyChoice, MitmConfig,
};
use crate::bounds::{
    cascade_bound, double_lower, double_lower_optimal, double_upper, emit_curves, optimal_s, single_bound, triple_upper,
};
use crate::cipher::CipherParams;
use crate::error::{Error, Result};
use crate::estimator::{estimate_advantage, AdvantageEstimate, EstimateOptions};
use crate::exact::{exact_advantage, ratio_to_f64, ExactMode};
use crate::game::{Adversary, Operator, OracleBudget, World};
use crate::stats::two_proportion_test;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Bounds,
    BadEvent,
    Oracle,
    Mitm,
}

impl Suite {
    pub const ALL: [Suite; 4] = [Suite::Bounds, Suite::BadEvent, Suite::Oracle, Suite::Mitm];
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Suite::Bounds => "bounds",
            Suite::BadEvent => "badevent",
            Suite::Oracle => "oracle",
            Suite::Mitm => "mitm",
        })
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.to_string() == s)
            .ok_or_else(|| Error::config(format!("unknown suite {s:?} (expected bounds, badevent, oracle, mitm)")))
    }
}

/// `Full` uses the trial counts of the acceptance criteria; `Quick` runs
/// the same checks with a tenth of the trials and path enumeration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    Quick,
    Full,
}

impl Scale {
    fn trials(self, full: u64) -> u64 {
        match self {
            Scale::Full => full,
            Scale::Quick => full / 10,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub scale: Scale,
    pub seed: u64,
    pub passed: bool,
    pub checks: Vec<Check>,
}

#[derive(Default)]
struct Checks(Vec<Check>);

impl Checks {
    fn add(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.0.push(Check {
            name: name.into(),
            passed,
            detail: detail.into(),
        });
    }
}

pub fn run_suite(suite: Suite, scale: Scale, seed: u64, workers: usize) -> Result<SuiteReport> {
    let mut checks = Checks::default();
    match suite {
        Suite::Bounds => bounds_suite(&mut checks)?,
        Suite::BadEvent => bad_event_suite(&mut checks, scale, seed, workers)?,
        Suite::Oracle => oracle_suite(&mut checks, scale, seed, workers)?,
        Suite::Mitm => mitm_suite(&mut checks, scale, seed, workers)?,
    }
    Ok(SuiteReport {
        suite,
        scale,
        seed,
        passed: checks.0.iter().all(|c| c.passed),
        checks: checks.0,
    })
}

fn params(kappa: u32, n: u32) -> CipherParams {
    CipherParams::new(kappa, n).expect("suite parameters are valid")
}

fn bounds_suite(c: &mut Checks) -> Result<()> {
    let p2 = |e: i32| 2f64.powi(e);
    c.add(
        "single(56, 2^45) = 2^-11",
        single_bound(56, p2(45)) == p2(-11),
        format!("{}", single_bound(56, p2(45))),
    );
    c.add(
        "upper(56, 2^45) = 2^-22",
        double_upper(56, p2(45)) == p2(-22),
        format!("{}", double_upper(56, p2(45))),
    );
    c.add(
        "curves meet at 1 when t = 2^56",
        single_bound(56, p2(56)) == 1.0 && double_upper(56, p2(56)) == 1.0,
        String::new(),
    );
    c.add("optimal s at (56, 64) is 2", optimal_s(56, 64)? == 2, String::new());

    let mut monotone = true;
    let mut ordered = true;
    let mut in_range = true;
    let mut coincide = true;
    for kappa in [1u32, 4, 8, 16, 56, 64, 128, 512] {
        for n in [2u32, 4, 8, 64] {
            let mut prev = [0.0f64; 5];
            let s = optimal_s(kappa, n)?;
            for step in 0..=(4 * kappa + 8) {
                let t = 2f64.powf(f64::from(step) / 2.0);
                let lower = if t >= 2.0 * s as f64 {
                    double_lower_optimal(kappa, n, t)?
                } else {
                    0.0
                };
                let lemma = if t >= 2.0 * s as f64 {
                    double_lower(kappa, n, t, s)?
                } else {
                    0.0
                };
                let vals = [
                    single_bound(kappa, t),
                    double_upper(kappa, t),
                    lower,
                    lemma,
                    cascade_bound(kappa, t, 3)?,
                ];
                monotone &= vals.iter().zip(&prev).all(|(v, p)| v >= p);
                in_range &= vals.iter().all(|v| (0.0..=1.0).contains(v));
                // equal when s(n-1) = 2 kappa + 1, up to exp2 rounding
                ordered &= lower <= vals[1] && lower <= lemma * (1.0 + 1e-12);
                if t <= 2f64.powi(kappa as i32) {
                    ordered &= vals[1] <= vals[0];
                }
                coincide &= cascade_bound(kappa, t, 1)? == vals[0]
                    && cascade_bound(kappa, t, 2)? == vals[1]
                    && triple_upper(kappa, t) == vals[1];
                prev = vals;
            }
        }
    }
    c.add("bounds nondecreasing in t", monotone, String::new());
    c.add("all bounds within [0, 1]", in_range, String::new());
    c.add(
        "lower-optimal <= lemma, lower-optimal <= upper, upper <= single for t <= 2^kappa",
        ordered,
        String::new(),
    );
    c.add(
        "cascade m=1,2 and triple coincide with single/double",
        coincide,
        String::new(),
    );
    let rows = emit_curves(56, 64, 40.0, 56.0, 1.0)?;
    c.add(
        "curves 40..56 step 1 give 17 rows",
        rows.len() == 17,
        format!("{}", rows.len()),
    );
    Ok(())
}

fn grid() -> Vec<(u32, u32, u64, u64)> {
    let mut out = Vec::new();
    for kappa in [2u32, 3, 4] {
        for t in [2u64, 4, 8, 16] {
            for s in [1u64, 2] {
                for n in [4u32, 8] {
                    out.push((kappa, n, t, s));
                }
            }
        }
    }
    out
}

/// The grid's attacks that satisfy their own parameter constraints.
pub fn grid_attacks(kappa: u32, n: u32, t: u64, s: u64) -> Vec<(String, Box<dyn Adversary>, OracleBudget)> {
    let p = params(kappa, n);
    let budget = OracleBudget::new(s.max(1), t);
    let mut out: Vec<(String, Box<dyn Adversary>, OracleBudget)> = Vec::new();
    if let Ok(a) = mitm_double(MitmConfig { s, t, q: s }, p) {
        out.push((a.name(), Box::new(a), budget));
    }
    if let Ok(a) = exhaustive_single(t, s) {
        out.push((a.name(), Box::new(a), budget));
    }
    out
}

fn bad_event_suite(c: &mut Checks, scale: Scale, seed: u64, workers: usize) -> Result<()> {
    let trials = scale.trials(100_000);
    let opts = EstimateOptions {
        record_bad: true,
        workers,
        ..Default::default()
    };
    let p = params(3, 4);
    let budget = OracleBudget::new(2, 6);
    let fixed: Vec<Box<dyn Adversary>> = vec![
        Box::new(mitm_double(MitmConfig { s: 1, t: 6, q: 2 }, p)?),
        Box::new(probe_chain(6)),
    ];
    for adv in &fixed {
        let e = estimate_advantage(adv.as_ref(), Operator::Double, p, budget, trials, seed, opts)?;
        let pv = two_proportion_test(e.world1.bad, trials, e.world2.bad, trials);
        c.add(
            format!("Pr1[bad] = Pr2[bad] for {} at kappa=3 n=4 q=2 t=6", adv.name()),
            pv >= 0.001,
            format!("w1={} w2={} p={pv:.4}", e.world1.bad, e.world2.bad),
        );
    }
    for (kappa, n, t, s) in grid() {
        for (name, adv, budget) in grid_attacks(kappa, n, t, s) {
            let e = estimate_advantage(
                adv.as_ref(),
                Operator::Double,
                params(kappa, n),
                budget,
                trials,
                seed,
                opts,
            )?;
            let freq = e.bad_freq_w2.unwrap_or(0.0);
            let sigma = e.bad_std_error(World::Random).unwrap_or(0.0);
            let bound = double_upper(kappa, t as f64);
            c.add(
                format!("Pr2[bad] <= t^2/2^2kappa for {name} kappa={kappa} n={n} t={t}"),
                freq <= bound + 3.0 * sigma,
                format!("{freq:.5} vs {bound:.5}"),
            );
        }
    }
    Ok(())
}

fn oracle_suite(c: &mut Checks, scale: Scale, seed: u64, workers: usize) -> Result<()> {
    let mode = match scale {
        Scale::Full => ExactMode::FullTable,
        Scale::Quick => ExactMode::PathEnumeration,
    };
    let trials = scale.trials(200_000);
    let opts = EstimateOptions {
        level: 0.999,
        workers,
        ..Default::default()
    };
    let mut cases: Vec<(Operator, CipherParams, OracleBudget, Box<dyn Adversary>)> = Vec::new();
    for (kappa, n) in [(1, 2), (2, 1), (2, 2)] {
        let p = params(kappa, n);
        if let Ok(a) = mitm_double(MitmConfig { s: 1, t: 2, q: 1 }, p) {
            cases.push((
                Operator::Double,
                p,
                OracleBudget::new(1, 2),
                Box::new(a.with_keys(KeyChoice::Lexicographic)?),
            ));
        }
    }
    let ex = exhaustive_single(2, 1)?;
    cases.push((
        Operator::Single,
        params(2, 2),
        OracleBudget::new(1, 2),
        Box::new(ex.clone()),
    ));
    cases.push((Operator::Double, params(1, 2), OracleBudget::new(1, 2), Box::new(ex)));
    cases.push((
        Operator::Double,
        params(2, 2),
        OracleBudget::new(1, 1),
        Box::new(baseline_random(0.5)?),
    ));
    cases.push((
        Operator::Single,
        params(1, 1),
        OracleBudget::new(1, 1),
        Box::new(baseline_random(1.0)?),
    ));

    for (op, p, budget, adv) in cases {
        let exact = exact_advantage(adv.as_ref(), op, p, budget, mode)?;
        let mc = estimate_advantage(adv.as_ref(), op, p, budget, trials, seed, opts)?;
        let want = exact.adv_f64();
        c.add(
            format!(
                "exact vs Monte Carlo: {} on {op} kappa={} n={}",
                adv.name(),
                p.kappa(),
                p.n()
            ),
            mc.ci.contains(want),
            format!(
                "exact={} ({want:.5}) mc={:.5} ci=[{:.5},{:.5}]",
                exact.adv, mc.adv, mc.ci.low, mc.ci.high
            ),
        );
    }
    let p = params(2, 2);
    let exact = exact_advantage(
        &exhaustive_single(2, 1)?,
        Operator::Single,
        p,
        OracleBudget::new(1, 2),
        mode,
    )?;
    c.add(
        "exhaustive(t=2) on single kappa=2 n=2 stays under t/2^kappa",
        ratio_to_f64(&exact.adv) <= 0.5,
        exact.adv.to_string(),
    );
    Ok(())
}

fn within(e: &AdvantageEstimate, lo: f64, hi: f64) -> bool {
    e.adv >= lo - 3.0 * e.std_error && e.adv <= hi + 3.0 * e.std_error
}

fn mitm_suite(c: &mut Checks, scale: Scale, seed: u64, workers: usize) -> Result<()> {
    let opts = EstimateOptions {
        workers,
        ..Default::default()
    };
    let p = params(4, 8);
    let adv = mitm_double(MitmConfig { s: 2, t: 16, q: 2 }, p)?;
    let e = estimate_advantage(
        &adv,
        Operator::Double,
        p,
        OracleBudget::new(2, 16),
        scale.trials(1_000_000),
        seed,
        opts,
    )?;
    let lower = double_lower(4, 8, 16.0, 2)?;
    c.add(
        "mitm-double kappa=4 n=8 t=16 s=2 within [lower, 1/16]",
        within(&e, lower, 0.0625),
        format!("adv={:.5} sigma={:.5} lower={lower:.5}", e.adv, e.std_error),
    );

    let trials = scale.trials(100_000);
    for (kappa, n, t, s) in grid() {
        for (name, adv, budget) in grid_attacks(kappa, n, t, s) {
            let e = estimate_advantage(
                adv.as_ref(),
                Operator::Double,
                params(kappa, n),
                budget,
                trials,
                seed,
                opts,
            )?;
            let bound = double_upper(kappa, t as f64);
            c.add(
                format!("{name} vs dbl kappa={kappa} n={n} t={t} under t^2/2^2kappa"),
                e.adv <= bound + 3.0 * e.std_error,
                format!("adv={:.5} bound={bound:.5}", e.adv),
            );
        }
    }

    let p = params(3, 6);
    for t in [9u64, 24, 48, 80, 160] {
        let adv = mitm_triple(MitmConfig { s: 2, t, q: 3 }, p)?;
        let e = estimate_advantage(
            &adv,
            Operator::TwoKeyTriple,
            p,
            OracleBudget::new(3, t),
            trials,
            seed,
            opts,
        )?;
        let bound = triple_upper(3, t as f64);
        c.add(
            format!("mitm-triple kappa=3 n=6 t={t} under t^2/2^2kappa"),
            e.adv <= bound + 3.0 * e.std_error,
            format!("adv={:.5} bound={bound:.5}", e.adv),
        );
    }
    Ok(())
}
