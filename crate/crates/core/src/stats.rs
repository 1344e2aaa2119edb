//! Interval estimates and goodness-of-fit tests used by the estimator and
//! the verification suites.

use serde::Serialize;
use statrs::distribution::{Beta, ChiSquared, ContinuousCDF, Normal};

use crate::error::{Error, Result};

/// Supported confidence levels and their two-sided normal quantiles.
const LEVELS: [(f64, f64); 3] = [
    (0.95, 1.959_963_984_540_054),
    (0.99, 2.575_829_303_548_900_4),
    (0.999, 3.290_526_731_491_925_5),
];

/// Counts below this switch the difference interval to the exact fallback.
pub const SMALL_COUNT: u64 = 10;

pub fn z_for_level(level: f64) -> Result<f64> {
    LEVELS
        .iter()
        .find(|(l, _)| (l - level).abs() < 1e-12)
        .map(|(_, z)| *z)
        .ok_or_else(|| Error::config(format!("confidence level {level} not in {{0.95, 0.99, 0.999}}")))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum IntervalMethod {
    /// Wald interval `d ± z·sqrt(p1(1-p1)/N + p2(1-p2)/N)`.
    Normal,
    /// Bonferroni combination of two Clopper-Pearson intervals at level
    /// `1 - (1-level)/2` each: `[lo1 - hi2, hi1 - lo2]`.
    Exact,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Interval {
    pub low: f64,
    pub high: f64,
    pub method: IntervalMethod,
}

impl Interval {
    pub fn contains(&self, v: f64) -> bool {
        self.low <= v && v <= self.high
    }

    pub fn half_width(&self) -> f64 {
        (self.high - self.low) / 2.0
    }
}

/// Standard error of `p1_hat - p2_hat` with `trials` samples per side.
pub fn diff_std_error(p1: f64, p2: f64, trials: u64) -> f64 {
    let n = trials as f64;
    (p1 * (1.0 - p1) / n + p2 * (1.0 - p2) / n).sqrt()
}

/// Exact binomial (Clopper-Pearson) interval for `successes / trials`.
pub fn clopper_pearson(successes: u64, trials: u64, level: f64) -> Result<(f64, f64)> {
    if trials == 0 {
        return Err(Error::config("clopper_pearson: zero trials"));
    }
    if successes > trials {
        return Err(Error::config("clopper_pearson: successes exceed trials"));
    }
    let alpha = 1.0 - level;
    let (k, n) = (successes as f64, trials as f64);
    let low = if successes == 0 {
        0.0
    } else {
        Beta::new(k, n - k + 1.0)
            .expect("positive shape")
            .inverse_cdf(alpha / 2.0)
    };
    let high = if successes == trials {
        1.0
    } else {
        Beta::new(k + 1.0, n - k)
            .expect("positive shape")
            .inverse_cdf(1.0 - alpha / 2.0)
    };
    Ok((low, high))
}

/// Interval for the difference of two proportions observed over the same
/// number of trials.
///
/// Uses the normal approximation unless any success or failure count is
/// below [`SMALL_COUNT`], in which case the conservative exact combination
/// is returned instead.
pub fn confidence_interval(successes1: u64, successes2: u64, trials: u64, level: f64) -> Result<Interval> {
    if trials == 0 {
        return Err(Error::config("confidence interval needs at least one trial"));
    }
    if successes1 > trials || successes2 > trials {
        return Err(Error::config("successes exceed trials"));
    }
    let z = z_for_level(level)?;
    let n = trials as f64;
    let (p1, p2) = (successes1 as f64 / n, successes2 as f64 / n);
    let diff = p1 - p2;
    let small = [successes1, trials - successes1, successes2, trials - successes2]
        .iter()
        .any(|&c| c < SMALL_COUNT);
    let (low, high, method) = if small {
        let per_side = 1.0 - (1.0 - level) / 2.0;
        let (lo1, hi1) = clopper_pearson(successes1, trials, per_side)?;
        let (lo2, hi2) = clopper_pearson(successes2, trials, per_side)?;
        (lo1 - hi2, hi1 - lo2, IntervalMethod::Exact)
    } else {
        let half = z * diff_std_error(p1, p2, trials);
        (diff - half, diff + half, IntervalMethod::Normal)
    };
    // guard against rounding pushing the point estimate outside
    Ok(Interval {
        low: low.max(-1.0).min(diff),
        high: high.min(1.0).max(diff),
        method,
    })
}

/// Two-sided pooled z-test for `H0: p1 = p2`. Returns the p-value.
pub fn two_proportion_test(successes1: u64, trials1: u64, successes2: u64, trials2: u64) -> f64 {
    let (n1, n2) = (trials1 as f64, trials2 as f64);
    let pooled = (successes1 + successes2) as f64 / (n1 + n2);
    if pooled <= 0.0 || pooled >= 1.0 {
        return 1.0;
    }
    let se = (pooled * (1.0 - pooled) * (1.0 / n1 + 1.0 / n2)).sqrt();
    let z = (successes1 as f64 / n1 - successes2 as f64 / n2) / se;
    let normal = Normal::standard();
    2.0 * normal.sf(z.abs())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ChiSquare {
    pub statistic: f64,
    pub df: usize,
    pub p_value: f64,
}

impl ChiSquare {
    fn from_statistic(statistic: f64, df: usize) -> Self {
        let p_value = if df == 0 {
            1.0
        } else {
            ChiSquared::new(df as f64).expect("df > 0").sf(statistic)
        };
        Self { statistic, df, p_value }
    }

    pub fn rejects(&self, significance: f64) -> bool {
        self.p_value < significance
    }
}

/// Pearson goodness-of-fit against the uniform distribution on the bins.
pub fn chi_square_uniform(counts: &[u64]) -> ChiSquare {
    let total: u64 = counts.iter().sum();
    if total == 0 || counts.len() < 2 {
        return ChiSquare::from_statistic(0.0, 0);
    }
    let expected = total as f64 / counts.len() as f64;
    let statistic = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    ChiSquare::from_statistic(statistic, counts.len() - 1)
}

/// Pearson test of independence on an `r x c` contingency table. Rows and
/// columns with zero margin are dropped.
pub fn chi_square_independence(table: &[Vec<u64>]) -> ChiSquare {
    let cols = table.first().map_or(0, Vec::len);
    let row_sums: Vec<u64> = table.iter().map(|r| r.iter().sum()).collect();
    let col_sums: Vec<u64> = (0..cols).map(|j| table.iter().map(|r| r[j]).sum()).collect();
    let total: u64 = row_sums.iter().sum();
    let live_rows: Vec<usize> = (0..table.len()).filter(|&i| row_sums[i] > 0).collect();
    let live_cols: Vec<usize> = (0..cols).filter(|&j| col_sums[j] > 0).collect();
    if total == 0 || live_rows.len() < 2 || live_cols.len() < 2 {
        return ChiSquare::from_statistic(0.0, 0);
    }
    let mut statistic = 0.0;
    for &i in &live_rows {
        for &j in &live_cols {
            let expected = row_sums[i] as f64 * col_sums[j] as f64 / total as f64;
            statistic += (table[i][j] as f64 - expected).powi(2) / expected;
        }
    }
    ChiSquare::from_statistic(statistic, (live_rows.len() - 1) * (live_cols.len() - 1))
}

/// Pearson test that two samples over the same bins share a distribution.
pub fn chi_square_homogeneity(a: &[u64], b: &[u64]) -> ChiSquare {
    assert_eq!(a.len(), b.len(), "samples must share bins");
    chi_square_independence(&[a.to_vec(), b.to_vec()])
}
