//! Closed-form security bounds and curve data.
//!
//! Every formula is evaluated on base-2 logarithms, so `2^(2 kappa)` never
//! materializes and kappa may go far past the range of `f64`. Integral
//! exponents go through `powi`, which keeps results like `2^-22` exact.
//! All values are clamped to `[0, 1]`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::game::Operator;

fn pow2(e: f64) -> f64 {
    if e.fract() == 0.0 && (-1022.0..=1023.0).contains(&e) {
        2f64.powi(e as i32)
    } else {
        e.exp2()
    }
}

fn clamp01(v: f64) -> f64 {
    v.clamp(0.0, 1.0)
}

/// `2^(log2_t * m - m * kappa)`, clamped.
fn power_ratio(kappa: u32, t: f64, m: u32) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    clamp01(pow2(f64::from(m) * (t.log2() - f64::from(kappa))))
}

/// `min(1, t / 2^kappa)`.
pub fn single_bound(kappa: u32, t: f64) -> f64 {
    power_ratio(kappa, t, 1)
}

/// `min(1, t^2 / 2^(2 kappa))`.
pub fn double_upper(kappa: u32, t: f64) -> f64 {
    power_ratio(kappa, t, 2)
}

/// Same expression as [`double_upper`], stated for the two-key triple
/// operator.
pub fn triple_upper(kappa: u32, t: f64) -> f64 {
    power_ratio(kappa, t, 2)
}

/// `min(1, t^m / 2^(m kappa))`.
pub fn cascade_bound(kappa: u32, t: f64, m: u32) -> Result<f64> {
    if m == 0 {
        return Err(Error::InvalidParams("cascade length must be at least 1".into()));
    }
    Ok(power_ratio(kappa, t, m))
}

/// Meet-in-the-middle lower bound
/// `(t^2 / 4s^2) * (2^-2kappa - 2^-s(n-1))`, clamped to `[0, 1]`.
pub fn double_lower(kappa: u32, n: u32, t: f64, s: u64) -> Result<f64> {
    if s == 0 {
        return Err(Error::InvalidParams("s must be at least 1".into()));
    }
    if t < 2.0 * s as f64 {
        return Err(Error::InvalidParams(format!(
            "lower bound needs t >= 2s (t={t}, s={s})"
        )));
    }
    let two_kappa = 2.0 * f64::from(kappa);
    let gap = s as f64 * f64::from(n.saturating_sub(1)) - two_kappa;
    if gap <= 0.0 {
        return Ok(0.0);
    }
    let log_scale = 2.0 * t.log2() - 2.0 - 2.0 * (s as f64).log2() - two_kappa;
    // 1 - 2^-gap without cancellation
    let factor = -(-gap * std::f64::consts::LN_2).exp_m1();
    Ok(clamp01(pow2(log_scale) * factor))
}

/// `ceil((2 kappa + 1) / (n - 1))`.
pub fn optimal_s(kappa: u32, n: u32) -> Result<u64> {
    if n < 2 {
        return Err(Error::InvalidParams("optimal s needs n >= 2".into()));
    }
    Ok((2 * u64::from(kappa) + 1).div_ceil(u64::from(n) - 1))
}

/// `(1 / 8s^2) * t^2 / 2^(2 kappa)` at `s = optimal_s(kappa, n)`.
pub fn double_lower_optimal(kappa: u32, n: u32, t: f64) -> Result<f64> {
    let s = optimal_s(kappa, n)?;
    if t < 2.0 * s as f64 {
        return Err(Error::InvalidParams(format!("lower bound needs t >= 2s = {}", 2 * s)));
    }
    let log_v = 2.0 * t.log2() - 3.0 - 2.0 * (s as f64).log2() - 2.0 * f64::from(kappa);
    Ok(clamp01(pow2(log_v)))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CurveRow {
    pub log2_t: f64,
    pub sec1: f64,
    pub sec2_upper: f64,
    /// Zero where `t < 2 * optimal_s`, outside the lower bound's range.
    pub sec2_lower: f64,
}

pub const CURVES_HEADER: &str = "log2_t,sec1,sec2_upper,sec2_lower";

/// Samples the single-key and double-encryption bounds at
/// `t = 2^x` for `x = x_min, x_min + step, ..., <= x_max`.
pub fn emit_curves(kappa: u32, n: u32, x_min: f64, x_max: f64, step: f64) -> Result<Vec<CurveRow>> {
    if !step.is_finite() || step <= 0.0 {
        return Err(Error::InvalidParams(format!("step must be positive, got {step}")));
    }
    if x_min.is_nan() || x_max.is_nan() || x_min > x_max {
        return Err(Error::InvalidParams(format!("x_min {x_min} exceeds x_max {x_max}")));
    }
    optimal_s(kappa, n)?;
    let count = ((x_max - x_min) / step + 1e-9).floor() as u64 + 1;
    Ok((0..count)
        .map(|i| {
            let x = x_min + i as f64 * step;
            let t = pow2(x);
            CurveRow {
                log2_t: x,
                sec1: single_bound(kappa, t),
                sec2_upper: double_upper(kappa, t),
                sec2_lower: double_lower_optimal(kappa, n, t).unwrap_or(0.0),
            }
        })
        .collect())
}

/// `v` with 12 significant digits in the style of C's `%.12g`.
pub fn format_sig12(v: f64) -> String {
    const DIGITS: i32 = 12;
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let sci = format!("{:.*e}", (DIGITS - 1) as usize, v);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    let trim = |s: &str| -> String {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s.to_string()
        }
    };
    if !(-4..DIGITS).contains(&exp) {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim(mantissa), exp.abs())
    } else {
        trim(&format!("{:.*}", (DIGITS - 1 - exp) as usize, v))
    }
}

pub fn curves_csv(rows: &[CurveRow]) -> String {
    let mut out = String::from(CURVES_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            format_sig12(r.log2_t),
            format_sig12(r.sec1),
            format_sig12(r.sec2_upper),
            format_sig12(r.sec2_lower)
        ));
    }
    out
}

/// Every bound that applies to `op` at one budget.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundsReport {
    pub kappa: u32,
    pub n: u32,
    pub t: f64,
    pub op: String,
    pub single: f64,
    pub upper: f64,
    /// Double encryption only.
    pub lower_optimal: Option<f64>,
    pub optimal_s: Option<u64>,
}

pub fn bounds_report(kappa: u32, n: u32, t: f64, op: Operator) -> Result<BoundsReport> {
    if t.is_nan() || t < 0.0 {
        return Err(Error::InvalidParams(format!("t must be nonnegative, got {t}")));
    }
    let upper = match op {
        Operator::Single => single_bound(kappa, t),
        Operator::Double => double_upper(kappa, t),
        Operator::TwoKeyTriple => triple_upper(kappa, t),
        Operator::Cascade(m) => cascade_bound(kappa, t, m)?,
    };
    let s = (n >= 2).then(|| optimal_s(kappa, n)).transpose()?;
    let lower_optimal = match (op, s) {
        (Operator::Double, Some(s)) if t >= 2.0 * s as f64 => Some(double_lower_optimal(kappa, n, t)?),
        _ => None,
    };
    Ok(BoundsReport {
        kappa,
        n,
        t,
        op: op.to_string(),
        single: single_bound(kappa, t),
        upper,
        lower_optimal,
        optimal_s: s,
    })
}

impl BoundsReport {
    /// Aligned `name value` lines.
    pub fn to_table(&self) -> String {
        let mut lines = vec![
            format!("op            {}", self.op),
            format!("kappa         {}", self.kappa),
            format!("n             {}", self.n),
            format!("t             {}", format_sig12(self.t)),
            format!("single        {}", format_sig12(self.single)),
            format!("upper         {}", format_sig12(self.upper)),
        ];
        if let Some(v) = self.lower_optimal {
            lines.push(format!("lower_optimal {}", format_sig12(v)));
        }
        if let Some(s) = self.optimal_s {
            lines.push(format!("optimal_s     {s}"));
        }
        lines.join("\n") + "\n"
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::{BigInt, BigRational, One, ToPrimitive};

    fn exact_ratio(t: u64, kappa: u32, m: u32) -> f64 {
        let num = BigInt::from(t).pow(m);
        let den = BigInt::one() << (kappa * m) as usize;
        let r = BigRational::new(num, den).min(BigRational::one());
        r.to_f64().unwrap()
    }

    #[test]
    fn headline_values() {
        assert_eq!(single_bound(56, pow2(45.0)), pow2(-11.0));
        assert_eq!(double_upper(56, pow2(45.0)), pow2(-22.0));
        assert_eq!(double_upper(56, pow2(50.0)), pow2(-12.0));
        assert!((double_upper(56, pow2(50.5)) / pow2(-11.0) - 1.0).abs() < 1e-12);
        assert_eq!(single_bound(56, pow2(56.0)), 1.0);
        assert_eq!(double_upper(56, pow2(56.0)), 1.0);
        assert_eq!(single_bound(10, 0.0), 0.0);
        assert_eq!(cascade_bound(56, pow2(45.0), 3).unwrap(), pow2(-33.0));
    }

    #[test]
    fn matches_rationals_at_small_inputs() {
        for kappa in 1..=8 {
            for t in 0..=300u64 {
                for m in 1..=3 {
                    let got = cascade_bound(kappa, t as f64, m).unwrap();
                    let want = exact_ratio(t, kappa, m);
                    assert!((got - want).abs() <= 1e-12 * want.max(1e-300), "{kappa} {t} {m}");
                }
            }
        }
    }

    #[test]
    fn lower_bound_values() {
        let v = double_lower(4, 8, 16.0, 2).unwrap();
        let want = 16.0 * (pow2(-8.0) - pow2(-14.0));
        assert!((v - want).abs() < 1e-15);
        assert!((v - 0.061523).abs() < 1e-6);
        assert_eq!(double_lower(56, 64, 2.0, 1).unwrap(), 0.0);
        assert!(double_lower(56, 64, 4.0, 2).unwrap() > 0.0);
        assert!(double_lower(4, 8, 3.0, 2).is_err());
        assert_eq!(double_lower_optimal(4, 8, 16.0).unwrap(), 0.03125);
    }

    #[test]
    fn optimal_s_values() {
        assert_eq!(optimal_s(56, 64).unwrap(), 2);
        assert_eq!(optimal_s(4, 8).unwrap(), 2);
        assert_eq!(optimal_s(1, 4).unwrap(), 1);
        assert!(optimal_s(4, 1).is_err());
        for kappa in 1..40u32 {
            for n in 2..65u32 {
                let s = optimal_s(kappa, n).unwrap();
                assert!(2 * u64::from(kappa) < s * u64::from(n - 1));
            }
        }
    }

    #[test]
    fn optimal_over_upper_is_one_32nd() {
        for x in 2..=56 {
            let t = pow2(f64::from(x));
            let ratio = double_lower_optimal(56, 64, t).unwrap() / double_upper(56, t);
            assert_eq!(ratio, 1.0 / 32.0);
        }
    }

    #[test]
    fn huge_kappa() {
        assert_eq!(double_upper(512, pow2(500.0)), pow2(-24.0));
        assert_eq!(double_upper(512, pow2(64.0)), pow2(-896.0));
        assert_eq!(cascade_bound(512, pow2(64.0), 3).unwrap(), 0.0);
        assert_eq!(single_bound(512, pow2(512.0)), 1.0);
        assert!(double_lower(512, 64, pow2(511.0), 17).unwrap() > 0.0);
        let rows = emit_curves(512, 64, 500.0, 512.0, 1.0).unwrap();
        assert_eq!(rows.last().unwrap().sec2_upper, 1.0);
    }

    #[test]
    fn curves() {
        let rows = emit_curves(56, 64, 40.0, 56.0, 1.0).unwrap();
        assert_eq!(rows.len(), 17);
        let last = rows.last().unwrap();
        assert_eq!((last.sec1, last.sec2_upper), (1.0, 1.0));
        for r in &rows {
            assert!(r.sec2_upper <= r.sec1);
            assert!(r.sec2_lower <= r.sec2_upper);
        }
        assert!(emit_curves(56, 64, 2.0, 1.0, 1.0).is_err());
        assert!(emit_curves(56, 64, 1.0, 2.0, 0.0).is_err());
        assert_eq!(emit_curves(56, 64, 0.0, 0.0, 1.0).unwrap().len(), 1);
        let csv = curves_csv(&rows);
        assert!(csv.starts_with("log2_t,sec1,sec2_upper,sec2_lower\n40,"));
        assert_eq!(csv.lines().count(), 18);
    }

    #[test]
    fn sig12_formatting() {
        assert_eq!(format_sig12(0.0), "0");
        assert_eq!(format_sig12(1.0), "1");
        assert_eq!(format_sig12(45.0), "45");
        assert_eq!(format_sig12(0.5), "0.5");
        assert_eq!(format_sig12(pow2(-11.0)), "0.00048828125");
        assert_eq!(format_sig12(pow2(-22.0)), "2.38418579102e-07");
        assert_eq!(format_sig12(1.0 / 3.0), "0.333333333333");
        assert_eq!(format_sig12(123456789012345.0), "1.23456789012e+14");
        assert_eq!(format_sig12(0.0001), "0.0001");
        assert_eq!(format_sig12(99999999999.99999), "100000000000");
    }

    #[test]
    fn report() {
        let r = bounds_report(56, 64, pow2(45.0), Operator::Double).unwrap();
        assert_eq!(r.upper, pow2(-22.0));
        assert_eq!(r.single, pow2(-11.0));
        assert_eq!(r.optimal_s, Some(2));
        let r = bounds_report(4, 8, 16.0, Operator::Double).unwrap();
        assert_eq!((r.upper, r.lower_optimal), (1.0, Some(0.03125)));
        let r = bounds_report(56, 64, pow2(56.0), Operator::Double).unwrap();
        assert_eq!(r.upper, 1.0);
        assert!(r.to_table().contains("optimal_s     2"));
        let r = bounds_report(3, 6, 64.0, Operator::TwoKeyTriple).unwrap();
        assert_eq!(r.lower_optimal, None);
    }
}
