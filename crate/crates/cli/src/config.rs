use std::path::{Path, PathBuf};

use serde::Deserialize;

use cascade_lab::attacks::AttackSpec;
use cascade_lab::game::Operator;
use cascade_lab::{CipherParams, Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

/// Experiment settings as read from a TOML file. Every field is optional;
/// command-line flags take precedence.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub op: Option<String>,
    pub kappa: Option<u32>,
    pub n: Option<u32>,
    pub q: Option<u64>,
    /// Integer or `2^x`.
    pub t: Option<toml::Value>,
    pub attack: Option<String>,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    pub output: Option<PathBuf>,
    pub format: Option<Format>,
    pub workers: Option<usize>,
    pub record_bad: Option<bool>,
    pub level: Option<f64>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn t(&self) -> Result<Option<u64>> {
        match &self.t {
            None => Ok(None),
            Some(toml::Value::Integer(v)) => u64::try_from(*v)
                .map(Some)
                .map_err(|_| Error::Config(format!("t must be nonnegative, got {v}"))),
            Some(toml::Value::String(s)) => parse_budget(s).map(Some).map_err(Error::Config),
            Some(other) => Err(Error::Config(format!("t must be an integer or \"2^x\", got {other}"))),
        }
    }
}

/// Fully resolved settings for one simulation run.
#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub op: Operator,
    pub params: CipherParams,
    pub q: u64,
    pub t: u64,
    pub attack: AttackSpec,
    pub trials: u64,
    pub seed: u64,
    pub output: Option<PathBuf>,
    pub format: Format,
    pub workers: usize,
    pub record_bad: bool,
    pub level: f64,
}

/// Parses a query count: a decimal integer or `2^x` with integral `x < 64`.
pub fn parse_budget(s: &str) -> std::result::Result<u64, String> {
    let s = s.trim();
    if let Some(exp) = s.strip_prefix("2^") {
        let e: u32 = exp.parse().map_err(|_| format!("bad exponent in {s:?}"))?;
        return 1u64
            .checked_shl(e)
            .filter(|_| e < 64)
            .ok_or_else(|| format!("{s} does not fit in 64 bits"));
    }
    s.parse().map_err(|_| format!("expected an integer or 2^x, got {s:?}"))
}

/// Parses a real-valued `t` for bound evaluation: a number or `2^x`.
pub fn parse_real_t(s: &str) -> std::result::Result<f64, String> {
    let s = s.trim();
    let v = if let Some(exp) = s.strip_prefix("2^") {
        let e: f64 = exp.parse().map_err(|_| format!("bad exponent in {s:?}"))?;
        if e.fract() == 0.0 && (-1022.0..=1023.0).contains(&e) {
            2f64.powi(e as i32)
        } else {
            e.exp2()
        }
    } else {
        s.parse().map_err(|_| format!("expected a number or 2^x, got {s:?}"))?
    };
    if v.is_finite() && v >= 0.0 {
        Ok(v)
    } else {
        Err(format!("t must be finite and nonnegative, got {s:?}"))
    }
}

pub fn required<T>(value: Option<T>, name: &str) -> Result<T> {
    value.ok_or_else(|| Error::Config(format!("missing --{name} (flag or config file)")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn budgets() {
        assert_eq!(parse_budget("16"), Ok(16));
        assert_eq!(parse_budget("2^45"), Ok(1 << 45));
        assert!(parse_budget("2^64").is_err());
        assert!(parse_budget("x").is_err());
        assert_eq!(parse_real_t("2^64"), Ok(18446744073709551616.0));
        assert_eq!(parse_real_t("2^45"), Ok(35184372088832.0));
        assert!(parse_real_t("-1").is_err());
    }

    #[test]
    fn file_config() {
        let c: FileConfig = toml::from_str("op = \"dbl\"\nt = \"2^4\"\nkappa = 4\nformat = \"csv\"").unwrap();
        assert_eq!(c.t().unwrap(), Some(16));
        assert_eq!(c.format, Some(Format::Csv));
        assert!(toml::from_str::<FileConfig>("bogus = 1").is_err());
        let c: FileConfig = toml::from_str("t = 12").unwrap();
        assert_eq!(c.t().unwrap(), Some(12));
    }
}
