//! The flat experiment configuration.
//!
//! A config file is a TOML table of scalar and array values, no sections:
//!
//! ```toml
//! alpha = ["surd:(0+1*sqrt(2))/1"]
//! m = [1]
//! x = 100000
//! workers = 4
//! ```
//!
//! Command-line `--set KEY=VALUE` pairs and the dedicated flags are applied
//! on top, in that order.

use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use coprime_floors::counting::{Polynomial, ProblemSpec};
use coprime_floors::dioph::TypeMode;
use coprime_floors::equidist::MonotoneVariant;
use coprime_floors::realnum::RealSpec;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Count,
    Density,
    Discrepancy,
    Weyl,
    Bounds,
    Dioph,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundKind {
    Linear,
    Quadratic,
    Reciprocal,
    Monotone,
}

/// Every key the config schema knows. Unknown keys are rejected.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub command: Option<Command>,
    /// Coefficients `α_j` as text forms.
    pub alpha: Option<Vec<RealSpec>>,
    /// Exponents `m_j`.
    pub m: Option<Vec<u32>>,
    /// Coefficients of a lower-order polynomial, constant term first.
    pub lower_term: Option<Vec<RealSpec>>,
    /// 1-based coordinate carrying `lower_term`; defaults to the last.
    pub lower_index: Option<usize>,
    pub x: Option<u64>,
    pub cutoff: Option<u64>,
    pub grid: Option<Vec<u64>>,
    pub d: Option<u64>,
    #[serde(rename = "N")]
    pub big_n: Option<u64>,
    #[serde(rename = "H")]
    pub big_h: Option<u32>,
    #[serde(rename = "C")]
    pub big_c: Option<f64>,
    #[serde(rename = "K")]
    pub big_k: Option<u64>,
    #[serde(rename = "M")]
    pub big_m: Option<u32>,
    #[serde(rename = "Q")]
    pub big_q: Option<f64>,
    /// Frequency vector for a Weyl sum over a counting problem.
    pub hvec: Option<Vec<i64>>,
    pub h: Option<i64>,
    pub q: Option<u64>,
    /// Degree for the Weyl bound report.
    pub degree: Option<u32>,
    /// Polynomial `g` for the Weyl and quadratic bounds, constant term first.
    pub g: Option<Vec<RealSpec>>,
    pub epsilon: Option<f64>,
    pub tau: Option<String>,
    pub tau_star: Option<String>,
    pub bound: Option<BoundKind>,
    pub u: Option<f64>,
    pub v: Option<f64>,
    pub variant: Option<MonotoneVariant>,
    pub max_q: Option<u64>,
    pub varpi: Option<f64>,
    pub mode: Option<TypeMode>,
    pub workers: Option<usize>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    /// Accepted for reproducibility records; every computation here is
    /// deterministic.
    pub seed: Option<u64>,
    pub max_bits: Option<u32>,
}

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

/// Parses `KEY=VALUE`, reading `VALUE` as TOML and falling back to a string.
pub fn parse_assignment(s: &str) -> Result<(String, toml::Value), CliError> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| config_err(format!("`{s}` is not KEY=VALUE")))?;
    let value = toml::from_str::<toml::Table>(&format!("v = {v}"))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(v.to_string()));
    Ok((k.trim().to_string(), value))
}

pub fn load_table(path: Option<&Path>) -> Result<toml::Table, CliError> {
    let Some(path) = path else {
        return Ok(toml::Table::new());
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| config_err(format!("cannot read {}: {e}", path.display())))?;
    let table: toml::Table = toml::from_str(&text).map_err(|e| config_err(format!("{}: {e}", path.display())))?;
    if let Some((k, _)) = table.iter().find(|(_, v)| v.is_table()) {
        return Err(config_err(format!("key `{k}` is a section; the config is flat")));
    }
    Ok(table)
}

/// Keys holding reals; integer literals are accepted for them.
const FLOAT_KEYS: [&str; 6] = ["C", "Q", "u", "v", "epsilon", "varpi"];

pub fn from_table(mut table: toml::Table) -> Result<ExperimentConfig, CliError> {
    for k in FLOAT_KEYS {
        if let Some(toml::Value::Integer(i)) = table.get(k) {
            let f = *i as f64;
            table.insert(k.into(), toml::Value::Float(f));
        }
    }
    toml::Value::Table(table)
        .try_into()
        .map_err(|e: toml::de::Error| config_err(e.message().to_string()))
}

/// A rational from `p/q` or a decimal numeral.
pub fn parse_rational(s: &str) -> Result<BigRational, CliError> {
    let bad = || config_err(format!("`{s}` is not a rational number"));
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q == BigInt::from(0u8) {
            return Err(bad());
        }
        return Ok(BigRational::new(p, q));
    }
    let (ip, fp) = s.split_once('.').unwrap_or((s, ""));
    if fp.chars().any(|c| !c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits: BigInt = format!("{ip}{fp}").parse().map_err(|_| bad())?;
    Ok(BigRational::new(digits, BigInt::from(10u8).pow(fp.len() as u32)))
}

impl ExperimentConfig {
    pub fn need<T: Clone>(field: &Option<T>, name: &str) -> Result<T, CliError> {
        field.clone().ok_or_else(|| config_err(format!("missing `{name}`")))
    }

    pub fn workers(&self) -> usize {
        self.workers.unwrap_or(1)
    }

    pub fn first_alpha(&self) -> Result<RealSpec, CliError> {
        Self::need(&self.alpha, "alpha")?
            .into_iter()
            .next()
            .ok_or_else(|| config_err("`alpha` is empty"))
    }

    pub fn g_poly(&self) -> Polynomial {
        Polynomial::new(self.g.clone().unwrap_or_default())
    }

    pub fn problem(&self) -> Result<ProblemSpec, CliError> {
        let alphas = Self::need(&self.alpha, "alpha")?;
        let ms = match &self.m {
            Some(m) => m.clone(),
            None if alphas.len() == 1 => vec![1],
            None => return Err(config_err("missing `m`")),
        };
        let mut p = ProblemSpec::new(alphas, ms).map_err(|e| config_err(e.to_string()))?;
        if let Some(max_bits) = self.max_bits {
            p = p.with_max_bits(max_bits);
        }
        if let Some(g) = &self.lower_term {
            let j = self.lower_index.unwrap_or(p.k());
            p = p
                .with_lower_term(j, Polynomial::new(g.clone()))
                .map_err(|e| config_err(e.to_string()))?;
        }
        Ok(p)
    }

    /// Checks the parameters of `command` before anything is computed.
    pub fn validate(&self, command: Command) -> Result<(), CliError> {
        if self.workers == Some(0) {
            return Err(config_err("`workers` must be positive"));
        }
        if self.max_bits.is_some_and(|b| b < 64) {
            return Err(config_err("`max_bits` must be at least 64"));
        }
        let positive = |v: Option<u64>, name: &str| -> Result<u64, CliError> {
            match v {
                Some(0) => Err(config_err(format!("`{name}` must be positive"))),
                Some(v) => Ok(v),
                None => Err(config_err(format!("missing `{name}`"))),
            }
        };
        match command {
            Command::Count => {
                self.problem()?;
                let x = positive(self.x, "x")?;
                if self.cutoff.is_some_and(|c| c == 0 || c > x) {
                    return Err(config_err("`cutoff` must lie in 1..=x"));
                }
            }
            Command::Density => {
                self.problem()?;
                let grid = Self::need(&self.grid, "grid")?;
                if grid.len() < 3 {
                    return Err(config_err(format!("`grid` needs at least 3 points, got {}", grid.len())));
                }
                if grid[0] == 0 || grid.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(config_err("`grid` must be positive and strictly increasing"));
                }
                for t in [&self.tau, &self.tau_star].into_iter().flatten() {
                    parse_rational(t)?;
                }
            }
            Command::Discrepancy => {
                self.problem()?;
                positive(self.d, "d")?;
                positive(self.big_n, "N")?;
                if self.big_h == Some(0) {
                    return Err(config_err("`H` must be positive"));
                }
                if self.big_c.is_some_and(|c| c <= 0.0) {
                    return Err(config_err("`C` must be positive"));
                }
            }
            Command::Weyl => {
                positive(self.big_n, "N")?;
                if let Some(hvec) = &self.hvec {
                    let p = self.problem()?;
                    positive(Some(self.d.unwrap_or(1)), "d")?;
                    if hvec.len() != p.k() || hvec.iter().all(|&h| h == 0) {
                        return Err(config_err("`hvec` must be a nonzero vector of length k"));
                    }
                } else {
                    self.first_alpha()?;
                    if Self::need(&self.degree, "degree")? < 2 {
                        return Err(config_err("`degree` must be at least 2"));
                    }
                    if Self::need(&self.h, "h")? == 0 {
                        return Err(config_err("`h` must be nonzero"));
                    }
                }
            }
            Command::Bounds => match Self::need(&self.bound, "bound")? {
                BoundKind::Linear => {
                    positive(self.q, "q")?;
                    positive(self.big_n, "N")?;
                    if Self::need(&self.h, "h")? == 0 {
                        return Err(config_err("`h` must be nonzero"));
                    }
                }
                BoundKind::Quadratic => {
                    self.first_alpha()?;
                    positive(self.big_n, "N")?;
                    positive(Some(self.d.unwrap_or(1)), "d")?;
                    if Self::need(&self.h, "h")? == 0 {
                        return Err(config_err("`h` must be nonzero"));
                    }
                }
                BoundKind::Reciprocal => {
                    self.first_alpha()?;
                    positive(self.big_k, "K")?;
                    positive(self.big_n, "N")?;
                }
                BoundKind::Monotone => {
                    let u = Self::need(&self.u, "u")?;
                    let v = Self::need(&self.v, "v")?;
                    let m = Self::need(&self.big_m, "M")?;
                    Self::need(&self.variant, "variant")?;
                    if !(u > 0.0) || !(v >= 1.0) || m < 2 {
                        return Err(config_err("need u > 0, v ≥ 1 and M ≥ 2"));
                    }
                }
            },
            Command::Dioph => {
                self.first_alpha()?;
                positive(self.max_q, "max_q")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn assignments_are_typed() {
        assert_eq!(parse_assignment("x=10").unwrap().1, toml::Value::Integer(10));
        assert_eq!(
            parse_assignment("tau=1/5").unwrap().1,
            toml::Value::String("1/5".into())
        );
        assert!(parse_assignment("nothing").is_err());
    }

    #[test]
    fn rationals() {
        assert_eq!(parse_rational("1/5").unwrap(), parse_rational("0.2").unwrap());
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let mut t = toml::Table::new();
        t.insert("colour".into(), toml::Value::Integer(1));
        assert!(from_table(t).is_err());
    }

    #[test]
    fn short_density_grid_is_a_config_error() {
        let cfg: ExperimentConfig = toml::from_str(
            r#"
            alpha = ["surd:(0+1*sqrt(2))/1"]
            grid = [10, 100]
            "#,
        )
        .unwrap();
        assert!(matches!(cfg.validate(Command::Density), Err(CliError::Config(_))));
    }
}
