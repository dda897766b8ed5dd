//! Numerical tolerances and the batch configuration file schema.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::funcrep::IntervalDomain;
use crate::orlicz::PhiSpec;

/// Default seed for every random corpus.
pub const DEFAULT_SEED: u64 = 0x5EED;

/// Environment variable overriding the configured seed.
pub const SEED_ENV: &str = "CESORL_SEED";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Relative tolerance of each adaptive quadrature.
    pub quad_rel: f64,
    /// Absolute tolerance of each adaptive quadrature.
    pub quad_abs: f64,
    /// Subdivision budget per quadrature call.
    pub max_subdivisions: usize,
    /// Relative bracket width at which the Luxemburg bisection stops.
    pub norm_rel: f64,
    /// Partial-integral level treated as certified divergence.
    pub divergence_threshold: f64,
    /// Bracket width on the argument for scalar root finding.
    pub root_tol: f64,
    /// Bracket expansion limit, as a power of two.
    pub max_bracket_log2: i32,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            quad_rel: 1e-12,
            quad_abs: 1e-14,
            max_subdivisions: 1 << 14,
            norm_rel: 1e-9,
            divergence_threshold: 1e6,
            root_tol: 1e-12,
            max_bracket_log2: 60,
        }
    }
}

impl Tolerances {
    pub fn validate(&self) -> Result<()> {
        let pos = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::Config(format!("`{name}` must be positive and finite, got {v}")))
            }
        };
        pos("quad_rel", self.quad_rel)?;
        pos("quad_abs", self.quad_abs)?;
        pos("norm_rel", self.norm_rel)?;
        pos("divergence_threshold", self.divergence_threshold)?;
        pos("root_tol", self.root_tol)?;
        if self.max_subdivisions == 0 {
            return Err(Error::Config("`max_subdivisions` must be at least 1".into()));
        }
        if !(1..=1000).contains(&self.max_bracket_log2) {
            return Err(Error::Config("`max_bracket_log2` must lie in 1..=1000".into()));
        }
        Ok(())
    }
}

/// Batch configuration (JSON). Every field is optional; command-line flags
/// take precedence over the file and `CESORL_SEED` over both.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub phi: Option<PhiSpec>,
    pub domain: Option<IntervalDomain>,
    pub tolerances: Tolerances,
    pub seed: Option<u64>,
    pub truncation: Option<usize>,
    pub divergence_threshold: Option<f64>,
}

impl Config {
    /// Parses a config document, reporting the line and column of the first
    /// malformed field.
    pub fn from_json(text: &str) -> Result<Config> {
        let mut cfg: Config = serde_json::from_str(text).map_err(|e| {
            Error::Config(format!("line {}, column {}: {e}", e.line(), e.column()))
        })?;
        if let Some(m) = cfg.divergence_threshold {
            cfg.tolerances.divergence_threshold = m;
        }
        cfg.tolerances.validate()?;
        Ok(cfg)
    }

    /// Seed after applying the environment override.
    pub fn effective_seed(&self) -> Result<u64> {
        match std::env::var(SEED_ENV) {
            Ok(s) => parse_seed(&s),
            Err(_) => Ok(self.seed.unwrap_or(DEFAULT_SEED)),
        }
    }
}

/// Accepts decimal or `0x`-prefixed hexadecimal seeds.
pub fn parse_seed(s: &str) -> Result<u64> {
    let t = s.trim();
    let parsed = match t.strip_prefix("0x").or_else(|| t.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => t.parse(),
    };
    parsed.map_err(|_| Error::Config(format!("invalid seed `{s}`")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        Tolerances::default().validate().unwrap();
    }

    #[test]
    fn config_reports_position() {
        let err = Config::from_json("{\n  \"seed\": \"abc\"\n}").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("line 2"), "{msg}");
    }

    #[test]
    fn unknown_field_rejected() {
        assert!(Config::from_json(r#"{"sead": 3}"#).is_err());
    }

    #[test]
    fn threshold_override_applies() {
        let cfg = Config::from_json(r#"{"divergence_threshold": 1000.0, "truncation": 12}"#).unwrap();
        assert_eq!(cfg.tolerances.divergence_threshold, 1000.0);
        assert_eq!(cfg.truncation, Some(12));
    }

    #[test]
    fn seeds_parse() {
        assert_eq!(parse_seed("0x5EED").unwrap(), 0x5EED);
        assert_eq!(parse_seed("42").unwrap(), 42);
        assert!(parse_seed("x").is_err());
    }
}
