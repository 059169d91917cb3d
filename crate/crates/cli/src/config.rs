//! Run configuration. Every field has a default, so `{}` is a valid file
//! apart from the seed, which must come from somewhere.

use std::path::{Path, PathBuf};

use eid_core::authority::AuthorityPolicy;
use eid_core::biometrics::{MatchConfig, SensorModel};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const SEED_ENV: &str = "EID_SEED";

/// 2024-06-01T00:00:00Z. Scenarios start here unless `now` is configured.
pub const DEFAULT_EPOCH: u64 = 1_717_200_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Paths {
    pub ledger: PathBuf,
    pub trust_store: PathBuf,
}

impl Default for Paths {
    fn default() -> Self {
        Self { ledger: "ledger.jsonl".into(), trust_store: "trust.json".into() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RatesOptions {
    pub minutiae_range: (usize, usize),
    pub impostor_budget: usize,
    pub trials_per_subject: usize,
}

impl Default for RatesOptions {
    fn default() -> Self {
        Self { minutiae_range: (8, 40), impostor_budget: 10_000, trials_per_subject: 10 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub seed: Option<u64>,
    /// Unix seconds. Operator commands fall back to the system clock,
    /// scenarios to [`DEFAULT_EPOCH`].
    pub now: Option<u64>,
    pub authority_id: String,
    pub sensor: SensorModel,
    #[serde(rename = "match")]
    pub match_config: MatchConfig,
    pub policy: AuthorityPolicy,
    /// Overrides the trust store's own freshness limit when set.
    pub max_crl_age_seconds: Option<u64>,
    pub max_attempts: u32,
    pub minutiae_per_finger: usize,
    pub rates: RatesOptions,
    pub paths: Paths,
    pub scenario: Option<String>,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            seed: None,
            now: None,
            authority_id: "EID".into(),
            sensor: SensorModel::default(),
            match_config: MatchConfig::default(),
            policy: AuthorityPolicy::default(),
            max_crl_age_seconds: None,
            max_attempts: eid_core::card::DEFAULT_MAX_ATTEMPTS,
            minutiae_per_finger: 30,
            rates: RatesOptions::default(),
            paths: Paths::default(),
            scenario: None,
        }
    }
}

impl Config {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| CliError::usage(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::usage(format!("config {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.sensor.validate().map_err(|e| CliError::usage(format!("sensor: {e}")))?;
        self.match_config.validate().map_err(|e| CliError::usage(format!("match: {e}")))?;
        self.policy.validate().map_err(|e| CliError::usage(format!("policy: {e}")))?;
        if self.authority_id.is_empty() {
            return Err(CliError::usage("authority_id must be nonempty"));
        }
        if self.max_attempts == 0 {
            return Err(CliError::usage("max_attempts must be at least 1"));
        }
        if self.minutiae_per_finger == 0 || self.minutiae_per_finger > eid_core::biometrics::MAX_MINUTIAE {
            return Err(CliError::usage("minutiae_per_finger must lie in 1..=256"));
        }
        Ok(())
    }

    /// Flag first, then the config file, then `EID_SEED`.
    pub fn resolve_seed(&mut self, flag: Option<u64>, env: Option<&str>) -> Result<u64, CliError> {
        let from_env = match env {
            Some(s) => Some(s.trim().parse::<u64>().map_err(|_| CliError::usage(format!("{SEED_ENV}={s:?} is not a u64")))?),
            None => None,
        };
        let seed = flag.or(self.seed).or(from_env).ok_or_else(|| {
            CliError::usage(format!("no seed: pass --seed, set \"seed\" in the config, or export {SEED_ENV}"))
        })?;
        self.seed = Some(seed);
        Ok(seed)
    }

    pub fn seed(&self) -> u64 {
        self.seed.expect("seed resolved before use")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_object_is_default() {
        assert_eq!(Config::from_json("{}").unwrap(), Config::default());
    }

    #[test]
    fn unknown_fields_are_usage_errors() {
        let e = Config::from_json(r#"{"sed": 1}"#).unwrap_err();
        assert_eq!(e.exit_code(), 2);
    }

    #[test]
    fn seed_priority() {
        let mut c = Config { seed: Some(5), ..Default::default() };
        assert_eq!(c.resolve_seed(Some(9), Some("7")).unwrap(), 9);
        let mut c = Config { seed: Some(5), ..Default::default() };
        assert_eq!(c.resolve_seed(None, Some("7")).unwrap(), 5);
        let mut c = Config::default();
        assert_eq!(c.resolve_seed(None, Some("7")).unwrap(), 7);
        assert!(Config::default().resolve_seed(None, None).is_err());
        assert!(Config::default().resolve_seed(None, Some("x")).is_err());
    }

    #[test]
    fn nested_sections_merge_with_defaults() {
        let c = Config::from_json(r#"{"seed": 1, "match": {"decision_threshold": 0.5}, "policy": {"validity_years": 10}}"#)
            .unwrap();
        assert_eq!(c.match_config.decision_threshold, 0.5);
        assert_eq!(c.match_config.distance_tol, MatchConfig::default().distance_tol);
        assert_eq!(c.policy.validity_years, 10);
        assert!(Config::from_json(r#"{"policy": {"validity_years": 0}}"#).is_err());
    }
}
