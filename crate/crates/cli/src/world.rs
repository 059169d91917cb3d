//! Named sub-seeds. Everything random in a run is derived here from the
//! config seed, so a seed fixes the whole world.

use eid_core::biometrics::{capture_template, synthesize_finger_with, FingerprintTemplate};
use eid_core::pki::{generate_keypair, KeyPair};
use eid_core::seed;

use crate::config::Config;
use crate::error::CliError;

pub fn ca_keys(cfg: &Config) -> KeyPair {
    generate_keypair(&seed::derive_bytes(cfg.seed(), "ca-key", 0)).expect("32-byte seed")
}

/// The synthetic finger of the person with `national_id`.
pub fn finger_of(cfg: &Config, national_id: &str) -> Result<FingerprintTemplate, CliError> {
    let s = seed::derive(cfg.seed(), "finger", seed::index_of(national_id));
    Ok(synthesize_finger_with(s, cfg.minutiae_per_finger, &cfg.match_config)?)
}

/// One pass of `truth` over the configured sensor.
pub fn scan(cfg: &Config, truth: &FingerprintTemplate, label: &str, index: u64) -> Result<FingerprintTemplate, CliError> {
    Ok(capture_template(truth, &cfg.sensor, &cfg.match_config, seed::derive(cfg.seed(), label, index))?)
}

pub fn card_entropy(cfg: &Config, national_id: &str) -> [u8; 32] {
    seed::derive_bytes(cfg.seed(), "card-entropy", seed::index_of(national_id))
}
