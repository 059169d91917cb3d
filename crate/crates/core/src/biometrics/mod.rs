//! Synthetic fingerprint model, the acquisition / enhancement / feature
//! detection pipeline, the match-on-card matcher and the error-rate harness.
//!
//! Raster images are out of reach at desk scale, so a finger is a cloud of
//! minutiae and a sensor is a parametric noise model. Edge-detection style
//! cleanup becomes near-duplicate merging.

mod matcher;
mod pipeline;
mod rates;
mod synth;
mod types;

use thiserror::Error;

pub use matcher::{align_at_rotation, align_probe, candidate_rotation, greedy_pairs, match_templates, residual_shift};
pub use pipeline::{capture_template, clouds_close, enhance_points, enhance_scan, enroll_quality, extract_features, CleanScan};
pub use rates::{evaluate_rates, evaluate_rates_with, RatesConfig, RatesReport, RatesRow, CSV_HEADER};
pub use synth::{acquire_scan, rotate_about_center, synthesize_finger, synthesize_finger_with, RawScan};
pub use types::{
    angle_diff, normalize_angle, EnrollOutcome, FingerprintTemplate, MatchConfig, MatchResult, Minutia,
    MinutiaKind, SensorModel, MAX_MINUTIAE,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BiometricError {
    #[error("invalid population: {0}")]
    InvalidPopulation(String),
    #[error("template has no minutiae")]
    EmptyTemplate,
    #[error("invalid thresholds: {0}")]
    InvalidThresholds(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(&'static str),
    #[error("invalid template: {0}")]
    InvalidTemplate(&'static str),
    #[error("minutia ({x}, {y}, {angle}) outside its domain")]
    InvalidMinutia { x: f64, y: f64, angle: f64 },
}
