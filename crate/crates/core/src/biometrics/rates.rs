//! FER / FRR / FAR harness over a synthetic population.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::matcher::match_templates;
use super::pipeline::{capture_template, enroll_quality};
use super::synth::synthesize_finger_with;
use super::types::{EnrollOutcome, FingerprintTemplate, MatchConfig, SensorModel};
use super::BiometricError;
use crate::seed;

pub const CSV_HEADER: &str = "threshold,fer,frr,far,genuine_trials,impostor_trials";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RatesConfig {
    pub match_config: MatchConfig,
    /// Inclusive range for each subject's minutiae count.
    pub minutiae_range: (usize, usize),
    /// Maximum number of impostor comparisons.
    pub impostor_budget: usize,
}

impl Default for RatesConfig {
    fn default() -> Self {
        Self { match_config: MatchConfig::default(), minutiae_range: (8, 40), impostor_budget: 10_000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatesRow {
    pub threshold: f64,
    pub fer: f64,
    pub frr: f64,
    pub far: f64,
    pub genuine_trials: usize,
    pub impostor_trials: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatesReport {
    pub seed: u64,
    pub population: usize,
    pub enrolled: usize,
    pub trials_per_subject: usize,
    pub rows: Vec<RatesRow>,
}

impl RatesReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                r.threshold, r.fer, r.frr, r.far, r.genuine_trials, r.impostor_trials
            ));
        }
        out
    }
}

struct Subject {
    reference: Option<FingerprintTemplate>,
    probes: Vec<FingerprintTemplate>,
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

pub fn evaluate_rates(
    population: usize,
    sensor: &SensorModel,
    thresholds: &[f64],
    trials_per_subject: usize,
    seed: u64,
) -> Result<RatesReport, BiometricError> {
    evaluate_rates_with(population, sensor, thresholds, trials_per_subject, seed, &RatesConfig::default())
}

/// Every subject, enrollment scan and probe scan draws from its own derived
/// seed, so the report is identical for any rayon thread count.
pub fn evaluate_rates_with(
    population: usize,
    sensor: &SensorModel,
    thresholds: &[f64],
    trials_per_subject: usize,
    seed: u64,
    config: &RatesConfig,
) -> Result<RatesReport, BiometricError> {
    if population < 2 {
        return Err(BiometricError::InvalidPopulation(format!("population {population} < 2")));
    }
    if thresholds.is_empty() {
        return Err(BiometricError::InvalidThresholds("no thresholds given".into()));
    }
    if thresholds.iter().any(|t| !(0.0..=1.0).contains(t)) {
        return Err(BiometricError::InvalidThresholds("thresholds must lie in [0, 1]".into()));
    }
    if thresholds.windows(2).any(|w| w[0] >= w[1]) {
        return Err(BiometricError::InvalidThresholds("thresholds must be strictly ascending".into()));
    }
    let (lo, hi) = config.minutiae_range;
    if lo == 0 || lo > hi || hi > super::types::MAX_MINUTIAE {
        return Err(BiometricError::InvalidConfig("minutiae_range must satisfy 1 <= lo <= hi <= 256"));
    }
    sensor.validate()?;
    let mc = &config.match_config;

    let subjects: Vec<Subject> = (0..population as u64)
        .into_par_iter()
        .map(|s| -> Result<Subject, BiometricError> {
            let n = seed::rng(seed, "rates-count", s).random_range(lo..=hi);
            let truth = synthesize_finger_with(seed::derive(seed, "rates-finger", s), n, mc)?;
            let enrolled = capture_template(&truth, sensor, mc, seed::derive(seed, "rates-enroll", s))?;
            let reference = match enroll_quality(&enrolled, mc) {
                EnrollOutcome::Accepted(_) => Some(enrolled),
                EnrollOutcome::FailureToEnroll => None,
            };
            let probe_root = seed::derive(seed, "rates-probe", s);
            let probes = (0..trials_per_subject.max(1) as u64)
                .map(|t| capture_template(&truth, sensor, mc, seed::derive(probe_root, "trial", t)))
                .collect::<Result<_, _>>()?;
            Ok(Subject { reference, probes })
        })
        .collect::<Result<_, _>>()?;

    let enrolled = subjects.iter().filter(|s| s.reference.is_some()).count();

    let genuine: Vec<(usize, usize)> = subjects
        .iter()
        .enumerate()
        .filter(|(_, s)| s.reference.is_some())
        .flat_map(|(i, _)| (0..trials_per_subject).map(move |t| (i, t)))
        .collect();
    let genuine_scores: Vec<f64> = genuine
        .par_iter()
        .map(|&(i, t)| {
            let r = subjects[i].reference.as_ref().expect("enrolled");
            match_templates(r, &subjects[i].probes[t], mc).score
        })
        .collect();

    let impostor: Vec<(usize, usize)> = (0..population)
        .filter(|&a| subjects[a].reference.is_some())
        .flat_map(|a| (0..population).filter(move |&b| b != a).map(move |b| (a, b)))
        .take(config.impostor_budget)
        .collect();
    let impostor_scores: Vec<f64> = impostor
        .par_iter()
        .map(|&(a, b)| {
            let r = subjects[a].reference.as_ref().expect("enrolled");
            match_templates(r, &subjects[b].probes[0], mc).score
        })
        .collect();

    let fer = ratio(population - enrolled, population);
    let rows = thresholds
        .iter()
        .map(|&threshold| RatesRow {
            threshold,
            fer,
            frr: ratio(genuine_scores.iter().filter(|&&s| s < threshold).count(), genuine_scores.len()),
            far: ratio(impostor_scores.iter().filter(|&&s| s >= threshold).count(), impostor_scores.len()),
            genuine_trials: genuine_scores.len(),
            impostor_trials: impostor_scores.len(),
        })
        .collect();

    Ok(RatesReport { seed, population, enrolled, trials_per_subject, rows })
}
