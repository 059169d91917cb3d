use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use super::BiometricError;

pub const MAX_MINUTIAE: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MinutiaKind {
    RidgeEnding,
    Bifurcation,
}

impl MinutiaKind {
    pub(crate) fn code(self) -> u8 {
        match self {
            Self::RidgeEnding => 0,
            Self::Bifurcation => 1,
        }
    }

    pub(crate) fn from_code(c: u8) -> Option<Self> {
        match c {
            0 => Some(Self::RidgeEnding),
            1 => Some(Self::Bifurcation),
            _ => None,
        }
    }
}

/// A ridge feature point. Coordinates are normalized to the unit square and
/// the angle lies in `[0, 2π)`. Raw scans may carry points outside the square
/// until enhancement clamps them.
///
/// Serializes as `[x, y, angle, kind]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(into = "(f64, f64, f64, MinutiaKind)", try_from = "(f64, f64, f64, MinutiaKind)")]
pub struct Minutia {
    pub x: f64,
    pub y: f64,
    pub angle: f64,
    pub kind: MinutiaKind,
}

impl Minutia {
    pub fn new(x: f64, y: f64, angle: f64, kind: MinutiaKind) -> Result<Self, BiometricError> {
        let m = Self { x, y, angle, kind };
        if m.is_valid() {
            Ok(m)
        } else {
            Err(BiometricError::InvalidMinutia { x, y, angle })
        }
    }

    pub fn is_valid(&self) -> bool {
        (0.0..=1.0).contains(&self.x)
            && (0.0..=1.0).contains(&self.y)
            && (0.0..TAU).contains(&self.angle)
    }

    pub fn distance(&self, other: &Minutia) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

impl From<Minutia> for (f64, f64, f64, MinutiaKind) {
    fn from(m: Minutia) -> Self {
        (m.x, m.y, m.angle, m.kind)
    }
}

impl TryFrom<(f64, f64, f64, MinutiaKind)> for Minutia {
    type Error = BiometricError;

    fn try_from((x, y, angle, kind): (f64, f64, f64, MinutiaKind)) -> Result<Self, Self::Error> {
        Minutia::new(x, y, angle, kind)
    }
}

/// Wraps any finite angle into `[0, 2π)`.
pub fn normalize_angle(a: f64) -> f64 {
    let r = a.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Smallest absolute difference between two angles, in `[0, π]`.
pub fn angle_diff(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FingerprintTemplate {
    pub finger_label: String,
    pub quality: f64,
    pub minutiae: Vec<Minutia>,
}

impl FingerprintTemplate {
    pub fn len(&self) -> usize {
        self.minutiae.len()
    }

    pub fn is_empty(&self) -> bool {
        self.minutiae.is_empty()
    }

    pub fn validate(&self) -> Result<(), BiometricError> {
        if self.minutiae.len() > MAX_MINUTIAE {
            return Err(BiometricError::InvalidTemplate("more than 256 minutiae"));
        }
        if !(0.0..=1.0).contains(&self.quality) {
            return Err(BiometricError::InvalidTemplate("quality outside [0, 1]"));
        }
        if self.minutiae.iter().any(|m| !m.is_valid()) {
            return Err(BiometricError::InvalidTemplate("minutia outside its domain"));
        }
        Ok(())
    }

    pub fn centroid(&self) -> Option<(f64, f64)> {
        centroid(&self.minutiae)
    }
}

pub(crate) fn centroid(points: &[Minutia]) -> Option<(f64, f64)> {
    if points.is_empty() {
        return None;
    }
    let n = points.len() as f64;
    let (sx, sy) = points.iter().fold((0.0, 0.0), |(sx, sy), m| (sx + m.x, sy + m.y));
    Some((sx / n, sy / n))
}

/// Noise model of a desk-scale fingerprint sensor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SensorModel {
    /// Positional noise standard deviation, unit-square units.
    pub jitter_sigma: f64,
    /// Orientation noise standard deviation, radians.
    pub angle_sigma: f64,
    pub dropout_prob: f64,
    /// Expected number of false minutiae per scan.
    pub spurious_rate: f64,
    /// Finger placement rotation is drawn uniformly from `[-max, max]`.
    pub max_rotation: f64,
    /// Per-axis placement offset is drawn uniformly from `[-max, max]`.
    pub max_translation: f64,
}

impl Default for SensorModel {
    fn default() -> Self {
        Self {
            jitter_sigma: 0.005,
            angle_sigma: 0.05,
            dropout_prob: 0.05,
            spurious_rate: 1.0,
            max_rotation: 0.15,
            max_translation: 0.02,
        }
    }
}

impl SensorModel {
    /// A sensor that reproduces the finger exactly.
    pub fn ideal() -> Self {
        Self {
            jitter_sigma: 0.0,
            angle_sigma: 0.0,
            dropout_prob: 0.0,
            spurious_rate: 0.0,
            max_rotation: 0.0,
            max_translation: 0.0,
        }
    }

    pub fn validate(&self) -> Result<(), BiometricError> {
        let fields = [
            self.jitter_sigma,
            self.angle_sigma,
            self.dropout_prob,
            self.spurious_rate,
            self.max_rotation,
            self.max_translation,
        ];
        if fields.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(BiometricError::InvalidConfig("sensor parameters must be finite and >= 0"));
        }
        if self.dropout_prob > 1.0 {
            return Err(BiometricError::InvalidConfig("dropout_prob must be <= 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MatchConfig {
    pub distance_tol: f64,
    pub angle_tol: f64,
    pub rotation_candidates: u32,
    pub decision_threshold: f64,
    pub min_enroll_minutiae: u32,
}

impl Default for MatchConfig {
    fn default() -> Self {
        Self {
            distance_tol: 0.03,
            angle_tol: 0.26,
            rotation_candidates: 64,
            decision_threshold: 0.40,
            min_enroll_minutiae: 12,
        }
    }
}

impl MatchConfig {
    pub fn validate(&self) -> Result<(), BiometricError> {
        if !(self.distance_tol.is_finite() && self.distance_tol > 0.0) {
            return Err(BiometricError::InvalidConfig("distance_tol must be > 0"));
        }
        if !(self.angle_tol.is_finite() && self.angle_tol > 0.0) {
            return Err(BiometricError::InvalidConfig("angle_tol must be > 0"));
        }
        if self.rotation_candidates == 0 {
            return Err(BiometricError::InvalidConfig("rotation_candidates must be > 0"));
        }
        if !(self.decision_threshold > 0.0 && self.decision_threshold < 1.0) {
            return Err(BiometricError::InvalidConfig("decision_threshold must lie in (0, 1)"));
        }
        if self.min_enroll_minutiae == 0 {
            return Err(BiometricError::InvalidConfig("min_enroll_minutiae must be > 0"));
        }
        Ok(())
    }

    /// Minimum spacing between synthesized minutiae.
    pub fn min_separation(&self) -> f64 {
        2.0 * self.distance_tol
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatchResult {
    pub score: f64,
    pub matched_pairs: usize,
    pub aligned_rotation: f64,
    pub decision: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum EnrollOutcome {
    Accepted(f64),
    FailureToEnroll,
}
