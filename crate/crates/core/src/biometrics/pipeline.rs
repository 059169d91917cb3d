//! Enhancement and feature extraction: the reader-side half of match-on-card.

use super::synth::{acquire_scan, RawScan};
use super::types::{
    angle_diff, centroid, normalize_angle, EnrollOutcome, FingerprintTemplate, MatchConfig,
    Minutia, SensorModel,
};
use super::BiometricError;

#[derive(Debug, Clone, PartialEq)]
pub struct CleanScan {
    pub finger_label: String,
    pub minutiae: Vec<Minutia>,
}

fn clamp_unit(m: Minutia) -> Minutia {
    Minutia { x: m.x.clamp(0.0, 1.0), y: m.y.clamp(0.0, 1.0), angle: normalize_angle(m.angle), kind: m.kind }
}

fn circular_mean(a: f64, b: f64) -> f64 {
    let (s, c) = (a.sin() + b.sin(), a.cos() + b.cos());
    if s.hypot(c) < 1e-12 {
        // opposite orientations have no mean; keep the first
        return a;
    }
    normalize_angle(s.atan2(c))
}

/// Clamps into the unit square, then repeatedly merges the closest pair lying
/// nearer than `distance_tol / 2` (ties: lowest indices) into its midpoint with
/// the circular mean orientation and the lower-index kind. Stops when no such
/// pair remains, which makes the operation idempotent.
pub fn enhance_points(points: &[Minutia], config: &MatchConfig) -> Vec<Minutia> {
    let merge_below = config.distance_tol / 2.0;
    let mut pts: Vec<Minutia> = points.iter().copied().map(clamp_unit).collect();
    loop {
        let mut best: Option<(f64, usize, usize)> = None;
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                let d = pts[i].distance(&pts[j]);
                if d < merge_below && best.is_none_or(|(bd, _, _)| d < bd) {
                    best = Some((d, i, j));
                }
            }
        }
        let Some((_, i, j)) = best else { break };
        let (a, b) = (pts[i], pts[j]);
        pts[i] = Minutia {
            x: (a.x + b.x) / 2.0,
            y: (a.y + b.y) / 2.0,
            angle: circular_mean(a.angle, b.angle),
            kind: a.kind,
        };
        pts.remove(j);
    }
    pts
}

pub fn enhance_scan(raw: &RawScan, config: &MatchConfig) -> CleanScan {
    CleanScan { finger_label: raw.finger_label.clone(), minutiae: enhance_points(&raw.minutiae, config) }
}

/// Centers the cloud on `(0.5, 0.5)`, clamps to the unit square and grades
/// quality as `min(1, count / min_enroll_minutiae)`.
pub fn extract_features(clean: &CleanScan, config: &MatchConfig) -> FingerprintTemplate {
    let Some((cx, cy)) = centroid(&clean.minutiae) else {
        return FingerprintTemplate { finger_label: clean.finger_label.clone(), quality: 0.0, minutiae: vec![] };
    };
    let (dx, dy) = (0.5 - cx, 0.5 - cy);
    let minutiae: Vec<Minutia> = clean
        .minutiae
        .iter()
        .map(|m| clamp_unit(Minutia { x: m.x + dx, y: m.y + dy, ..*m }))
        .collect();
    let quality = (minutiae.len() as f64 / config.min_enroll_minutiae as f64).min(1.0);
    FingerprintTemplate { finger_label: clean.finger_label.clone(), quality, minutiae }
}

pub fn enroll_quality(template: &FingerprintTemplate, config: &MatchConfig) -> EnrollOutcome {
    if template.len() < config.min_enroll_minutiae as usize {
        EnrollOutcome::FailureToEnroll
    } else {
        EnrollOutcome::Accepted((template.len() as f64 / config.min_enroll_minutiae as f64).min(1.0))
    }
}

/// Acquisition, enhancement and extraction in one call: what a border reader
/// or enrollment station hands to the card.
pub fn capture_template(
    truth: &FingerprintTemplate,
    sensor: &SensorModel,
    config: &MatchConfig,
    seed: u64,
) -> Result<FingerprintTemplate, BiometricError> {
    let raw = acquire_scan(truth, sensor, seed)?;
    Ok(extract_features(&enhance_scan(&raw, config), config))
}

/// True if two clouds agree point-for-point within `eps`.
#[doc(hidden)]
pub fn clouds_close(a: &[Minutia], b: &[Minutia], eps: f64) -> bool {
    a.len() == b.len()
        && a.iter().zip(b).all(|(p, q)| {
            (p.x - q.x).abs() <= eps && (p.y - q.y).abs() <= eps && angle_diff(p.angle, q.angle) <= eps && p.kind == q.kind
        })
}
