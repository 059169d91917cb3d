//! Synthetic fingers and the acquisition step.

use std::f64::consts::TAU;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, Normal, Poisson};

use super::types::{normalize_angle, FingerprintTemplate, MatchConfig, Minutia, MinutiaKind, SensorModel, MAX_MINUTIAE};
use super::BiometricError;
use crate::seed;

/// Output of the sensor: the surviving minutiae of the finger (perturbed),
/// followed by spurious points, all moved by the placement transform. Points
/// may fall outside the unit square.
#[derive(Debug, Clone, PartialEq)]
pub struct RawScan {
    pub finger_label: String,
    pub minutiae: Vec<Minutia>,
    /// Ground truth of the placement, for tests. The matcher never reads it.
    pub applied_rotation: f64,
    pub applied_translation: (f64, f64),
}

fn random_minutia<R: Rng>(rng: &mut R, x: f64, y: f64) -> Minutia {
    let angle = normalize_angle(rng.random::<f64>() * TAU);
    let kind = if rng.random::<bool>() { MinutiaKind::Bifurcation } else { MinutiaKind::RidgeEnding };
    Minutia { x, y, angle, kind }
}

/// Synthesizes a ground-truth finger with the default spacing
/// (`2 * distance_tol` of the default [`MatchConfig`]).
pub fn synthesize_finger(seed: u64, n_minutiae: usize) -> Result<FingerprintTemplate, BiometricError> {
    synthesize_finger_with(seed, n_minutiae, &MatchConfig::default())
}

/// Rejection-samples `n_minutiae` points in the unit square, pairwise at least
/// `config.min_separation()` apart. Dense requests that random sequential
/// placement cannot satisfy fall back to a shuffled hexagonal lattice.
pub fn synthesize_finger_with(
    seed: u64,
    n_minutiae: usize,
    config: &MatchConfig,
) -> Result<FingerprintTemplate, BiometricError> {
    if !(1..=MAX_MINUTIAE).contains(&n_minutiae) {
        return Err(BiometricError::InvalidPopulation(format!(
            "minutiae count {n_minutiae} outside 1..=256"
        )));
    }
    let sep = config.min_separation();
    let mut rng = seed::rng(seed, "synthesize", 0);
    let mut points: Vec<Minutia> = Vec::with_capacity(n_minutiae);
    let budget = 400 * n_minutiae;
    for _ in 0..budget {
        if points.len() == n_minutiae {
            break;
        }
        let (x, y) = (rng.random::<f64>(), rng.random::<f64>());
        if points.iter().all(|p| (p.x - x).hypot(p.y - y) >= sep) {
            points.push(random_minutia(&mut rng, x, y));
        }
    }
    if points.len() < n_minutiae {
        points = lattice_fallback(&mut rng, n_minutiae, sep)?;
    }
    Ok(FingerprintTemplate {
        finger_label: format!("finger-{seed:016x}"),
        quality: (n_minutiae as f64 / config.min_enroll_minutiae as f64).min(1.0),
        minutiae: points,
    })
}

fn lattice_fallback<R: Rng>(rng: &mut R, n: usize, sep: f64) -> Result<Vec<Minutia>, BiometricError> {
    // slight over-spacing keeps neighbouring rows at >= sep after rounding
    let dx = sep * 1.000_001;
    let dy = dx * 3f64.sqrt() / 2.0;
    let mut sites = Vec::new();
    let mut row = 0usize;
    loop {
        let y = row as f64 * dy;
        if y > 1.0 {
            break;
        }
        let mut x = if row % 2 == 1 { dx / 2.0 } else { 0.0 };
        while x <= 1.0 {
            sites.push((x, y));
            x += dx;
        }
        row += 1;
    }
    if sites.len() < n {
        return Err(BiometricError::InvalidPopulation(format!(
            "{n} minutiae cannot be placed {sep} apart in the unit square"
        )));
    }
    sites.shuffle(rng);
    Ok(sites[..n].iter().map(|&(x, y)| random_minutia(rng, x, y)).collect())
}

/// Rotates a point cloud about `(0.5, 0.5)` by `theta`, then shifts it.
/// Orientations rotate with the points.
pub fn rotate_about_center(points: &[Minutia], theta: f64, shift: (f64, f64)) -> Vec<Minutia> {
    let (s, c) = theta.sin_cos();
    points
        .iter()
        .map(|m| {
            let (dx, dy) = (m.x - 0.5, m.y - 0.5);
            Minutia {
                x: 0.5 + c * dx - s * dy + shift.0,
                y: 0.5 + s * dx + c * dy + shift.1,
                angle: normalize_angle(m.angle + theta),
                kind: m.kind,
            }
        })
        .collect()
}

fn symmetric<R: Rng>(rng: &mut R, max: f64) -> f64 {
    if max == 0.0 {
        0.0
    } else {
        (rng.random::<f64>() * 2.0 - 1.0) * max
    }
}

/// Simulates one presentation of `truth` to `sensor`.
pub fn acquire_scan(
    truth: &FingerprintTemplate,
    sensor: &SensorModel,
    seed: u64,
) -> Result<RawScan, BiometricError> {
    if truth.is_empty() {
        return Err(BiometricError::EmptyTemplate);
    }
    sensor.validate()?;
    let mut rng = seed::rng(seed, "acquire", 0);
    let pos = Normal::new(0.0, sensor.jitter_sigma).map_err(|_| BiometricError::InvalidConfig("jitter_sigma"))?;
    let ang = Normal::new(0.0, sensor.angle_sigma).map_err(|_| BiometricError::InvalidConfig("angle_sigma"))?;

    let mut points = Vec::with_capacity(truth.len() + 4);
    for m in &truth.minutiae {
        if rng.random::<f64>() < sensor.dropout_prob {
            continue;
        }
        points.push(Minutia {
            x: m.x + pos.sample(&mut rng),
            y: m.y + pos.sample(&mut rng),
            angle: normalize_angle(m.angle + ang.sample(&mut rng)),
            kind: m.kind,
        });
    }

    let spurious = if sensor.spurious_rate > 0.0 {
        let p = Poisson::new(sensor.spurious_rate).map_err(|_| BiometricError::InvalidConfig("spurious_rate"))?;
        p.sample(&mut rng) as usize
    } else {
        0
    };
    for _ in 0..spurious {
        let (x, y) = (rng.random::<f64>(), rng.random::<f64>());
        points.push(random_minutia(&mut rng, x, y));
    }

    let rotation = symmetric(&mut rng, sensor.max_rotation);
    let translation = (symmetric(&mut rng, sensor.max_translation), symmetric(&mut rng, sensor.max_translation));
    if rotation != 0.0 || translation != (0.0, 0.0) {
        points = rotate_about_center(&points, rotation, translation);
    }
    Ok(RawScan {
        finger_label: truth.finger_label.clone(),
        minutiae: points,
        applied_rotation: rotation,
        applied_translation: translation,
    })
}
