//! Minutiae matcher run inside the card.
//!
//! The probe is swept through `rotation_candidates` evenly spaced rotations
//! about `(0.5, 0.5)`. At each rotation the probe is re-centered on the
//! reference centroid; a second alignment adds the residual translation voted
//! for by compatible minutia pairs, and whichever pairs more is kept.
//!
//! Pairing is greedy: eligible pairs (close enough, similar orientation, same
//! kind) are taken in order of increasing distance, so every accepted pair is
//! mutually nearest among the points still free. The rotation with the most pairs wins; ties go to the
//! smallest rotation index.

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use super::synth::rotate_about_center;
use super::types::{angle_diff, centroid, FingerprintTemplate, MatchConfig, MatchResult, Minutia};

/// Rotation applied to the probe for candidate `index`.
pub fn candidate_rotation(index: u32, config: &MatchConfig) -> f64 {
    TAU * index as f64 / config.rotation_candidates as f64
}

/// The probe as the matcher sees it at `rotation`: rotated about the square's
/// center, then translated so its centroid sits on the reference centroid.
pub fn align_probe(reference: &[Minutia], probe: &[Minutia], rotation: f64) -> Vec<Minutia> {
    let (Some(rc), Some(_)) = (centroid(reference), centroid(probe)) else {
        return probe.to_vec();
    };
    let rotated = rotate_about_center(probe, rotation, (0.0, 0.0));
    let pc = centroid(&rotated).expect("nonempty");
    let (dx, dy) = (rc.0 - pc.0, rc.1 - pc.1);
    rotated.into_iter().map(|m| Minutia { x: m.x + dx, y: m.y + dy, ..m }).collect()
}

fn eligible(r: &Minutia, p: &Minutia, config: &MatchConfig) -> Option<f64> {
    if r.kind != p.kind || angle_diff(r.angle, p.angle) > config.angle_tol {
        return None;
    }
    let d = r.distance(p);
    (d <= config.distance_tol).then_some(d)
}

/// Greedy pairing of an already aligned probe. Returns `(ref_idx, probe_idx)`.
pub fn greedy_pairs(reference: &[Minutia], aligned: &[Minutia], config: &MatchConfig) -> Vec<(usize, usize)> {
    let mut edges: Vec<(f64, usize, usize)> = Vec::new();
    for (i, r) in reference.iter().enumerate() {
        for (j, p) in aligned.iter().enumerate() {
            if let Some(d) = eligible(r, p, config) {
                edges.push((d, i, j));
            }
        }
    }
    edges.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut ref_used = vec![false; reference.len()];
    let mut probe_used = vec![false; aligned.len()];
    let mut pairs = Vec::new();
    for (_, i, j) in edges {
        if !ref_used[i] && !probe_used[j] {
            ref_used[i] = true;
            probe_used[j] = true;
            pairs.push((i, j));
        }
    }
    pairs
}

/// Largest residual shift the offset vote may propose, unit-square units.
const MAX_RESIDUAL_SHIFT: f64 = 0.1;

/// Votes for the residual translation left after centroid alignment. Every
/// compatible (same kind, similar orientation) pair within
/// [`MAX_RESIDUAL_SHIFT`] casts its offset into a grid of `distance_tol`
/// cells; the fullest cell (ties: smallest cell coordinates) wins and its
/// votes are averaged.
pub fn residual_shift(reference: &[Minutia], aligned: &[Minutia], config: &MatchConfig) -> Option<(f64, f64)> {
    let mut votes: BTreeMap<(i64, i64), Vec<(f64, f64)>> = BTreeMap::new();
    for r in reference {
        for p in aligned {
            if r.kind != p.kind || angle_diff(r.angle, p.angle) > config.angle_tol {
                continue;
            }
            let d = (r.x - p.x, r.y - p.y);
            if d.0.hypot(d.1) > MAX_RESIDUAL_SHIFT {
                continue;
            }
            let cell = ((d.0 / config.distance_tol).floor() as i64, (d.1 / config.distance_tol).floor() as i64);
            votes.entry(cell).or_default().push(d);
        }
    }
    let mut best: Option<&Vec<(f64, f64)>> = None;
    for v in votes.values() {
        if best.is_none_or(|b| v.len() > b.len()) {
            best = Some(v);
        }
    }
    let v = best?;
    let n = v.len() as f64;
    Some((v.iter().map(|d| d.0).sum::<f64>() / n, v.iter().map(|d| d.1).sum::<f64>() / n))
}

/// Alignment chosen at one rotation: the better of plain centroid alignment
/// and centroid alignment plus the voted residual shift (ties: plain).
/// Returns the aligned probe and its greedy pairs.
pub fn align_at_rotation(
    reference: &[Minutia],
    probe: &[Minutia],
    rotation: f64,
    config: &MatchConfig,
) -> (Vec<Minutia>, Vec<(usize, usize)>) {
    let aligned = align_probe(reference, probe, rotation);
    let plain = greedy_pairs(reference, &aligned, config);
    let Some((dx, dy)) = residual_shift(reference, &aligned, config) else { return (aligned, plain) };
    let shifted: Vec<Minutia> = aligned.iter().map(|m| Minutia { x: m.x + dx, y: m.y + dy, ..*m }).collect();
    let refined = greedy_pairs(reference, &shifted, config);
    if refined.len() > plain.len() {
        (shifted, refined)
    } else {
        (aligned, plain)
    }
}

pub fn match_templates(
    reference: &FingerprintTemplate,
    probe: &FingerprintTemplate,
    config: &MatchConfig,
) -> MatchResult {
    if reference.is_empty() || probe.is_empty() {
        return MatchResult { score: 0.0, matched_pairs: 0, aligned_rotation: 0.0, decision: false };
    }
    let mut best = (0usize, 0u32);
    for k in 0..config.rotation_candidates {
        let rotation = candidate_rotation(k, config);
        let n = align_at_rotation(&reference.minutiae, &probe.minutiae, rotation, config).1.len();
        if n > best.0 {
            best = (n, k);
        }
    }
    let (matched_pairs, k) = best;
    let score = 2.0 * matched_pairs as f64 / (reference.len() + probe.len()) as f64;
    MatchResult {
        score,
        matched_pairs,
        aligned_rotation: candidate_rotation(k, config),
        decision: score >= config.decision_threshold,
    }
}
