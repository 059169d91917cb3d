//! Operator commands over on-disk state: the authority ledger, the border
//! trust store and card files.

use std::path::{Path, PathBuf};

use eid_core::authority::{IssuingAuthority, VettingDecision, VettingDossier};
use eid_core::biometrics::{evaluate_rates_with, FingerprintTemplate, RatesConfig};
use eid_core::card::{Card, CardError, CardLifecycle, SubjectIdentity};
use eid_core::pki::{IdentityCertificate, RevocationReason};
use eid_core::seed;
use eid_core::verifier::{verify_passport, LiveProbe, TrustStore, Verdict};
use serde_json::json;

use crate::config::Config;
use crate::error::{CliError, EXIT_OK, EXIT_REJECT};
use crate::world;

/// What a command prints to stdout and the status it exits with.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    pub stdout: String,
    pub exit: i32,
}

impl Output {
    fn ok(stdout: String) -> Self {
        Self { stdout, exit: EXIT_OK }
    }
}

fn line(v: serde_json::Value) -> String {
    let mut s = v.to_string();
    s.push('\n');
    s
}

fn load_authority(cfg: &Config, trust: &TrustStore) -> Result<IssuingAuthority, CliError> {
    let path = &cfg.paths.ledger;
    let mut authority = if path.exists() {
        IssuingAuthority::load(path, &cfg.authority_id, world::ca_keys(cfg), cfg.policy)?
    } else {
        IssuingAuthority::new(&cfg.authority_id, world::ca_keys(cfg), cfg.policy)?
    };
    if let Some(crl) = trust.authority(&cfg.authority_id).and_then(|a| a.crl.as_ref()) {
        authority.resume_crl_sequence(crl.body.sequence);
    }
    Ok(authority)
}

/// The stored trust store, created on first use, with this authority's
/// current key as an anchor.
fn load_trust(cfg: &Config) -> Result<TrustStore, CliError> {
    let path = &cfg.paths.trust_store;
    let mut trust = if path.exists() { TrustStore::load(path)? } else { TrustStore::default() };
    trust.add_authority(&cfg.authority_id, world::ca_keys(cfg).public_part);
    Ok(trust)
}

fn publish(cfg: &Config, authority: &mut IssuingAuthority, trust: &mut TrustStore, now: u64) -> Result<u64, CliError> {
    let crl = authority.publish_crl(now);
    let sequence = crl.body.sequence;
    trust.install_crl(crl)?;
    authority.save(&cfg.paths.ledger)?;
    trust.save(&cfg.paths.trust_store)?;
    Ok(sequence)
}

/// The issuance flow against an in-memory authority: vet, initialize and
/// unlock a fresh card, request, issue, store, lock. Vetting runs before the
/// card is touched because its outcome decides between a fingerprint and an
/// exempt card.
pub fn personalize(
    cfg: &Config,
    authority: &mut IssuingAuthority,
    dossier: &VettingDossier,
    now: u64,
) -> Result<(Card, IdentityCertificate), CliError> {
    let decision = authority.vet(dossier, now);
    if let VettingDecision::Rejected(reason) = &decision {
        return Err(CliError::state("Rejected", reason.clone()));
    }
    let entropy = world::card_entropy(cfg, &dossier.national_id);
    let mut card = Card::new(cfg.match_config, cfg.max_attempts);
    if decision == VettingDecision::ApprovedExempt {
        card.initialize_exempt(&dossier.facial_image, &entropy)?;
        card.unlock_exempt()?;
    } else {
        let truth = world::finger_of(cfg, &dossier.national_id)?;
        let idx = seed::index_of(&dossier.national_id);
        let enrolled = world::scan(cfg, &truth, "enroll-scan", idx)?;
        card.initialize(&enrolled, &dossier.facial_image, &entropy)?;
        let probe = world::scan(cfg, &truth, "enroll-probe", idx)?;
        card.verify_holder(&probe)?;
        if !card.is_unlocked() {
            return Err(CliError::state("EnrollmentProbeRejected", "fresh scan did not match the enrolled template"));
        }
    }
    let subject = SubjectIdentity {
        subject_name: dossier.subject_name.clone(),
        national_id: dossier.national_id.clone(),
        birthdate: dossier.birthdate.clone(),
    };
    let request = card.create_request(&subject)?;
    let cert = authority.issue_certificate(&request, &decision, &dossier.facial_image, now)?;
    card.store_certificate(&cert)?;
    card.end_session();
    Ok((card, cert))
}

/// A rejected applicant leaves no card file behind.
pub fn cmd_issue(cfg: &Config, card_path: &Path, dossier: &VettingDossier, now: u64) -> Result<Output, CliError> {
    if card_path.exists() && Card::load(card_path)?.lifecycle() != CardLifecycle::Blank {
        return Err(CardError::AlreadyInitialized.into());
    }
    let mut trust = load_trust(cfg)?;
    let mut authority = load_authority(cfg, &trust)?;

    let (card, cert) = personalize(cfg, &mut authority, dossier, now)?;
    card.save(card_path)?;
    let crl_sequence = publish(cfg, &mut authority, &mut trust, now)?;
    Ok(Output::ok(line(json!({
        "serial": cert.body.serial,
        "national_id": cert.body.national_id,
        "biometric_exempt": cert.body.biometric_exempt,
        "valid_from": cert.body.valid_from,
        "valid_to": cert.body.valid_to,
        "crl_sequence": crl_sequence,
    }))))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProbeSource {
    /// A fresh scan of the finger belonging to this national id.
    Person(String),
    /// A template JSON file.
    File(PathBuf),
    /// Operator confirms an age-exempt holder by manual inspection.
    Exempt,
}

pub fn cmd_verify(cfg: &Config, card_path: &Path, probe: &ProbeSource, now: u64) -> Result<Output, CliError> {
    let mut card = Card::load(card_path)?;
    if !cfg.paths.trust_store.exists() {
        return Err(CliError::state("TrustStore", format!("{} not found", cfg.paths.trust_store.display())));
    }
    let mut trust = TrustStore::load(&cfg.paths.trust_store)?;
    if let Some(age) = cfg.max_crl_age_seconds {
        trust.max_crl_age_seconds = age;
    }
    let live = match probe {
        ProbeSource::Person(id) => LiveProbe::Fingerprint(world::scan(cfg, &world::finger_of(cfg, id)?, "verify-scan", now)?),
        ProbeSource::File(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::io("probe file", e))?;
            let t: FingerprintTemplate =
                serde_json::from_str(&text).map_err(|e| CliError::usage(format!("probe file: {e}")))?;
            t.validate()?;
            LiveProbe::Fingerprint(t)
        }
        ProbeSource::Exempt => LiveProbe::Exempt,
    };
    let mut rng = seed::rng(cfg.seed(), "verifier-nonce", now);
    let report = verify_passport(&mut card, &live, &trust, now, &mut rng);
    // the failure counter lives on the card
    card.save(card_path)?;
    let mut stdout = report.to_json();
    stdout.push('\n');
    let exit = if report.verdict == Verdict::Accept { EXIT_OK } else { EXIT_REJECT };
    Ok(Output { stdout, exit })
}

pub fn cmd_revoke(cfg: &Config, serial: u64, reason: RevocationReason, now: u64) -> Result<Output, CliError> {
    let mut trust = load_trust(cfg)?;
    let mut authority = load_authority(cfg, &trust)?;
    authority.revoke_certificate(serial, reason, now)?;
    let crl_sequence = publish(cfg, &mut authority, &mut trust, now)?;
    Ok(Output::ok(line(json!({
        "serial": serial,
        "reason": reason,
        "revoked_at": now,
        "crl_sequence": crl_sequence,
    }))))
}

pub fn cmd_rates(cfg: &Config, population: usize, thresholds: &[f64], trials: Option<usize>) -> Result<Output, CliError> {
    let rc = RatesConfig {
        match_config: cfg.match_config,
        minutiae_range: cfg.rates.minutiae_range,
        impostor_budget: cfg.rates.impostor_budget,
    };
    let trials = trials.unwrap_or(cfg.rates.trials_per_subject);
    let report = evaluate_rates_with(population, &cfg.sensor, thresholds, trials, cfg.seed(), &rc)?;
    Ok(Output::ok(report.to_csv()))
}
