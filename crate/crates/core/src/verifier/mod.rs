//! Border inspection.
//!
//! [`verify_passport`] runs six checks in a fixed order: holder unlock,
//! certificate read, issuer signature, validity window, revocation and
//! key-possession challenge. The first failure stops the run; later steps are
//! reported as not executed.

use std::collections::BTreeMap;
use std::path::Path;

use rand::RngCore;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::biometrics::FingerprintTemplate;
use crate::card::{CardError, CardInterface, HolderVerification, CHALLENGE_TAG};
use crate::pki::{
    validate_certificate, verify_signature, CertificateStatus, IdentityCertificate, PublicKey, RevocationList,
    RevocationReason,
};

pub const DEFAULT_MAX_CRL_AGE_SECONDS: u64 = 7 * 24 * 3600;
pub const NONCE_LEN: usize = 32;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TrustError {
    #[error("authority {0:?} is not trusted")]
    UnknownAuthority(String),
    #[error("CRL signature does not verify for {0:?}")]
    BadCrlSignature(String),
    #[error("CRL sequence {offered} does not advance past {current}")]
    StaleSequence { offered: u64, current: u64 },
    #[error("trust store file: {0}")]
    File(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrustedAuthority {
    pub public_key: PublicKey,
    pub crl: Option<RevocationList>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrustStore {
    authorities: BTreeMap<String, TrustedAuthority>,
    pub max_crl_age_seconds: u64,
}

impl Default for TrustStore {
    fn default() -> Self {
        Self { authorities: BTreeMap::new(), max_crl_age_seconds: DEFAULT_MAX_CRL_AGE_SECONDS }
    }
}

impl TrustStore {
    pub fn new(max_crl_age_seconds: u64) -> Self {
        Self { max_crl_age_seconds, ..Default::default() }
    }

    /// Adds or replaces an anchor. Replacing a key drops the stored CRL.
    pub fn add_authority(&mut self, authority_id: &str, public_key: PublicKey) {
        let entry = self
            .authorities
            .entry(authority_id.to_string())
            .or_insert_with(|| TrustedAuthority { public_key: public_key.clone(), crl: None });
        if entry.public_key != public_key {
            *entry = TrustedAuthority { public_key, crl: None };
        }
    }

    pub fn authority(&self, authority_id: &str) -> Option<&TrustedAuthority> {
        self.authorities.get(authority_id)
    }

    pub fn authorities(&self) -> impl Iterator<Item = (&str, &TrustedAuthority)> {
        self.authorities.iter().map(|(k, v)| (k.as_str(), v))
    }

    /// Stores `crl` for its issuer if the signature verifies and the sequence
    /// moves forward.
    pub fn install_crl(&mut self, crl: RevocationList) -> Result<(), TrustError> {
        let id = crl.body.issuer_id.clone();
        let anchor = self.authorities.get_mut(&id).ok_or_else(|| TrustError::UnknownAuthority(id.clone()))?;
        if !crl.verify(&anchor.public_key) {
            return Err(TrustError::BadCrlSignature(id));
        }
        if let Some(current) = &anchor.crl {
            if crl.body.sequence <= current.body.sequence {
                return Err(TrustError::StaleSequence { offered: crl.body.sequence, current: current.body.sequence });
            }
        }
        anchor.crl = Some(crl);
        Ok(())
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("trust store serializes");
        s.push('\n');
        s
    }

    /// Parses a trust store and re-checks every stored CRL signature.
    pub fn from_json(text: &str) -> Result<Self, TrustError> {
        let store: Self = serde_json::from_str(text).map_err(|e| TrustError::File(e.to_string()))?;
        for (id, a) in &store.authorities {
            if let Some(crl) = &a.crl {
                if crl.body.issuer_id != *id || !crl.verify(&a.public_key) {
                    return Err(TrustError::BadCrlSignature(id.clone()));
                }
            }
        }
        Ok(store)
    }

    pub fn save(&self, path: &Path) -> Result<(), TrustError> {
        std::fs::write(path, self.to_json()).map_err(|e| TrustError::File(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, TrustError> {
        let text = std::fs::read_to_string(path).map_err(|e| TrustError::File(e.to_string()))?;
        Self::from_json(&text)
    }
}

/// What the operator presents at the biometric step.
#[derive(Debug, Clone, PartialEq)]
pub enum LiveProbe {
    Fingerprint(FingerprintTemplate),
    /// Manual inspection of an age-exempt holder succeeded.
    Exempt,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Step {
    BiometricUnlock,
    CertificateRead,
    SignatureCheck,
    ValidityWindow,
    RevocationCheck,
    ChallengeResponse,
}

impl Step {
    pub const ORDER: [Step; 6] = [
        Step::BiometricUnlock,
        Step::CertificateRead,
        Step::SignatureCheck,
        Step::ValidityWindow,
        Step::RevocationCheck,
        Step::ChallengeResponse,
    ];
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BiometricOutcome {
    Passed { score: f64 },
    Failed { cause: String },
    Exempt,
    NotExecuted,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReadOutcome {
    Ok { serial: u64, issuer_id: String },
    Error { cause: String },
    NotExecuted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignatureOutcome {
    Valid,
    BadSignature,
    NotExecuted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ValidityOutcome {
    Ok,
    Expired,
    NotYetValid,
    NotExecuted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RevocationOutcome {
    Clear,
    Revoked { reason: RevocationReason, revoked_at: u64 },
    CrlStale,
    NotExecuted,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChallengeOutcome {
    Passed,
    Failed { cause: String },
    NotExecuted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Accept,
    Reject { step: Step },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepState {
    Passed,
    Failed,
    NotExecuted,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub started_at: u64,
    /// Hex nonce of the challenge, once one was drawn.
    pub nonce: Option<String>,
    pub biometric_unlock: BiometricOutcome,
    pub certificate_read: ReadOutcome,
    pub signature_check: SignatureOutcome,
    pub validity_window: ValidityOutcome,
    pub revocation_check: RevocationOutcome,
    pub challenge_response: ChallengeOutcome,
    pub verdict: Verdict,
    pub notes: Vec<String>,
}

impl VerificationReport {
    fn new(started_at: u64) -> Self {
        Self {
            started_at,
            nonce: None,
            biometric_unlock: BiometricOutcome::NotExecuted,
            certificate_read: ReadOutcome::NotExecuted,
            signature_check: SignatureOutcome::NotExecuted,
            validity_window: ValidityOutcome::NotExecuted,
            revocation_check: RevocationOutcome::NotExecuted,
            challenge_response: ChallengeOutcome::NotExecuted,
            verdict: Verdict::Accept,
            notes: Vec::new(),
        }
    }

    pub fn state(&self, step: Step) -> StepState {
        use StepState::*;
        match step {
            Step::BiometricUnlock => match self.biometric_unlock {
                BiometricOutcome::Passed { .. } | BiometricOutcome::Exempt => Passed,
                BiometricOutcome::Failed { .. } => Failed,
                BiometricOutcome::NotExecuted => NotExecuted,
            },
            Step::CertificateRead => match self.certificate_read {
                ReadOutcome::Ok { .. } => Passed,
                ReadOutcome::Error { .. } => Failed,
                ReadOutcome::NotExecuted => NotExecuted,
            },
            Step::SignatureCheck => match self.signature_check {
                SignatureOutcome::Valid => Passed,
                SignatureOutcome::BadSignature => Failed,
                SignatureOutcome::NotExecuted => NotExecuted,
            },
            Step::ValidityWindow => match self.validity_window {
                ValidityOutcome::Ok => Passed,
                ValidityOutcome::Expired | ValidityOutcome::NotYetValid => Failed,
                ValidityOutcome::NotExecuted => NotExecuted,
            },
            Step::RevocationCheck => match self.revocation_check {
                RevocationOutcome::Clear => Passed,
                RevocationOutcome::Revoked { .. } | RevocationOutcome::CrlStale => Failed,
                RevocationOutcome::NotExecuted => NotExecuted,
            },
            Step::ChallengeResponse => match self.challenge_response {
                ChallengeOutcome::Passed => Passed,
                ChallengeOutcome::Failed { .. } => Failed,
                ChallengeOutcome::NotExecuted => NotExecuted,
            },
        }
    }

    pub fn states(&self) -> [StepState; 6] {
        Step::ORDER.map(|s| self.state(s))
    }

    pub fn is_accept(&self) -> bool {
        self.verdict == Verdict::Accept
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

fn card_cause(e: CardError) -> String {
    format!("{e:?}")
}

/// Sends a fresh nonce to the card and checks the answer under the
/// certificate's subject key, never under anything the card reports itself.
pub fn run_challenge<C, R>(card: &C, cert: &IdentityCertificate, rng: &mut R) -> ([u8; NONCE_LEN], ChallengeOutcome)
where
    C: CardInterface + ?Sized,
    R: RngCore + ?Sized,
{
    let mut nonce = [0u8; NONCE_LEN];
    rng.fill_bytes(&mut nonce);
    let outcome = match card.sign_challenge(&nonce) {
        Ok(sig) => {
            let mut msg = CHALLENGE_TAG.to_vec();
            msg.extend_from_slice(&nonce);
            if verify_signature(&cert.body.subject_public_key, &msg, &sig) {
                ChallengeOutcome::Passed
            } else {
                ChallengeOutcome::Failed { cause: "signature does not verify under certificate key".into() }
            }
        }
        Err(e) => ChallengeOutcome::Failed { cause: card_cause(e) },
    };
    (nonce, outcome)
}

pub fn verify_passport<C, R>(
    card: &mut C,
    probe: &LiveProbe,
    trust: &TrustStore,
    now: u64,
    rng: &mut R,
) -> VerificationReport
where
    C: CardInterface + ?Sized,
    R: RngCore + ?Sized,
{
    let mut report = VerificationReport::new(now);
    run_steps(card, probe, trust, now, rng, &mut report);
    card.end_session();
    report.verdict = Step::ORDER
        .iter()
        .find(|s| report.state(**s) == StepState::Failed)
        .map_or(Verdict::Accept, |&step| Verdict::Reject { step });
    report
}

fn run_steps<C, R>(
    card: &mut C,
    probe: &LiveProbe,
    trust: &TrustStore,
    now: u64,
    rng: &mut R,
    report: &mut VerificationReport,
) where
    C: CardInterface + ?Sized,
    R: RngCore + ?Sized,
{
    report.biometric_unlock = match probe {
        LiveProbe::Fingerprint(t) => match card.verify_holder(t) {
            Ok(HolderVerification::Unlocked { score }) => BiometricOutcome::Passed { score },
            Ok(HolderVerification::Rejected { attempts_left }) => {
                BiometricOutcome::Failed { cause: format!("no match, {attempts_left} attempts left") }
            }
            Ok(HolderVerification::LockedOut) => BiometricOutcome::Failed { cause: "card locked out".into() },
            Err(e) => BiometricOutcome::Failed { cause: card_cause(e) },
        },
        LiveProbe::Exempt => match card.unlock_exempt() {
            Ok(()) => BiometricOutcome::Exempt,
            Err(e) => BiometricOutcome::Failed { cause: card_cause(e) },
        },
    };
    if report.state(Step::BiometricUnlock) == StepState::Failed {
        return;
    }

    let (cert, image) = match card.read_certificate() {
        Ok(v) => v,
        Err(e) => {
            report.certificate_read = ReadOutcome::Error { cause: card_cause(e) };
            return;
        }
    };
    let read_error = if !cert.body.facial_image_digest.matches(&image) {
        Some("facial image does not match certificate digest")
    } else if (*probe == LiveProbe::Exempt) != cert.body.biometric_exempt {
        Some("exemption marker disagrees with certificate")
    } else {
        None
    };
    if let Some(cause) = read_error {
        report.certificate_read = ReadOutcome::Error { cause: cause.into() };
        return;
    }
    report.certificate_read = ReadOutcome::Ok { serial: cert.body.serial, issuer_id: cert.body.issuer_id.clone() };

    let Some(anchor) = trust.authority(&cert.body.issuer_id) else {
        report.signature_check = SignatureOutcome::BadSignature;
        report.notes.push(format!("issuer unknown: {}", cert.body.issuer_id));
        return;
    };
    match validate_certificate(&cert, &anchor.public_key, now) {
        CertificateStatus::BadSignature => {
            report.signature_check = SignatureOutcome::BadSignature;
            return;
        }
        status => {
            report.signature_check = SignatureOutcome::Valid;
            report.validity_window = match status {
                CertificateStatus::Expired => ValidityOutcome::Expired,
                CertificateStatus::NotYetValid => ValidityOutcome::NotYetValid,
                _ => ValidityOutcome::Ok,
            };
        }
    }
    if report.validity_window != ValidityOutcome::Ok {
        return;
    }

    report.revocation_check = match &anchor.crl {
        None => {
            report.notes.push("no CRL held for issuer".into());
            RevocationOutcome::CrlStale
        }
        Some(crl) if now < crl.body.issued_at || now - crl.body.issued_at >= trust.max_crl_age_seconds => {
            RevocationOutcome::CrlStale
        }
        Some(crl) => match crl.lookup(cert.body.serial) {
            Some(e) => RevocationOutcome::Revoked { reason: e.reason, revoked_at: e.revoked_at },
            None => RevocationOutcome::Clear,
        },
    };
    if report.revocation_check != RevocationOutcome::Clear {
        return;
    }

    let (nonce, outcome) = run_challenge(card, &cert, rng);
    report.nonce = Some(hex::encode(nonce));
    report.challenge_response = outcome;
}
