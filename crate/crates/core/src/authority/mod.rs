//! The national issuing agency.
//!
//! State changes are recorded as an append-only list of [`LedgerEvent`]s;
//! the registry is a projection of that list and can be rebuilt from it.

mod ledger;

use std::collections::BTreeMap;

use chrono::{DateTime, Months, NaiveDate};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pki::{
    CertificateBody, CertificateRequest, CrlBody, IdentityCertificate, ImageDigest, KeyPair, PublicKey,
    RevocationEntry, RevocationList, RevocationReason, CERT_VERSION,
};

pub use ledger::LedgerEvent;

#[derive(Debug, Error)]
pub enum AuthorityError {
    #[error("request rejected: {0}")]
    RequestRejected(String),
    #[error("serial {0} is unknown or already revoked")]
    UnknownOrAlreadyRevoked(u64),
    #[error("ledger corrupt at line {0}")]
    LedgerCorrupt(usize),
    #[error("invalid policy: {0}")]
    InvalidPolicy(&'static str),
    #[error("ledger i/o: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct AuthorityPolicy {
    pub validity_years: u32,
    pub min_fingerprint_age_years: u32,
    pub max_reliable_age_years: u32,
    pub required_breeder_documents: u32,
}

impl Default for AuthorityPolicy {
    fn default() -> Self {
        Self { validity_years: 5, min_fingerprint_age_years: 12, max_reliable_age_years: 80, required_breeder_documents: 2 }
    }
}

impl AuthorityPolicy {
    pub fn validate(&self) -> Result<(), AuthorityError> {
        if self.min_fingerprint_age_years >= self.max_reliable_age_years {
            return Err(AuthorityError::InvalidPolicy("min_fingerprint_age_years must be below max_reliable_age_years"));
        }
        if self.validity_years == 0 {
            return Err(AuthorityError::InvalidPolicy("validity_years must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BreederDocumentKind {
    BirthCertificate,
    CitizenshipCertificate,
    FamilyBook,
    ParentalAuthorization,
    DrivingLicense,
    UtilityBill,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BreederDocument {
    pub kind: BreederDocumentKind,
    pub verified: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VettingDossier {
    pub subject_name: String,
    pub national_id: String,
    pub birthdate: String,
    pub documents: Vec<BreederDocument>,
    #[serde(with = "crate::codec::hex_bytes")]
    pub facial_image: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum VettingDecision {
    Approved,
    /// Approved without fingerprints because of the subject's age.
    ApprovedExempt,
    Rejected(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RecordStatus {
    Active,
    Revoked { reason: RevocationReason, at: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegistryRecord {
    pub serial: u64,
    pub certificate: IdentityCertificate,
    pub issued_at: u64,
    pub status: RecordStatus,
}

/// Whole years between `birthdate` and the calendar date of `now`, rounded
/// down. `None` for an unparseable date or one after `now`.
pub fn age_in_years(birthdate: &str, now: u64) -> Option<u32> {
    let born = NaiveDate::parse_from_str(birthdate, "%Y-%m-%d").ok()?;
    let today = DateTime::from_timestamp(i64::try_from(now).ok()?, 0)?.date_naive();
    today.years_since(born)
}

/// The document count is checked before anything else. The count rule is a
/// placeholder for real document forensics.
pub fn vet_identity(dossier: &VettingDossier, policy: &AuthorityPolicy, now: u64) -> VettingDecision {
    let verified = dossier.documents.iter().filter(|d| d.verified).count();
    if verified < policy.required_breeder_documents as usize {
        return VettingDecision::Rejected(format!(
            "{verified} verified breeder documents, {} required",
            policy.required_breeder_documents
        ));
    }
    if dossier.national_id.is_empty() {
        return VettingDecision::Rejected("empty national id".into());
    }
    let Some(age) = age_in_years(&dossier.birthdate, now) else {
        return VettingDecision::Rejected("invalid birthdate".into());
    };
    if age < policy.min_fingerprint_age_years || age > policy.max_reliable_age_years {
        VettingDecision::ApprovedExempt
    } else {
        VettingDecision::Approved
    }
}

fn add_years(now: u64, years: u32) -> Option<u64> {
    let start = DateTime::from_timestamp(i64::try_from(now).ok()?, 0)?;
    let end = start.checked_add_months(Months::new(years.checked_mul(12)?))?;
    u64::try_from(end.timestamp()).ok()
}

#[derive(Debug, Clone)]
pub struct IssuingAuthority {
    authority_id: String,
    ca_keys: KeyPair,
    registry: BTreeMap<u64, RegistryRecord>,
    next_serial: u64,
    crl_sequence: u64,
    policy: AuthorityPolicy,
    events: Vec<LedgerEvent>,
}

impl IssuingAuthority {
    pub fn new(authority_id: &str, ca_keys: KeyPair, policy: AuthorityPolicy) -> Result<Self, AuthorityError> {
        policy.validate()?;
        if authority_id.is_empty() {
            return Err(AuthorityError::InvalidPolicy("authority id must be nonempty"));
        }
        Ok(Self {
            authority_id: authority_id.to_string(),
            ca_keys,
            registry: BTreeMap::new(),
            next_serial: 1,
            crl_sequence: 0,
            policy,
            events: Vec::new(),
        })
    }

    pub fn authority_id(&self) -> &str {
        &self.authority_id
    }

    pub fn public_key(&self) -> &PublicKey {
        &self.ca_keys.public_part
    }

    pub fn policy(&self) -> &AuthorityPolicy {
        &self.policy
    }

    pub fn registry(&self) -> &BTreeMap<u64, RegistryRecord> {
        &self.registry
    }

    pub fn record(&self, serial: u64) -> Option<&RegistryRecord> {
        self.registry.get(&serial)
    }

    pub fn next_serial(&self) -> u64 {
        self.next_serial
    }

    pub fn crl_sequence(&self) -> u64 {
        self.crl_sequence
    }

    pub fn events(&self) -> &[LedgerEvent] {
        &self.events
    }

    /// The ledger does not record CRL publications; a reloaded authority
    /// continues from the last sequence the caller saw.
    pub fn resume_crl_sequence(&mut self, last_published: u64) {
        self.crl_sequence = self.crl_sequence.max(last_published);
    }

    pub fn vet(&self, dossier: &VettingDossier, now: u64) -> VettingDecision {
        vet_identity(dossier, &self.policy, now)
    }

    pub fn issue_certificate(
        &mut self,
        request: &CertificateRequest,
        decision: &VettingDecision,
        facial_image: &[u8],
        now: u64,
    ) -> Result<IdentityCertificate, AuthorityError> {
        let rejected = |m: &str| AuthorityError::RequestRejected(m.to_string());
        let exempt = match decision {
            VettingDecision::Approved => false,
            VettingDecision::ApprovedExempt => true,
            VettingDecision::Rejected(why) => return Err(rejected(&format!("vetting: {why}"))),
        };
        if !request.verify_possession() {
            return Err(rejected("proof of possession does not verify"));
        }
        if request.body.facial_image_digest != ImageDigest::of(facial_image) {
            return Err(rejected("facial image does not match the request digest"));
        }
        let valid_to =
            add_years(now, self.policy.validity_years).ok_or_else(|| rejected("validity period out of range"))?;
        let r = &request.body;
        let body = CertificateBody {
            version: CERT_VERSION,
            serial: self.next_serial,
            issuer_id: self.authority_id.clone(),
            subject_name: r.subject_name.clone(),
            national_id: r.national_id.clone(),
            birthdate: r.birthdate.clone(),
            facial_image_digest: ImageDigest::of(facial_image),
            subject_public_key: r.subject_public_key.clone(),
            valid_from: now,
            valid_to,
            biometric_exempt: exempt,
        };
        let certificate = IdentityCertificate::sign(body, &self.ca_keys).map_err(|e| rejected(&e.to_string()))?;
        self.apply(LedgerEvent::Issue { serial: self.next_serial, issued_at: now, certificate: certificate.clone() });
        Ok(certificate)
    }

    pub fn revoke_certificate(
        &mut self,
        serial: u64,
        reason: RevocationReason,
        now: u64,
    ) -> Result<(), AuthorityError> {
        match self.registry.get(&serial) {
            Some(RegistryRecord { status: RecordStatus::Active, .. }) => {
                self.apply(LedgerEvent::Revoke { serial, reason, at: now });
                Ok(())
            }
            _ => Err(AuthorityError::UnknownOrAlreadyRevoked(serial)),
        }
    }

    /// The list a publication with `sequence` would carry, without
    /// advancing the counter.
    pub fn build_crl(&self, sequence: u64, now: u64) -> RevocationList {
        let entries = self
            .registry
            .values()
            .filter_map(|r| match r.status {
                RecordStatus::Revoked { reason, at } => {
                    Some(RevocationEntry { serial: r.serial, reason, revoked_at: at })
                }
                RecordStatus::Active => None,
            })
            .collect();
        let body = CrlBody { issuer_id: self.authority_id.clone(), sequence, issued_at: now, entries };
        RevocationList::sign(body, &self.ca_keys).expect("registry iterates in serial order")
    }

    pub fn publish_crl(&mut self, now: u64) -> RevocationList {
        self.crl_sequence += 1;
        self.build_crl(self.crl_sequence, now)
    }

    /// Mutates the registry; callers have already validated the event.
    fn apply(&mut self, event: LedgerEvent) {
        match &event {
            LedgerEvent::Issue { serial, issued_at, certificate } => {
                self.registry.insert(
                    *serial,
                    RegistryRecord {
                        serial: *serial,
                        certificate: certificate.clone(),
                        issued_at: *issued_at,
                        status: RecordStatus::Active,
                    },
                );
                self.next_serial = serial + 1;
            }
            LedgerEvent::Revoke { serial, reason, at } => {
                if let Some(r) = self.registry.get_mut(serial) {
                    r.status = RecordStatus::Revoked { reason: *reason, at: *at };
                }
            }
        }
        self.events.push(event);
    }
}
