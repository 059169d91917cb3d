use serde::{Deserialize, Serialize};

use super::scheme::{sign, verify_signature, KeyPair, PublicKey, Signature};
use super::PkiError;
use crate::codec::{DecodeError, Reader, Writer};

pub const CRL_MAGIC: &[u8; 4] = b"EIDR";
pub const CRL_ENCODING_VERSION: u8 = 0x01;

/// Why an authority withdrew a certificate. Wire codes are fixed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RevocationReason {
    /// The holder no longer needs the document.
    NoLongerRequired,
    /// The identity behind the certificate no longer exists.
    SubjectRemoved,
    /// Identity data was misrepresented during vetting.
    TrustBreach,
    /// The document was sold or used by someone else.
    IllicitUse,
    /// The private key is compromised, e.g. the passport was stolen.
    KeyCompromise,
}

impl RevocationReason {
    pub const ALL: [RevocationReason; 5] = [
        Self::NoLongerRequired,
        Self::SubjectRemoved,
        Self::TrustBreach,
        Self::IllicitUse,
        Self::KeyCompromise,
    ];

    pub fn code(self) -> u8 {
        match self {
            Self::NoLongerRequired => 0x01,
            Self::SubjectRemoved => 0x02,
            Self::TrustBreach => 0x03,
            Self::IllicitUse => 0x04,
            Self::KeyCompromise => 0x05,
        }
    }

    pub fn from_code(code: u8) -> Option<Self> {
        Self::ALL.into_iter().find(|r| r.code() == code)
    }
}

impl std::str::FromStr for RevocationReason {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm: String = s.chars().filter(|c| c.is_ascii_alphanumeric()).collect();
        Self::ALL
            .into_iter()
            .find(|r| format!("{r:?}").eq_ignore_ascii_case(&norm))
            .ok_or_else(|| format!("unknown revocation reason {s:?}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RevocationEntry {
    pub serial: u64,
    pub reason: RevocationReason,
    pub revoked_at: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrlBody {
    pub issuer_id: String,
    pub sequence: u64,
    pub issued_at: u64,
    /// Strictly ascending by serial.
    pub entries: Vec<RevocationEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RevocationList {
    pub body: CrlBody,
    pub signature: Signature,
}

/// `"EIDR"`, `0x01`, issuer id, sequence, issued_at, 4-byte entry count, then
/// each entry as 8-byte serial, 1-byte reason code, 8-byte revocation time.
pub fn canonical_encode_crl(body: &CrlBody) -> Result<Vec<u8>, PkiError> {
    if body.entries.windows(2).any(|w| w[0].serial >= w[1].serial) {
        return Err(PkiError::EncodingRejected("entries must be strictly ascending by serial"));
    }
    let count = u32::try_from(body.entries.len())
        .map_err(|_| PkiError::EncodingRejected("too many entries"))?;
    let mut w = Writer::with_header(CRL_MAGIC, CRL_ENCODING_VERSION);
    w.str(&body.issuer_id).u64(body.sequence).u64(body.issued_at).u32(count);
    for e in &body.entries {
        w.u64(e.serial).u8(e.reason.code()).u64(e.revoked_at);
    }
    Ok(w.finish())
}

pub fn decode_crl(bytes: &[u8]) -> Result<CrlBody, PkiError> {
    let mut r = Reader::header(bytes, CRL_MAGIC, CRL_ENCODING_VERSION)?;
    let issuer_id = r.string()?;
    let sequence = r.u64()?;
    let issued_at = r.u64()?;
    let count = r.u32()?;
    let mut entries = Vec::new();
    for _ in 0..count {
        let serial = r.u64()?;
        let reason = RevocationReason::from_code(r.u8()?)
            .ok_or(DecodeError::InvalidValue("revocation reason"))?;
        let revoked_at = r.u64()?;
        entries.push(RevocationEntry { serial, reason, revoked_at });
    }
    r.finish()?;
    let body = CrlBody { issuer_id, sequence, issued_at, entries };
    // re-run the ordering gate
    canonical_encode_crl(&body)?;
    Ok(body)
}

impl RevocationList {
    pub fn sign(body: CrlBody, issuer: &KeyPair) -> Result<Self, PkiError> {
        let bytes = canonical_encode_crl(&body)?;
        let signature = sign(&issuer.private_part, &bytes);
        Ok(Self { body, signature })
    }

    pub fn verify(&self, issuer_public: &PublicKey) -> bool {
        match canonical_encode_crl(&self.body) {
            Ok(bytes) => verify_signature(issuer_public, &bytes, &self.signature),
            Err(_) => false,
        }
    }

    pub fn lookup(&self, serial: u64) -> Option<&RevocationEntry> {
        self.body
            .entries
            .binary_search_by_key(&serial, |e| e.serial)
            .ok()
            .map(|i| &self.body.entries[i])
    }
}
