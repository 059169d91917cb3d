use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::scheme::{sign, verify_signature, KeyPair, PrivateKey, PublicKey, Signature};
use super::PkiError;
use crate::codec::{hex_array, DecodeError, Reader, Writer};

pub const CERT_MAGIC: &[u8; 4] = b"EIDC";
pub const REQUEST_MAGIC: &[u8; 4] = b"EIDQ";
pub const ENCODING_VERSION: u8 = 0x01;
pub const CERT_VERSION: u64 = 1;

/// Digest algorithm id for SHA-256.
pub const DIGEST_SHA256: u8 = 0x01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImageDigest {
    pub algorithm: u8,
    #[serde(with = "hex_array")]
    pub digest: [u8; 32],
}

impl ImageDigest {
    pub fn of(image: &[u8]) -> Self {
        Self { algorithm: DIGEST_SHA256, digest: Sha256::digest(image).into() }
    }

    pub fn matches(&self, image: &[u8]) -> bool {
        self.algorithm == DIGEST_SHA256 && *self == Self::of(image)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateBody {
    pub version: u64,
    pub serial: u64,
    pub issuer_id: String,
    pub subject_name: String,
    pub national_id: String,
    /// ISO-8601 calendar date, `YYYY-MM-DD`.
    pub birthdate: String,
    pub facial_image_digest: ImageDigest,
    pub subject_public_key: PublicKey,
    pub valid_from: u64,
    pub valid_to: u64,
    pub biometric_exempt: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentityCertificate {
    pub body: CertificateBody,
    pub signature: Signature,
}

/// Subject-supplied half of a certificate: everything the authority does not
/// decide itself.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RequestBody {
    pub subject_name: String,
    pub national_id: String,
    pub birthdate: String,
    pub facial_image_digest: ImageDigest,
    pub subject_public_key: PublicKey,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateRequest {
    pub body: RequestBody,
    /// Signature over [`canonical_encode_request`] by the subject's private key.
    pub proof_of_possession: Signature,
}

fn check_body(body: &CertificateBody) -> Result<(), PkiError> {
    if body.serial == 0 {
        return Err(PkiError::EncodingRejected("serial must be >= 1"));
    }
    if body.valid_from >= body.valid_to {
        return Err(PkiError::EncodingRejected("valid_from must precede valid_to"));
    }
    Ok(())
}

/// Bit-exact signing input for a certificate body.
///
/// `"EIDC"`, `0x01`, then each field in declaration order: integers as 8-byte
/// big-endian, strings and byte arrays with a 4-byte big-endian length prefix,
/// booleans as one byte. The facial digest is written as its length-prefixed
/// 32 digest bytes followed by the one-byte algorithm id.
pub fn canonical_encode_body(body: &CertificateBody) -> Result<Vec<u8>, PkiError> {
    check_body(body)?;
    let mut w = Writer::with_header(CERT_MAGIC, ENCODING_VERSION);
    w.u64(body.version)
        .u64(body.serial)
        .str(&body.issuer_id)
        .str(&body.subject_name)
        .str(&body.national_id)
        .str(&body.birthdate)
        .bytes(&body.facial_image_digest.digest)
        .u8(body.facial_image_digest.algorithm)
        .bytes(body.subject_public_key.as_bytes())
        .u64(body.valid_from)
        .u64(body.valid_to)
        .bool(body.biometric_exempt);
    Ok(w.finish())
}

pub fn decode_body(bytes: &[u8]) -> Result<CertificateBody, PkiError> {
    let mut r = Reader::header(bytes, CERT_MAGIC, ENCODING_VERSION)?;
    let version = r.u64()?;
    let serial = r.u64()?;
    let issuer_id = r.string()?;
    let subject_name = r.string()?;
    let national_id = r.string()?;
    let birthdate = r.string()?;
    let digest: [u8; 32] = r
        .bytes()?
        .try_into()
        .map_err(|_| DecodeError::InvalidValue("facial_image_digest"))?;
    let algorithm = r.u8()?;
    let subject_public_key = PublicKey(r.bytes()?.to_vec());
    let valid_from = r.u64()?;
    let valid_to = r.u64()?;
    let biometric_exempt = r.bool()?;
    r.finish()?;
    let body = CertificateBody {
        version,
        serial,
        issuer_id,
        subject_name,
        national_id,
        birthdate,
        facial_image_digest: ImageDigest { algorithm, digest },
        subject_public_key,
        valid_from,
        valid_to,
        biometric_exempt,
    };
    check_body(&body)?;
    Ok(body)
}

/// Same layout rules as the certificate body, under magic `"EIDQ"`.
pub fn canonical_encode_request(body: &RequestBody) -> Vec<u8> {
    let mut w = Writer::with_header(REQUEST_MAGIC, ENCODING_VERSION);
    w.str(&body.subject_name)
        .str(&body.national_id)
        .str(&body.birthdate)
        .bytes(&body.facial_image_digest.digest)
        .u8(body.facial_image_digest.algorithm)
        .bytes(body.subject_public_key.as_bytes());
    w.finish()
}

impl CertificateRequest {
    pub fn create(body: RequestBody, private: &PrivateKey) -> Self {
        let proof_of_possession = sign(private, &canonical_encode_request(&body));
        Self { body, proof_of_possession }
    }

    pub fn verify_possession(&self) -> bool {
        verify_signature(
            &self.body.subject_public_key,
            &canonical_encode_request(&self.body),
            &self.proof_of_possession,
        )
    }
}

impl IdentityCertificate {
    /// Signs `body` with the issuer's key.
    pub fn sign(body: CertificateBody, issuer: &KeyPair) -> Result<Self, PkiError> {
        let bytes = canonical_encode_body(&body)?;
        let signature = sign(&issuer.private_part, &bytes);
        Ok(Self { body, signature })
    }

    pub fn verify(&self, issuer_public: &PublicKey) -> bool {
        match canonical_encode_body(&self.body) {
            Ok(bytes) => verify_signature(issuer_public, &bytes, &self.signature),
            Err(_) => false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CertificateStatus {
    Valid,
    BadSignature,
    Expired,
    NotYetValid,
}

/// Signature first, so a tampered certificate is reported as such whatever the
/// clock says; then the validity window, inclusive at both ends.
pub fn validate_certificate(
    cert: &IdentityCertificate,
    issuer_public: &PublicKey,
    now: u64,
) -> CertificateStatus {
    if !cert.verify(issuer_public) {
        CertificateStatus::BadSignature
    } else if now < cert.body.valid_from {
        CertificateStatus::NotYetValid
    } else if now > cert.body.valid_to {
        CertificateStatus::Expired
    } else {
        CertificateStatus::Valid
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pki::generate_keypair;

    fn body() -> CertificateBody {
        CertificateBody {
            version: CERT_VERSION,
            serial: 7,
            issuer_id: "RO".into(),
            subject_name: "Ana Pop".into(),
            national_id: "1900101123456".into(),
            birthdate: "1990-01-01".into(),
            facial_image_digest: ImageDigest::of(b"face"),
            subject_public_key: generate_keypair(&[3; 32]).unwrap().public_part,
            valid_from: 1_000,
            valid_to: 2_000,
            biometric_exempt: false,
        }
    }

    #[test]
    fn encoding_is_deterministic_and_serial_sensitive() {
        let b = body();
        assert_eq!(canonical_encode_body(&b).unwrap(), canonical_encode_body(&b).unwrap());
        let mut b2 = b.clone();
        b2.serial = 8;
        assert_ne!(canonical_encode_body(&b).unwrap(), canonical_encode_body(&b2).unwrap());
    }

    #[test]
    fn encoding_gates_invariants() {
        let mut b = body();
        b.valid_to = b.valid_from;
        assert!(matches!(canonical_encode_body(&b), Err(PkiError::EncodingRejected(_))));
        let mut b = body();
        b.serial = 0;
        assert!(matches!(canonical_encode_body(&b), Err(PkiError::EncodingRejected(_))));
    }

    #[test]
    fn decode_round_trip_and_rejects_garbage() {
        let b = body();
        let bytes = canonical_encode_body(&b).unwrap();
        assert_eq!(decode_body(&bytes).unwrap(), b);
        assert!(decode_body(&bytes[..bytes.len() - 1]).is_err());
        let mut bad = bytes.clone();
        *bad.last_mut().unwrap() = 2;
        assert!(decode_body(&bad).is_err());
    }

    #[test]
    fn validation_order_and_window() {
        let ca = generate_keypair(&[9; 32]).unwrap();
        let cert = IdentityCertificate::sign(body(), &ca).unwrap();
        assert_eq!(validate_certificate(&cert, &ca.public_part, 1_500), CertificateStatus::Valid);
        assert_eq!(validate_certificate(&cert, &ca.public_part, 1_000), CertificateStatus::Valid);
        assert_eq!(validate_certificate(&cert, &ca.public_part, 2_000), CertificateStatus::Valid);
        assert_eq!(validate_certificate(&cert, &ca.public_part, 2_001), CertificateStatus::Expired);
        assert_eq!(validate_certificate(&cert, &ca.public_part, 999), CertificateStatus::NotYetValid);

        let mut tampered = cert.clone();
        tampered.body.subject_name.push('x');
        for now in [0, 1_500, 5_000] {
            assert_eq!(
                validate_certificate(&tampered, &ca.public_part, now),
                CertificateStatus::BadSignature
            );
        }
        let other = generate_keypair(&[10; 32]).unwrap();
        assert_eq!(
            validate_certificate(&cert, &other.public_part, 1_500),
            CertificateStatus::BadSignature
        );
    }

    #[test]
    fn request_proof_of_possession() {
        let kp = generate_keypair(&[4; 32]).unwrap();
        let rb = RequestBody {
            subject_name: "Ana".into(),
            national_id: "1".into(),
            birthdate: "1990-01-01".into(),
            facial_image_digest: ImageDigest::of(b"face"),
            subject_public_key: kp.public_part.clone(),
        };
        let req = CertificateRequest::create(rb, &kp.private_part);
        assert!(req.verify_possession());
        let mut forged = req.clone();
        forged.body.subject_public_key = generate_keypair(&[5; 32]).unwrap().public_part;
        assert!(!forged.verify_possession());
    }

    #[test]
    fn json_form_hex_encodes_bytes() {
        let ca = generate_keypair(&[9; 32]).unwrap();
        let cert = IdentityCertificate::sign(body(), &ca).unwrap();
        let v: serde_json::Value = serde_json::to_value(&cert).unwrap();
        assert_eq!(v["body"]["serial"], 7);
        assert_eq!(
            v["body"]["facial_image_digest"]["digest"],
            hex::encode(ImageDigest::of(b"face").digest)
        );
        assert!(v["signature"].as_str().unwrap().len() == 128);
        let back: IdentityCertificate = serde_json::from_value(v).unwrap();
        assert_eq!(back, cert);
    }
}
