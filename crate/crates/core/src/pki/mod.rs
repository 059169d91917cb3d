//! Asymmetric primitives, canonical certificate and revocation-list
//! encodings, and certificate validation.

mod cert;
mod crl;
mod scheme;

use thiserror::Error;

use crate::codec::DecodeError;

pub use cert::{
    canonical_encode_body, canonical_encode_request, decode_body, validate_certificate,
    CertificateBody, CertificateRequest, CertificateStatus, IdentityCertificate, ImageDigest,
    RequestBody, CERT_MAGIC, CERT_VERSION, DIGEST_SHA256, ENCODING_VERSION, REQUEST_MAGIC,
};
pub use crl::{
    canonical_encode_crl, decode_crl, CrlBody, RevocationEntry, RevocationList, RevocationReason,
    CRL_ENCODING_VERSION, CRL_MAGIC,
};
pub use scheme::{
    generate_keypair, open_with_private, seal_to_public, seal_to_public_with, sign,
    verify_signature, DefaultScheme, Ed25519X25519, KeyPair, PrivateKey, PublicKey, Signature,
    SignatureScheme, MAX_SEAL_PLAINTEXT, SEED_LEN,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PkiError {
    #[error("key seed must be {SEED_LEN} bytes, got {0}")]
    InvalidSeed(usize),
    #[error("plaintext of {0} bytes exceeds the {MAX_SEAL_PLAINTEXT}-byte limit")]
    MessageTooLarge(usize),
    #[error("decryption failed")]
    DecryptionFailed,
    #[error("malformed public key")]
    MalformedKey,
    #[error("encoding rejected: {0}")]
    EncodingRejected(&'static str),
    #[error("malformed encoding: {0}")]
    Malformed(#[from] DecodeError),
}
