use std::fmt;

use chacha20poly1305::aead::{Aead, KeyInit};
use chacha20poly1305::{ChaCha20Poly1305, Key, Nonce};
use ed25519_dalek::{Signer, SigningKey, VerifyingKey};
use hkdf::Hkdf;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256, Sha512};
use x25519_dalek::{PublicKey as XPublic, StaticSecret};

use super::PkiError;
use crate::codec::hex_bytes;

pub const SEED_LEN: usize = 32;

/// Largest plaintext accepted by [`seal_to_public`].
pub const MAX_SEAL_PLAINTEXT: usize = 64 * 1024;

/// Secret half of a key pair. Holds the 32-byte entropy seed; all scheme keys
/// are re-derived from it on use. Never serialized, never printed.
#[derive(Clone, PartialEq, Eq)]
pub struct PrivateKey([u8; SEED_LEN]);

impl PrivateKey {
    /// Raw seed bytes. Only the card persistence layer reads these.
    pub(crate) fn expose_seed(&self) -> &[u8; SEED_LEN] {
        &self.0
    }
}

impl fmt::Debug for PrivateKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("PrivateKey(..)")
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PublicKey(#[serde(with = "hex_bytes")] pub Vec<u8>);

impl PublicKey {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }
}

impl fmt::Debug for PublicKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PublicKey({})", hex::encode(&self.0))
    }
}

#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Signature(#[serde(with = "hex_bytes")] pub Vec<u8>);

impl Signature {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }
}

impl fmt::Debug for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Signature({})", hex::encode(&self.0))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeyPair {
    pub private_part: PrivateKey,
    pub public_part: PublicKey,
}

/// Contract every asymmetric scheme plugged into the toolkit must satisfy.
///
/// Key generation is a pure function of a 32-byte seed. Verification and
/// opening are total: malformed input yields `false` / an error, never a panic.
pub trait SignatureScheme {
    const NAME: &'static str;

    fn keypair_from_seed(seed: &[u8]) -> Result<KeyPair, PkiError>;
    fn sign(private: &PrivateKey, message: &[u8]) -> Signature;
    fn verify(public: &PublicKey, message: &[u8], signature: &Signature) -> bool;
    /// `ephemeral` is the sender-side randomness for this one message.
    fn seal(
        public: &PublicKey,
        plaintext: &[u8],
        ephemeral: [u8; 32],
    ) -> Result<Vec<u8>, PkiError>;
    fn open(private: &PrivateKey, ciphertext: &[u8]) -> Result<Vec<u8>, PkiError>;
}

/// Ed25519 signatures plus X25519/HKDF-SHA256/ChaCha20-Poly1305 sealing.
///
/// Public key layout: 32-byte Ed25519 verifying key followed by the 32-byte
/// X25519 public key. Sealed layout: 32-byte ephemeral X25519 public key
/// followed by the AEAD ciphertext and tag.
#[derive(Debug, Clone, Copy, Default)]
pub struct Ed25519X25519;

const SIGN_LABEL: &[u8] = b"eid-ed25519-v1";
const DH_LABEL: &[u8] = b"eid-x25519-v1";
const SEAL_INFO: &[u8] = b"eid-seal-v1";
const ED_PUB: usize = 32;
const X_PUB: usize = 32;

fn sub_secret(label: &[u8], seed: &[u8; SEED_LEN]) -> [u8; 32] {
    let mut h = Sha512::new();
    h.update(label);
    h.update(seed);
    h.finalize()[..32].try_into().expect("32 bytes")
}

fn signing_key(private: &PrivateKey) -> SigningKey {
    SigningKey::from_bytes(&sub_secret(SIGN_LABEL, &private.0))
}

fn dh_secret(private: &PrivateKey) -> StaticSecret {
    StaticSecret::from(sub_secret(DH_LABEL, &private.0))
}

fn seal_key(shared: &[u8; 32], eph_pub: &[u8], recipient: &[u8]) -> Key {
    let mut salt = Vec::with_capacity(eph_pub.len() + recipient.len());
    salt.extend_from_slice(eph_pub);
    salt.extend_from_slice(recipient);
    let hk = Hkdf::<Sha256>::new(Some(&salt), shared);
    let mut okm = [0u8; 32];
    hk.expand(SEAL_INFO, &mut okm).expect("32 bytes is a valid HKDF length");
    Key::from(okm)
}

fn split_public(public: &PublicKey) -> Option<(&[u8], [u8; X_PUB])> {
    if public.0.len() != ED_PUB + X_PUB {
        return None;
    }
    let (ed, x) = public.0.split_at(ED_PUB);
    Some((ed, x.try_into().ok()?))
}

impl SignatureScheme for Ed25519X25519 {
    const NAME: &'static str = "ed25519+x25519-chacha20poly1305";

    fn keypair_from_seed(seed: &[u8]) -> Result<KeyPair, PkiError> {
        let seed: [u8; SEED_LEN] = seed.try_into().map_err(|_| PkiError::InvalidSeed(seed.len()))?;
        let private = PrivateKey(seed);
        let mut public = signing_key(&private).verifying_key().to_bytes().to_vec();
        public.extend_from_slice(XPublic::from(&dh_secret(&private)).as_bytes());
        Ok(KeyPair { private_part: private, public_part: PublicKey(public) })
    }

    fn sign(private: &PrivateKey, message: &[u8]) -> Signature {
        Signature(signing_key(private).sign(message).to_bytes().to_vec())
    }

    fn verify(public: &PublicKey, message: &[u8], signature: &Signature) -> bool {
        let Some((ed, _)) = split_public(public) else { return false };
        let Ok(ed) = <[u8; ED_PUB]>::try_from(ed) else { return false };
        let Ok(vk) = VerifyingKey::from_bytes(&ed) else { return false };
        let Ok(sig) = ed25519_dalek::Signature::from_slice(&signature.0) else { return false };
        vk.verify_strict(message, &sig).is_ok()
    }

    fn seal(
        public: &PublicKey,
        plaintext: &[u8],
        ephemeral: [u8; 32],
    ) -> Result<Vec<u8>, PkiError> {
        if plaintext.len() > MAX_SEAL_PLAINTEXT {
            return Err(PkiError::MessageTooLarge(plaintext.len()));
        }
        let (_, x) = split_public(public).ok_or(PkiError::MalformedKey)?;
        let recipient = XPublic::from(x);
        let eph = StaticSecret::from(ephemeral);
        let eph_pub = XPublic::from(&eph);
        let shared = eph.diffie_hellman(&recipient);
        if !shared.was_contributory() {
            return Err(PkiError::MalformedKey);
        }
        let key = seal_key(shared.as_bytes(), eph_pub.as_bytes(), &x);
        // fresh key per message, so a fixed nonce is never reused under one key
        let ct = ChaCha20Poly1305::new(&key)
            .encrypt(&Nonce::default(), plaintext)
            .map_err(|_| PkiError::MessageTooLarge(plaintext.len()))?;
        let mut out = eph_pub.as_bytes().to_vec();
        out.extend_from_slice(&ct);
        Ok(out)
    }

    fn open(private: &PrivateKey, ciphertext: &[u8]) -> Result<Vec<u8>, PkiError> {
        if ciphertext.len() < X_PUB {
            return Err(PkiError::DecryptionFailed);
        }
        let (eph_pub, ct) = ciphertext.split_at(X_PUB);
        let eph_pub: [u8; X_PUB] = eph_pub.try_into().expect("split at 32");
        let secret = dh_secret(private);
        let own_pub = XPublic::from(&secret);
        let shared = secret.diffie_hellman(&XPublic::from(eph_pub));
        if !shared.was_contributory() {
            return Err(PkiError::DecryptionFailed);
        }
        let key = seal_key(shared.as_bytes(), &eph_pub, own_pub.as_bytes());
        ChaCha20Poly1305::new(&key)
            .decrypt(&Nonce::default(), ct)
            .map_err(|_| PkiError::DecryptionFailed)
    }
}

/// The scheme used by the free functions below and by every other module.
pub type DefaultScheme = Ed25519X25519;

pub fn generate_keypair(seed: &[u8]) -> Result<KeyPair, PkiError> {
    DefaultScheme::keypair_from_seed(seed)
}

pub fn sign(private: &PrivateKey, message: &[u8]) -> Signature {
    DefaultScheme::sign(private, message)
}

pub fn verify_signature(public: &PublicKey, message: &[u8], signature: &Signature) -> bool {
    DefaultScheme::verify(public, message, signature)
}

/// Seals with fresh operating-system randomness.
pub fn seal_to_public(public: &PublicKey, plaintext: &[u8]) -> Result<Vec<u8>, PkiError> {
    seal_to_public_with(public, plaintext, &mut rand::rng())
}

pub fn seal_to_public_with<R: rand::CryptoRng + ?Sized>(
    public: &PublicKey,
    plaintext: &[u8],
    rng: &mut R,
) -> Result<Vec<u8>, PkiError> {
    let mut eph = [0u8; 32];
    rng.fill_bytes(&mut eph);
    DefaultScheme::seal(public, plaintext, eph)
}

pub fn open_with_private(private: &PrivateKey, ciphertext: &[u8]) -> Result<Vec<u8>, PkiError> {
    DefaultScheme::open(private, ciphertext)
}
