//! Match-on-card smart card emulator.
//!
//! A card is created blank. One atomic command generates its key pair and
//! enrolls the holder's template; after that neither the private key nor the
//! template has any read path. Every command that uses the private key, and
//! reading the stored certificate, requires a session unlocked by a
//! successful on-card match. Five consecutive failed matches lock the card
//! permanently.

mod persist;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::biometrics::{enroll_quality, match_templates, EnrollOutcome, FingerprintTemplate, MatchConfig};
use crate::pki::{
    generate_keypair, open_with_private, sign, CertificateRequest, IdentityCertificate, ImageDigest, KeyPair,
    PublicKey, RequestBody, Signature,
};

pub use persist::{CardFileError, CARD_FILE_MAGIC, CARD_FILE_VERSION};

/// Domain tag prepended to every challenge before signing.
pub const CHALLENGE_TAG: &[u8] = b"EIDCHAL";
pub const MIN_CHALLENGE_LEN: usize = 16;
pub const DEFAULT_MAX_ATTEMPTS: u32 = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum CardLifecycle {
    Blank,
    /// Keys generated and holder enrolled.
    Active,
    /// Certificate stored.
    Personalized,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Error, Serialize, Deserialize)]
pub enum CardError {
    #[error("card already initialized")]
    AlreadyInitialized,
    #[error("card not initialized")]
    NotInitialized,
    #[error("no certificate stored")]
    NoCertificate,
    #[error("certificate does not name this card's public key")]
    CertKeyMismatch,
    #[error("session locked; holder verification required")]
    SessionLocked,
    #[error("card locked out after too many failed verifications")]
    CardLockedOut,
    #[error("template rejected at enrollment")]
    EnrollRejected,
    #[error("command refused in current state")]
    CommandRefused,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum HolderVerification {
    Unlocked { score: f64 },
    Rejected { attempts_left: u32 },
    LockedOut,
}

/// Identity fields the card places in a certificate request.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubjectIdentity {
    pub subject_name: String,
    pub national_id: String,
    pub birthdate: String,
}

/// The card as a border terminal sees it. Implemented by [`Card`]; test
/// harnesses implement it for deliberately misbehaving cards.
pub trait CardInterface {
    fn verify_holder(&mut self, probe: &FingerprintTemplate) -> Result<HolderVerification, CardError>;
    fn unlock_exempt(&mut self) -> Result<(), CardError>;
    fn read_certificate(&self) -> Result<(IdentityCertificate, Vec<u8>), CardError>;
    fn sign_challenge(&self, challenge: &[u8]) -> Result<Signature, CardError>;
    fn end_session(&mut self);
}

#[derive(Debug, Clone, PartialEq)]
pub struct Card {
    lifecycle: CardLifecycle,
    keys: Option<KeyPair>,
    template: Option<FingerprintTemplate>,
    biometric_exempt: bool,
    facial_image: Vec<u8>,
    certificate: Option<IdentityCertificate>,
    session_unlocked: bool,
    failed_attempts: u32,
    max_attempts: u32,
    match_config: MatchConfig,
}

impl Default for Card {
    fn default() -> Self {
        Self::new(MatchConfig::default(), DEFAULT_MAX_ATTEMPTS)
    }
}

impl Card {
    pub fn new(match_config: MatchConfig, max_attempts: u32) -> Self {
        Self {
            lifecycle: CardLifecycle::Blank,
            keys: None,
            template: None,
            biometric_exempt: false,
            facial_image: Vec::new(),
            certificate: None,
            session_unlocked: false,
            failed_attempts: 0,
            max_attempts: max_attempts.max(1),
            match_config,
        }
    }

    pub fn lifecycle(&self) -> CardLifecycle {
        self.lifecycle
    }

    pub fn is_unlocked(&self) -> bool {
        self.session_unlocked
    }

    pub fn is_locked_out(&self) -> bool {
        self.failed_attempts >= self.max_attempts
    }

    pub fn failed_attempts(&self) -> u32 {
        self.failed_attempts
    }

    pub fn max_attempts(&self) -> u32 {
        self.max_attempts
    }

    pub fn is_biometric_exempt(&self) -> bool {
        self.biometric_exempt
    }

    pub fn match_config(&self) -> &MatchConfig {
        &self.match_config
    }

    /// Initialized and not locked out.
    fn usable(&self) -> Result<&KeyPair, CardError> {
        let keys = self.keys.as_ref().ok_or(CardError::NotInitialized)?;
        if self.is_locked_out() {
            return Err(CardError::CardLockedOut);
        }
        Ok(keys)
    }

    fn unlocked(&self) -> Result<&KeyPair, CardError> {
        let keys = self.usable()?;
        if !self.session_unlocked {
            return Err(CardError::SessionLocked);
        }
        Ok(keys)
    }

    /// Generates the key pair from `entropy` and enrolls `template` in one
    /// step. Only a blank card accepts it. Returns the public key only.
    pub fn initialize(
        &mut self,
        template: &FingerprintTemplate,
        facial_image: &[u8],
        entropy: &[u8; 32],
    ) -> Result<PublicKey, CardError> {
        if self.lifecycle != CardLifecycle::Blank {
            return Err(CardError::AlreadyInitialized);
        }
        if template.validate().is_err() {
            return Err(CardError::EnrollRejected);
        }
        if enroll_quality(template, &self.match_config) == EnrollOutcome::FailureToEnroll {
            return Err(CardError::EnrollRejected);
        }
        self.template = Some(template.clone());
        self.activate(facial_image, entropy)
    }

    /// Initialization for holders exempt from fingerprinting. No template is
    /// stored; the session is opened by [`Card::unlock_exempt`] after the
    /// operator's manual inspection.
    pub fn initialize_exempt(&mut self, facial_image: &[u8], entropy: &[u8; 32]) -> Result<PublicKey, CardError> {
        if self.lifecycle != CardLifecycle::Blank {
            return Err(CardError::AlreadyInitialized);
        }
        self.biometric_exempt = true;
        self.activate(facial_image, entropy)
    }

    fn activate(&mut self, facial_image: &[u8], entropy: &[u8; 32]) -> Result<PublicKey, CardError> {
        let keys = generate_keypair(entropy).expect("32-byte seed");
        let public = keys.public_part.clone();
        self.keys = Some(keys);
        self.facial_image = facial_image.to_vec();
        self.lifecycle = CardLifecycle::Active;
        Ok(public)
    }

    /// Works without a session and after lockout: the public key is public.
    pub fn public_key(&self) -> Result<PublicKey, CardError> {
        self.keys.as_ref().map(|k| k.public_part.clone()).ok_or(CardError::NotInitialized)
    }

    pub fn create_request(&self, subject: &SubjectIdentity) -> Result<CertificateRequest, CardError> {
        let keys = self.unlocked()?;
        if self.lifecycle != CardLifecycle::Active {
            return Err(CardError::CommandRefused);
        }
        let body = RequestBody {
            subject_name: subject.subject_name.clone(),
            national_id: subject.national_id.clone(),
            birthdate: subject.birthdate.clone(),
            facial_image_digest: ImageDigest::of(&self.facial_image),
            subject_public_key: keys.public_part.clone(),
        };
        Ok(CertificateRequest::create(body, &keys.private_part))
    }

    /// Binds an issued certificate to this card. The certificate must name
    /// this card's key, so it cannot be moved to another card.
    pub fn store_certificate(&mut self, cert: &IdentityCertificate) -> Result<(), CardError> {
        let keys = self.usable()?;
        if self.lifecycle != CardLifecycle::Active {
            return Err(CardError::CommandRefused);
        }
        if cert.body.subject_public_key != keys.public_part {
            return Err(CardError::CertKeyMismatch);
        }
        if cert.body.biometric_exempt != self.biometric_exempt {
            return Err(CardError::CommandRefused);
        }
        self.certificate = Some(cert.clone());
        self.lifecycle = CardLifecycle::Personalized;
        Ok(())
    }

    /// Runs the on-card match. Only the score leaves the card.
    pub fn verify_holder(&mut self, probe: &FingerprintTemplate) -> Result<HolderVerification, CardError> {
        self.usable()?;
        let reference = self.template.as_ref().ok_or(CardError::CommandRefused)?;
        if probe.validate().is_err() {
            return Err(CardError::CommandRefused);
        }
        let result = match_templates(reference, probe, &self.match_config);
        if result.decision {
            self.failed_attempts = 0;
            self.session_unlocked = true;
            return Ok(HolderVerification::Unlocked { score: result.score });
        }
        self.session_unlocked = false;
        self.failed_attempts += 1;
        if self.is_locked_out() {
            Ok(HolderVerification::LockedOut)
        } else {
            Ok(HolderVerification::Rejected { attempts_left: self.max_attempts - self.failed_attempts })
        }
    }

    pub fn unlock_exempt(&mut self) -> Result<(), CardError> {
        self.usable()?;
        if !self.biometric_exempt {
            return Err(CardError::CommandRefused);
        }
        self.session_unlocked = true;
        Ok(())
    }

    pub fn read_certificate(&self) -> Result<(IdentityCertificate, Vec<u8>), CardError> {
        self.unlocked()?;
        let cert = self.certificate.clone().ok_or(CardError::NoCertificate)?;
        Ok((cert, self.facial_image.clone()))
    }

    /// Signs `CHALLENGE_TAG ‖ challenge`.
    pub fn sign_challenge(&self, challenge: &[u8]) -> Result<Signature, CardError> {
        let keys = self.unlocked()?;
        if challenge.len() < MIN_CHALLENGE_LEN {
            return Err(CardError::CommandRefused);
        }
        let mut msg = Vec::with_capacity(CHALLENGE_TAG.len() + challenge.len());
        msg.extend_from_slice(CHALLENGE_TAG);
        msg.extend_from_slice(challenge);
        Ok(sign(&keys.private_part, &msg))
    }

    /// Opens data sealed to this card's public key.
    pub fn decrypt(&self, ciphertext: &[u8]) -> Result<Vec<u8>, CardError> {
        let keys = self.unlocked()?;
        open_with_private(&keys.private_part, ciphertext).map_err(|_| CardError::CommandRefused)
    }

    pub fn end_session(&mut self) {
        self.session_unlocked = false;
    }

    pub fn execute(&mut self, command: &CardCommand) -> Result<CardResponse, CardError> {
        match command {
            CardCommand::Initialize { template, facial_image, entropy } => {
                self.initialize(template, facial_image, entropy).map(CardResponse::PublicKey)
            }
            CardCommand::InitializeExempt { facial_image, entropy } => {
                self.initialize_exempt(facial_image, entropy).map(CardResponse::PublicKey)
            }
            CardCommand::PublicKey => self.public_key().map(CardResponse::PublicKey),
            CardCommand::CreateRequest(subject) => self.create_request(subject).map(CardResponse::Request),
            CardCommand::StoreCertificate(cert) => self.store_certificate(cert).map(|_| CardResponse::Stored),
            CardCommand::VerifyHolder(probe) => self.verify_holder(probe).map(CardResponse::Verification),
            CardCommand::UnlockExempt => self.unlock_exempt().map(|_| CardResponse::Unlocked),
            CardCommand::ReadCertificate => self
                .read_certificate()
                .map(|(certificate, facial_image)| CardResponse::Certificate { certificate, facial_image }),
            CardCommand::SignChallenge(c) => self.sign_challenge(c).map(CardResponse::Signature),
            CardCommand::Decrypt(c) => self.decrypt(c).map(CardResponse::Plaintext),
            CardCommand::EndSession => {
                self.end_session();
                Ok(CardResponse::SessionEnded)
            }
        }
    }
}

impl CardInterface for Card {
    fn verify_holder(&mut self, probe: &FingerprintTemplate) -> Result<HolderVerification, CardError> {
        Card::verify_holder(self, probe)
    }

    fn unlock_exempt(&mut self) -> Result<(), CardError> {
        Card::unlock_exempt(self)
    }

    fn read_certificate(&self) -> Result<(IdentityCertificate, Vec<u8>), CardError> {
        Card::read_certificate(self)
    }

    fn sign_challenge(&self, challenge: &[u8]) -> Result<Signature, CardError> {
        Card::sign_challenge(self, challenge)
    }

    fn end_session(&mut self) {
        Card::end_session(self)
    }
}

/// Every command the card accepts.
#[derive(Debug, Clone)]
pub enum CardCommand {
    Initialize { template: FingerprintTemplate, facial_image: Vec<u8>, entropy: [u8; 32] },
    InitializeExempt { facial_image: Vec<u8>, entropy: [u8; 32] },
    PublicKey,
    CreateRequest(SubjectIdentity),
    StoreCertificate(IdentityCertificate),
    VerifyHolder(FingerprintTemplate),
    UnlockExempt,
    ReadCertificate,
    SignChallenge(Vec<u8>),
    Decrypt(Vec<u8>),
    EndSession,
}

/// Every payload the card can return. No variant carries a template, a
/// minutia or private key material.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum CardResponse {
    PublicKey(PublicKey),
    Request(CertificateRequest),
    Stored,
    Verification(HolderVerification),
    Unlocked,
    Certificate {
        certificate: IdentityCertificate,
        #[serde(with = "crate::codec::hex_bytes")]
        facial_image: Vec<u8>,
    },
    Signature(Signature),
    Plaintext(#[serde(with = "crate::codec::hex_bytes")] Vec<u8>),
    SessionEnded,
}
