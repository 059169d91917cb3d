//! Misbehaving cards used by the attack scenarios. Each wraps a real
//! [`Card`] for the parts the attacker controls legitimately (their own
//! finger, their own key) and lies about the rest.

use eid_core::biometrics::FingerprintTemplate;
use eid_core::card::{Card, CardError, CardInterface, HolderVerification};
use eid_core::pki::{IdentityCertificate, Signature};

/// A card with its own key pair that presents someone else's certificate and
/// portrait.
pub struct ClonedCard {
    pub inner: Card,
    pub stolen: IdentityCertificate,
    pub stolen_image: Vec<u8>,
}

impl CardInterface for ClonedCard {
    fn verify_holder(&mut self, probe: &FingerprintTemplate) -> Result<HolderVerification, CardError> {
        self.inner.verify_holder(probe)
    }

    fn unlock_exempt(&mut self) -> Result<(), CardError> {
        self.inner.unlock_exempt()
    }

    fn read_certificate(&self) -> Result<(IdentityCertificate, Vec<u8>), CardError> {
        if !self.inner.is_unlocked() {
            return Err(CardError::SessionLocked);
        }
        Ok((self.stolen.clone(), self.stolen_image.clone()))
    }

    fn sign_challenge(&self, challenge: &[u8]) -> Result<Signature, CardError> {
        self.inner.sign_challenge(challenge)
    }

    fn end_session(&mut self) {
        self.inner.end_session()
    }
}

/// A clone that answers every challenge with a signature recorded from the
/// genuine card.
pub struct ReplayCard {
    pub clone: ClonedCard,
    pub recorded: Signature,
}

impl CardInterface for ReplayCard {
    fn verify_holder(&mut self, probe: &FingerprintTemplate) -> Result<HolderVerification, CardError> {
        self.clone.verify_holder(probe)
    }

    fn unlock_exempt(&mut self) -> Result<(), CardError> {
        self.clone.unlock_exempt()
    }

    fn read_certificate(&self) -> Result<(IdentityCertificate, Vec<u8>), CardError> {
        self.clone.read_certificate()
    }

    fn sign_challenge(&self, _challenge: &[u8]) -> Result<Signature, CardError> {
        Ok(self.recorded.clone())
    }

    fn end_session(&mut self) {
        self.clone.end_session()
    }
}

/// Passes everything through to a genuine card and keeps the last challenge
/// answer, as an eavesdropper on the reader link would.
pub struct Tap<'a> {
    pub card: &'a mut Card,
    pub last_signature: std::cell::RefCell<Option<Signature>>,
}

impl<'a> Tap<'a> {
    pub fn new(card: &'a mut Card) -> Self {
        Self { card, last_signature: Default::default() }
    }
}

impl CardInterface for Tap<'_> {
    fn verify_holder(&mut self, probe: &FingerprintTemplate) -> Result<HolderVerification, CardError> {
        self.card.verify_holder(probe)
    }

    fn unlock_exempt(&mut self) -> Result<(), CardError> {
        self.card.unlock_exempt()
    }

    fn read_certificate(&self) -> Result<(IdentityCertificate, Vec<u8>), CardError> {
        self.card.read_certificate()
    }

    fn sign_challenge(&self, challenge: &[u8]) -> Result<Signature, CardError> {
        let sig = self.card.sign_challenge(challenge)?;
        *self.last_signature.borrow_mut() = Some(sig.clone());
        Ok(sig)
    }

    fn end_session(&mut self) {
        self.card.end_session()
    }
}
