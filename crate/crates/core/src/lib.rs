//! Privacy-preserving electronic identity toolkit.
//!
//! Biometric templates live only inside an emulated smart card, which performs
//! the fingerprint match itself and refuses every private-key operation until
//! the holder has been verified. A national issuing authority vets applicants,
//! signs identity certificates bound to the card's public key and maintains a
//! signed revocation list. Border control validates a passport by unlocking the
//! card biometrically, checking the certificate against the authority and its
//! revocation list, and finally challenging the card to prove it holds the
//! private key named in the certificate.
//!
//! Modules:
//!
//! - [`pki`]: key pairs, signatures, sealing, canonical encodings, validation.
//! - [`biometrics`]: synthetic minutiae model, scan pipeline, matcher, rate harness.
//! - [`card`]: the match-on-card state machine.
//! - [`authority`]: vetting, issuance, revocation and the event ledger.
//! - [`verifier`]: the border-control protocol and its report.
//! - [`audit`]: a scan for template data in serialized output.

pub mod audit;
pub mod authority;
pub mod biometrics;
pub mod card;
pub mod codec;
pub mod pki;
pub mod seed;
pub mod verifier;
