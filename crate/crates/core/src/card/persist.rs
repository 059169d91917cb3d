//! Card persistence blob.
//!
//! The file is an emulation convenience and holds the sealed fields in the
//! clear. Protecting it is outside the threat model. The session flag is not
//! stored: a reloaded card always starts locked.

use std::path::Path;

use thiserror::Error;

use super::{Card, CardLifecycle};
use crate::biometrics::{FingerprintTemplate, MatchConfig, Minutia, MinutiaKind};
use crate::codec::{DecodeError, Reader, Writer};
use crate::pki::{decode_body, generate_keypair, IdentityCertificate, Signature};

pub const CARD_FILE_MAGIC: &[u8; 4] = b"EIDK";
pub const CARD_FILE_VERSION: u8 = 0x01;

#[derive(Debug, Error)]
pub enum CardFileError {
    #[error("card file i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("corrupt card file: {0}")]
    Corrupt(String),
}

impl From<DecodeError> for CardFileError {
    fn from(e: DecodeError) -> Self {
        Self::Corrupt(e.to_string())
    }
}

fn lifecycle_code(l: CardLifecycle) -> u8 {
    match l {
        CardLifecycle::Blank => 0,
        CardLifecycle::Active => 1,
        CardLifecycle::Personalized => 2,
    }
}

impl Card {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer::with_header(CARD_FILE_MAGIC, CARD_FILE_VERSION);
        w.u8(lifecycle_code(self.lifecycle))
            .bool(self.biometric_exempt)
            .u32(self.failed_attempts)
            .u32(self.max_attempts);
        let mc = &self.match_config;
        w.f64(mc.distance_tol)
            .f64(mc.angle_tol)
            .u32(mc.rotation_candidates)
            .f64(mc.decision_threshold)
            .u32(mc.min_enroll_minutiae);
        match &self.keys {
            Some(k) => w.bool(true).bytes(k.private_part.expose_seed()),
            None => w.bool(false),
        };
        match &self.template {
            Some(t) => {
                w.bool(true).str(&t.finger_label).f64(t.quality).u32(t.minutiae.len() as u32);
                for m in &t.minutiae {
                    w.f64(m.x).f64(m.y).f64(m.angle).u8(m.kind.code());
                }
            }
            None => {
                w.bool(false);
            }
        }
        w.bytes(&self.facial_image);
        match &self.certificate {
            Some(c) => {
                let body = crate::pki::canonical_encode_body(&c.body).expect("stored certificate encodes");
                w.bool(true).bytes(&body).bytes(c.signature.as_bytes());
            }
            None => {
                w.bool(false);
            }
        }
        w.finish()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, CardFileError> {
        let corrupt = |m: &str| CardFileError::Corrupt(m.to_string());
        let mut r = Reader::header(bytes, CARD_FILE_MAGIC, CARD_FILE_VERSION)?;
        let lifecycle = match r.u8()? {
            0 => CardLifecycle::Blank,
            1 => CardLifecycle::Active,
            2 => CardLifecycle::Personalized,
            _ => return Err(corrupt("lifecycle")),
        };
        let biometric_exempt = r.bool()?;
        let failed_attempts = r.u32()?;
        let max_attempts = r.u32()?;
        let match_config = MatchConfig {
            distance_tol: r.f64()?,
            angle_tol: r.f64()?,
            rotation_candidates: r.u32()?,
            decision_threshold: r.f64()?,
            min_enroll_minutiae: r.u32()?,
        };
        let keys = if r.bool()? {
            Some(generate_keypair(r.bytes()?).map_err(|_| corrupt("key seed"))?)
        } else {
            None
        };
        let template = if r.bool()? {
            let finger_label = r.string()?;
            let quality = r.f64()?;
            let n = r.u32()?;
            let mut minutiae = Vec::new();
            for _ in 0..n {
                let (x, y, angle) = (r.f64()?, r.f64()?, r.f64()?);
                let kind = MinutiaKind::from_code(r.u8()?).ok_or_else(|| corrupt("minutia kind"))?;
                minutiae.push(Minutia { x, y, angle, kind });
            }
            let t = FingerprintTemplate { finger_label, quality, minutiae };
            t.validate().map_err(|e| CardFileError::Corrupt(e.to_string()))?;
            Some(t)
        } else {
            None
        };
        let facial_image = r.bytes()?.to_vec();
        let certificate = if r.bool()? {
            let body = decode_body(r.bytes()?).map_err(|e| CardFileError::Corrupt(e.to_string()))?;
            let signature = Signature(r.bytes()?.to_vec());
            Some(IdentityCertificate { body, signature })
        } else {
            None
        };
        r.finish()?;

        match_config.validate().map_err(|e| CardFileError::Corrupt(e.to_string()))?;
        let consistent = match lifecycle {
            CardLifecycle::Blank => keys.is_none() && template.is_none() && certificate.is_none(),
            CardLifecycle::Active => keys.is_some() && certificate.is_none(),
            CardLifecycle::Personalized => keys.is_some() && certificate.is_some(),
        } && (lifecycle == CardLifecycle::Blank || template.is_some() != biometric_exempt)
            && max_attempts >= 1
            && failed_attempts <= max_attempts;
        if !consistent {
            return Err(corrupt("fields inconsistent with lifecycle"));
        }
        Ok(Self {
            lifecycle,
            keys,
            template,
            biometric_exempt,
            facial_image,
            certificate,
            session_unlocked: false,
            failed_attempts,
            max_attempts,
            match_config,
        })
    }

    pub fn save(&self, path: &Path) -> Result<(), CardFileError> {
        std::fs::write(path, self.to_bytes())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, CardFileError> {
        Self::from_bytes(&std::fs::read(path)?)
    }
}
