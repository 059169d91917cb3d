//! JSON-lines ledger. Each line is one event; replay is strict and in order.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{AuthorityError, AuthorityPolicy, IssuingAuthority, RecordStatus};
use crate::pki::{IdentityCertificate, KeyPair, RevocationReason};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "ev", rename_all = "lowercase")]
pub enum LedgerEvent {
    Issue { serial: u64, issued_at: u64, certificate: IdentityCertificate },
    Revoke { serial: u64, reason: RevocationReason, at: u64 },
}

impl IssuingAuthority {
    pub fn ledger_string(&self) -> String {
        let mut out = String::new();
        for e in &self.events {
            out.push_str(&serde_json::to_string(e).expect("ledger events serialize"));
            out.push('\n');
        }
        out
    }

    /// Writes the whole ledger to a sibling temp file and renames it over
    /// `path`.
    pub fn save(&self, path: &Path) -> Result<(), AuthorityError> {
        let tmp = path.with_extension("tmp");
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(self.ledger_string().as_bytes())?;
        f.sync_all()?;
        std::fs::rename(&tmp, path)?;
        Ok(())
    }

    /// Rebuilds an authority by replaying `path`. The CA key pair and policy
    /// are not part of the ledger and must be supplied.
    pub fn load(
        path: &Path,
        authority_id: &str,
        ca_keys: KeyPair,
        policy: AuthorityPolicy,
    ) -> Result<Self, AuthorityError> {
        let text = std::fs::read_to_string(path)?;
        Self::replay(&text, authority_id, ca_keys, policy)
    }

    pub fn replay(
        ledger: &str,
        authority_id: &str,
        ca_keys: KeyPair,
        policy: AuthorityPolicy,
    ) -> Result<Self, AuthorityError> {
        let mut auth = Self::new(authority_id, ca_keys, policy)?;
        if ledger.is_empty() {
            return Ok(auth);
        }
        let lines: Vec<&str> = ledger.split('\n').collect();
        // a well-formed ledger ends in '\n', leaving one empty trailing piece
        let (last, body) = lines.split_last().expect("split yields at least one piece");
        if !last.is_empty() {
            return Err(AuthorityError::LedgerCorrupt(lines.len()));
        }
        for (i, line) in body.iter().enumerate() {
            let n = i + 1;
            let event: LedgerEvent = serde_json::from_str(line).map_err(|_| AuthorityError::LedgerCorrupt(n))?;
            if !auth.admissible(&event) {
                return Err(AuthorityError::LedgerCorrupt(n));
            }
            auth.apply(event);
        }
        Ok(auth)
    }

    fn admissible(&self, event: &LedgerEvent) -> bool {
        match event {
            LedgerEvent::Issue { serial, issued_at, certificate } => {
                let b = &certificate.body;
                *serial == self.next_serial
                    && b.serial == *serial
                    && b.issuer_id == self.authority_id
                    && b.valid_from == *issued_at
                    && certificate.verify(self.public_key())
            }
            LedgerEvent::Revoke { serial, .. } => {
                matches!(self.registry.get(serial), Some(r) if r.status == RecordStatus::Active)
            }
        }
    }
}
