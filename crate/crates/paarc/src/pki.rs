//! Simulated trust chain: RA identity verification, CA issuance and
//! revocation, VA validation.
//!
//! Certificates are signed with a deterministic keyed digest (HMAC-SHA256)
//! over a canonical byte form, behind the [`CertSigner`] contract. That keeps
//! runs reproducible while preserving the property that matters here:
//! mutating any signed field is detected.

use std::collections::{BTreeMap, BTreeSet};

use hmac::{Hmac, Mac};
use serde::{Deserialize, Serialize};
use sha2::Sha256;

/// Signs canonical certificate bytes, returning a lowercase hex digest.
pub trait CertSigner: Send + Sync {
    fn sign(&self, payload: &[u8]) -> String;
}

/// HMAC-SHA256 signer keyed with the CA signing key.
pub struct KeyedDigestSigner {
    key: Vec<u8>,
}

impl KeyedDigestSigner {
    pub fn new(key: &[u8]) -> Self {
        KeyedDigestSigner { key: key.to_vec() }
    }
}

impl CertSigner for KeyedDigestSigner {
    fn sign(&self, payload: &[u8]) -> String {
        let mut mac = Hmac::<Sha256>::new_from_slice(&self.key).expect("any key length works");
        mac.update(payload);
        hex::encode(mac.finalize().into_bytes())
    }
}

/// A request for a certificate: who, their proof of identity, and the
/// validity window they ask for.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdentityClaim {
    pub subject: String,
    pub proof: String,
    pub not_before: i64,
    pub not_after: i64,
}

impl IdentityClaim {
    pub fn new(subject: &str, proof: &str, not_before: i64, not_after: i64) -> Result<Self, PkiError> {
        if not_before >= not_after {
            return Err(PkiError::EmptyValidityWindow { not_before, not_after });
        }
        Ok(IdentityClaim {
            subject: subject.to_string(),
            proof: proof.to_string(),
            not_before,
            not_after,
        })
    }
}

/// RA's answer to an identity claim.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RaVerdict {
    Approved,
    Rejected(String),
}

/// A simulated credential. All fields except `signature` are covered by it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub serial: u64,
    pub subject: String,
    pub issuer: String,
    pub not_before: i64,
    pub not_after: i64,
    pub key_fingerprint: String,
    pub signature: String,
}

/// Canonical signing payload: newline-terminated fields, integers in
/// decimal ASCII. Bit-exact across implementations.
pub fn canonical_cert_bytes(
    serial: u64,
    subject: &str,
    issuer: &str,
    not_before: i64,
    not_after: i64,
    key_fingerprint: &str,
) -> Vec<u8> {
    format!("{serial}\n{subject}\n{issuer}\n{not_before}\n{not_after}\n{key_fingerprint}\n")
        .into_bytes()
}

impl Certificate {
    pub fn canonical_bytes(&self) -> Vec<u8> {
        canonical_cert_bytes(
            self.serial,
            &self.subject,
            &self.issuer,
            self.not_before,
            self.not_after,
            &self.key_fingerprint,
        )
    }
}

/// Outcome of VA validation. Checks run in a fixed order; the first
/// failure wins.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ValidationStatus {
    Valid,
    Expired,
    NotYetValid,
    Revoked,
    BadSignature,
    UnknownIssuer,
}

/// Revoked serials with their revocation time. Entries are only ever added.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RevocationList {
    entries: BTreeMap<u64, i64>,
}

impl RevocationList {
    pub fn add(&mut self, serial: u64, revoked_at: i64) {
        self.entries.entry(serial).or_insert(revoked_at);
    }

    pub fn contains(&self, serial: u64) -> bool {
        self.entries.contains_key(&serial)
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, i64)> + '_ {
        self.entries.iter().map(|(s, t)| (*s, *t))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PkiError {
    #[error("no identity secret registered for subject `{0}`")]
    UnknownSubject(String),
    #[error("claim for `{0}` was not approved by the registration authority")]
    NotApproved(String),
    #[error("serial {0} was never issued")]
    UnknownSerial(u64),
    #[error("validity window is empty: not_before {not_before} >= not_after {not_after}")]
    EmptyValidityWindow { not_before: i64, not_after: i64 },
}

/// The full simulated trust chain for one issuing authority.
///
/// Issuance is serialized through `&mut self`; validation is pure.
pub struct Pki {
    ca_id: String,
    signer: Box<dyn CertSigner>,
    /// Issuers the VA trusts, each with its verification signer.
    trusted: BTreeMap<String, Box<dyn CertSigner>>,
    secrets: BTreeMap<String, String>,
    next_serial: u64,
    issued: BTreeSet<u64>,
    crl: RevocationList,
}

impl Pki {
    pub fn new(ca_id: &str, ca_key: &[u8]) -> Self {
        let mut trusted: BTreeMap<String, Box<dyn CertSigner>> = BTreeMap::new();
        trusted.insert(ca_id.to_string(), Box::new(KeyedDigestSigner::new(ca_key)));
        Pki {
            ca_id: ca_id.to_string(),
            signer: Box::new(KeyedDigestSigner::new(ca_key)),
            trusted,
            secrets: BTreeMap::new(),
            next_serial: 1,
            issued: BTreeSet::new(),
            crl: RevocationList::default(),
        }
    }

    pub fn ca_id(&self) -> &str {
        &self.ca_id
    }

    /// Registers the shared secret the RA will check claims against.
    pub fn register_secret(&mut self, subject: &str, secret: &str) {
        self.secrets.insert(subject.to_string(), secret.to_string());
    }

    /// Adds another issuer to the VA trust set.
    pub fn trust_issuer(&mut self, issuer: &str, key: &[u8]) {
        self.trusted.insert(issuer.to_string(), Box::new(KeyedDigestSigner::new(key)));
    }

    /// RA check: the claim's proof must equal the registered secret.
    pub fn ra_verify_identity(&self, claim: &IdentityClaim) -> Result<RaVerdict, PkiError> {
        let secret = self
            .secrets
            .get(&claim.subject)
            .ok_or_else(|| PkiError::UnknownSubject(claim.subject.clone()))?;
        if *secret == claim.proof {
            Ok(RaVerdict::Approved)
        } else {
            Ok(RaVerdict::Rejected("proof-mismatch".to_string()))
        }
    }

    /// CA issuance for an RA-approved claim. Serials increase by one per
    /// certificate, starting at 1.
    pub fn ca_issue(
        &mut self,
        claim: &IdentityClaim,
        verdict: &RaVerdict,
    ) -> Result<Certificate, PkiError> {
        if *verdict != RaVerdict::Approved {
            return Err(PkiError::NotApproved(claim.subject.clone()));
        }
        let serial = self.next_serial;
        self.next_serial += 1;
        let key_fingerprint = fingerprint(&claim.subject, serial);
        let payload = canonical_cert_bytes(
            serial,
            &claim.subject,
            &self.ca_id,
            claim.not_before,
            claim.not_after,
            &key_fingerprint,
        );
        let signature = self.signer.sign(&payload);
        self.issued.insert(serial);
        Ok(Certificate {
            serial,
            subject: claim.subject.clone(),
            issuer: self.ca_id.clone(),
            not_before: claim.not_before,
            not_after: claim.not_after,
            key_fingerprint,
            signature,
        })
    }

    /// Adds an issued serial to the revocation list. Idempotent.
    pub fn ca_revoke(&mut self, serial: u64, now: i64) -> Result<(), PkiError> {
        if !self.issued.contains(&serial) {
            return Err(PkiError::UnknownSerial(serial));
        }
        self.crl.add(serial, now);
        Ok(())
    }

    pub fn revocation_list(&self) -> &RevocationList {
        &self.crl
    }

    /// VA validation, in fixed order: issuer known, signature verifies,
    /// serial not revoked, `now` inside the validity window.
    pub fn va_validate(&self, cert: &Certificate, now: i64) -> ValidationStatus {
        let signer = match self.trusted.get(&cert.issuer) {
            Some(s) => s,
            None => return ValidationStatus::UnknownIssuer,
        };
        if signer.sign(&cert.canonical_bytes()) != cert.signature {
            return ValidationStatus::BadSignature;
        }
        if self.crl.contains(cert.serial) {
            return ValidationStatus::Revoked;
        }
        if now < cert.not_before {
            return ValidationStatus::NotYetValid;
        }
        if now > cert.not_after {
            return ValidationStatus::Expired;
        }
        ValidationStatus::Valid
    }
}

fn fingerprint(subject: &str, serial: u64) -> String {
    use sha2::Digest;
    let mut hasher = Sha256::new();
    hasher.update(b"key:");
    hasher.update(subject.as_bytes());
    hasher.update(b":");
    hasher.update(serial.to_string().as_bytes());
    hex::encode(&hasher.finalize()[..8])
}
