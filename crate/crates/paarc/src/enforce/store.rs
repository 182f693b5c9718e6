//! Versioned policy store with snapshot isolation.
//!
//! The administration point mutates the store by building a fresh snapshot
//! and swapping it in atomically; every mutation bumps the version by one.
//! Readers clone an `Arc` to the current snapshot, so an evaluation that
//! began against version v never observes version v+1.

use std::sync::Arc;

use parking_lot::RwLock;

use crate::policy::{parse_policy_set, ParseError, Policy};

/// An immutable view of the store at one version.
#[derive(Debug)]
pub struct PolicyStoreSnapshot {
    version: u64,
    policies: Vec<Policy>,
}

impl PolicyStoreSnapshot {
    pub fn version(&self) -> u64 {
        self.version
    }

    pub fn policies(&self) -> &[Policy] {
        &self.policies
    }

    pub fn len(&self) -> usize {
        self.policies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.policies.is_empty()
    }
}

/// A store mutation: put (insert or replace by id) or remove.
#[derive(Debug, Clone)]
pub enum PapUpdate {
    Put(Policy),
    Remove(String),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum StoreError {
    #[error("no policy with id `{0}` in the store")]
    UnknownPolicyId(String),
    #[error("policy text does not parse: {0}")]
    InvalidPolicy(ParseError),
}

/// Single-writer, multi-reader policy store.
#[derive(Debug)]
pub struct PolicyStore {
    current: RwLock<Arc<PolicyStoreSnapshot>>,
}

impl Default for PolicyStore {
    fn default() -> Self {
        Self::new()
    }
}

impl PolicyStore {
    /// An empty store at version 0.
    pub fn new() -> Self {
        PolicyStore {
            current: RwLock::new(Arc::new(PolicyStoreSnapshot {
                version: 0,
                policies: Vec::new(),
            })),
        }
    }

    /// The current snapshot. In-flight evaluations keep theirs.
    pub fn snapshot(&self) -> Arc<PolicyStoreSnapshot> {
        self.current.read().clone()
    }

    pub fn version(&self) -> u64 {
        self.current.read().version
    }

    /// Applies one administration operation and returns the new version.
    pub fn pap_update(&self, op: PapUpdate) -> Result<u64, StoreError> {
        match op {
            PapUpdate::Put(policy) => Ok(self.put(policy)),
            PapUpdate::Remove(id) => self.remove(&id),
        }
    }

    /// Inserts a policy, or replaces the policy with the same id in place.
    pub fn put(&self, policy: Policy) -> u64 {
        let mut guard = self.current.write();
        let mut policies = guard.policies.clone();
        match policies.iter_mut().find(|p| p.id() == policy.id()) {
            Some(slot) => *slot = policy,
            None => policies.push(policy),
        }
        let version = guard.version + 1;
        *guard = Arc::new(PolicyStoreSnapshot { version, policies });
        version
    }

    pub fn remove(&self, id: &str) -> Result<u64, StoreError> {
        let mut guard = self.current.write();
        let pos = guard
            .policies
            .iter()
            .position(|p| p.id() == id)
            .ok_or_else(|| StoreError::UnknownPolicyId(id.to_string()))?;
        let mut policies = guard.policies.clone();
        policies.remove(pos);
        let version = guard.version + 1;
        *guard = Arc::new(PolicyStoreSnapshot { version, policies });
        Ok(version)
    }

    /// Parses a `.pol` document and puts every policy, in source order.
    /// Returns the final version.
    pub fn load_set(&self, text: &str) -> Result<u64, StoreError> {
        let policies = parse_policy_set(text).map_err(StoreError::InvalidPolicy)?;
        let mut version = self.version();
        for p in policies {
            version = self.put(p);
        }
        Ok(version)
    }
}
