//! Service registry: publish, query, and invalidate service descriptions.
//!
//! The registry keeps published services with their properties and process
//! documents so requesters can discover them before enforcement. Reads take
//! an immutable snapshot; one writer mutates by swapping snapshots, so
//! lookups never observe a half-applied change.

use std::collections::BTreeMap;
use std::sync::Arc;

use parking_lot::RwLock;
use serde::{Deserialize, Serialize};

/// Lifecycle of a published record. Transitions only valid → invalidated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ServiceStatus {
    Valid,
    Invalidated,
}

/// A published service description.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ServiceRecord {
    pub service_id: String,
    pub provider: String,
    #[serde(default)]
    pub properties: BTreeMap<String, String>,
    #[serde(default)]
    pub process_doc: String,
    status: ServiceStatus,
}

impl ServiceRecord {
    /// New records are always valid; invalidation goes through the registry.
    pub fn new(service_id: &str, provider: &str) -> Self {
        ServiceRecord {
            service_id: service_id.to_string(),
            provider: provider.to_string(),
            properties: BTreeMap::new(),
            process_doc: String::new(),
            status: ServiceStatus::Valid,
        }
    }

    pub fn with_property(mut self, key: &str, value: &str) -> Self {
        self.properties.insert(key.to_string(), value.to_string());
        self
    }

    pub fn with_process_doc(mut self, doc: &str) -> Self {
        self.process_doc = doc.to_string();
        self
    }

    pub fn status(&self) -> ServiceStatus {
        self.status
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RegistryError {
    #[error("a valid service with id `{0}` is already published")]
    DuplicateServiceId(String),
    #[error("no valid service with id `{0}`")]
    UnknownServiceId(String),
}

#[derive(Debug, Default)]
struct Records {
    // Full publication history; at most one valid record per id.
    all: Vec<ServiceRecord>,
}

/// Single-writer, multi-reader registry with snapshot reads.
#[derive(Debug, Default)]
pub struct ServiceRegistry {
    inner: RwLock<Arc<Records>>,
}

impl ServiceRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    fn snapshot(&self) -> Arc<Records> {
        self.inner.read().clone()
    }

    /// Publishes a record. Fails while a valid record holds the same id;
    /// republishing after invalidation supersedes the old record.
    pub fn publish(&self, record: ServiceRecord) -> Result<(), RegistryError> {
        let mut guard = self.inner.write();
        if guard
            .all
            .iter()
            .any(|r| r.service_id == record.service_id && r.status == ServiceStatus::Valid)
        {
            return Err(RegistryError::DuplicateServiceId(record.service_id));
        }
        let mut next = Records { all: guard.all.clone() };
        next.all.push(record);
        *guard = Arc::new(next);
        Ok(())
    }

    /// Marks the valid record with this id invalidated.
    pub fn invalidate(&self, service_id: &str) -> Result<(), RegistryError> {
        let mut guard = self.inner.write();
        let mut next = Records { all: guard.all.clone() };
        let rec = next
            .all
            .iter_mut()
            .find(|r| r.service_id == service_id && r.status == ServiceStatus::Valid)
            .ok_or_else(|| RegistryError::UnknownServiceId(service_id.to_string()))?;
        rec.status = ServiceStatus::Invalidated;
        *guard = Arc::new(next);
        Ok(())
    }

    /// Valid records matching `id` (when given) and every key/value pair in
    /// `query`, ordered by service id.
    pub fn find(&self, query: &BTreeMap<String, String>, id: Option<&str>) -> Vec<ServiceRecord> {
        let snap = self.snapshot();
        let mut found: Vec<ServiceRecord> = snap
            .all
            .iter()
            .filter(|r| r.status == ServiceStatus::Valid)
            .filter(|r| id.map_or(true, |want| r.service_id == want))
            .filter(|r| query.iter().all(|(k, v)| r.properties.get(k) == Some(v)))
            .cloned()
            .collect();
        found.sort_by(|a, b| a.service_id.cmp(&b.service_id));
        found
    }

    /// The valid record with this id, if any.
    pub fn find_valid(&self, service_id: &str) -> Option<ServiceRecord> {
        self.find(&BTreeMap::new(), Some(service_id)).into_iter().next()
    }
}
