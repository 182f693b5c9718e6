//! The enforcement pipeline: interception and translation at the PEP,
//! two-phase decisions at the PDP with PIP attribute resolution, a
//! versioned policy store behind the PAP, publisher notification, and
//! event-triggered policy actions.

mod pdp;
mod pep;
pub mod pip;
mod store;
mod trace;

pub use pdp::{evaluation_context, pdp_decide, PdpReport};
pub use pep::{translate, Engine, Publisher, ServiceProvider, TechnicalRequest};
pub use pip::{AttrPattern, AttributeSourceBinding, Pip, PipError, ServiceDataRepository};
pub use store::{PapUpdate, PolicyStore, PolicyStoreSnapshot, StoreError};
pub use trace::{Entity, MessageTrace, TraceEvent, TraceEventKind, TraceOutcome};

use serde::{Deserialize, Serialize};

use crate::policy::{Decision, DecisionEffect, RequestContext};

/// A service request as the requester submits it: the canonical form.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ServiceRequest {
    pub request_id: String,
    pub requester: String,
    pub service_id: String,
    pub action: String,
    /// Opaque application payload; not part of the wire document.
    #[serde(skip)]
    pub payload: Vec<u8>,
    #[serde(default)]
    pub attrs: RequestContext,
}

/// Where a notification is delivered.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NotificationChannel {
    NoticeBoard,
    Api,
    TextMessage,
}

/// A message the publisher component delivers after enforcement.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Notification {
    pub channel: NotificationChannel,
    pub recipient: String,
    pub body: String,
}

/// Everything one enforcement produced.
///
/// On a permit the provider was invoked: exactly one of `outcome` (the
/// response bytes) or `provider_error` is present. Neither is present
/// otherwise.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnforcementResult {
    pub decision: Decision,
    pub outcome: Option<Vec<u8>>,
    pub provider_error: Option<String>,
    pub notification: Option<Notification>,
    pub trace: MessageTrace,
    pub pip_calls: u32,
    pub snapshot_version: u64,
}

impl EnforcementResult {
    /// Provider interaction happened iff the decision was a permit.
    pub fn invariants_hold(&self) -> bool {
        let invoked = self.outcome.is_some() || self.provider_error.is_some();
        let both = self.outcome.is_some() && self.provider_error.is_some();
        invoked == (self.decision.effect == DecisionEffect::Permit) && !both
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EnforceError {
    #[error("no valid service `{service_id}` in the registry")]
    ServiceNotFound { service_id: String, trace: MessageTrace },
}
