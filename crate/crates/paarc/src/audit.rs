//! Append-only reporting system with traceability queries.
//!
//! Every notable action across the three architectural domains lands here
//! as one record. Records are never mutated or deleted; sequence numbers
//! are contiguous from 1.

use serde::{Deserialize, Serialize};

use crate::policy::DecisionEffect;

/// Architectural domain a record belongs to: AV-originated actions are
/// `device`, policy-machinery events are `network`, control-unit and
/// reporting events are `application`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Domain {
    Device,
    Network,
    Application,
}

impl Domain {
    pub fn from_str_opt(s: &str) -> Option<Self> {
        match s {
            "device" => Some(Domain::Device),
            "network" => Some(Domain::Network),
            "application" => Some(Domain::Application),
            _ => None,
        }
    }
}

/// One reporting-system entry.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditRecord {
    pub seq: u64,
    pub tick: i64,
    pub domain: Domain,
    pub actor: String,
    pub action: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub request_id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decision_effect: Option<DecisionEffect>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub policy_ids: Vec<String>,
    pub detail: String,
}

/// A record before the log assigns its sequence number.
#[derive(Debug, Clone)]
pub struct AuditDraft {
    pub tick: i64,
    pub domain: Domain,
    pub actor: String,
    pub action: String,
    pub request_id: Option<String>,
    pub decision_effect: Option<DecisionEffect>,
    pub policy_ids: Vec<String>,
    pub detail: String,
}

impl AuditDraft {
    pub fn new(tick: i64, domain: Domain, actor: &str, action: &str, detail: &str) -> Self {
        AuditDraft {
            tick,
            domain,
            actor: actor.to_string(),
            action: action.to_string(),
            request_id: None,
            decision_effect: None,
            policy_ids: Vec::new(),
            detail: detail.to_string(),
        }
    }

    pub fn request(mut self, request_id: &str) -> Self {
        self.request_id = Some(request_id.to_string());
        self
    }

    pub fn effect(mut self, effect: DecisionEffect) -> Self {
        self.decision_effect = Some(effect);
        self
    }

    pub fn policies(mut self, ids: Vec<String>) -> Self {
        self.policy_ids = ids;
        self
    }
}

/// Conjunctive filter over records; unset fields match anything.
/// `tick_range` is inclusive on both ends.
#[derive(Debug, Clone, Default)]
pub struct AuditFilter {
    pub domain: Option<Domain>,
    pub actor: Option<String>,
    pub action: Option<String>,
    pub effect: Option<DecisionEffect>,
    pub tick_range: Option<(i64, i64)>,
}

impl AuditFilter {
    pub fn matches(&self, r: &AuditRecord) -> bool {
        self.domain.map_or(true, |d| r.domain == d)
            && self.actor.as_deref().map_or(true, |a| r.actor == a)
            && self.action.as_deref().map_or(true, |a| r.action == a)
            && self.effect.map_or(true, |e| r.decision_effect == Some(e))
            && self
                .tick_range
                .map_or(true, |(lo, hi)| r.tick >= lo && r.tick <= hi)
    }
}

/// The append-only log. One writer; queries are read-only.
#[derive(Debug, Default)]
pub struct AuditLog {
    records: Vec<AuditRecord>,
}

impl AuditLog {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends and returns the assigned sequence number (previous + 1).
    pub fn append(&mut self, draft: AuditDraft) -> u64 {
        let seq = self.records.len() as u64 + 1;
        self.records.push(AuditRecord {
            seq,
            tick: draft.tick,
            domain: draft.domain,
            actor: draft.actor,
            action: draft.action,
            request_id: draft.request_id,
            decision_effect: draft.decision_effect,
            policy_ids: draft.policy_ids,
            detail: draft.detail,
        });
        seq
    }

    /// Records matching every supplied filter field, in sequence order.
    pub fn query(&self, filter: &AuditFilter) -> Vec<&AuditRecord> {
        self.records.iter().filter(|r| filter.matches(r)).collect()
    }

    /// Every record carrying this request id, in sequence order. This is
    /// the full decision path of one enforcement.
    pub fn trace_request(&self, request_id: &str) -> Vec<&AuditRecord> {
        self.records
            .iter()
            .filter(|r| r.request_id.as_deref() == Some(request_id))
            .collect()
    }

    pub fn records(&self) -> &[AuditRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}
