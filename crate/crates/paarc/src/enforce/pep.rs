//! Policy enforcement point and the engine wiring it to the registry,
//! store, information point, providers, publisher, and audit log.

use std::collections::BTreeMap;

use crate::audit::{AuditDraft, AuditLog, Domain};
use crate::policy::{dedup_preserving, AttrCategory, AttrPath, AttrValue, DecisionEffect, RequestContext};
use crate::registry::ServiceRegistry;

use super::pdp::{pdp_decide, PdpReport};
use super::pip::Pip;
use super::store::PolicyStore;
use super::trace::{Entity, MessageTrace, TraceEventKind};
use super::{
    EnforceError, EnforcementResult, Notification, NotificationChannel, ServiceRequest,
};

/// A request after canonical-to-technical translation: the normalized
/// envelope the provider is invoked with.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TechnicalRequest {
    pub request_id: String,
    pub service_id: String,
    pub action: String,
    /// Deterministic JSON envelope with attribute keys in canonical order.
    pub envelope: String,
    pub payload: Vec<u8>,
}

/// Translates the canonical request into its technical form. The envelope
/// is byte-stable: translating the same request twice yields identical
/// output.
pub fn translate(req: &ServiceRequest) -> TechnicalRequest {
    let envelope = serde_json::json!({
        "action": req.action,
        "attrs": req.attrs,
        "request_id": req.request_id,
        "requester": req.requester,
        "service_id": req.service_id,
    });
    TechnicalRequest {
        request_id: req.request_id.clone(),
        service_id: req.service_id.clone(),
        action: req.action.clone(),
        envelope: envelope.to_string(),
        payload: req.payload.clone(),
    }
}

/// The service side of an invocation.
pub trait ServiceProvider {
    fn invoke(&mut self, req: &TechnicalRequest) -> Result<Vec<u8>, String>;
}

impl<F> ServiceProvider for F
where
    F: FnMut(&TechnicalRequest) -> Result<Vec<u8>, String>,
{
    fn invoke(&mut self, req: &TechnicalRequest) -> Result<Vec<u8>, String> {
        self(req)
    }
}

/// Collects notifications; a stand-in for notice-boards, APIs, and text
/// messages at desk scale.
#[derive(Debug, Default)]
pub struct Publisher {
    sent: Vec<Notification>,
}

impl Publisher {
    pub fn publish(&mut self, n: Notification) {
        self.sent.push(n);
    }

    pub fn sent(&self) -> &[Notification] {
        &self.sent
    }
}

fn channel_for_action(action: &str) -> NotificationChannel {
    if action.starts_with("booking.") {
        NotificationChannel::TextMessage
    } else if action.starts_with("telemetry.") {
        NotificationChannel::Api
    } else {
        NotificationChannel::NoticeBoard
    }
}

/// One wired enforcement engine: store, information point, registry,
/// providers, publisher, and the audit log they all report into.
pub struct Engine {
    pub store: PolicyStore,
    pub pip: Pip,
    pub registry: ServiceRegistry,
    pub audit: AuditLog,
    pub publisher: Publisher,
    providers: BTreeMap<String, Box<dyn ServiceProvider>>,
    tick: i64,
    event_seq: u64,
    decisions_made: u64,
}

impl Default for Engine {
    fn default() -> Self {
        Self::new()
    }
}

impl Engine {
    pub fn new() -> Self {
        Engine {
            store: PolicyStore::new(),
            pip: Pip::new(),
            registry: ServiceRegistry::new(),
            audit: AuditLog::new(),
            publisher: Publisher::default(),
            providers: BTreeMap::new(),
            tick: 0,
            event_seq: 0,
            decisions_made: 0,
        }
    }

    /// Clock used to stamp audit records.
    pub fn set_tick(&mut self, tick: i64) {
        self.tick = tick;
    }

    pub fn tick(&self) -> i64 {
        self.tick
    }

    /// Registers the provider implementation behind an actor id.
    pub fn register_provider(&mut self, actor: &str, provider: Box<dyn ServiceProvider>) {
        self.providers.insert(actor.to_string(), provider);
    }

    /// Total decisions taken by the decision point through this engine.
    pub fn decisions_made(&self) -> u64 {
        self.decisions_made
    }

    fn audit_decision(&mut self, req: &ServiceRequest, report: &PdpReport) {
        let policy_ids = dedup_preserving(
            report.decision.matched.iter().map(|(id, _)| id.clone()).collect(),
        );
        self.audit.append(
            AuditDraft::new(
                self.tick,
                Domain::Network,
                "pdp",
                &req.action,
                &format!(
                    "decided on store v{} with {} pip call(s)",
                    report.snapshot_version, report.pip_calls
                ),
            )
            .request(&req.request_id)
            .effect(report.decision.effect)
            .policies(policy_ids),
        );
        self.decisions_made += 1;
    }

    /// Runs the decision point against the current snapshot, with the
    /// decision recorded in the audit log. No registry or provider
    /// interaction; used for eligibility checks.
    pub fn decide(&mut self, req: &ServiceRequest) -> PdpReport {
        let snapshot = self.store.snapshot();
        let report = pdp_decide(req, &snapshot, &self.pip);
        self.audit_decision(req, &report);
        report
    }

    /// Full enforcement of one request: registry lookup, translation,
    /// decision, gated provider invocation, publisher notification, and
    /// audit records for each stage.
    pub fn enforce(&mut self, req: &ServiceRequest) -> Result<EnforcementResult, EnforceError> {
        let mut trace = MessageTrace::new();
        trace.push(Entity::Requester, Entity::Registry, TraceEventKind::FindService);

        let record = match self.registry.find_valid(&req.service_id) {
            Some(r) => r,
            None => {
                trace.push(Entity::Registry, Entity::Requester, TraceEventKind::ServiceNotFound);
                self.audit.append(
                    AuditDraft::new(
                        self.tick,
                        Domain::Network,
                        "registry",
                        "registry.find",
                        &format!("service `{}` not found or invalidated", req.service_id),
                    )
                    .request(&req.request_id),
                );
                return Err(EnforceError::ServiceNotFound {
                    service_id: req.service_id.clone(),
                    trace,
                });
            }
        };
        trace.push(Entity::Registry, Entity::Requester, TraceEventKind::ServiceRecord);
        self.audit.append(
            AuditDraft::new(
                self.tick,
                Domain::Network,
                "registry",
                "registry.find",
                &format!("service `{}` valid, provider `{}`", record.service_id, record.provider),
            )
            .request(&req.request_id),
        );

        trace.push(Entity::Requester, Entity::Pep, TraceEventKind::ForwardRequest);
        let technical = translate(req);

        trace.push(Entity::Pep, Entity::Pdp, TraceEventKind::DecisionRequest);
        let snapshot = self.store.snapshot();
        trace.push(Entity::Pdp, Entity::Store, TraceEventKind::RetrievePolicies);
        let report = pdp_decide(req, &snapshot, &self.pip);
        trace.push(Entity::Pdp, Entity::Pep, TraceEventKind::DecisionResponse);
        self.audit_decision(req, &report);

        let mut outcome = None;
        let mut provider_error = None;
        if report.decision.effect == DecisionEffect::Permit {
            trace.push(Entity::Pep, Entity::Provider, TraceEventKind::InvokeProvider);
            let invoked = match self.providers.get_mut(&record.provider) {
                Some(provider) => provider.invoke(&technical),
                None => Err(format!("no provider bound for `{}`", record.provider)),
            };
            trace.push(Entity::Provider, Entity::Pep, TraceEventKind::ProviderOutcome);
            let detail = match &invoked {
                Ok(bytes) => format!("outcome {} byte(s)", bytes.len()),
                Err(e) => format!("provider failure: {e}"),
            };
            self.audit.append(
                AuditDraft::new(self.tick, Domain::Application, &record.provider, &req.action, &detail)
                    .request(&req.request_id),
            );
            match invoked {
                Ok(bytes) => outcome = Some(bytes),
                Err(e) => provider_error = Some(e),
            }
        }

        let notification = Notification {
            channel: channel_for_action(&req.action),
            recipient: req.requester.clone(),
            body: format!("{}: {} -> {}", req.request_id, req.action, report.decision.effect),
        };
        trace.push(Entity::Pep, Entity::Publisher, TraceEventKind::NotifyPublisher);
        self.publisher.publish(notification.clone());
        self.audit.append(
            AuditDraft::new(
                self.tick,
                Domain::Application,
                "publisher",
                "notify",
                &notification.body,
            )
            .request(&req.request_id),
        );

        Ok(EnforcementResult {
            decision: report.decision,
            outcome,
            provider_error,
            notification: Some(notification),
            trace,
            pip_calls: report.pip_calls,
            snapshot_version: report.snapshot_version,
        })
    }

    /// Wraps an event as a synthetic request (`action = "event." + kind`),
    /// decides it, and returns the obligations the enforcing side must map
    /// to reconfiguration actions.
    pub fn trigger_event(&mut self, kind: &str, attrs: RequestContext) -> Vec<String> {
        self.event_seq += 1;
        let requester = attrs
            .get(&AttrPath::new(AttrCategory::Subject, "id").expect("static path"))
            .and_then(|v| match v {
                AttrValue::Text(s) => Some(s.clone()),
                _ => None,
            })
            .unwrap_or_else(|| "system".to_string());
        let req = ServiceRequest {
            request_id: format!("evt-{:04}", self.event_seq),
            requester,
            service_id: String::new(),
            action: format!("event.{kind}"),
            payload: Vec::new(),
            attrs,
        };
        let report = self.decide(&req);
        report.decision.obligations
    }
}
