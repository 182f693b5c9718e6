//! Time-ordered message traces of one enforcement, and the canonical
//! sequence they must follow.
//!
//! Canonical sequence:
//!
//! | seq | from      | to        | event            |
//! |-----|-----------|-----------|------------------|
//! | 1   | requester | registry  | find-service     |
//! | 2   | registry  | requester | service-record / service-not-found (aborts) |
//! | 3   | requester | pep       | forward-request  |
//! | 4   | pep       | pdp       | decision-request |
//! | 5   | pdp       | store     | retrieve-policies|
//! | 6   | pdp       | pep       | decision-response|
//! | 7   | pep       | provider  | invoke-provider  | (permit only)
//! | 8   | provider  | pep       | provider-outcome | (permit only)
//! | 9   | pep       | publisher | notify-publisher |

use serde::{Deserialize, Serialize};

/// Participants in the enforcement exchange.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Entity {
    Requester,
    Registry,
    Pep,
    Pdp,
    Store,
    Provider,
    Publisher,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TraceEventKind {
    FindService,
    ServiceRecord,
    ServiceNotFound,
    ForwardRequest,
    DecisionRequest,
    RetrievePolicies,
    DecisionResponse,
    InvokeProvider,
    ProviderOutcome,
    NotifyPublisher,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceEvent {
    pub seq: u32,
    pub from: Entity,
    pub to: Entity,
    pub kind: TraceEventKind,
}

/// Ordered events of one enforcement; `seq` is contiguous from 1.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MessageTrace {
    events: Vec<TraceEvent>,
}

/// What the enforcement came to, for conformance checking.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceOutcome {
    /// Registry lookup failed; the trace aborts after two events.
    NotFound,
    /// A decision was reached; `permit` selects the provider events.
    Decided { permit: bool },
}

impl MessageTrace {
    pub fn new() -> Self {
        Self::default()
    }

    pub(crate) fn push(&mut self, from: Entity, to: Entity, kind: TraceEventKind) {
        let seq = self.events.len() as u32 + 1;
        self.events.push(TraceEvent { seq, from, to, kind });
    }

    pub fn events(&self) -> &[TraceEvent] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn contains_kind(&self, kind: TraceEventKind) -> bool {
        self.events.iter().any(|e| e.kind == kind)
    }

    /// Checks this trace against the canonical sequence for `outcome`.
    /// Sequence numbers must be contiguous from 1 and every event must
    /// match the expected (from, to, kind) triple.
    pub fn check_canonical(&self, outcome: TraceOutcome) -> Result<(), String> {
        use Entity::*;
        use TraceEventKind::*;
        let mut expected: Vec<(Entity, Entity, TraceEventKind)> =
            vec![(Requester, Registry, FindService)];
        match outcome {
            TraceOutcome::NotFound => {
                expected.push((Registry, Requester, ServiceNotFound));
            }
            TraceOutcome::Decided { permit } => {
                expected.push((Registry, Requester, ServiceRecord));
                expected.push((Requester, Pep, ForwardRequest));
                expected.push((Pep, Pdp, DecisionRequest));
                expected.push((Pdp, Store, RetrievePolicies));
                expected.push((Pdp, Pep, DecisionResponse));
                if permit {
                    expected.push((Pep, Provider, InvokeProvider));
                    expected.push((Provider, Pep, ProviderOutcome));
                }
                expected.push((Pep, Publisher, NotifyPublisher));
            }
        }
        if self.events.len() != expected.len() {
            return Err(format!(
                "trace has {} events, canonical form has {}",
                self.events.len(),
                expected.len()
            ));
        }
        for (i, (event, (from, to, kind))) in self.events.iter().zip(&expected).enumerate() {
            if event.seq != i as u32 + 1 {
                return Err(format!("event {i} has seq {}, expected {}", event.seq, i + 1));
            }
            if event.from != *from || event.to != *to || event.kind != *kind {
                return Err(format!(
                    "event {}: got {:?}->{:?} {:?}, expected {:?}->{:?} {:?}",
                    i + 1,
                    event.from,
                    event.to,
                    event.kind,
                    from,
                    to,
                    kind
                ));
            }
        }
        Ok(())
    }
}
