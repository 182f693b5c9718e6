//! Scenario files: the JSON document describing one simulation run.
//!
//! ```json
//! {
//!   "mode": "A" | "B",
//!   "seed": 7,
//!   "graph": {
//!     "stops": [{"id": "gate", "x": 0, "y": 0}],
//!     "edges": [{"from": "gate", "to": "library", "s": 120}]
//!   },
//!   "avs": [{"id": "av-01", "start_stop": "gate", "secret": "..."}],
//!   "services": [{"service_id": "telemetry", "provider": "cu", ...}],
//!   "policies": "campus.pol",
//!   "pki": {"ca_key": "hex", "secrets": {"av-01": "..."}},
//!   "events": [{"tick": 1, "kind": "enroll", "av": "av-01"}]
//! }
//! ```
//!
//! Event kinds: `enroll`, `withdraw`, `booking`, `telemetry`, `revoke-cert`.
//! Event ticks are non-decreasing and at least 1 (the clock starts at 0 and
//! events fire as the clock reaches their tick).

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::registry::ServiceRecord;

use super::graph::{GraphError, RouteGraph, StopPos};

/// Unprotected baseline (A) or policy-aware operation (B).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mode {
    A,
    B,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::A => "A",
            Mode::B => "B",
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StopSpec {
    pub id: String,
    pub x: i64,
    pub y: i64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EdgeSpec {
    pub from: String,
    pub to: String,
    /// Travel seconds; at least 1.
    pub s: u32,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GraphSpec {
    pub stops: Vec<StopSpec>,
    pub edges: Vec<EdgeSpec>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AvSpec {
    pub id: String,
    pub start_stop: String,
    pub secret: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ServiceSpec {
    pub service_id: String,
    pub provider: String,
    #[serde(default)]
    pub properties: BTreeMap<String, String>,
    #[serde(default)]
    pub process_doc: String,
}

impl ServiceSpec {
    pub fn to_record(&self) -> ServiceRecord {
        let mut rec = ServiceRecord::new(&self.service_id, &self.provider)
            .with_process_doc(&self.process_doc);
        for (k, v) in &self.properties {
            rec = rec.with_property(k, v);
        }
        rec
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PkiSpec {
    /// CA signing key, hex-encoded.
    pub ca_key: String,
    /// Per-subject registration secrets the RA checks claims against.
    #[serde(default)]
    pub secrets: BTreeMap<String, String>,
}

/// One scripted event, dispatched when the clock reaches `tick`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScriptedEvent {
    pub tick: i64,
    #[serde(flatten)]
    pub action: EventAction,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum EventAction {
    Enroll {
        av: String,
        /// Proof presented to the RA; defaults to the declared secret.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        secret: Option<String>,
        /// Requested validity window; defaults to 3600 s from now.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        validity: Option<(i64, i64)>,
        /// Where an undeclared vehicle appears; defaults to the first stop.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        start_stop: Option<String>,
    },
    Withdraw {
        av: String,
    },
    Booking {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        booking_id: Option<String>,
        passenger: String,
        origin: String,
        walk_seconds: u64,
    },
    Telemetry {
        av: String,
    },
    RevokeCert {
        av: String,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Scenario {
    pub mode: Mode,
    pub seed: u64,
    pub graph: GraphSpec,
    #[serde(default)]
    pub avs: Vec<AvSpec>,
    #[serde(default)]
    pub services: Vec<ServiceSpec>,
    /// Path of the `.pol` file; the CLI resolves and loads it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub policies: Option<String>,
    pub pki: PkiSpec,
    #[serde(default)]
    pub events: Vec<ScriptedEvent>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ScenarioError {
    #[error("scenario JSON: {0}")]
    Json(String),
    #[error("scenario graph: {0}")]
    Graph(#[from] GraphError),
    #[error("scenario invalid: {0}")]
    Invalid(String),
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self, ScenarioError> {
        let scenario: Scenario =
            serde_json::from_str(text).map_err(|e| ScenarioError::Json(e.to_string()))?;
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        let graph = self.build_graph()?;
        for av in &self.avs {
            if !graph.has_stop(&av.start_stop) {
                return Err(ScenarioError::Invalid(format!(
                    "av `{}` starts at unknown stop `{}`",
                    av.id, av.start_stop
                )));
            }
        }
        let mut last_tick = 1;
        for event in &self.events {
            if event.tick < 1 {
                return Err(ScenarioError::Invalid(format!(
                    "event tick {} is before the first clock step",
                    event.tick
                )));
            }
            if event.tick < last_tick {
                return Err(ScenarioError::Invalid(format!(
                    "event ticks must be non-decreasing (saw {} after {})",
                    event.tick, last_tick
                )));
            }
            last_tick = event.tick;
            if let EventAction::Booking { origin, .. } = &event.action {
                if !graph.has_stop(origin) {
                    return Err(ScenarioError::Invalid(format!(
                        "booking origin `{origin}` is not a stop"
                    )));
                }
            }
        }
        hex::decode(&self.pki.ca_key)
            .map_err(|e| ScenarioError::Invalid(format!("pki.ca_key is not hex: {e}")))?;
        Ok(())
    }

    pub fn build_graph(&self) -> Result<RouteGraph, ScenarioError> {
        let mut graph = RouteGraph::new();
        for stop in &self.graph.stops {
            graph.add_stop(&stop.id, StopPos { x: stop.x, y: stop.y })?;
        }
        for edge in &self.graph.edges {
            graph.add_edge(&edge.from, &edge.to, edge.s)?;
        }
        Ok(graph)
    }

    /// The tick of the last scripted event; the run ends there.
    pub fn final_tick(&self) -> i64 {
        self.events.iter().map(|e| e.tick).max().unwrap_or(0)
    }
}
