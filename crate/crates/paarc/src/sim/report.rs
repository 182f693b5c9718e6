//! The run report: ordered event log, booking assignments, acceptance
//! tallies, and the full audit log.

use serde::{Deserialize, Serialize};

use crate::audit::AuditRecord;

/// One line of the simulation's event log.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimEvent {
    pub tick: i64,
    pub kind: String,
    pub actor: String,
    pub outcome: String,
    /// Ground truth from the scenario, independent of what the run accepted.
    pub legitimate: bool,
}

/// Result of one booking: the elected vehicle and both sides' ETAs, or a
/// recorded no-vehicle outcome.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Assignment {
    pub booking_id: String,
    pub av_id: Option<String>,
    pub av_eta: Option<u64>,
    pub passenger_eta: u64,
}

/// Accepted/rejected action counts split by ground-truth legitimacy.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tallies {
    pub accepted_legitimate: u64,
    pub accepted_illegitimate: u64,
    pub rejected_legitimate: u64,
    pub rejected_illegitimate: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub mode: String,
    pub seed: u64,
    pub final_tick: i64,
    pub log: Vec<SimEvent>,
    pub assignments: Vec<Assignment>,
    pub tallies: Tallies,
    /// Decisions the decision point produced during the run.
    pub decision_count: u64,
    pub audit_record_count: u64,
    pub audit: Vec<AuditRecord>,
}

impl Report {
    /// Canonical byte form; identical runs serialize identically.
    pub fn to_json_bytes(&self) -> Vec<u8> {
        let mut bytes = serde_json::to_vec_pretty(self).expect("report serializes");
        bytes.push(b'\n');
        bytes
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}
