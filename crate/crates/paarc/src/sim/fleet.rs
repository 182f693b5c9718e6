//! Vehicle state: enrollment lifecycle, route state machine, movement
//! along itineraries, telemetry, and election for bookings.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::pki::Certificate;

use super::graph::RouteGraph;

/// Enrollment lifecycle. Withdrawn vehicles may enroll again.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Lifecycle {
    Unenrolled,
    Enrolled,
    Withdrawn,
}

/// Route progress: idle, running, or near-finish (remaining route time at
/// most 60 seconds). Transitions follow idle → running → near-finish → idle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RouteState {
    Idle,
    Running,
    NearFinish,
}

/// Where a vehicle is: at a stop, or partway along a directed edge.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AvLocation {
    AtStop(String),
    OnEdge { from: String, to: String, elapsed: u32 },
}

impl AvLocation {
    /// Current stop when idle; edge head when moving.
    pub fn nearest_stop(&self) -> &str {
        match self {
            AvLocation::AtStop(s) => s,
            AvLocation::OnEdge { to, .. } => to,
        }
    }
}

/// The periodic report a vehicle submits to the control unit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Telemetry {
    pub av_id: String,
    pub location: AvLocation,
    pub route_paths: Vec<String>,
    pub service_bulletins: Vec<String>,
    pub stop_list: Vec<String>,
    pub route_state: RouteState,
    pub tick: i64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Itinerary {
    stops: Vec<String>,
    legs: Vec<u32>,
    leg_idx: usize,
    leg_elapsed: u32,
}

impl Itinerary {
    fn remaining_seconds(&self) -> u64 {
        let mut total = 0u64;
        for (i, leg) in self.legs.iter().enumerate().skip(self.leg_idx) {
            let done = if i == self.leg_idx { self.leg_elapsed } else { 0 };
            total += u64::from(leg - done);
        }
        total
    }

    fn complete(&self) -> bool {
        self.leg_idx >= self.legs.len()
    }
}

/// One vehicle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AvState {
    pub av_id: String,
    pub lifecycle: Lifecycle,
    pub route_state: RouteState,
    pub location: AvLocation,
    pub cert: Option<Certificate>,
    pub last_telemetry: Option<Telemetry>,
    /// Withdrawal requested while on a route; applied at route end.
    pub pending_withdrawal: bool,
    itinerary: Option<Itinerary>,
}

/// What one movement second did.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MovementOutcome {
    pub completed_route: bool,
}

impl AvState {
    pub fn new(av_id: &str, start_stop: &str) -> Self {
        AvState {
            av_id: av_id.to_string(),
            lifecycle: Lifecycle::Unenrolled,
            route_state: RouteState::Idle,
            location: AvLocation::AtStop(start_stop.to_string()),
            cert: None,
            last_telemetry: None,
            pending_withdrawal: false,
            itinerary: None,
        }
    }

    /// Ordered stop list of the current itinerary; empty when idle.
    pub fn route(&self) -> &[String] {
        self.itinerary.as_ref().map(|i| i.stops.as_slice()).unwrap_or(&[])
    }

    pub fn remaining_route_seconds(&self) -> u64 {
        self.itinerary.as_ref().map(Itinerary::remaining_seconds).unwrap_or(0)
    }

    /// Starts an itinerary along `stops` (consecutive edges must exist in
    /// `graph`). Route state becomes running, or directly near-finish for
    /// routes of 60 seconds or less.
    pub fn assign_itinerary(&mut self, stops: Vec<String>, graph: &RouteGraph) {
        debug_assert!(self.lifecycle == Lifecycle::Enrolled);
        debug_assert!(self.route_state == RouteState::Idle);
        let legs: Vec<u32> = stops
            .windows(2)
            .map(|w| graph.edge_travel(&w[0], &w[1]).expect("itinerary follows graph edges"))
            .collect();
        if let Some(first) = stops.first() {
            self.location = AvLocation::AtStop(first.clone());
        }
        let itinerary = Itinerary { stops, legs, leg_idx: 0, leg_elapsed: 0 };
        let remaining = itinerary.remaining_seconds();
        self.itinerary = Some(itinerary);
        self.route_state =
            if remaining <= 60 { RouteState::NearFinish } else { RouteState::Running };
    }

    /// Abandons the current itinerary in place, e.g. on a forced
    /// withdrawal. The vehicle stays where it is.
    pub fn clear_route(&mut self) {
        self.itinerary = None;
        self.route_state = RouteState::Idle;
    }

    /// Advances one second of movement. Flips running → near-finish at the
    /// 60-second threshold and near-finish → idle at route end.
    pub fn step_movement(&mut self) -> MovementOutcome {
        if !matches!(self.route_state, RouteState::Running | RouteState::NearFinish) {
            return MovementOutcome { completed_route: false };
        }
        let Some(it) = self.itinerary.as_mut() else {
            return MovementOutcome { completed_route: false };
        };

        if !it.complete() {
            it.leg_elapsed += 1;
            if it.leg_elapsed >= it.legs[it.leg_idx] {
                it.leg_idx += 1;
                it.leg_elapsed = 0;
                self.location = AvLocation::AtStop(it.stops[it.leg_idx].clone());
            } else {
                self.location = AvLocation::OnEdge {
                    from: it.stops[it.leg_idx].clone(),
                    to: it.stops[it.leg_idx + 1].clone(),
                    elapsed: it.leg_elapsed,
                };
            }
        }

        let remaining = it.remaining_seconds();
        let complete = it.complete();
        if self.route_state == RouteState::Running && remaining <= 60 {
            self.route_state = RouteState::NearFinish;
        }
        if complete {
            self.route_state = RouteState::Idle;
            let final_stop = it.stops.last().cloned();
            self.itinerary = None;
            if let Some(stop) = final_stop {
                self.location = AvLocation::AtStop(stop);
            }
            return MovementOutcome { completed_route: true };
        }
        MovementOutcome { completed_route: false }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("no eligible vehicle for stop `{origin_stop}`")]
pub struct NoEligibleVehicle {
    pub origin_stop: String,
}

/// Elects the vehicle serving `origin_stop` soonest.
///
/// Eligible vehicles are enrolled and idle or near-finish, pass `gate`
/// (the policy and credential checks in protected mode), and can reach the
/// stop. Among those the minimum ETA from the vehicle's nearest stop wins;
/// ties break toward the lexicographically smallest vehicle id.
pub fn elect_vehicle(
    origin_stop: &str,
    fleet: &BTreeMap<String, AvState>,
    graph: &RouteGraph,
    mut gate: impl FnMut(&AvState) -> bool,
) -> Result<(String, u64), NoEligibleVehicle> {
    let mut best: Option<(u64, &str)> = None;
    for (av_id, av) in fleet {
        if av.lifecycle != Lifecycle::Enrolled {
            continue;
        }
        if !matches!(av.route_state, RouteState::Idle | RouteState::NearFinish) {
            continue;
        }
        if !gate(av) {
            continue;
        }
        let Ok(eta) = graph.compute_eta(av.location.nearest_stop(), origin_stop) else {
            continue;
        };
        // Strict comparison keeps the first (smallest id) on ties.
        if best.map_or(true, |(b, _)| eta < b) {
            best = Some((eta, av_id));
        }
    }
    best.map(|(eta, id)| (id.to_string(), eta))
        .ok_or_else(|| NoEligibleVehicle { origin_stop: origin_stop.to_string() })
}
