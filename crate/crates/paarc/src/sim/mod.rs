//! Deterministic discrete-event simulation of the campus transport service.
//!
//! The simulation drives a fleet of autonomous vehicles through enrollment,
//! telemetry, bookings, and withdrawal, in one of two modes: mode A is the
//! unprotected baseline where the control unit records whatever it is told;
//! mode B routes every sensitive action through credential checks and the
//! enforcement pipeline. Identical scenarios produce byte-identical
//! reports.

mod fleet;
mod graph;
mod report;
mod scenario;

pub use fleet::{
    elect_vehicle, AvLocation, AvState, Lifecycle, MovementOutcome, NoEligibleVehicle, RouteState,
    Telemetry,
};
pub use graph::{GraphError, RouteGraph, StopPos};
pub use report::{Assignment, Report, SimEvent, Tallies};
pub use scenario::{
    AvSpec, EdgeSpec, EventAction, GraphSpec, Mode, PkiSpec, Scenario, ScenarioError,
    ScriptedEvent, ServiceSpec, StopSpec,
};

use std::collections::{BTreeMap, VecDeque};

use crate::audit::{AuditDraft, Domain};
use crate::enforce::{AttrPattern, EnforceError, Engine, ServiceRequest, TechnicalRequest};
use crate::pki::{IdentityClaim, Pki, RaVerdict, ValidationStatus};
use crate::policy::{AttrPath, AttrValue, DecisionEffect, RequestContext};
use crate::registry::RegistryError;
use crate::enforce::{PipError, StoreError};

const DEFAULT_VALIDITY_SECONDS: i64 = 3600;
const ENROLLMENT_SERVICE: &str = "enrollment";
const TELEMETRY_SERVICE: &str = "telemetry";
const BOOKING_SERVICE: &str = "booking";
const SERVICE_DATA_REPO: &str = "service-data";
const OBLIGATION_WITHDRAW: &str = "withdraw-av";

#[derive(Debug, thiserror::Error)]
pub enum SimError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error("policy store: {0}")]
    Policy(#[from] StoreError),
    #[error("registry: {0}")]
    Registry(#[from] RegistryError),
    #[error("information point: {0}")]
    Pip(#[from] PipError),
}

/// One running simulation.
pub struct Simulation {
    mode: Mode,
    seed: u64,
    graph: RouteGraph,
    clock: i64,
    fleet: BTreeMap<String, AvState>,
    declared: BTreeMap<String, AvSpec>,
    secrets: BTreeMap<String, String>,
    /// Ground truth: actors whose current enrollment presented the
    /// registered secret.
    legit_enrolled: BTreeMap<String, bool>,
    engine: Engine,
    pki: Pki,
    events: VecDeque<ScriptedEvent>,
    final_tick: i64,
    log: Vec<SimEvent>,
    assignments: Vec<Assignment>,
    tallies: Tallies,
    request_seq: u64,
    check_seq: u64,
    booking_seq: u64,
}

impl Simulation {
    /// Wires a scenario and its policy text into a ready simulation.
    pub fn new(scenario: &Scenario, policy_text: &str) -> Result<Self, SimError> {
        scenario.validate()?;
        let graph = scenario.build_graph()?;

        let mut engine = Engine::new();
        engine.store.load_set(policy_text)?;
        for service in &scenario.services {
            engine.registry.publish(service.to_record())?;
        }
        let mut providers: Vec<String> =
            scenario.services.iter().map(|s| s.provider.clone()).collect();
        providers.sort();
        providers.dedup();
        for provider in providers {
            engine.register_provider(
                &provider,
                Box::new(move |req: &TechnicalRequest| {
                    Ok(format!("ack:{}", req.action).into_bytes())
                }),
            );
        }
        engine
            .pip
            .bind(AttrPattern::parse("subject.enrolled").expect("static pattern"), SERVICE_DATA_REPO)?;
        engine.pip.repository_mut(SERVICE_DATA_REPO);

        let ca_key = hex::decode(&scenario.pki.ca_key).expect("validated hex");
        let mut pki = Pki::new("campus-ca", &ca_key);
        for (subject, secret) in &scenario.pki.secrets {
            pki.register_secret(subject, secret);
        }

        let mut fleet = BTreeMap::new();
        let mut declared = BTreeMap::new();
        for av in &scenario.avs {
            fleet.insert(av.id.clone(), AvState::new(&av.id, &av.start_stop));
            declared.insert(av.id.clone(), av.clone());
        }

        Ok(Simulation {
            mode: scenario.mode,
            seed: scenario.seed,
            graph,
            clock: 0,
            fleet,
            declared,
            secrets: scenario.pki.secrets.clone(),
            legit_enrolled: BTreeMap::new(),
            engine,
            pki,
            events: scenario.events.iter().cloned().collect(),
            final_tick: scenario.final_tick(),
            log: Vec::new(),
            assignments: Vec::new(),
            tallies: Tallies::default(),
            request_seq: 0,
            check_seq: 0,
            booking_seq: 0,
        })
    }

    pub fn clock(&self) -> i64 {
        self.clock
    }

    pub fn fleet(&self) -> &BTreeMap<String, AvState> {
        &self.fleet
    }

    pub fn engine(&self) -> &Engine {
        &self.engine
    }

    pub fn pki(&self) -> &Pki {
        &self.pki
    }

    pub fn tallies(&self) -> Tallies {
        self.tallies
    }

    /// Advances the clock one second: moves running vehicles, applies
    /// deferred withdrawals at route end, then dispatches the scripted
    /// events due at this tick. Returns the log entries this step emitted.
    pub fn step(&mut self) -> Vec<SimEvent> {
        let log_start = self.log.len();
        self.clock += 1;
        self.engine.set_tick(self.clock);

        let av_ids: Vec<String> = self.fleet.keys().cloned().collect();
        for av_id in av_ids {
            let outcome = self.fleet.get_mut(&av_id).expect("known id").step_movement();
            if outcome.completed_route {
                self.engine.audit.append(AuditDraft::new(
                    self.clock,
                    Domain::Device,
                    &av_id,
                    "route.complete",
                    "itinerary finished",
                ));
                self.log_event("route-complete", &av_id, "idle-at-terminus", true);
                if self.fleet[&av_id].pending_withdrawal {
                    self.apply_withdrawal(&av_id);
                    self.log_event("withdraw", &av_id, "withdrawn-at-terminus", true);
                }
            }
        }

        while self.events.front().is_some_and(|e| e.tick <= self.clock) {
            let event = self.events.pop_front().expect("front checked");
            self.dispatch(event.action);
        }

        self.log[log_start..].to_vec()
    }

    /// Runs to the final scripted tick.
    pub fn run(&mut self) {
        while self.clock < self.final_tick {
            self.step();
        }
    }

    pub fn into_report(self) -> Report {
        Report {
            mode: self.mode.as_str().to_string(),
            seed: self.seed,
            final_tick: self.clock,
            log: self.log,
            assignments: self.assignments,
            tallies: self.tallies,
            decision_count: self.engine.decisions_made(),
            audit_record_count: self.engine.audit.len() as u64,
            audit: self.engine.audit.records().to_vec(),
        }
    }

    fn dispatch(&mut self, action: EventAction) {
        match action {
            EventAction::Enroll { av, secret, validity, start_stop } => {
                self.handle_enroll(&av, secret, validity, start_stop)
            }
            EventAction::Withdraw { av } => self.handle_withdraw(&av),
            EventAction::Booking { booking_id, passenger, origin, walk_seconds } => {
                self.handle_booking(booking_id, &passenger, &origin, walk_seconds)
            }
            EventAction::Telemetry { av } => self.handle_telemetry(&av),
            EventAction::RevokeCert { av } => self.handle_revoke_cert(&av),
        }
    }

    fn log_event(&mut self, kind: &str, actor: &str, outcome: &str, legitimate: bool) {
        self.log.push(SimEvent {
            tick: self.clock,
            kind: kind.to_string(),
            actor: actor.to_string(),
            outcome: outcome.to_string(),
            legitimate,
        });
    }

    fn tally(&mut self, accepted: bool, legitimate: bool) {
        let slot = match (accepted, legitimate) {
            (true, true) => &mut self.tallies.accepted_legitimate,
            (true, false) => &mut self.tallies.accepted_illegitimate,
            (false, true) => &mut self.tallies.rejected_legitimate,
            (false, false) => &mut self.tallies.rejected_illegitimate,
        };
        *slot += 1;
    }

    fn next_request(
        &mut self,
        requester: &str,
        service_id: &str,
        action: &str,
        attrs: Vec<(AttrPath, AttrValue)>,
    ) -> ServiceRequest {
        self.request_seq += 1;
        ServiceRequest {
            request_id: format!("req-{:04}", self.request_seq),
            requester: requester.to_string(),
            service_id: service_id.to_string(),
            action: action.to_string(),
            payload: Vec::new(),
            attrs: attrs.into_iter().collect(),
        }
    }

    fn audit(&mut self, domain: Domain, actor: &str, action: &str, detail: &str) {
        self.engine
            .audit
            .append(AuditDraft::new(self.clock, domain, actor, action, detail));
    }

    fn handle_enroll(
        &mut self,
        av_id: &str,
        secret: Option<String>,
        validity: Option<(i64, i64)>,
        start_stop: Option<String>,
    ) {
        let presented = secret
            .or_else(|| self.declared.get(av_id).map(|d| d.secret.clone()))
            .unwrap_or_default();
        let legitimate = self.secrets.get(av_id) == Some(&presented);

        if !self.fleet.contains_key(av_id) {
            let start = start_stop
                .or_else(|| self.declared.get(av_id).map(|d| d.start_stop.clone()))
                .or_else(|| self.graph.stops().next().map(|(id, _)| id.to_string()))
                .unwrap_or_default();
            self.fleet.insert(av_id.to_string(), AvState::new(av_id, &start));
        }
        if self.fleet[av_id].lifecycle == Lifecycle::Enrolled {
            self.log_event("enroll", av_id, "already-enrolled", legitimate);
            self.tally(false, legitimate);
            return;
        }

        self.audit(Domain::Device, av_id, "av.enroll", "enrollment requested");

        match self.mode {
            Mode::A => {
                self.fleet.get_mut(av_id).expect("present").lifecycle = Lifecycle::Enrolled;
                self.legit_enrolled.insert(av_id.to_string(), legitimate);
                self.audit(Domain::Application, "cu", "av.enroll", "recorded entering-av, no checks");
                self.log_event("enroll", av_id, "enrolled", legitimate);
                self.tally(true, legitimate);
            }
            Mode::B => {
                let (not_before, not_after) = validity
                    .unwrap_or((self.clock, self.clock + DEFAULT_VALIDITY_SECONDS));
                let claim = match IdentityClaim::new(av_id, &presented, not_before, not_after) {
                    Ok(c) => c,
                    Err(e) => {
                        self.log_event("enroll", av_id, &format!("rejected:{e}"), legitimate);
                        self.tally(false, legitimate);
                        return;
                    }
                };
                let verdict = match self.pki.ra_verify_identity(&claim) {
                    Ok(RaVerdict::Approved) => RaVerdict::Approved,
                    Ok(RaVerdict::Rejected(reason)) => {
                        self.audit(Domain::Network, "ra", "pki.verify", &format!("rejected: {reason}"));
                        self.log_event("enroll", av_id, &format!("identity-rejected:{reason}"), legitimate);
                        self.tally(false, legitimate);
                        return;
                    }
                    Err(e) => {
                        self.audit(Domain::Network, "ra", "pki.verify", &e.to_string());
                        self.log_event("enroll", av_id, "identity-rejected:unknown-subject", legitimate);
                        self.tally(false, legitimate);
                        return;
                    }
                };
                let cert = self
                    .pki
                    .ca_issue(&claim, &verdict)
                    .expect("approved claims issue");
                self.audit(
                    Domain::Network,
                    "ca",
                    "pki.issue",
                    &format!("serial {} for {}", cert.serial, av_id),
                );
                let valid = self.pki.va_validate(&cert, self.clock) == ValidationStatus::Valid;
                let req = self.next_request(
                    av_id,
                    ENROLLMENT_SERVICE,
                    "av.enroll",
                    cert_attrs(cert.serial, valid),
                );
                match self.engine.enforce(&req) {
                    Ok(result) if result.decision.effect == DecisionEffect::Permit => {
                        let state = self.fleet.get_mut(av_id).expect("present");
                        state.lifecycle = Lifecycle::Enrolled;
                        state.cert = Some(cert);
                        self.legit_enrolled.insert(av_id.to_string(), legitimate);
                        self.set_enrolled_attr(av_id, true);
                        self.log_event("enroll", av_id, "enrolled", legitimate);
                        self.tally(true, legitimate);
                    }
                    Ok(result) => {
                        self.log_event(
                            "enroll",
                            av_id,
                            &format!("enrollment-denied:{}", result.decision.effect),
                            legitimate,
                        );
                        self.tally(false, legitimate);
                    }
                    Err(EnforceError::ServiceNotFound { .. }) => {
                        self.log_event("enroll", av_id, "rejected:service-not-found", legitimate);
                        self.tally(false, legitimate);
                    }
                }
            }
        }
    }

    fn handle_withdraw(&mut self, av_id: &str) {
        let enrolled =
            self.fleet.get(av_id).is_some_and(|av| av.lifecycle == Lifecycle::Enrolled);
        if !enrolled {
            self.log_event("withdraw", av_id, "not-enrolled", true);
            self.tally(false, true);
            return;
        }
        self.audit(Domain::Device, av_id, "av.withdraw", "withdrawal requested");

        if self.mode == Mode::B {
            let attrs = match &self.fleet[av_id].cert {
                Some(cert) => cert_attrs(
                    cert.serial,
                    self.pki.va_validate(cert, self.clock) == ValidationStatus::Valid,
                ),
                None => Vec::new(),
            };
            let req = self.next_request(av_id, ENROLLMENT_SERVICE, "av.withdraw", attrs);
            match self.engine.enforce(&req) {
                Ok(result) if result.decision.effect == DecisionEffect::Permit => {}
                Ok(result) => {
                    self.log_event(
                        "withdraw",
                        av_id,
                        &format!("withdrawal-denied:{}", result.decision.effect),
                        true,
                    );
                    self.tally(false, true);
                    return;
                }
                Err(EnforceError::ServiceNotFound { .. }) => {
                    self.log_event("withdraw", av_id, "rejected:service-not-found", true);
                    self.tally(false, true);
                    return;
                }
            }
        }

        if self.fleet[av_id].route_state == RouteState::Idle {
            self.apply_withdrawal(av_id);
            self.log_event("withdraw", av_id, "withdrawn", true);
        } else {
            // A running vehicle completes its itinerary first.
            self.fleet.get_mut(av_id).expect("present").pending_withdrawal = true;
            self.log_event("withdraw", av_id, "deferred-until-route-end", true);
        }
        self.tally(true, true);
    }

    fn apply_withdrawal(&mut self, av_id: &str) {
        let state = self.fleet.get_mut(av_id).expect("present");
        state.lifecycle = Lifecycle::Withdrawn;
        state.pending_withdrawal = false;
        self.legit_enrolled.remove(av_id);
        if self.mode == Mode::B {
            if let Some(serial) = self.fleet[av_id].cert.as_ref().map(|c| c.serial) {
                if !self.pki.revocation_list().contains(serial) {
                    self.pki.ca_revoke(serial, self.clock).expect("issued serial");
                    self.audit(
                        Domain::Network,
                        "ca",
                        "pki.revoke",
                        &format!("serial {serial} on withdrawal"),
                    );
                }
            }
            self.set_enrolled_attr(av_id, false);
        }
        self.audit(Domain::Application, "cu", "av.withdraw", "recorded leaving-av");
    }

    fn set_enrolled_attr(&mut self, av_id: &str, enrolled: bool) {
        self.engine.pip.repository_mut(SERVICE_DATA_REPO).insert(
            av_id,
            AttrPath::parse("subject.enrolled").expect("static path"),
            AttrValue::Bool(enrolled),
        );
    }

    fn handle_booking(
        &mut self,
        booking_id: Option<String>,
        passenger: &str,
        origin: &str,
        walk_seconds: u64,
    ) {
        self.booking_seq += 1;
        let booking_id = booking_id.unwrap_or_else(|| format!("bk-{:04}", self.booking_seq));
        self.audit(
            Domain::Application,
            passenger,
            "booking.request",
            &format!("{booking_id} to {origin}"),
        );

        let mode = self.mode;
        let clock = self.clock;
        let pki = &self.pki;
        let engine = &mut self.engine;
        let check_seq = &mut self.check_seq;
        let gate = |av: &AvState| -> bool {
            match mode {
                Mode::A => true,
                Mode::B => {
                    let Some(cert) = &av.cert else { return false };
                    if pki.va_validate(cert, clock) != ValidationStatus::Valid {
                        return false;
                    }
                    *check_seq += 1;
                    let req = ServiceRequest {
                        request_id: format!("chk-{:04}", check_seq),
                        requester: av.av_id.clone(),
                        service_id: BOOKING_SERVICE.to_string(),
                        action: "booking.assign".to_string(),
                        payload: Vec::new(),
                        attrs: cert_attrs(cert.serial, true).into_iter().collect(),
                    };
                    engine.decide(&req).decision.effect == DecisionEffect::Permit
                }
            }
        };

        match elect_vehicle(origin, &self.fleet, &self.graph, gate) {
            Ok((av_id, av_eta)) => {
                let from = self.fleet[&av_id].location.nearest_stop().to_string();
                let (_, path) = self.graph.shortest_path(&from, origin).expect("eta implies path");
                self.fleet.get_mut(&av_id).expect("present").assign_itinerary(path, &self.graph);
                self.audit(
                    Domain::Application,
                    "cu",
                    "booking.assign",
                    &format!("{booking_id} -> {av_id} (av eta {av_eta}s, passenger eta {walk_seconds}s)"),
                );
                self.assignments.push(Assignment {
                    booking_id: booking_id.clone(),
                    av_id: Some(av_id.clone()),
                    av_eta: Some(av_eta),
                    passenger_eta: walk_seconds,
                });
                self.log_event("booking", passenger, &format!("assigned:{av_id}"), true);
                self.tally(true, true);
            }
            Err(_) => {
                self.audit(
                    Domain::Application,
                    "cu",
                    "booking.assign",
                    &format!("{booking_id}: no eligible vehicle"),
                );
                self.assignments.push(Assignment {
                    booking_id: booking_id.clone(),
                    av_id: None,
                    av_eta: None,
                    passenger_eta: walk_seconds,
                });
                self.log_event("booking", passenger, "no-vehicle", true);
                self.tally(false, true);
            }
        }
    }

    fn build_telemetry(&self, av_id: &str) -> Telemetry {
        match self.fleet.get(av_id) {
            Some(av) => Telemetry {
                av_id: av_id.to_string(),
                location: av.location.clone(),
                route_paths: av.route().to_vec(),
                service_bulletins: Vec::new(),
                stop_list: av.route().to_vec(),
                route_state: av.route_state,
                tick: self.clock,
            },
            // A sender the control unit has never seen: fabricated content.
            None => Telemetry {
                av_id: av_id.to_string(),
                location: AvLocation::AtStop(
                    self.graph.stops().next().map(|(id, _)| id.to_string()).unwrap_or_default(),
                ),
                route_paths: Vec::new(),
                service_bulletins: Vec::new(),
                stop_list: Vec::new(),
                route_state: RouteState::Idle,
                tick: self.clock,
            },
        }
    }

    fn accept_telemetry(&mut self, telemetry: Telemetry) {
        if let Some(av) = self.fleet.get_mut(&telemetry.av_id) {
            debug_assert!(
                av.last_telemetry.as_ref().map_or(true, |t| t.tick <= telemetry.tick),
                "telemetry ticks are non-decreasing per vehicle"
            );
            av.last_telemetry = Some(telemetry);
        }
    }

    fn handle_telemetry(&mut self, av_id: &str) {
        let legitimate = self.legit_enrolled.get(av_id) == Some(&true);
        self.audit(Domain::Device, av_id, "telemetry.submit", "telemetry submitted");
        let telemetry = self.build_telemetry(av_id);

        match self.mode {
            Mode::A => {
                // The baseline control unit trusts any sender.
                self.accept_telemetry(telemetry);
                self.audit(Domain::Application, "cu", "telemetry.store", "stored, no checks");
                self.log_event("telemetry", av_id, "accepted", legitimate);
                self.tally(true, legitimate);
            }
            Mode::B => {
                let reason = self.telemetry_rejection_reason(av_id);
                if let Some(reason) = reason {
                    self.audit(
                        Domain::Application,
                        "cu",
                        "telemetry.reject",
                        &format!("{av_id}: {reason}"),
                    );
                    self.log_event("telemetry", av_id, &format!("rejected:{reason}"), legitimate);
                    self.tally(false, legitimate);
                    return;
                }
                let serial = self.fleet[av_id].cert.as_ref().expect("checked").serial;
                let req = self.next_request(
                    av_id,
                    TELEMETRY_SERVICE,
                    "telemetry.submit",
                    cert_attrs(serial, true),
                );
                match self.engine.enforce(&req) {
                    Ok(result) if result.decision.effect == DecisionEffect::Permit => {
                        self.accept_telemetry(telemetry);
                        self.log_event("telemetry", av_id, "accepted", legitimate);
                        self.tally(true, legitimate);
                    }
                    Ok(result) => {
                        self.log_event(
                            "telemetry",
                            av_id,
                            &format!("rejected:denied:{}", result.decision.effect),
                            legitimate,
                        );
                        self.tally(false, legitimate);
                    }
                    Err(EnforceError::ServiceNotFound { .. }) => {
                        self.log_event("telemetry", av_id, "rejected:service-not-found", legitimate);
                        self.tally(false, legitimate);
                    }
                }
            }
        }
    }

    fn telemetry_rejection_reason(&self, av_id: &str) -> Option<String> {
        let Some(av) = self.fleet.get(av_id) else {
            return Some("not-enrolled".to_string());
        };
        if av.lifecycle != Lifecycle::Enrolled {
            return Some("not-enrolled".to_string());
        }
        let Some(cert) = &av.cert else {
            return Some("cert-missing".to_string());
        };
        match self.pki.va_validate(cert, self.clock) {
            ValidationStatus::Valid => None,
            ValidationStatus::Expired => Some("cert-expired".to_string()),
            ValidationStatus::NotYetValid => Some("cert-not-yet-valid".to_string()),
            ValidationStatus::Revoked => Some("cert-revoked".to_string()),
            ValidationStatus::BadSignature => Some("cert-bad-signature".to_string()),
            ValidationStatus::UnknownIssuer => Some("cert-unknown-issuer".to_string()),
        }
    }

    fn handle_revoke_cert(&mut self, av_id: &str) {
        if self.mode == Mode::A {
            // No credentials exist in the baseline.
            self.log_event("revoke-cert", av_id, "no-cert", true);
            return;
        }
        let Some(serial) = self.fleet.get(av_id).and_then(|av| av.cert.as_ref()).map(|c| c.serial)
        else {
            self.log_event("revoke-cert", av_id, "no-cert", true);
            return;
        };
        self.pki.ca_revoke(serial, self.clock).expect("issued serial");
        self.audit(Domain::Network, "ca", "pki.revoke", &format!("serial {serial} revoked"));

        let mut attrs = RequestContext::new();
        attrs.bind(
            AttrPath::parse("subject.id").expect("static path"),
            AttrValue::Text(av_id.to_string()),
        );
        attrs.bind(
            AttrPath::parse("subject.cert.revoked").expect("static path"),
            AttrValue::Bool(true),
        );
        attrs.bind(
            AttrPath::parse("subject.cert.serial").expect("static path"),
            AttrValue::Int(serial as i64),
        );
        let obligations = self.engine.trigger_event("cert-revoked", attrs);
        self.log_event("revoke-cert", av_id, "revoked", true);
        for obligation in obligations {
            if obligation == OBLIGATION_WITHDRAW {
                if self.fleet[av_id].lifecycle == Lifecycle::Enrolled {
                    self.fleet.get_mut(av_id).expect("present").clear_route();
                    self.apply_withdrawal(av_id);
                    self.log_event("obligation", av_id, "withdraw-av:applied", true);
                }
            } else {
                self.log_event("obligation", av_id, &format!("{obligation}:unhandled"), true);
            }
        }
    }
}

fn cert_attrs(serial: u64, valid: bool) -> Vec<(AttrPath, AttrValue)> {
    vec![
        (AttrPath::parse("subject.cert.valid").expect("static path"), AttrValue::Bool(valid)),
        (
            AttrPath::parse("subject.cert.serial").expect("static path"),
            AttrValue::Int(serial as i64),
        ),
    ]
}

/// Builds, runs, and reports one scenario.
pub fn run_scenario(scenario: &Scenario, policy_text: &str) -> Result<Report, SimError> {
    let mut sim = Simulation::new(scenario, policy_text)?;
    sim.run();
    Ok(sim.into_report())
}
