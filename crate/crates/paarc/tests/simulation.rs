//! End-to-end runs of the bundled campus scenario in both modes.

use std::fs;
use std::path::PathBuf;

use paarc::policy::DecisionEffect;
use paarc::sim::{run_scenario, EventAction, Lifecycle, Mode, Scenario, Simulation};

fn scenario_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios")
}

fn load(mode: Mode) -> (Scenario, String) {
    let file = match mode {
        Mode::A => "campus-demo-a.json",
        Mode::B => "campus-demo-b.json",
    };
    let scenario_text = fs::read_to_string(scenario_dir().join(file)).unwrap();
    let scenario = Scenario::from_json(&scenario_text).unwrap();
    let policy_text = fs::read_to_string(scenario_dir().join("campus.pol")).unwrap();
    (scenario, policy_text)
}

#[test]
fn baseline_mode_accepts_the_forged_actions() {
    let (scenario, policies) = load(Mode::A);
    let report = run_scenario(&scenario, &policies).unwrap();
    assert_eq!(report.mode, "A");
    assert!(report.tallies.accepted_illegitimate >= 2, "tallies: {:?}", report.tallies);
    assert_eq!(report.tallies.rejected_illegitimate, 0);
    // No decisions happen in the baseline: nothing consults the store.
    assert_eq!(report.decision_count, 0);
}

#[test]
fn protected_mode_rejects_every_forged_action() {
    let (scenario, policies) = load(Mode::B);
    let report = run_scenario(&scenario, &policies).unwrap();
    assert_eq!(report.mode, "B");
    assert_eq!(report.tallies.accepted_illegitimate, 0, "tallies: {:?}", report.tallies);
    assert_eq!(report.tallies.rejected_illegitimate, 2);
    assert!(report.decision_count > 0);
}

#[test]
fn legitimate_vehicle_enrolls_and_serves_the_booking_in_both_modes() {
    for mode in [Mode::A, Mode::B] {
        let (scenario, policies) = load(mode);
        let report = run_scenario(&scenario, &policies).unwrap();
        let assignment = report
            .assignments
            .iter()
            .find(|a| a.booking_id == "bk-rush")
            .expect("booking recorded");
        assert_eq!(assignment.av_id.as_deref(), Some("av-01"), "mode {mode:?}");
        assert_eq!(assignment.av_eta, Some(120));
        assert_eq!(assignment.passenger_eta, 120);
        assert!(report
            .log
            .iter()
            .any(|e| e.kind == "enroll" && e.actor == "av-01" && e.outcome == "enrolled"));
        // The vehicle finished the itinerary during the run.
        assert!(report
            .log
            .iter()
            .any(|e| e.kind == "route-complete" && e.actor == "av-01" && e.tick == 124));
    }
}

#[test]
fn revocation_event_withdraws_the_vehicle_in_protected_mode() {
    let (scenario, policies) = load(Mode::B);
    let mut sim = Simulation::new(&scenario, &policies).unwrap();
    sim.run();
    assert_eq!(sim.fleet()["av-02"].lifecycle, Lifecycle::Withdrawn);
    assert!(sim.pki().revocation_list().iter().count() >= 1);
    let report = sim.into_report();
    assert!(report
        .log
        .iter()
        .any(|e| e.kind == "obligation" && e.actor == "av-02" && e.outcome == "withdraw-av:applied"));

    // Baseline: revocation is meaningless, the vehicle stays enrolled.
    let (scenario_a, policies_a) = load(Mode::A);
    let mut sim_a = Simulation::new(&scenario_a, &policies_a).unwrap();
    sim_a.run();
    assert_eq!(sim_a.fleet()["av-02"].lifecycle, Lifecycle::Enrolled);
}

/// Replays the scripted events against a hand-executed state machine for
/// av-01: enrolled at 1, running from the tick-4 booking, idle again at
/// 124, withdrawn at 140.
#[test]
fn scripted_lifecycle_matches_hand_execution() {
    let (scenario, policies) = load(Mode::B);
    let mut sim = Simulation::new(&scenario, &policies).unwrap();
    let mut observed = Vec::new();
    while sim.clock() < 140 {
        sim.step();
        let av = &sim.fleet()["av-01"];
        observed.push((sim.clock(), av.lifecycle, av.route_state));
    }
    use paarc::sim::RouteState::*;
    let expect = |tick: i64| -> (Lifecycle, paarc::sim::RouteState) {
        match tick {
            t if t < 1 => (Lifecycle::Unenrolled, Idle),
            t if t < 4 => (Lifecycle::Enrolled, Idle),
            // 120 s route assigned at tick 4; near-finish at 60 s remaining.
            t if t < 64 => (Lifecycle::Enrolled, Running),
            t if t < 124 => (Lifecycle::Enrolled, NearFinish),
            t if t < 140 => (Lifecycle::Enrolled, Idle),
            _ => (Lifecycle::Withdrawn, Idle),
        }
    };
    for (tick, lifecycle, route_state) in observed {
        let (want_l, want_r) = expect(tick);
        assert_eq!((lifecycle, route_state), (want_l, want_r), "tick {tick}");
    }
}

#[test]
fn decision_audit_bijection_holds_for_the_demo_run() {
    for mode in [Mode::A, Mode::B] {
        let (scenario, policies) = load(mode);
        let report = run_scenario(&scenario, &policies).unwrap();
        let decision_records = report
            .audit
            .iter()
            .filter(|r| r.decision_effect.is_some())
            .count() as u64;
        assert_eq!(report.decision_count, decision_records, "mode {mode:?}");
        assert_eq!(report.audit_record_count, report.audit.len() as u64);
    }
}

#[test]
fn forged_telemetry_is_accepted_only_by_the_baseline() {
    let (scenario_a, policies) = load(Mode::A);
    let report_a = run_scenario(&scenario_a, &policies).unwrap();
    let forged_a = report_a
        .log
        .iter()
        .find(|e| e.kind == "telemetry" && e.actor == "av-x7")
        .unwrap();
    assert_eq!(forged_a.outcome, "accepted");
    assert!(!forged_a.legitimate);

    let (scenario_b, policies) = load(Mode::B);
    let report_b = run_scenario(&scenario_b, &policies).unwrap();
    let forged_b = report_b
        .log
        .iter()
        .find(|e| e.kind == "telemetry" && e.actor == "av-x7")
        .unwrap();
    assert_eq!(forged_b.outcome, "rejected:not-enrolled");
}

#[test]
fn unauthorized_enrollment_is_recorded_but_blocked_in_protected_mode() {
    let (scenario, policies) = load(Mode::B);
    let report = run_scenario(&scenario, &policies).unwrap();
    let attempt = report
        .log
        .iter()
        .find(|e| e.kind == "enroll" && e.actor == "av-99")
        .unwrap();
    assert_eq!(attempt.outcome, "identity-rejected:unknown-subject");
    assert!(!attempt.legitimate);
}

#[test]
fn baseline_enrollment_touches_no_pki_or_policy_machinery() {
    let (scenario, policies) = load(Mode::A);
    let report = run_scenario(&scenario, &policies).unwrap();
    assert!(report.audit.iter().all(|r| !r.action.starts_with("pki.")));
    assert!(report.audit.iter().all(|r| r.actor != "pdp"));
    assert!(report
        .audit
        .iter()
        .any(|r| r.actor == "cu" && r.action == "av.enroll"));
}

#[test]
fn revoked_certificate_makes_the_only_vehicle_ineligible() {
    let (mut scenario, policies) = load(Mode::B);
    scenario.avs.truncate(1); // av-01 only
    scenario.events = vec![
        paarc::sim::ScriptedEvent {
            tick: 1,
            action: EventAction::Enroll {
                av: "av-01".into(),
                secret: None,
                validity: None,
                start_stop: None,
            },
        },
        paarc::sim::ScriptedEvent {
            tick: 2,
            action: EventAction::RevokeCert { av: "av-01".into() },
        },
        paarc::sim::ScriptedEvent {
            tick: 3,
            action: EventAction::Booking {
                booking_id: Some("bk-1".into()),
                passenger: "p".into(),
                origin: "library".into(),
                walk_seconds: 60,
            },
        },
    ];
    let report = run_scenario(&scenario, &policies).unwrap();
    let assignment = report.assignments.iter().find(|a| a.booking_id == "bk-1").unwrap();
    assert_eq!(assignment.av_id, None);
    assert!(report.log.iter().any(|e| e.kind == "booking" && e.outcome == "no-vehicle"));
}

#[test]
fn empty_fleet_booking_records_a_no_vehicle_outcome() {
    let (mut scenario, policies) = load(Mode::B);
    scenario.events = vec![paarc::sim::ScriptedEvent {
        tick: 1,
        action: EventAction::Booking {
            booking_id: Some("bk-1".into()),
            passenger: "p".into(),
            origin: "gate".into(),
            walk_seconds: 30,
        },
    }];
    let report = run_scenario(&scenario, &policies).unwrap();
    assert_eq!(report.assignments.len(), 1);
    assert_eq!(report.assignments[0].av_id, None);
    assert_eq!(report.assignments[0].passenger_eta, 30);
}

#[test]
fn vehicle_already_at_the_origin_is_assigned_with_zero_eta() {
    let (mut scenario, policies) = load(Mode::B);
    scenario.events = vec![
        paarc::sim::ScriptedEvent {
            tick: 1,
            action: EventAction::Enroll {
                av: "av-01".into(),
                secret: None,
                validity: None,
                start_stop: None,
            },
        },
        paarc::sim::ScriptedEvent {
            tick: 2,
            action: EventAction::Booking {
                booking_id: Some("bk-1".into()),
                passenger: "p".into(),
                origin: "gate".into(), // av-01 starts at gate
                walk_seconds: 45,
            },
        },
    ];
    let report = run_scenario(&scenario, &policies).unwrap();
    let assignment = report.assignments.iter().find(|a| a.booking_id == "bk-1").unwrap();
    assert_eq!(assignment.av_id.as_deref(), Some("av-01"));
    assert_eq!(assignment.av_eta, Some(0));
}

#[test]
fn identical_runs_produce_byte_identical_reports() {
    for mode in [Mode::A, Mode::B] {
        let (scenario, policies) = load(mode);
        let a = run_scenario(&scenario, &policies).unwrap().to_json_bytes();
        let b = run_scenario(&scenario, &policies).unwrap().to_json_bytes();
        assert_eq!(a, b, "mode {mode:?}");
    }
}

#[test]
fn expired_certificate_blocks_telemetry() {
    let (mut scenario, policies) = load(Mode::B);
    // Enroll with a one-second validity window, then report later.
    scenario.events = vec![
        paarc::sim::ScriptedEvent {
            tick: 1,
            action: EventAction::Enroll {
                av: "av-01".into(),
                secret: None,
                validity: Some((1, 2)),
                start_stop: None,
            },
        },
        paarc::sim::ScriptedEvent {
            tick: 10,
            action: EventAction::Telemetry { av: "av-01".into() },
        },
    ];
    let report = run_scenario(&scenario, &policies).unwrap();
    let entry = report
        .log
        .iter()
        .find(|e| e.kind == "telemetry" && e.actor == "av-01")
        .unwrap();
    assert_eq!(entry.outcome, "rejected:cert-expired");
    // The decision point never saw the request: the credential gate is first.
    assert_eq!(
        report
            .audit
            .iter()
            .filter(|r| r.decision_effect == Some(DecisionEffect::Permit)
                && r.action == "telemetry.submit")
            .count(),
        0
    );
}

#[test]
fn withdrawal_of_a_running_vehicle_waits_for_route_end() {
    let (mut scenario, policies) = load(Mode::B);
    scenario.events = vec![
        paarc::sim::ScriptedEvent {
            tick: 1,
            action: EventAction::Enroll {
                av: "av-01".into(),
                secret: None,
                validity: None,
                start_stop: None,
            },
        },
        paarc::sim::ScriptedEvent {
            tick: 2,
            action: EventAction::Booking {
                booking_id: Some("bk-1".into()),
                passenger: "p".into(),
                origin: "library".into(),
                walk_seconds: 60,
            },
        },
        // The vehicle is mid-route here.
        paarc::sim::ScriptedEvent {
            tick: 10,
            action: EventAction::Withdraw { av: "av-01".into() },
        },
        // Route completes at tick 122; give the run room to get there.
        paarc::sim::ScriptedEvent {
            tick: 150,
            action: EventAction::Telemetry { av: "av-02".into() },
        },
    ];
    let mut sim = Simulation::new(&scenario, &policies).unwrap();
    while sim.clock() < 121 {
        sim.step();
    }
    assert_eq!(sim.fleet()["av-01"].lifecycle, Lifecycle::Enrolled);
    assert!(sim.fleet()["av-01"].pending_withdrawal);
    sim.run();
    assert_eq!(sim.fleet()["av-01"].lifecycle, Lifecycle::Withdrawn);
    let report = sim.into_report();
    assert!(report.log.iter().any(|e| e.outcome == "deferred-until-route-end"));
    assert!(report
        .log
        .iter()
        .any(|e| e.kind == "withdraw" && e.outcome == "withdrawn-at-terminus" && e.tick == 122));
}
