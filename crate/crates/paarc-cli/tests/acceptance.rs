//! Acceptance suite. Each test prints one pass/fail line (visible with
//! `cargo test -p paarc-cli --test acceptance -- --nocapture`).

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use paarc::audit::AuditRecord;
use paarc::enforce::{
    evaluation_context, pdp_decide, AttrPattern, EnforceError, Engine, Pip, PolicyStore,
    ServiceRequest, TechnicalRequest, TraceOutcome,
};
use paarc::pki::{Certificate, IdentityClaim, Pki, RaVerdict, ValidationStatus};
use paarc::policy::{
    combine_decisions, evaluate_policy, AttrPath, AttrValue, CmpOp, CombiningAlg, Condition,
    Decision, DecisionEffect, Effect, Expr, Policy, RequestContext, Rule,
};
use paarc::registry::ServiceRecord;
use paarc::sim::{elect_vehicle, run_scenario, AvState, Lifecycle, RouteGraph, Scenario, StopPos};

fn check(number: u32, name: &str, run: impl FnOnce() -> Result<String, String>) {
    match run() {
        Ok(detail) => println!("acceptance {number} ({name}): PASS — {detail}"),
        Err(reason) => {
            println!("acceptance {number} ({name}): FAIL — {reason}");
            panic!("acceptance criterion {number} failed: {reason}");
        }
    }
}

fn scenario_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios")
}

fn path(s: &str) -> AttrPath {
    AttrPath::parse(s).unwrap()
}

fn under(elapsed: Duration, limit_ms: u64, what: &str) -> Result<(), String> {
    if elapsed.as_millis() as u64 > limit_ms {
        return Err(format!("{what} took {elapsed:?}, limit {limit_ms} ms"));
    }
    Ok(())
}

const ACTIONS: [&str; 4] = ["go", "stop", "report", "assign"];

fn random_policy(rng: &mut ChaCha8Rng, id: &str) -> Policy {
    let n_rules = rng.gen_range(1..=3);
    let mut rules = Vec::new();
    for _ in 0..n_rules {
        let effect = if rng.gen_bool(0.5) { Effect::Permit } else { Effect::Deny };
        let expr = match rng.gen_range(0..3) {
            0 => Expr::compare(
                CmpOp::Eq,
                path("action.name"),
                AttrValue::Text(ACTIONS[rng.gen_range(0..ACTIONS.len())].to_string()),
            ),
            1 => Expr::compare(CmpOp::Eq, path("subject.flag"), AttrValue::Bool(rng.gen())),
            _ => Expr::Present(path("subject.flag")),
        };
        rules.push(Rule::when(effect, expr));
    }
    if rng.gen_bool(0.25) {
        let effect = if rng.gen_bool(0.5) { Effect::Permit } else { Effect::Deny };
        rules.push(Rule::otherwise(effect));
    }
    let alg = match rng.gen_range(0..3) {
        0 => CombiningAlg::DenyOverrides,
        1 => CombiningAlg::PermitOverrides,
        _ => CombiningAlg::FirstApplicable,
    };
    Policy::new(id, None, alg, rules).unwrap()
}

fn random_request(rng: &mut ChaCha8Rng, n: u32, service_id: &str) -> ServiceRequest {
    let mut attrs = RequestContext::new();
    if rng.gen_bool(0.5) {
        attrs.bind(path("subject.flag"), AttrValue::Bool(rng.gen()));
    }
    ServiceRequest {
        request_id: format!("acc-{n:04}"),
        requester: format!("actor-{}", rng.gen_range(0..4)),
        service_id: service_id.to_string(),
        action: ACTIONS[rng.gen_range(0..ACTIONS.len())].to_string(),
        payload: Vec::new(),
        attrs,
    }
}

/// 1. Every enforcement trace over a randomized corpus matches the
/// canonical sequence, with provider events present iff the decision was
/// a permit.
#[test]
fn acceptance_01_trace_conformance() {
    check(1, "fig-1 trace conformance", || {
        let started = Instant::now();
        let mut rng = ChaCha8Rng::seed_from_u64(101);
        let mut engine = Engine::new();
        for i in 0..4 {
            engine.store.put(random_policy(&mut rng, &format!("p{i}")));
        }
        for svc in ["svc0", "svc1", "svc2", "svc3"] {
            engine.registry.publish(ServiceRecord::new(svc, "prov")).unwrap();
        }
        engine.registry.invalidate("svc3").unwrap();
        engine.register_provider("prov", Box::new(|_: &TechnicalRequest| Ok(b"ok".to_vec())));

        let services = ["svc0", "svc1", "svc2", "svc3", "ghost"];
        let mut checked = 0;
        let mut permits = 0;
        for n in 0..80 {
            let service = services[rng.gen_range(0..services.len())];
            let req = random_request(&mut rng, n, service);
            match engine.enforce(&req) {
                Ok(result) => {
                    let permit = result.decision.effect == DecisionEffect::Permit;
                    permits += u32::from(permit);
                    result
                        .trace
                        .check_canonical(TraceOutcome::Decided { permit })
                        .map_err(|e| format!("request {n}: {e}"))?;
                    if !result.invariants_hold() {
                        return Err(format!("request {n}: outcome/permit invariant broken"));
                    }
                }
                Err(EnforceError::ServiceNotFound { trace, .. }) => {
                    trace
                        .check_canonical(TraceOutcome::NotFound)
                        .map_err(|e| format!("request {n}: {e}"))?;
                }
            }
            checked += 1;
        }
        let elapsed = started.elapsed();
        under(elapsed, 1000, "corpus")?;
        if checked < 50 {
            return Err(format!("only {checked} requests in corpus"));
        }
        Ok(format!("{checked} requests ({permits} permits), 0 violations, {elapsed:?}"))
    });
}

/// 2. Whenever phase 1 already denies, the information point is never
/// consulted.
#[test]
fn acceptance_02_pip_skip_law() {
    check(2, "pip-skip law", || {
        let mut rng = ChaCha8Rng::seed_from_u64(202);
        let mut deny_cases = 0;
        let mut trials = 0;
        for n in 0..600 {
            let store = PolicyStore::new();
            for i in 0..rng.gen_range(1..=3) {
                store.put(random_policy(&mut rng, &format!("p{i}")));
            }
            let mut pip = Pip::new();
            pip.bind(AttrPattern::parse("subject.flag").unwrap(), "repo").unwrap();
            let req = random_request(&mut rng, n, "svc");
            pip.repository_mut("repo").insert(
                &req.requester,
                path("subject.flag"),
                AttrValue::Bool(true),
            );

            let snapshot = store.snapshot();
            // Phase-1 effect computed independently of pdp_decide: evaluate
            // over the carried attributes only and fold with deny-overrides.
            let ctx = evaluation_context(&req);
            let phase1: Vec<Decision> =
                snapshot.policies().iter().map(|p| evaluate_policy(p, &ctx)).collect();
            let phase1 = combine_decisions(&phase1, CombiningAlg::DenyOverrides);
            trials += 1;
            if phase1.effect != DecisionEffect::Deny {
                continue;
            }
            deny_cases += 1;
            let report = pdp_decide(&req, &snapshot, &pip);
            if report.pip_calls != 0 {
                return Err(format!(
                    "trial {n}: phase-1 deny but {} pip call(s)",
                    report.pip_calls
                ));
            }
            if report.decision.effect != DecisionEffect::Deny {
                return Err(format!("trial {n}: phase-1 deny not returned"));
            }
        }
        if deny_cases < 100 {
            return Err(format!("only {deny_cases} phase-1 deny cases in {trials} trials"));
        }
        Ok(format!("{deny_cases} phase-1 deny cases out of {trials} trials, all with 0 pip calls"))
    });
}

/// 3. The canonical attack scenario: the baseline accepts the forged
/// actions, the protected mode accepts none, and the legitimate vehicle
/// serves its booking either way.
#[test]
fn acceptance_03_case_contrast() {
    check(3, "case A vs case B contrast", || {
        let started = Instant::now();
        let policies = std::fs::read_to_string(scenario_dir().join("campus.pol"))
            .map_err(|e| e.to_string())?;
        let mut summaries = Vec::new();
        for (file, mode) in [("campus-demo-a.json", "A"), ("campus-demo-b.json", "B")] {
            let text = std::fs::read_to_string(scenario_dir().join(file))
                .map_err(|e| e.to_string())?;
            let scenario = Scenario::from_json(&text).map_err(|e| e.to_string())?;
            let report = run_scenario(&scenario, &policies).map_err(|e| e.to_string())?;
            let again = run_scenario(&scenario, &policies).map_err(|e| e.to_string())?;
            if report.to_json_bytes() != again.to_json_bytes() {
                return Err(format!("mode {mode}: run is not deterministic"));
            }
            let t = report.tallies;
            match mode {
                "A" if t.accepted_illegitimate < 2 => {
                    return Err(format!("mode A accepted only {} illegitimate", t.accepted_illegitimate));
                }
                "B" if t.accepted_illegitimate != 0 => {
                    return Err(format!("mode B accepted {} illegitimate", t.accepted_illegitimate));
                }
                _ => {}
            }
            let enrolled = report
                .log
                .iter()
                .any(|e| e.kind == "enroll" && e.actor == "av-01" && e.outcome == "enrolled");
            let served = report
                .assignments
                .iter()
                .any(|a| a.booking_id == "bk-rush" && a.av_id.as_deref() == Some("av-01"));
            if !enrolled || !served {
                return Err(format!("mode {mode}: legitimate vehicle not enrolled+serving"));
            }
            summaries.push(format!("mode {mode} illegitimate-accepted={}", t.accepted_illegitimate));
        }
        let elapsed = started.elapsed();
        under(elapsed, 1000, "both runs")?;
        Ok(format!("{}, {elapsed:?}", summaries.join(", ")))
    });
}

// Condition in the combining-oracle family: one of four boolean attributes
// compared to true, or the unconditional fallback.
#[derive(Clone, Copy, PartialEq)]
enum OCond {
    Attr(usize),
    Otherwise,
}

#[derive(Clone, Copy, PartialEq)]
struct ORule {
    permit: bool,
    cond: OCond,
}

#[derive(Clone)]
struct OPolicy {
    alg: CombiningAlg,
    rules: Vec<ORule>,
}

#[derive(Clone, Copy, PartialEq, Debug)]
enum OEffect {
    Permit,
    Deny,
    NotApplicable,
    Indeterminate,
}

fn oracle_policy(policy: &OPolicy, slots: &[Option<bool>; 4]) -> (OEffect, BTreeSet<usize>) {
    #[derive(Clone, Copy, PartialEq)]
    enum RO {
        App,
        Na,
        Ind(usize),
    }
    let outcomes: Vec<(bool, RO)> = policy
        .rules
        .iter()
        .map(|r| {
            let ro = match r.cond {
                OCond::Otherwise => RO::App,
                OCond::Attr(i) => match slots[i] {
                    Some(true) => RO::App,
                    Some(false) => RO::Na,
                    None => RO::Ind(i),
                },
            };
            (r.permit, ro)
        })
        .collect();
    let missing: BTreeSet<usize> = outcomes
        .iter()
        .filter_map(|(_, ro)| match ro {
            RO::Ind(i) => Some(*i),
            _ => None,
        })
        .collect();
    let applicable = |want_permit: bool| {
        outcomes.iter().any(|(permit, ro)| *ro == RO::App && *permit == want_permit)
    };
    match policy.alg {
        CombiningAlg::DenyOverrides => {
            if applicable(false) {
                (OEffect::Deny, BTreeSet::new())
            } else if !missing.is_empty() {
                (OEffect::Indeterminate, missing)
            } else if applicable(true) {
                (OEffect::Permit, BTreeSet::new())
            } else {
                (OEffect::NotApplicable, BTreeSet::new())
            }
        }
        CombiningAlg::PermitOverrides => {
            if applicable(true) {
                (OEffect::Permit, BTreeSet::new())
            } else if !missing.is_empty() {
                (OEffect::Indeterminate, missing)
            } else if applicable(false) {
                (OEffect::Deny, BTreeSet::new())
            } else {
                (OEffect::NotApplicable, BTreeSet::new())
            }
        }
        CombiningAlg::FirstApplicable => {
            for (permit, ro) in &outcomes {
                match ro {
                    RO::App => {
                        return (
                            if *permit { OEffect::Permit } else { OEffect::Deny },
                            BTreeSet::new(),
                        )
                    }
                    RO::Ind(i) => {
                        return (OEffect::Indeterminate, BTreeSet::from([*i]));
                    }
                    RO::Na => {}
                }
            }
            (OEffect::NotApplicable, BTreeSet::new())
        }
    }
}

fn oracle_fold(per_policy: &[(OEffect, BTreeSet<usize>)]) -> (OEffect, BTreeSet<usize>) {
    if per_policy.iter().any(|(e, _)| *e == OEffect::Deny) {
        return (OEffect::Deny, BTreeSet::new());
    }
    let missing: BTreeSet<usize> = per_policy
        .iter()
        .filter(|(e, _)| *e == OEffect::Indeterminate)
        .flat_map(|(_, m)| m.iter().copied())
        .collect();
    if !missing.is_empty() {
        return (OEffect::Indeterminate, missing);
    }
    if per_policy.iter().any(|(e, _)| *e == OEffect::Permit) {
        return (OEffect::Permit, BTreeSet::new());
    }
    (OEffect::NotApplicable, BTreeSet::new())
}

fn to_effect(e: DecisionEffect) -> OEffect {
    match e {
        DecisionEffect::Permit => OEffect::Permit,
        DecisionEffect::Deny => OEffect::Deny,
        DecisionEffect::NotApplicable => OEffect::NotApplicable,
        DecisionEffect::Indeterminate => OEffect::Indeterminate,
    }
}

fn missing_set(d: &Decision) -> BTreeSet<usize> {
    d.missing
        .iter()
        .map(|p| {
            let name = p.name();
            name.strip_prefix('a').unwrap().parse::<usize>().unwrap()
        })
        .collect()
}

/// 4. Exhaustive agreement between evaluate/combine and a brute-force fold
/// oracle over a stratified family: every policy of up to 3 rules over 4
/// boolean attributes under all 3 algorithms, in sets of up to 3 policies,
/// against all 81 contexts (each attribute absent, false, or true).
#[test]
fn acceptance_04_combining_algebra_oracle() {
    check(4, "combining-algebra oracle", || {
        let started = Instant::now();

        let mut rule_pool: Vec<ORule> = Vec::new();
        for permit in [true, false] {
            for cond in [OCond::Attr(0), OCond::Attr(1), OCond::Attr(2), OCond::Attr(3)] {
                rule_pool.push(ORule { permit, cond });
            }
        }
        let otherwise_pool =
            [ORule { permit: true, cond: OCond::Otherwise }, ORule { permit: false, cond: OCond::Otherwise }];
        let tail_pool: Vec<ORule> =
            rule_pool.iter().copied().chain(otherwise_pool).collect(); // 10, otherwise allowed last

        // Rule lists of length 1..=3 (otherwise only in last position).
        let mut lists: Vec<Vec<ORule>> = Vec::new();
        for last in &tail_pool {
            lists.push(vec![*last]);
        }
        for first in &rule_pool {
            for last in &tail_pool {
                lists.push(vec![*first, *last]);
            }
        }
        for first in &rule_pool {
            for second in &rule_pool {
                for last in &tail_pool {
                    lists.push(vec![*first, *second, *last]);
                }
            }
        }

        let algs =
            [CombiningAlg::DenyOverrides, CombiningAlg::PermitOverrides, CombiningAlg::FirstApplicable];
        let mut specs: Vec<OPolicy> = Vec::new();
        for rules in &lists {
            for alg in algs {
                specs.push(OPolicy { alg, rules: rules.clone() });
            }
        }
        let single_rule: Vec<usize> =
            (0..specs.len()).filter(|&i| specs[i].rules.len() == 1).collect();

        // Real policies mirroring the specs.
        let build = |spec: &OPolicy, id: &str| -> Policy {
            let rules = spec
                .rules
                .iter()
                .map(|r| {
                    let effect = if r.permit { Effect::Permit } else { Effect::Deny };
                    match r.cond {
                        OCond::Otherwise => Rule::otherwise(effect),
                        OCond::Attr(i) => Rule::when(
                            effect,
                            Expr::compare(
                                CmpOp::Eq,
                                path(&format!("subject.a{i}")),
                                AttrValue::Bool(true),
                            ),
                        ),
                    }
                })
                .collect();
            Policy::new(id, None, spec.alg, rules).unwrap()
        };
        let policies: Vec<Policy> =
            specs.iter().enumerate().map(|(i, s)| build(s, &format!("p{i}"))).collect();

        // All 81 contexts.
        let mut contexts: Vec<([Option<bool>; 4], RequestContext)> = Vec::new();
        for mask in 0..81u32 {
            let mut slots = [None; 4];
            let mut ctx = RequestContext::new();
            let mut m = mask;
            for (i, slot) in slots.iter_mut().enumerate() {
                *slot = match m % 3 {
                    0 => None,
                    1 => Some(false),
                    _ => Some(true),
                };
                m /= 3;
                if let Some(b) = *slot {
                    ctx.bind(path(&format!("subject.a{i}")), AttrValue::Bool(b));
                }
            }
            contexts.push((slots, ctx));
        }

        // Strata: singletons over the full family; pairs of full × single-rule;
        // triples of single-rule policies.
        let mut sets: Vec<Vec<usize>> = Vec::new();
        for i in 0..specs.len() {
            sets.push(vec![i]);
        }
        for i in 0..specs.len() {
            for &j in &single_rule {
                sets.push(vec![i, j]);
            }
        }
        for &i in &single_rule {
            for &j in &single_rule {
                for &k in &single_rule {
                    sets.push(vec![i, j, k]);
                }
            }
        }

        let mut comparisons: u64 = 0;
        for set in &sets {
            for (slots, ctx) in &contexts {
                let mut impl_decisions = Vec::with_capacity(set.len());
                let mut oracle_decisions = Vec::with_capacity(set.len());
                for &idx in set {
                    let got = evaluate_policy(&policies[idx], ctx);
                    let want = oracle_policy(&specs[idx], slots);
                    if to_effect(got.effect) != want.0 || missing_set(&got) != want.1 {
                        return Err(format!(
                            "policy {idx} under {slots:?}: got {:?}, oracle {:?}",
                            got.effect, want.0
                        ));
                    }
                    impl_decisions.push(got);
                    oracle_decisions.push(want);
                    comparisons += 1;
                }
                let combined = combine_decisions(&impl_decisions, CombiningAlg::DenyOverrides);
                let want = oracle_fold(&oracle_decisions);
                if to_effect(combined.effect) != want.0 || missing_set(&combined) != want.1 {
                    return Err(format!(
                        "set {set:?} under {slots:?}: combined {:?}, oracle {:?}",
                        combined.effect, want.0
                    ));
                }
                comparisons += 1;
            }
        }

        let elapsed = started.elapsed();
        under(elapsed, 30_000, "enumeration")?;
        Ok(format!(
            "{} policies, {} sets x 81 contexts, {comparisons} comparisons agree, {elapsed:?}",
            specs.len(),
            sets.len()
        ))
    });
}

/// 5. 500 certificates: every single-field mutation flips validation to
/// BadSignature; every untampered certificate validates inside its window.
#[test]
fn acceptance_05_pki_tamper_suite() {
    check(5, "pki tamper suite", || {
        let started = Instant::now();
        let mut rng = ChaCha8Rng::seed_from_u64(505);
        let mut pki = Pki::new("main-ca", b"acceptance-key-1");
        pki.trust_issuer("alt-ca", b"acceptance-key-2");

        let mut certs: Vec<Certificate> = Vec::new();
        for i in 0..500 {
            let subject = format!("av-{i:03}");
            pki.register_secret(&subject, "secret");
            let start: i64 = rng.gen_range(0..10_000);
            let len: i64 = rng.gen_range(1..5_000);
            let claim = IdentityClaim::new(&subject, "secret", start, start + len).unwrap();
            let verdict = pki.ra_verify_identity(&claim).unwrap();
            if verdict != RaVerdict::Approved {
                return Err(format!("claim {i} unexpectedly rejected"));
            }
            certs.push(pki.ca_issue(&claim, &verdict).unwrap());
        }

        let mut mutations = 0;
        for (i, cert) in certs.iter().enumerate() {
            let inside = cert.not_before + (cert.not_after - cert.not_before) / 2;
            if pki.va_validate(cert, inside) != ValidationStatus::Valid {
                return Err(format!("cert {i} does not validate untampered"));
            }
            let tampered: Vec<(&str, Certificate)> = vec![
                ("serial", Certificate { serial: cert.serial + 10_000, ..cert.clone() }),
                ("subject", Certificate { subject: format!("{}x", cert.subject), ..cert.clone() }),
                ("issuer", Certificate { issuer: "alt-ca".into(), ..cert.clone() }),
                ("not_before", Certificate { not_before: cert.not_before - 1, ..cert.clone() }),
                ("not_after", Certificate { not_after: cert.not_after + 1, ..cert.clone() }),
                (
                    "key_fingerprint",
                    Certificate { key_fingerprint: "deadbeef".into(), ..cert.clone() },
                ),
                ("signature", Certificate { signature: "0".repeat(64), ..cert.clone() }),
            ];
            for (field, bad) in tampered {
                if pki.va_validate(&bad, inside) != ValidationStatus::BadSignature {
                    return Err(format!("cert {i}: mutated {field} not detected"));
                }
                mutations += 1;
            }
        }
        let elapsed = started.elapsed();
        Ok(format!("500 certs valid untampered, {mutations} mutations all detected, {elapsed:?}"))
    });
}

/// Exhaustive simple-path enumeration, the route-time oracle.
fn brute_force_eta(g: &RouteGraph, from: &str, to: &str) -> Option<u64> {
    fn walk(
        g: &RouteGraph,
        at: &str,
        to: &str,
        seen: &mut Vec<String>,
        cost: u64,
        best: &mut Option<u64>,
    ) {
        if at == to {
            *best = Some(best.map_or(cost, |b: u64| b.min(cost)));
            return;
        }
        let nexts: Vec<(String, u32)> = g
            .edges()
            .filter(|(f, _, _)| *f == at)
            .map(|(_, t, w)| (t.to_string(), w))
            .collect();
        for (next, w) in nexts {
            if !seen.iter().any(|s| s == &next) {
                seen.push(next.clone());
                walk(g, &next, to, seen, cost + u64::from(w), best);
                seen.pop();
            }
        }
    }
    let mut best = None;
    let mut seen = vec![from.to_string()];
    walk(g, from, to, &mut seen, 0, &mut best);
    best
}

fn random_graph(rng: &mut ChaCha8Rng, max_stops: usize) -> (RouteGraph, Vec<String>) {
    let n = rng.gen_range(2..=max_stops);
    let ids: Vec<String> = (0..n).map(|i| format!("s{i}")).collect();
    let mut g = RouteGraph::new();
    for id in &ids {
        g.add_stop(id, StopPos { x: rng.gen_range(0..500), y: rng.gen_range(0..500) }).unwrap();
    }
    for a in 0..n {
        for b in 0..n {
            if a != b && rng.gen_bool(0.4) {
                g.add_edge(&ids[a], &ids[b], rng.gen_range(1..300)).unwrap();
            }
        }
    }
    (g, ids)
}

/// 6. Shortest travel time equals brute-force simple-path enumeration on
/// 1,000 random graphs of at most 7 stops.
#[test]
fn acceptance_06_eta_oracle() {
    check(6, "eta oracle", || {
        let started = Instant::now();
        let mut rng = ChaCha8Rng::seed_from_u64(606);
        let mut agreements = 0;
        for n in 0..1000 {
            let (g, ids) = random_graph(&mut rng, 7);
            let from = &ids[rng.gen_range(0..ids.len())];
            let to = &ids[rng.gen_range(0..ids.len())];
            let got = g.compute_eta(from, to).ok();
            let want = brute_force_eta(&g, from, to);
            if got != want {
                return Err(format!("graph {n}: {from}->{to} got {got:?}, oracle {want:?}"));
            }
            agreements += 1;
        }
        let elapsed = started.elapsed();
        under(elapsed, 10_000, "1000 graphs")?;
        Ok(format!("{agreements}/1000 graphs agree, {elapsed:?}"))
    });
}

/// 7. Scaling all edge weights by k in {2, 5, 10} preserves the elected
/// vehicle on 200 random fleets.
#[test]
fn acceptance_07_election_invariance() {
    check(7, "election scale invariance", || {
        let started = Instant::now();
        let mut rng = ChaCha8Rng::seed_from_u64(707);
        let mut preserved = 0;
        for n in 0..200 {
            // Build one random topology, then rebuild it per scale factor.
            let seed: u64 = rng.gen();
            let build = |scale: u32| {
                let mut graph_rng = ChaCha8Rng::seed_from_u64(seed);
                let n_stops = graph_rng.gen_range(3..=6);
                let ids: Vec<String> = (0..n_stops).map(|i| format!("s{i}")).collect();
                let mut g = RouteGraph::new();
                for id in &ids {
                    g.add_stop(id, StopPos { x: 0, y: 0 }).unwrap();
                }
                for a in 0..n_stops {
                    for b in 0..n_stops {
                        if a != b && graph_rng.gen_bool(0.5) {
                            let w: u32 = graph_rng.gen_range(1..200);
                            g.add_edge(&ids[a], &ids[b], w * scale).unwrap();
                        }
                    }
                }
                (g, ids)
            };
            let (g1, ids) = build(1);
            let mut fleet = BTreeMap::new();
            for i in 0..rng.gen_range(1..=5) {
                let id = format!("av-{i:02}");
                let mut av = AvState::new(&id, &ids[rng.gen_range(0..ids.len())]);
                av.lifecycle = Lifecycle::Enrolled;
                fleet.insert(id, av);
            }
            let origin = &ids[rng.gen_range(0..ids.len())];
            let base = elect_vehicle(origin, &fleet, &g1, |_| true);
            for k in [2u32, 5, 10] {
                let (gk, _) = build(k);
                let scaled = elect_vehicle(origin, &fleet, &gk, |_| true);
                match (&base, &scaled) {
                    (Ok((a, ea)), Ok((b, eb))) => {
                        if a != b || ea * u64::from(k) != *eb {
                            return Err(format!(
                                "fleet {n} scale {k}: {a} (eta {ea}) became {b} (eta {eb})"
                            ));
                        }
                    }
                    (Err(_), Err(_)) => {}
                    _ => return Err(format!("fleet {n} scale {k}: eligibility diverged")),
                }
            }
            preserved += 1;
        }
        let elapsed = started.elapsed();
        Ok(format!("{preserved}/200 fleets preserved under k in {{2,5,10}}, {elapsed:?}"))
    });
}

/// 8. 100 store updates interleaved with 1,000 decisions complete without
/// errors, every decision against a snapshot version inside the caller's
/// observed window.
#[test]
fn acceptance_08_runtime_policy_hot_swap() {
    check(8, "runtime policy hot-swap", || {
        let started = Instant::now();
        let store = Arc::new(PolicyStore::new());
        store
            .load_set(r#"policy "base" { rule permit when action.name == "go" }"#)
            .map_err(|e| e.to_string())?;
        let base_version = store.version();
        let pip = Pip::new();

        let errors = std::sync::Mutex::new(Vec::<String>::new());
        std::thread::scope(|scope| {
            let writer_store = Arc::clone(&store);
            scope.spawn(move || {
                for i in 0..100u32 {
                    if i % 3 == 2 {
                        // Remove a policy this writer added earlier.
                        writer_store.remove(&format!("hot-{}", i - 1)).expect("own id");
                    } else {
                        let effect = if i % 2 == 0 { "deny" } else { "permit" };
                        let text = format!(
                            "policy \"hot-{i}\" {{ rule {effect} when action.name == \"go\" }}"
                        );
                        writer_store.load_set(&text).expect("valid policy");
                    }
                }
            });

            for reader in 0..2 {
                let reader_store = Arc::clone(&store);
                let pip = &pip;
                let errors = &errors;
                scope.spawn(move || {
                    let mut archived = Vec::new();
                    for n in 0..500u32 {
                        let req = ServiceRequest {
                            request_id: format!("hot-{reader}-{n}"),
                            requester: "actor".into(),
                            service_id: "svc".into(),
                            action: "go".into(),
                            payload: Vec::new(),
                            attrs: RequestContext::new(),
                        };
                        let version_before = reader_store.version();
                        let snapshot = reader_store.snapshot();
                        let report = pdp_decide(&req, &snapshot, pip);
                        let version_after = reader_store.version();
                        if report.snapshot_version < version_before
                            || report.snapshot_version > version_after
                        {
                            errors.lock().unwrap().push(format!(
                                "decision used v{} outside [{version_before}, {version_after}]",
                                report.snapshot_version
                            ));
                        }
                        if !report.decision.is_consistent() {
                            errors.lock().unwrap().push("inconsistent decision".into());
                        }
                        archived.push((snapshot, req, report));
                    }
                    // Replays against the archived snapshots reproduce every
                    // decision exactly.
                    for (snapshot, req, report) in &archived {
                        let replay = pdp_decide(req, snapshot, pip);
                        if replay != *report {
                            errors.lock().unwrap().push("replay diverged from decision".into());
                        }
                    }
                });
            }
        });

        let errors = errors.into_inner().unwrap();
        if !errors.is_empty() {
            return Err(format!("{} error(s); first: {}", errors.len(), errors[0]));
        }
        if store.version() != base_version + 100 {
            return Err(format!(
                "expected {} mutations, version is {}",
                100,
                store.version()
            ));
        }
        let elapsed = started.elapsed();
        Ok(format!(
            "100 updates + 1000 decisions, 0 errors, all versions in window, {elapsed:?}"
        ))
    });
}

/// 9. In every scenario run, decisions and decision-bearing audit records
/// are in bijection, and each request id reconstructs its full path.
#[test]
fn acceptance_09_audit_bijection() {
    check(9, "audit bijection and traceability", || {
        let policies = std::fs::read_to_string(scenario_dir().join("campus.pol"))
            .map_err(|e| e.to_string())?;
        let mut traced_requests = 0;
        for file in ["campus-demo-a.json", "campus-demo-b.json"] {
            let text = std::fs::read_to_string(scenario_dir().join(file))
                .map_err(|e| e.to_string())?;
            let scenario = Scenario::from_json(&text).map_err(|e| e.to_string())?;
            let report = run_scenario(&scenario, &policies).map_err(|e| e.to_string())?;

            let decision_records =
                report.audit.iter().filter(|r| r.decision_effect.is_some()).count() as u64;
            if decision_records != report.decision_count {
                return Err(format!(
                    "{file}: {} decisions vs {decision_records} decision records",
                    report.decision_count
                ));
            }

            let ids: BTreeSet<&str> =
                report.audit.iter().filter_map(|r| r.request_id.as_deref()).collect();
            for id in ids {
                let trace: Vec<&AuditRecord> = report
                    .audit
                    .iter()
                    .filter(|r| r.request_id.as_deref() == Some(id))
                    .collect();
                if trace.is_empty() {
                    return Err(format!("{file}: empty trace for {id}"));
                }
                if !trace.windows(2).all(|w| w[0].seq < w[1].seq) {
                    return Err(format!("{file}: trace for {id} out of order"));
                }
                if id.starts_with("req-") {
                    let has = |action: &str| trace.iter().any(|r| r.action == action);
                    let decision =
                        trace.iter().find(|r| r.decision_effect.is_some()).copied();
                    if !has("registry.find") || decision.is_none() || !has("notify") {
                        return Err(format!("{file}: incomplete path for {id}"));
                    }
                    let permitted =
                        decision.unwrap().decision_effect == Some(DecisionEffect::Permit);
                    let provider_record = trace
                        .iter()
                        .any(|r| r.detail.starts_with("outcome") || r.detail.starts_with("provider failure"));
                    if permitted != provider_record {
                        return Err(format!("{file}: provider record mismatch for {id}"));
                    }
                } else if trace.iter().all(|r| r.decision_effect.is_none()) {
                    return Err(format!("{file}: no decision record for {id}"));
                }
                traced_requests += 1;
            }
        }
        Ok(format!("both runs in bijection, {traced_requests} request paths reconstructed"))
    });
}

/// 10. Two invocations of the run command on the bundled demo scenario
/// write byte-identical report files.
#[test]
fn acceptance_10_deterministic_reports() {
    check(10, "deterministic run command", || {
        let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
        let mut outputs = Vec::new();
        for n in 0..2 {
            let out = dir.path().join(format!("report-{n}.json"));
            let status = std::process::Command::new(env!("CARGO_BIN_EXE_paarc"))
                .args([
                    "run",
                    "--scenario",
                    scenario_dir().join("campus-demo-b.json").to_str().unwrap(),
                    "--policies",
                    scenario_dir().join("campus.pol").to_str().unwrap(),
                    "--out",
                    out.to_str().unwrap(),
                ])
                .stdout(std::process::Stdio::null())
                .status()
                .map_err(|e| e.to_string())?;
            if !status.success() {
                return Err(format!("run {n} exited with {status}"));
            }
            outputs.push(std::fs::read(&out).map_err(|e| e.to_string())?);
        }
        if outputs[0] != outputs[1] {
            return Err("reports differ between invocations".to_string());
        }
        Ok(format!("two invocations, identical {} byte reports", outputs[0].len()))
    });
}
