//! Policy decision point: two-phase evaluation over one store snapshot.
//!
//! Phase 1 evaluates every policy against the attributes the request
//! carries, folded with store-level deny-overrides. A blocking (deny)
//! outcome returns immediately — no information-point traffic for a
//! request that is already refused. Only when phase 1 is blocked on
//! missing attributes does phase 2 resolve them through the PIP, extend
//! the context, and re-evaluate exactly once.

use crate::policy::{
    combine_decisions, evaluate_policy, AttrCategory, AttrPath, AttrValue, CombiningAlg, Decision,
    DecisionEffect, RequestContext,
};

use super::pip::Pip;
use super::store::PolicyStoreSnapshot;
use super::ServiceRequest;

/// A decision plus the observability the engine and tests rely on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PdpReport {
    pub decision: Decision,
    /// Number of PIP resolutions attempted for this request.
    pub pip_calls: u32,
    /// Store version the decision was taken against.
    pub snapshot_version: u64,
}

/// Builds the evaluation context: request attributes plus the standard
/// bindings derived from the request envelope. Envelope-derived values win
/// over conflicting carried attributes.
pub fn evaluation_context(req: &ServiceRequest) -> RequestContext {
    let mut ctx = req.attrs.clone();
    ctx.bind(
        AttrPath::new(AttrCategory::Action, "name").expect("static path"),
        AttrValue::Text(req.action.clone()),
    );
    ctx.bind(
        AttrPath::new(AttrCategory::Subject, "id").expect("static path"),
        AttrValue::Text(req.requester.clone()),
    );
    ctx.bind(
        AttrPath::new(AttrCategory::Resource, "service").expect("static path"),
        AttrValue::Text(req.service_id.clone()),
    );
    ctx
}

fn evaluate_all(snapshot: &PolicyStoreSnapshot, ctx: &RequestContext) -> Decision {
    let decisions: Vec<Decision> =
        snapshot.policies().iter().map(|p| evaluate_policy(p, ctx)).collect();
    combine_decisions(&decisions, CombiningAlg::DenyOverrides)
}

/// Decides `req` against `snapshot`, resolving missing attributes through
/// `pip` unless phase 1 already denies.
pub fn pdp_decide(req: &ServiceRequest, snapshot: &PolicyStoreSnapshot, pip: &Pip) -> PdpReport {
    let ctx = evaluation_context(req);
    let phase1 = evaluate_all(snapshot, &ctx);

    if phase1.effect != DecisionEffect::Indeterminate {
        // Deny returns without any PIP call; so do Permit and NotApplicable,
        // which have nothing left to resolve.
        return PdpReport { decision: phase1, pip_calls: 0, snapshot_version: snapshot.version() };
    }

    let mut extended = ctx.clone();
    let mut pip_calls = 0;
    for path in &phase1.missing {
        if extended.contains(path) {
            // Present but mismatched (type error); resolution cannot help.
            continue;
        }
        pip_calls += 1;
        if let Ok(value) = pip.resolve(path, req) {
            extended.bind(path.clone(), value);
        }
    }

    let phase2 = evaluate_all(snapshot, &extended);
    PdpReport { decision: phase2, pip_calls, snapshot_version: snapshot.version() }
}
