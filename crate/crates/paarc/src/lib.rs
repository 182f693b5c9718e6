//! Policy-aware machine-to-machine service enforcement, with a simulated
//! campus transport service that demonstrates it.
//!
//! The crate has three layers:
//!
//! * [`policy`] — an attribute-based policy language: parser, three-valued
//!   evaluation, and the combining algebra that folds rule and policy
//!   outcomes into one [`policy::Decision`].
//! * [`enforce`], [`registry`], [`pki`], [`audit`] — the enforcement
//!   pipeline around that language: a service registry, a versioned policy
//!   store with snapshot isolation, a two-phase decision point backed by an
//!   attribute information point, the enforcement point orchestrating the
//!   canonical message exchange, a simulated certificate hierarchy, and an
//!   append-only reporting system.
//! * [`sim`] — a deterministic discrete-event simulation of an autonomous
//!   campus shuttle fleet that drives the pipeline end to end, in an
//!   unprotected baseline mode and a policy-enforced mode.
//!
//! # Example
//!
//! ```
//! use paarc::policy::{parse_policy_set, evaluate_policy, combine_decisions};
//! use paarc::policy::{AttrPath, AttrValue, CombiningAlg, DecisionEffect, RequestContext};
//!
//! let policies = parse_policy_set(r#"
//!     policy "shuttle-telemetry" {
//!         target: action.name == "telemetry.submit"
//!         rule permit when subject.enrolled == true
//!         rule deny when subject.banned == true obligate "report-attempt"
//!     }
//! "#)?;
//!
//! let mut ctx = RequestContext::new();
//! ctx.bind(AttrPath::parse("action.name")?, AttrValue::Text("telemetry.submit".into()));
//! ctx.bind(AttrPath::parse("subject.enrolled")?, AttrValue::Bool(true));
//! ctx.bind(AttrPath::parse("subject.banned")?, AttrValue::Bool(false));
//!
//! let decisions: Vec<_> = policies.iter().map(|p| evaluate_policy(p, &ctx)).collect();
//! let combined = combine_decisions(&decisions, CombiningAlg::DenyOverrides);
//! assert_eq!(combined.effect, DecisionEffect::Permit);
//! # Ok::<(), Box<dyn std::error::Error>>(())
//! ```

pub mod audit;
pub mod enforce;
pub mod pki;
pub mod policy;
pub mod registry;
pub mod sim;
