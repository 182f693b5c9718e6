//! Folding multiple decisions into one.

use super::{dedup_preserving, CombiningAlg, Decision, DecisionEffect};

/// Folds an ordered list of decisions under a combining algorithm.
///
/// * deny-overrides: any `Deny` wins; otherwise any `Indeterminate` (missing
///   lists merged); otherwise any `Permit`; otherwise `NotApplicable`.
/// * permit-overrides: symmetric with `Permit` dominant.
/// * first-applicable: the first `Permit` or `Deny` in order; an earlier
///   `Indeterminate` wins instead.
///
/// Obligations and matched-rule provenance merge from the decisions that
/// share the winning effect, in input order.
pub fn combine_decisions(decisions: &[Decision], alg: CombiningAlg) -> Decision {
    match alg {
        CombiningAlg::DenyOverrides => {
            combine_overrides(decisions, DecisionEffect::Deny, DecisionEffect::Permit)
        }
        CombiningAlg::PermitOverrides => {
            combine_overrides(decisions, DecisionEffect::Permit, DecisionEffect::Deny)
        }
        CombiningAlg::FirstApplicable => {
            for d in decisions {
                match d.effect {
                    DecisionEffect::Permit | DecisionEffect::Deny | DecisionEffect::Indeterminate => {
                        return d.clone();
                    }
                    DecisionEffect::NotApplicable => {}
                }
            }
            Decision::not_applicable()
        }
    }
}

fn combine_overrides(
    decisions: &[Decision],
    dominant: DecisionEffect,
    recessive: DecisionEffect,
) -> Decision {
    for effect in [dominant, recessive] {
        // Indeterminate outranks the recessive effect.
        if effect == recessive
            && decisions.iter().any(|d| d.effect == DecisionEffect::Indeterminate)
        {
            let mut missing = Vec::new();
            let mut diagnostics = Vec::new();
            for d in decisions.iter().filter(|d| d.effect == DecisionEffect::Indeterminate) {
                missing.extend(d.missing.iter().cloned());
                diagnostics.extend(d.diagnostics.iter().cloned());
            }
            return Decision::indeterminate(dedup_preserving(missing), diagnostics);
        }
        if decisions.iter().any(|d| d.effect == effect) {
            let mut merged = Decision {
                effect,
                obligations: Vec::new(),
                matched: Vec::new(),
                missing: Vec::new(),
                diagnostics: Vec::new(),
            };
            for d in decisions.iter().filter(|d| d.effect == effect) {
                merged.obligations.extend(d.obligations.iter().cloned());
                merged.matched.extend(d.matched.iter().cloned());
            }
            return merged;
        }
    }
    Decision::not_applicable()
}
