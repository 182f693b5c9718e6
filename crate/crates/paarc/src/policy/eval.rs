//! Three-valued expression evaluation and per-policy decision folding.
//!
//! An expression evaluates to true, false, or "missing attribute". Missing
//! reports the leftmost (depth-first) unbound path, so the decision point
//! knows which attribute to fetch next. `and`/`or` still resolve when one
//! side is missing but the other side dominates (false for `and`, true for
//! `or`).

use super::{
    AttrPath, AttrValue, CmpOp, CombiningAlg, Condition, Decision, Effect, Expr, Policy,
    RequestContext,
};

/// Result of evaluating an expression.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExprValue {
    True,
    False,
    /// The leftmost unbound path that blocked evaluation.
    Missing(AttrPath),
}

/// Comparison between incompatible value variants. Never coerced.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("type mismatch on {path}: cannot compare {found} {op} {expected}")]
pub struct TypeMismatch {
    pub path: AttrPath,
    pub op: CmpOp,
    pub expected: &'static str,
    pub found: &'static str,
}

/// Evaluates `e` under `ctx`.
pub fn evaluate_expr(e: &Expr, ctx: &RequestContext) -> Result<ExprValue, TypeMismatch> {
    match e {
        Expr::And(l, r) => {
            let lv = evaluate_expr(l, ctx)?;
            if lv == ExprValue::False {
                return Ok(ExprValue::False);
            }
            let rv = evaluate_expr(r, ctx)?;
            Ok(match (lv, rv) {
                (_, ExprValue::False) => ExprValue::False,
                (ExprValue::Missing(p), _) => ExprValue::Missing(p),
                (ExprValue::True, rv) => rv,
                (ExprValue::False, _) => unreachable!(),
            })
        }
        Expr::Or(l, r) => {
            let lv = evaluate_expr(l, ctx)?;
            if lv == ExprValue::True {
                return Ok(ExprValue::True);
            }
            let rv = evaluate_expr(r, ctx)?;
            Ok(match (lv, rv) {
                (_, ExprValue::True) => ExprValue::True,
                (ExprValue::Missing(p), _) => ExprValue::Missing(p),
                (ExprValue::False, rv) => rv,
                (ExprValue::True, _) => unreachable!(),
            })
        }
        Expr::Not(inner) => Ok(match evaluate_expr(inner, ctx)? {
            ExprValue::True => ExprValue::False,
            ExprValue::False => ExprValue::True,
            missing => missing,
        }),
        Expr::Present(path) => {
            Ok(if ctx.contains(path) { ExprValue::True } else { ExprValue::False })
        }
        Expr::Compare { op, path, value } => {
            let bound = match ctx.get(path) {
                Some(v) => v,
                None => return Ok(ExprValue::Missing(path.clone())),
            };
            let ordering = match (bound, value) {
                (AttrValue::Text(a), AttrValue::Text(b)) if !op.is_ordering() => a.cmp(b),
                (AttrValue::Bool(a), AttrValue::Bool(b)) if !op.is_ordering() => a.cmp(b),
                (AttrValue::Int(a), AttrValue::Int(b)) => a.cmp(b),
                (AttrValue::Timestamp(a), AttrValue::Timestamp(b)) => a.cmp(b),
                _ => {
                    return Err(TypeMismatch {
                        path: path.clone(),
                        op: *op,
                        expected: value.type_name(),
                        found: bound.type_name(),
                    })
                }
            };
            let holds = match op {
                CmpOp::Eq => ordering.is_eq(),
                CmpOp::Ne => ordering.is_ne(),
                CmpOp::Lt => ordering.is_lt(),
                CmpOp::Le => ordering.is_le(),
                CmpOp::Gt => ordering.is_gt(),
                CmpOp::Ge => ordering.is_ge(),
            };
            Ok(if holds { ExprValue::True } else { ExprValue::False })
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum RuleOutcome {
    Applicable,
    NotApplicable,
    Indeterminate { path: AttrPath, diagnostic: Option<String> },
}

/// Evaluates one policy against a context.
///
/// A false target yields `NotApplicable`; a target blocked on an unbound
/// attribute yields `Indeterminate` with that path recorded. Otherwise
/// each rule is evaluated and the outcomes fold per the policy's combining
/// algorithm. Obligations of the rules contributing the final effect attach
/// in rule order. Type mismatches surface as `Indeterminate` with the
/// offending path in `missing` and a diagnostic.
pub fn evaluate_policy(policy: &Policy, ctx: &RequestContext) -> Decision {
    if let Some(target) = policy.target() {
        match evaluate_expr(target, ctx) {
            Ok(ExprValue::True) => {}
            Ok(ExprValue::False) => return Decision::not_applicable(),
            Ok(ExprValue::Missing(p)) => return Decision::indeterminate(vec![p], Vec::new()),
            Err(tm) => {
                return Decision::indeterminate(vec![tm.path.clone()], vec![tm.to_string()])
            }
        }
    }

    let outcomes: Vec<RuleOutcome> = policy
        .rules()
        .iter()
        .map(|rule| match &rule.condition {
            Condition::Otherwise => RuleOutcome::Applicable,
            Condition::When(expr) => match evaluate_expr(expr, ctx) {
                Ok(ExprValue::True) => RuleOutcome::Applicable,
                Ok(ExprValue::False) => RuleOutcome::NotApplicable,
                Ok(ExprValue::Missing(path)) => {
                    RuleOutcome::Indeterminate { path, diagnostic: None }
                }
                Err(tm) => RuleOutcome::Indeterminate {
                    path: tm.path.clone(),
                    diagnostic: Some(tm.to_string()),
                },
            },
        })
        .collect();

    fold_rules(policy, &outcomes)
}

fn applicable_with(policy: &Policy, outcomes: &[RuleOutcome], effect: Effect) -> Decision {
    let mut obligations = Vec::new();
    let mut matched = Vec::new();
    for (i, (rule, outcome)) in policy.rules().iter().zip(outcomes).enumerate() {
        if *outcome == RuleOutcome::Applicable && rule.effect == effect {
            matched.push((policy.id().to_string(), i));
            obligations.extend(rule.obligations.iter().cloned());
        }
    }
    Decision::applicable(effect, obligations, matched)
}

fn indeterminate_from(outcomes: &[RuleOutcome]) -> Decision {
    let mut missing = Vec::new();
    let mut diagnostics = Vec::new();
    for outcome in outcomes {
        if let RuleOutcome::Indeterminate { path, diagnostic } = outcome {
            missing.push(path.clone());
            if let Some(d) = diagnostic {
                diagnostics.push(d.clone());
            }
        }
    }
    Decision::indeterminate(missing, diagnostics)
}

fn fold_rules(policy: &Policy, outcomes: &[RuleOutcome]) -> Decision {
    let applicable = |effect: Effect| {
        policy
            .rules()
            .iter()
            .zip(outcomes)
            .any(|(r, o)| *o == RuleOutcome::Applicable && r.effect == effect)
    };
    let any_indeterminate =
        outcomes.iter().any(|o| matches!(o, RuleOutcome::Indeterminate { .. }));

    match policy.combining() {
        CombiningAlg::DenyOverrides => {
            if applicable(Effect::Deny) {
                applicable_with(policy, outcomes, Effect::Deny)
            } else if any_indeterminate {
                indeterminate_from(outcomes)
            } else if applicable(Effect::Permit) {
                applicable_with(policy, outcomes, Effect::Permit)
            } else {
                Decision::not_applicable()
            }
        }
        CombiningAlg::PermitOverrides => {
            if applicable(Effect::Permit) {
                applicable_with(policy, outcomes, Effect::Permit)
            } else if any_indeterminate {
                indeterminate_from(outcomes)
            } else if applicable(Effect::Deny) {
                applicable_with(policy, outcomes, Effect::Deny)
            } else {
                Decision::not_applicable()
            }
        }
        CombiningAlg::FirstApplicable => {
            for (i, (rule, outcome)) in policy.rules().iter().zip(outcomes).enumerate() {
                match outcome {
                    RuleOutcome::Applicable => {
                        return Decision::applicable(
                            rule.effect,
                            rule.obligations.clone(),
                            vec![(policy.id().to_string(), i)],
                        );
                    }
                    RuleOutcome::Indeterminate { path, diagnostic } => {
                        return Decision::indeterminate(
                            vec![path.clone()],
                            diagnostic.iter().cloned().collect(),
                        );
                    }
                    RuleOutcome::NotApplicable => {}
                }
            }
            Decision::not_applicable()
        }
    }
}
