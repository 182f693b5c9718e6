//! Attribute-based policy language: types, parser, evaluation, and the
//! combining algebra.
//!
//! A policy names an effect (permit or deny) for requests whose attributes
//! satisfy a boolean condition. Policies are grouped into ordered sets and
//! folded with a combining algorithm; the fold result is a [`Decision`].

mod combine;
mod eval;
mod parse;
mod print;

pub use combine::combine_decisions;
pub use eval::{evaluate_expr, evaluate_policy, ExprValue, TypeMismatch};
pub use parse::{parse_policy_set, ParseError, ParseErrorKind};
pub use print::print_policy_set;

use std::collections::BTreeMap;
use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// The four attribute categories a request can carry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AttrCategory {
    Subject,
    Resource,
    Action,
    Environment,
}

impl AttrCategory {
    pub fn as_str(self) -> &'static str {
        match self {
            AttrCategory::Subject => "subject",
            AttrCategory::Resource => "resource",
            AttrCategory::Action => "action",
            AttrCategory::Environment => "environment",
        }
    }

    pub fn from_str_opt(s: &str) -> Option<Self> {
        match s {
            "subject" => Some(AttrCategory::Subject),
            "resource" => Some(AttrCategory::Resource),
            "action" => Some(AttrCategory::Action),
            "environment" => Some(AttrCategory::Environment),
            _ => None,
        }
    }
}

impl fmt::Display for AttrCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Error for a malformed attribute path.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid attribute path `{0}`")]
pub struct InvalidAttrPath(pub String);

/// A dotted attribute path such as `subject.cert.valid`.
///
/// The first segment is the category; the remaining segments form the name.
/// Every segment starts with a lowercase letter and contains only lowercase
/// letters, digits, and underscores.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AttrPath {
    category: AttrCategory,
    name: String,
}

impl AttrPath {
    pub fn new(category: AttrCategory, name: &str) -> Result<Self, InvalidAttrPath> {
        if name.is_empty() || !name.split('.').all(valid_segment) {
            return Err(InvalidAttrPath(format!("{category}.{name}")));
        }
        Ok(AttrPath { category, name: name.to_string() })
    }

    /// Parses a full dotted path, e.g. `"subject.role"`.
    pub fn parse(s: &str) -> Result<Self, InvalidAttrPath> {
        let (cat, name) = s.split_once('.').ok_or_else(|| InvalidAttrPath(s.to_string()))?;
        let category = AttrCategory::from_str_opt(cat).ok_or_else(|| InvalidAttrPath(s.to_string()))?;
        AttrPath::new(category, name)
    }

    pub fn category(&self) -> AttrCategory {
        self.category
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Name segments after the category, in order.
    pub fn segments(&self) -> impl Iterator<Item = &str> {
        self.name.split('.')
    }
}

fn valid_segment(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_lowercase() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_')
}

impl fmt::Display for AttrPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.category, self.name)
    }
}

impl Serialize for AttrPath {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for AttrPath {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        AttrPath::parse(&s).map_err(D::Error::custom)
    }
}

/// An attribute value. Comparisons never coerce between variants.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AttrValue {
    Text(String),
    Int(i64),
    Bool(bool),
    /// Integer seconds since the scenario epoch. Distinct from [`AttrValue::Int`];
    /// comparing the two is a type error.
    Timestamp(i64),
}

impl AttrValue {
    pub fn type_name(&self) -> &'static str {
        match self {
            AttrValue::Text(_) => "text",
            AttrValue::Int(_) => "int",
            AttrValue::Bool(_) => "bool",
            AttrValue::Timestamp(_) => "timestamp",
        }
    }

    /// True for the variants that admit ordering comparisons.
    pub fn is_orderable(&self) -> bool {
        matches!(self, AttrValue::Int(_) | AttrValue::Timestamp(_))
    }
}

impl fmt::Display for AttrValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AttrValue::Text(s) => write!(f, "{s:?}"),
            AttrValue::Int(n) => write!(f, "{n}"),
            AttrValue::Bool(b) => write!(f, "{b}"),
            AttrValue::Timestamp(t) => write!(f, "{t}"),
        }
    }
}

// On the wire attribute values are plain JSON scalars (string, integer,
// boolean). Timestamps serialize as integers; they only arise
// programmatically, never from request documents.
impl Serialize for AttrValue {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            AttrValue::Text(s) => serializer.serialize_str(s),
            AttrValue::Int(n) | AttrValue::Timestamp(n) => serializer.serialize_i64(*n),
            AttrValue::Bool(b) => serializer.serialize_bool(*b),
        }
    }
}

impl<'de> Deserialize<'de> for AttrValue {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let v = serde_json::Value::deserialize(deserializer)?;
        match v {
            serde_json::Value::String(s) => Ok(AttrValue::Text(s)),
            serde_json::Value::Bool(b) => Ok(AttrValue::Bool(b)),
            serde_json::Value::Number(n) => n
                .as_i64()
                .map(AttrValue::Int)
                .ok_or_else(|| D::Error::custom("attribute integers must fit in i64")),
            other => Err(D::Error::custom(format!(
                "attribute values must be string, integer, or boolean, got {other}"
            ))),
        }
    }
}

/// Comparison operators available in conditions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CmpOp {
    pub fn as_str(self) -> &'static str {
        match self {
            CmpOp::Eq => "==",
            CmpOp::Ne => "!=",
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
        }
    }

    /// Ordering operators only apply to integer and timestamp literals.
    pub fn is_ordering(self) -> bool {
        matches!(self, CmpOp::Lt | CmpOp::Le | CmpOp::Gt | CmpOp::Ge)
    }
}

impl fmt::Display for CmpOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A boolean condition over request attributes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    And(Box<Expr>, Box<Expr>),
    Or(Box<Expr>, Box<Expr>),
    Not(Box<Expr>),
    Compare { op: CmpOp, path: AttrPath, value: AttrValue },
    Present(AttrPath),
}

/// Structural violation in an expression tree.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExprInvariantError {
    #[error("ordering comparison `{op}` requires an integer or timestamp literal, got {found} for {path}")]
    OrderingOnNonNumeric { op: CmpOp, path: AttrPath, found: &'static str },
}

impl Expr {
    pub fn and(l: Expr, r: Expr) -> Expr {
        Expr::And(Box::new(l), Box::new(r))
    }

    pub fn or(l: Expr, r: Expr) -> Expr {
        Expr::Or(Box::new(l), Box::new(r))
    }

    pub fn not(e: Expr) -> Expr {
        Expr::Not(Box::new(e))
    }

    pub fn compare(op: CmpOp, path: AttrPath, value: AttrValue) -> Expr {
        Expr::Compare { op, path, value }
    }

    /// Checks that ordering comparisons only carry integer/timestamp literals.
    pub fn check(&self) -> Result<(), ExprInvariantError> {
        match self {
            Expr::And(l, r) | Expr::Or(l, r) => {
                l.check()?;
                r.check()
            }
            Expr::Not(e) => e.check(),
            Expr::Compare { op, path, value } => {
                if op.is_ordering() && !value.is_orderable() {
                    return Err(ExprInvariantError::OrderingOnNonNumeric {
                        op: *op,
                        path: path.clone(),
                        found: value.type_name(),
                    });
                }
                Ok(())
            }
            Expr::Present(_) => Ok(()),
        }
    }
}

/// Effect a rule assigns when its condition holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Effect {
    Permit,
    Deny,
}

/// When a rule fires: on a condition, or unconditionally as the last rule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Condition {
    When(Expr),
    Otherwise,
}

/// One rule inside a policy.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    pub effect: Effect,
    pub condition: Condition,
    /// Obligation ids the enforcing side must carry out when this rule
    /// contributes to the final effect.
    pub obligations: Vec<String>,
}

impl Rule {
    pub fn when(effect: Effect, expr: Expr) -> Rule {
        Rule { effect, condition: Condition::When(expr), obligations: Vec::new() }
    }

    pub fn otherwise(effect: Effect) -> Rule {
        Rule { effect, condition: Condition::Otherwise, obligations: Vec::new() }
    }

    pub fn obligate(mut self, id: &str) -> Rule {
        self.obligations.push(id.to_string());
        self
    }
}

/// How multiple rule (or policy) outcomes fold into one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CombiningAlg {
    DenyOverrides,
    PermitOverrides,
    FirstApplicable,
}

impl CombiningAlg {
    pub fn as_str(self) -> &'static str {
        match self {
            CombiningAlg::DenyOverrides => "deny-overrides",
            CombiningAlg::PermitOverrides => "permit-overrides",
            CombiningAlg::FirstApplicable => "first-applicable",
        }
    }
}

impl fmt::Display for CombiningAlg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Violation of the policy construction invariants.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PolicyInvariantError {
    #[error("policy `{0}` has no rules")]
    NoRules(String),
    #[error("policy `{0}`: `otherwise` rule must be single and last")]
    MisplacedOtherwise(String),
    #[error("policy `{id}`: {source}")]
    BadExpr {
        id: String,
        #[source]
        source: ExprInvariantError,
    },
}

/// An ordered, named list of rules under one combining algorithm.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Policy {
    id: String,
    target: Option<Expr>,
    combining: CombiningAlg,
    rules: Vec<Rule>,
}

impl Policy {
    pub fn new(
        id: &str,
        target: Option<Expr>,
        combining: CombiningAlg,
        rules: Vec<Rule>,
    ) -> Result<Self, PolicyInvariantError> {
        if rules.is_empty() {
            return Err(PolicyInvariantError::NoRules(id.to_string()));
        }
        let last = rules.len() - 1;
        for (i, rule) in rules.iter().enumerate() {
            match &rule.condition {
                Condition::Otherwise if i != last => {
                    return Err(PolicyInvariantError::MisplacedOtherwise(id.to_string()));
                }
                Condition::When(e) => e.check().map_err(|source| PolicyInvariantError::BadExpr {
                    id: id.to_string(),
                    source,
                })?,
                Condition::Otherwise => {}
            }
        }
        if let Some(t) = &target {
            t.check().map_err(|source| PolicyInvariantError::BadExpr { id: id.to_string(), source })?;
        }
        Ok(Policy { id: id.to_string(), target, combining, rules })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn target(&self) -> Option<&Expr> {
        self.target.as_ref()
    }

    pub fn combining(&self) -> CombiningAlg {
        self.combining
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }
}

/// The outcome of evaluating policies against a request.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DecisionEffect {
    Permit,
    Deny,
    NotApplicable,
    Indeterminate,
}

impl DecisionEffect {
    pub fn as_str(self) -> &'static str {
        match self {
            DecisionEffect::Permit => "Permit",
            DecisionEffect::Deny => "Deny",
            DecisionEffect::NotApplicable => "NotApplicable",
            DecisionEffect::Indeterminate => "Indeterminate",
        }
    }
}

impl fmt::Display for DecisionEffect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl From<Effect> for DecisionEffect {
    fn from(e: Effect) -> Self {
        match e {
            Effect::Permit => DecisionEffect::Permit,
            Effect::Deny => DecisionEffect::Deny,
        }
    }
}

/// A decision with its provenance: which rules matched, which attributes
/// were missing, and any obligations to carry out.
///
/// Constructors keep the bookkeeping consistent: `missing` is non-empty
/// exactly when the effect is `Indeterminate`, and obligations only attach
/// to `Permit` or `Deny`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decision {
    pub effect: DecisionEffect,
    pub obligations: Vec<String>,
    /// `(policy id, rule index)` pairs that contributed the final effect.
    pub matched: Vec<(String, usize)>,
    /// Attribute paths that blocked evaluation; non-empty iff `Indeterminate`.
    pub missing: Vec<AttrPath>,
    /// Human-readable notes, e.g. type-mismatch explanations.
    pub diagnostics: Vec<String>,
}

impl Decision {
    pub fn applicable(
        effect: Effect,
        obligations: Vec<String>,
        matched: Vec<(String, usize)>,
    ) -> Decision {
        Decision {
            effect: effect.into(),
            obligations,
            matched,
            missing: Vec::new(),
            diagnostics: Vec::new(),
        }
    }

    pub fn not_applicable() -> Decision {
        Decision {
            effect: DecisionEffect::NotApplicable,
            obligations: Vec::new(),
            matched: Vec::new(),
            missing: Vec::new(),
            diagnostics: Vec::new(),
        }
    }

    /// `missing` must be non-empty; deduplicated preserving first occurrence.
    pub fn indeterminate(missing: Vec<AttrPath>, diagnostics: Vec<String>) -> Decision {
        debug_assert!(!missing.is_empty());
        Decision {
            effect: DecisionEffect::Indeterminate,
            obligations: Vec::new(),
            matched: Vec::new(),
            missing: dedup_preserving(missing),
            diagnostics,
        }
    }

    /// Bookkeeping invariant check: used by tests on every returned decision.
    pub fn is_consistent(&self) -> bool {
        let missing_ok = (self.effect == DecisionEffect::Indeterminate) == !self.missing.is_empty();
        let obligations_ok = self.obligations.is_empty()
            || matches!(self.effect, DecisionEffect::Permit | DecisionEffect::Deny);
        missing_ok && obligations_ok
    }
}

pub(crate) fn dedup_preserving<T: Clone + Eq>(items: Vec<T>) -> Vec<T> {
    let mut out = Vec::with_capacity(items.len());
    for it in items {
        if !out.contains(&it) {
            out.push(it);
        }
    }
    out
}

/// The attribute bag a request carries: at most one value per path.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RequestContext {
    bindings: BTreeMap<AttrPath, AttrValue>,
}

impl RequestContext {
    pub fn new() -> Self {
        Self::default()
    }

    /// Binds `path` to `value`, replacing any previous binding.
    pub fn bind(&mut self, path: AttrPath, value: AttrValue) -> Option<AttrValue> {
        self.bindings.insert(path, value)
    }

    pub fn get(&self, path: &AttrPath) -> Option<&AttrValue> {
        self.bindings.get(path)
    }

    pub fn contains(&self, path: &AttrPath) -> bool {
        self.bindings.contains_key(path)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&AttrPath, &AttrValue)> {
        self.bindings.iter()
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }
}

impl FromIterator<(AttrPath, AttrValue)> for RequestContext {
    fn from_iter<I: IntoIterator<Item = (AttrPath, AttrValue)>>(iter: I) -> Self {
        RequestContext { bindings: iter.into_iter().collect() }
    }
}

// Request documents carry attributes as a flat JSON object keyed by
// dotted paths: {"subject.role": "av", ...}.
impl Serialize for RequestContext {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_map(self.bindings.iter().map(|(k, v)| (k.to_string(), v)))
    }
}

impl<'de> Deserialize<'de> for RequestContext {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = BTreeMap::<String, AttrValue>::deserialize(deserializer)?;
        let mut ctx = RequestContext::new();
        for (k, v) in raw {
            let path = AttrPath::parse(&k).map_err(D::Error::custom)?;
            ctx.bind(path, v);
        }
        Ok(ctx)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn attr_path_parses_and_prints() {
        let p = AttrPath::parse("subject.cert.valid").unwrap();
        assert_eq!(p.category(), AttrCategory::Subject);
        assert_eq!(p.name(), "cert.valid");
        assert_eq!(p.to_string(), "subject.cert.valid");
    }

    #[test]
    fn attr_path_rejects_bad_names() {
        assert!(AttrPath::parse("subject.").is_err());
        assert!(AttrPath::parse("subject..x").is_err());
        assert!(AttrPath::parse("subject.9x").is_err());
        assert!(AttrPath::parse("gadget.role").is_err());
        assert!(AttrPath::parse("subject.Role").is_err());
        assert!(AttrPath::new(AttrCategory::Subject, "").is_err());
    }

    #[test]
    fn ordering_on_text_literal_is_rejected() {
        let path = AttrPath::parse("subject.role").unwrap();
        let e = Expr::compare(CmpOp::Lt, path, AttrValue::Text("x".into()));
        assert!(e.check().is_err());
        let path = AttrPath::parse("environment.tick").unwrap();
        let e = Expr::compare(CmpOp::Lt, path, AttrValue::Timestamp(10));
        assert!(e.check().is_ok());
    }

    #[test]
    fn otherwise_must_be_last() {
        let r1 = Rule::otherwise(Effect::Deny);
        let r2 = Rule::when(
            Effect::Permit,
            Expr::compare(
                CmpOp::Eq,
                AttrPath::parse("action.name").unwrap(),
                AttrValue::Text("x".into()),
            ),
        );
        let err = Policy::new("p", None, CombiningAlg::DenyOverrides, vec![r1, r2]);
        assert_eq!(err.unwrap_err(), PolicyInvariantError::MisplacedOtherwise("p".into()));
    }

    #[test]
    fn policy_requires_rules() {
        let err = Policy::new("p", None, CombiningAlg::DenyOverrides, vec![]);
        assert!(matches!(err, Err(PolicyInvariantError::NoRules(_))));
    }

    #[test]
    fn context_keeps_one_value_per_path() {
        let mut ctx = RequestContext::new();
        let p = AttrPath::parse("subject.role").unwrap();
        ctx.bind(p.clone(), AttrValue::Text("av".into()));
        ctx.bind(p.clone(), AttrValue::Text("cu".into()));
        assert_eq!(ctx.len(), 1);
        assert_eq!(ctx.get(&p), Some(&AttrValue::Text("cu".into())));
    }

    #[test]
    fn context_round_trips_as_flat_json() {
        let mut ctx = RequestContext::new();
        ctx.bind(AttrPath::parse("subject.role").unwrap(), AttrValue::Text("av".into()));
        ctx.bind(AttrPath::parse("environment.hour").unwrap(), AttrValue::Int(9));
        ctx.bind(AttrPath::parse("subject.enrolled").unwrap(), AttrValue::Bool(true));
        let json = serde_json::to_string(&ctx).unwrap();
        // Paths order category-major: subject, resource, action, environment.
        assert_eq!(
            json,
            r#"{"subject.enrolled":true,"subject.role":"av","environment.hour":9}"#
        );
        let back: RequestContext = serde_json::from_str(&json).unwrap();
        assert_eq!(back, ctx);
    }
}
