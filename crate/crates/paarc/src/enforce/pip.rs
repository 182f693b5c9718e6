//! Policy information point: resolves attribute paths the request did not
//! carry, by reading the service-data repository named by a binding.
//!
//! Attribute offloading: actors publish metadata into repositories ahead of
//! time; the decision point pulls what a policy needs at evaluation time.
//! Lookups scope by category — subject attributes are about the requester,
//! resource attributes about the service, action attributes about the
//! action, environment attributes are global.

use std::collections::BTreeMap;

use crate::policy::{AttrCategory, AttrPath, AttrValue};

use super::ServiceRequest;

/// An attribute-path prefix: a category plus zero or more leading name
/// segments. `subject.cert` covers `subject.cert.valid`; bare `environment`
/// covers every environment attribute.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttrPattern {
    category: AttrCategory,
    segments: Vec<String>,
}

impl AttrPattern {
    /// Parses `"subject.cert"` or a bare category like `"environment"`.
    pub fn parse(s: &str) -> Result<Self, crate::policy::InvalidAttrPath> {
        let mut parts = s.split('.');
        let cat = parts.next().unwrap_or_default();
        let category = AttrCategory::from_str_opt(cat)
            .ok_or_else(|| crate::policy::InvalidAttrPath(s.to_string()))?;
        let segments: Vec<String> = parts.map(str::to_string).collect();
        if segments.iter().any(|seg| seg.is_empty()) {
            return Err(crate::policy::InvalidAttrPath(s.to_string()));
        }
        Ok(AttrPattern { category, segments })
    }

    pub fn covers(&self, path: &AttrPath) -> bool {
        if path.category() != self.category {
            return false;
        }
        let path_segments: Vec<&str> = path.segments().collect();
        self.segments.len() <= path_segments.len()
            && self.segments.iter().zip(&path_segments).all(|(a, b)| a == *b)
    }

    // Two patterns overlap when one is a prefix of the other.
    fn overlaps(&self, other: &AttrPattern) -> bool {
        if self.category != other.category {
            return false;
        }
        let n = self.segments.len().min(other.segments.len());
        self.segments[..n] == other.segments[..n]
    }
}

impl std::fmt::Display for AttrPattern {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.category)?;
        for seg in &self.segments {
            write!(f, ".{seg}")?;
        }
        Ok(())
    }
}

/// Routes a pattern of attribute paths to one repository.
#[derive(Debug, Clone)]
pub struct AttributeSourceBinding {
    pub pattern: AttrPattern,
    pub resolver: String,
}

/// Offloaded metadata, keyed by scope (who or what the attribute is about)
/// and path.
#[derive(Debug, Clone, Default)]
pub struct ServiceDataRepository {
    entries: BTreeMap<(String, AttrPath), AttrValue>,
}

impl ServiceDataRepository {
    pub fn insert(&mut self, scope: &str, path: AttrPath, value: AttrValue) {
        self.entries.insert((scope.to_string(), path), value);
    }

    pub fn remove(&mut self, scope: &str, path: &AttrPath) {
        self.entries.remove(&(scope.to_string(), path.clone()));
    }

    pub fn get(&self, scope: &str, path: &AttrPath) -> Option<&AttrValue> {
        self.entries.get(&(scope.to_string(), path.clone()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PipError {
    #[error("no attribute-source binding covers {0}")]
    NoBinding(AttrPath),
    #[error("attribute {0} is bound but the repository has no entry")]
    AttributeUnavailable(AttrPath),
    #[error("binding pattern `{new}` overlaps existing pattern `{existing}`")]
    OverlappingBinding { new: String, existing: String },
}

/// The information point: bindings plus the repositories they name.
#[derive(Debug, Default)]
pub struct Pip {
    bindings: Vec<AttributeSourceBinding>,
    repositories: BTreeMap<String, ServiceDataRepository>,
}

impl Pip {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registers a binding. Patterns must be disjoint: no binding may
    /// prefix another.
    pub fn bind(&mut self, pattern: AttrPattern, resolver: &str) -> Result<(), PipError> {
        if let Some(existing) = self.bindings.iter().find(|b| b.pattern.overlaps(&pattern)) {
            return Err(PipError::OverlappingBinding {
                new: pattern.to_string(),
                existing: existing.pattern.to_string(),
            });
        }
        self.bindings.push(AttributeSourceBinding { pattern, resolver: resolver.to_string() });
        Ok(())
    }

    /// The repository named `id`, created on first use.
    pub fn repository_mut(&mut self, id: &str) -> &mut ServiceDataRepository {
        self.repositories.entry(id.to_string()).or_default()
    }

    /// Resolves one path for one request. Callers count invocations; the
    /// decision point's phase accounting depends on that.
    pub fn resolve(&self, path: &AttrPath, req: &ServiceRequest) -> Result<AttrValue, PipError> {
        let binding = self
            .bindings
            .iter()
            .find(|b| b.pattern.covers(path))
            .ok_or_else(|| PipError::NoBinding(path.clone()))?;
        let repo = self
            .repositories
            .get(&binding.resolver)
            .ok_or_else(|| PipError::AttributeUnavailable(path.clone()))?;
        let scope = scope_key(path.category(), req);
        repo.get(&scope, path)
            .cloned()
            .ok_or_else(|| PipError::AttributeUnavailable(path.clone()))
    }
}

fn scope_key(category: AttrCategory, req: &ServiceRequest) -> String {
    match category {
        AttrCategory::Subject => req.requester.clone(),
        AttrCategory::Resource => req.service_id.clone(),
        AttrCategory::Action => req.action.clone(),
        AttrCategory::Environment => String::new(),
    }
}
