//! Pretty-printer. `parse_policy_set(print_policy_set(set))` reproduces a
//! structurally identical set.

use std::fmt;

use super::{AttrValue, CmpOp, Condition, Expr, Policy};

// Binding strength for parenthesization: or < and < unary.
fn fmt_expr(e: &Expr, f: &mut fmt::Formatter<'_>, parent: u8) -> fmt::Result {
    let level = match e {
        Expr::Or(_, _) => 0,
        Expr::And(_, _) => 1,
        _ => 2,
    };
    let needs_paren = level < parent;
    if needs_paren {
        f.write_str("(")?;
    }
    match e {
        Expr::Or(l, r) => {
            fmt_expr(l, f, 0)?;
            f.write_str(" or ")?;
            fmt_expr(r, f, 1)?;
        }
        Expr::And(l, r) => {
            fmt_expr(l, f, 1)?;
            f.write_str(" and ")?;
            fmt_expr(r, f, 2)?;
        }
        Expr::Not(inner) => {
            f.write_str("not ")?;
            fmt_expr(inner, f, 2)?;
        }
        Expr::Present(path) => write!(f, "present({path})")?,
        Expr::Compare { op, path, value } => {
            write!(f, "{path} {op} {}", Literal(value))?;
        }
    }
    if needs_paren {
        f.write_str(")")?;
    }
    Ok(())
}

struct Literal<'a>(&'a AttrValue);

impl fmt::Display for Literal<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            AttrValue::Text(s) => {
                f.write_str("\"")?;
                for c in s.chars() {
                    match c {
                        '"' => f.write_str("\\\"")?,
                        '\\' => f.write_str("\\\\")?,
                        c => write!(f, "{c}")?,
                    }
                }
                f.write_str("\"")
            }
            AttrValue::Int(n) => write!(f, "{n}"),
            AttrValue::Bool(b) => write!(f, "{b}"),
            // No timestamp literal syntax; emit the integer form.
            AttrValue::Timestamp(t) => write!(f, "{t}"),
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_expr(self, f, 0)
    }
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "policy {:?} {{", self.id())?;
        if let Some(t) = self.target() {
            writeln!(f, "  target: {t}")?;
        }
        writeln!(f, "  combining: {}", self.combining())?;
        for rule in self.rules() {
            let effect = match rule.effect {
                super::Effect::Permit => "permit",
                super::Effect::Deny => "deny",
            };
            match &rule.condition {
                Condition::When(e) => write!(f, "  rule {effect} when {e}")?,
                Condition::Otherwise => write!(f, "  rule {effect} otherwise")?,
            }
            for ob in &rule.obligations {
                write!(f, " obligate {ob:?}")?;
            }
            writeln!(f)?;
        }
        writeln!(f, "}}")
    }
}

/// Renders a policy set back to `.pol` source.
pub fn print_policy_set(policies: &[Policy]) -> String {
    let mut out = String::new();
    for p in policies {
        out.push_str(&p.to_string());
        out.push('\n');
    }
    out
}

// CmpOp ordering literals only reach here validated, so no special casing.
#[allow(dead_code)]
fn _assert_cmpop_display(op: CmpOp) -> String {
    op.to_string()
}
