//! Lexer and recursive-descent parser for `.pol` policy files.

use std::fmt;

use super::{
    AttrCategory, AttrPath, AttrValue, CmpOp, CombiningAlg, Condition, Effect, Expr, Policy,
    PolicyInvariantError, Rule,
};

/// Where and why parsing failed.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub struct ParseError {
    pub line: u32,
    pub col: u32,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax(String),
    DuplicatePolicyId(String),
    MisplacedOtherwise,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let msg = match &self.kind {
            ParseErrorKind::Syntax(m) => m.clone(),
            ParseErrorKind::DuplicatePolicyId(id) => format!("duplicate policy id {id:?}"),
            ParseErrorKind::MisplacedOtherwise => {
                "`otherwise` rule must be the last rule of the policy".to_string()
            }
        };
        write!(f, "line {}, column {}: {}", self.line, self.col, msg)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Word(String),
    Str(String),
    Int(i64),
    Op(CmpOp),
    LBrace,
    RBrace,
    LParen,
    RParen,
    Colon,
    Dot,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Word(w) => format!("`{w}`"),
            Tok::Str(s) => format!("string {s:?}"),
            Tok::Int(n) => format!("integer {n}"),
            Tok::Op(op) => format!("`{op}`"),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Colon => "`:`".into(),
            Tok::Dot => "`.`".into(),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: u32,
    col: u32,
}

fn syntax(line: u32, col: u32, msg: impl Into<String>) -> ParseError {
    ParseError { line, col, kind: ParseErrorKind::Syntax(msg.into()) }
}

fn lex(text: &str) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    let mut line: u32 = 1;
    let mut col: u32 = 1;
    let mut chars = text.chars().peekable();

    macro_rules! bump {
        () => {{
            let c = chars.next();
            if c == Some('\n') {
                line += 1;
                col = 1;
            } else if c.is_some() {
                col += 1;
            }
            c
        }};
    }

    while let Some(&c) = chars.peek() {
        let (tl, tc) = (line, col);
        match c {
            ' ' | '\t' | '\r' | '\n' => {
                bump!();
            }
            '#' => {
                while let Some(&c) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    bump!();
                }
            }
            '{' => {
                bump!();
                out.push(Token { tok: Tok::LBrace, line: tl, col: tc });
            }
            '}' => {
                bump!();
                out.push(Token { tok: Tok::RBrace, line: tl, col: tc });
            }
            '(' => {
                bump!();
                out.push(Token { tok: Tok::LParen, line: tl, col: tc });
            }
            ')' => {
                bump!();
                out.push(Token { tok: Tok::RParen, line: tl, col: tc });
            }
            ':' => {
                bump!();
                out.push(Token { tok: Tok::Colon, line: tl, col: tc });
            }
            '.' => {
                bump!();
                out.push(Token { tok: Tok::Dot, line: tl, col: tc });
            }
            '"' => {
                bump!();
                let mut s = String::new();
                loop {
                    match bump!() {
                        Some('"') => break,
                        Some('\\') => match bump!() {
                            Some('"') => s.push('"'),
                            Some('\\') => s.push('\\'),
                            Some(c) => {
                                return Err(syntax(line, col, format!("unknown escape `\\{c}`")))
                            }
                            None => return Err(syntax(tl, tc, "unterminated string")),
                        },
                        Some('\n') | None => return Err(syntax(tl, tc, "unterminated string")),
                        Some(c) => s.push(c),
                    }
                }
                out.push(Token { tok: Tok::Str(s), line: tl, col: tc });
            }
            '=' | '!' | '<' | '>' => {
                bump!();
                let eq = chars.peek() == Some(&'=');
                let op = match (c, eq) {
                    ('=', true) => CmpOp::Eq,
                    ('!', true) => CmpOp::Ne,
                    ('<', true) => CmpOp::Le,
                    ('>', true) => CmpOp::Ge,
                    ('<', false) => CmpOp::Lt,
                    ('>', false) => CmpOp::Gt,
                    _ => return Err(syntax(tl, tc, format!("unexpected character `{c}`"))),
                };
                if eq {
                    bump!();
                }
                out.push(Token { tok: Tok::Op(op), line: tl, col: tc });
            }
            '-' | '0'..='9' => {
                let mut s = String::new();
                s.push(bump!().unwrap());
                if c == '-' && !matches!(chars.peek(), Some('0'..='9')) {
                    return Err(syntax(tl, tc, "expected digits after `-`"));
                }
                while let Some(&d) = chars.peek() {
                    if d.is_ascii_digit() {
                        s.push(bump!().unwrap());
                    } else {
                        break;
                    }
                }
                let n: i64 = s
                    .parse()
                    .map_err(|_| syntax(tl, tc, format!("integer `{s}` out of range")))?;
                out.push(Token { tok: Tok::Int(n), line: tl, col: tc });
            }
            'a'..='z' => {
                let mut s = String::new();
                while let Some(&d) = chars.peek() {
                    // Hyphens occur in combining-algorithm names only.
                    if d.is_ascii_lowercase() || d.is_ascii_digit() || d == '_' || d == '-' {
                        s.push(bump!().unwrap());
                    } else {
                        break;
                    }
                }
                out.push(Token { tok: Tok::Word(s), line: tl, col: tc });
            }
            other => return Err(syntax(tl, tc, format!("unexpected character `{other}`"))),
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    end: (u32, u32),
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.toks.get(self.pos)
    }

    fn at(&self) -> (u32, u32) {
        self.peek().map(|t| (t.line, t.col)).unwrap_or(self.end)
    }

    fn next(&mut self, what: &str) -> Result<Token, ParseError> {
        let (l, c) = self.at();
        let t = self
            .toks
            .get(self.pos)
            .cloned()
            .ok_or_else(|| syntax(l, c, format!("expected {what}, found end of input")))?;
        self.pos += 1;
        Ok(t)
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<Token, ParseError> {
        let t = self.next(what)?;
        if t.tok == tok {
            Ok(t)
        } else {
            Err(syntax(t.line, t.col, format!("expected {what}, found {}", t.tok.describe())))
        }
    }

    fn word(&mut self, what: &str) -> Result<(String, u32, u32), ParseError> {
        let t = self.next(what)?;
        match t.tok {
            Tok::Word(w) => Ok((w, t.line, t.col)),
            other => Err(syntax(t.line, t.col, format!("expected {what}, found {}", other.describe()))),
        }
    }

    fn string(&mut self, what: &str) -> Result<String, ParseError> {
        let t = self.next(what)?;
        match t.tok {
            Tok::Str(s) => Ok(s),
            other => Err(syntax(t.line, t.col, format!("expected {what}, found {}", other.describe()))),
        }
    }

    fn eat_word(&mut self, w: &str) -> bool {
        if matches!(self.peek(), Some(Token { tok: Tok::Word(s), .. }) if s == w) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn policy(&mut self) -> Result<Policy, ParseError> {
        let (kw, l, c) = self.word("`policy`")?;
        if kw != "policy" {
            return Err(syntax(l, c, format!("expected `policy`, found `{kw}`")));
        }
        let id = self.string("policy id string")?;
        let (idl, idc) = (l, c);
        self.expect(Tok::LBrace, "`{`")?;

        let mut target = None;
        if self.eat_word("target") {
            self.expect(Tok::Colon, "`:`")?;
            target = Some(self.expr()?);
        }
        let mut combining = CombiningAlg::DenyOverrides;
        if self.eat_word("combining") {
            self.expect(Tok::Colon, "`:`")?;
            let (alg, al, ac) = self.word("combining algorithm")?;
            combining = match alg.as_str() {
                "deny-overrides" => CombiningAlg::DenyOverrides,
                "permit-overrides" => CombiningAlg::PermitOverrides,
                "first-applicable" => CombiningAlg::FirstApplicable,
                other => {
                    return Err(syntax(al, ac, format!("unknown combining algorithm `{other}`")))
                }
            };
        }

        let mut rules = Vec::new();
        let mut locs = Vec::new();
        loop {
            match self.peek() {
                Some(Token { tok: Tok::Word(w), .. }) if w == "rule" => {
                    let (rl, rc) = self.at();
                    rules.push(self.rule()?);
                    locs.push((rl, rc));
                }
                Some(Token { tok: Tok::RBrace, .. }) => {
                    self.pos += 1;
                    break;
                }
                _ => {
                    let (l, c) = self.at();
                    let found = self
                        .peek()
                        .map(|t| t.tok.describe())
                        .unwrap_or_else(|| "end of input".into());
                    return Err(syntax(l, c, format!("expected `rule` or `}}`, found {found}")));
                }
            }
        }

        for (i, rule) in rules.iter().enumerate() {
            if matches!(rule.condition, Condition::Otherwise) && i + 1 != rules.len() {
                let (l, c) = locs[i];
                return Err(ParseError { line: l, col: c, kind: ParseErrorKind::MisplacedOtherwise });
            }
        }
        match Policy::new(&id, target, combining, rules) {
            Ok(p) => Ok(p),
            Err(PolicyInvariantError::MisplacedOtherwise(_)) => {
                Err(ParseError { line: idl, col: idc, kind: ParseErrorKind::MisplacedOtherwise })
            }
            Err(PolicyInvariantError::NoRules(_)) => {
                Err(syntax(idl, idc, format!("policy {id:?} has no rules")))
            }
            Err(PolicyInvariantError::BadExpr { source, .. }) => {
                Err(syntax(idl, idc, source.to_string()))
            }
        }
    }

    fn rule(&mut self) -> Result<Rule, ParseError> {
        let (kw, l, c) = self.word("`rule`")?;
        debug_assert_eq!(kw, "rule");
        let (eff, el, ec) = self.word("`permit` or `deny`")?;
        let effect = match eff.as_str() {
            "permit" => Effect::Permit,
            "deny" => Effect::Deny,
            other => return Err(syntax(el, ec, format!("expected `permit` or `deny`, found `{other}`"))),
        };
        let condition = if self.eat_word("when") {
            Condition::When(self.expr()?)
        } else if self.eat_word("otherwise") {
            Condition::Otherwise
        } else {
            return Err(syntax(l, c, "rule needs `when <expr>` or `otherwise`"));
        };
        let mut obligations = Vec::new();
        while self.eat_word("obligate") {
            obligations.push(self.string("obligation id string")?);
        }
        Ok(Rule { effect, condition, obligations })
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.and_expr()?;
        while self.eat_word("or") {
            let rhs = self.and_expr()?;
            lhs = Expr::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn and_expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        while self.eat_word("and") {
            let rhs = self.unary()?;
            lhs = Expr::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.eat_word("not") {
            return Ok(Expr::not(self.unary()?));
        }
        if matches!(self.peek(), Some(Token { tok: Tok::LParen, .. })) {
            self.pos += 1;
            let e = self.expr()?;
            self.expect(Tok::RParen, "`)`")?;
            return Ok(e);
        }
        if self.eat_word("present") {
            self.expect(Tok::LParen, "`(`")?;
            let path = self.path()?;
            self.expect(Tok::RParen, "`)`")?;
            return Ok(Expr::Present(path));
        }
        self.cmp()
    }

    fn cmp(&mut self) -> Result<Expr, ParseError> {
        let path = self.path()?;
        let t = self.next("comparison operator")?;
        let op = match t.tok {
            Tok::Op(op) => op,
            other => {
                return Err(syntax(
                    t.line,
                    t.col,
                    format!("expected comparison operator, found {}", other.describe()),
                ))
            }
        };
        let lit = self.next("literal")?;
        let value = match lit.tok {
            Tok::Str(s) => AttrValue::Text(s),
            Tok::Int(n) => AttrValue::Int(n),
            Tok::Word(w) if w == "true" => AttrValue::Bool(true),
            Tok::Word(w) if w == "false" => AttrValue::Bool(false),
            other => {
                return Err(syntax(
                    lit.line,
                    lit.col,
                    format!("expected literal, found {}", other.describe()),
                ))
            }
        };
        if op.is_ordering() && !value.is_orderable() {
            return Err(syntax(
                t.line,
                t.col,
                format!("ordering comparison `{op}` requires an integer literal"),
            ));
        }
        Ok(Expr::Compare { op, path, value })
    }

    fn path(&mut self) -> Result<AttrPath, ParseError> {
        let (cat, l, c) = self.word("attribute category")?;
        let category = AttrCategory::from_str_opt(&cat).ok_or_else(|| {
            syntax(l, c, format!("expected `subject`, `resource`, `action` or `environment`, found `{cat}`"))
        })?;
        let mut segments = Vec::new();
        loop {
            if matches!(self.peek(), Some(Token { tok: Tok::Dot, .. })) {
                self.pos += 1;
            } else if segments.is_empty() {
                let (l, c) = self.at();
                return Err(syntax(l, c, "attribute path needs at least one segment after the category"));
            } else {
                break;
            }
            let (seg, sl, sc) = self.word("path segment")?;
            if !super::valid_segment(&seg) {
                return Err(syntax(sl, sc, format!("invalid path segment `{seg}`")));
            }
            segments.push(seg);
        }
        AttrPath::new(category, &segments.join("."))
            .map_err(|e| syntax(l, c, e.to_string()))
    }
}

/// Parses a full `.pol` document into policies in source order.
///
/// The combining algorithm defaults to deny-overrides when omitted. Policy
/// ids must be unique within the set.
pub fn parse_policy_set(text: &str) -> Result<Vec<Policy>, ParseError> {
    let toks = lex(text)?;
    let end = toks
        .last()
        .map(|t| (t.line, t.col + 1))
        .unwrap_or((1, 1));
    let mut parser = Parser { toks, pos: 0, end };
    let mut policies: Vec<Policy> = Vec::new();
    while parser.peek().is_some() {
        let (l, c) = parser.at();
        let p = parser.policy()?;
        if policies.iter().any(|q| q.id() == p.id()) {
            return Err(ParseError {
                line: l,
                col: c,
                kind: ParseErrorKind::DuplicatePolicyId(p.id().to_string()),
            });
        }
        policies.push(p);
    }
    Ok(policies)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_policy_with_defaults() {
        let set = parse_policy_set(r#"policy "p1" { rule permit when subject.role == "av" }"#)
            .unwrap();
        assert_eq!(set.len(), 1);
        let p = &set[0];
        assert_eq!(p.id(), "p1");
        assert_eq!(p.combining(), CombiningAlg::DenyOverrides);
        assert_eq!(p.rules().len(), 1);
        assert_eq!(p.rules()[0].effect, Effect::Permit);
        assert!(p.target().is_none());
    }

    #[test]
    fn empty_input_is_empty_set() {
        assert_eq!(parse_policy_set("").unwrap(), vec![]);
        assert_eq!(parse_policy_set("  # just a comment\n").unwrap(), vec![]);
    }

    #[test]
    fn misplaced_otherwise_is_reported() {
        let err = parse_policy_set(
            r#"policy "p" { rule deny otherwise rule permit when action.name == "x" }"#,
        )
        .unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::MisplacedOtherwise);
    }

    #[test]
    fn duplicate_policy_id_is_reported() {
        let err = parse_policy_set(
            r#"
            policy "p" { rule permit otherwise }
            policy "p" { rule deny otherwise }
            "#,
        )
        .unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::DuplicatePolicyId("p".into()));
        assert_eq!(err.line, 3);
    }

    #[test]
    fn full_grammar_round() {
        let text = r#"
        # campus access
        policy "full" {
            target: action.name == "door.open" and present(subject.badge)
            combining: first-applicable
            rule deny when subject.banned == true obligate "report" obligate "lock"
            rule permit when subject.clearance >= 3 or subject.role == "guard"
            rule deny otherwise
        }
        "#;
        let set = parse_policy_set(text).unwrap();
        let p = &set[0];
        assert_eq!(p.combining(), CombiningAlg::FirstApplicable);
        assert_eq!(p.rules().len(), 3);
        assert_eq!(p.rules()[0].obligations, vec!["report", "lock"]);
        assert!(matches!(p.rules()[2].condition, Condition::Otherwise));
        assert!(p.target().is_some());
    }

    #[test]
    fn errors_carry_location() {
        let err = parse_policy_set("policy \"p\" {\n  rule permit when subject.x == ]\n}")
            .unwrap_err();
        assert_eq!(err.line, 2);
        assert!(matches!(err.kind, ParseErrorKind::Syntax(_)));

        let err = parse_policy_set(r#"policy "p" { rule permit when subject.x < "s" }"#)
            .unwrap_err();
        assert!(err.to_string().contains("ordering comparison"));
    }

    #[test]
    fn negative_integers_and_comments() {
        let set = parse_policy_set(
            "policy \"p\" { rule permit when environment.temp > -10 } # trailing",
        )
        .unwrap();
        match &set[0].rules()[0].condition {
            Condition::When(Expr::Compare { value, .. }) => {
                assert_eq!(*value, AttrValue::Int(-10));
            }
            other => panic!("unexpected condition {other:?}"),
        }
    }

    #[test]
    fn precedence_binds_and_tighter_than_or() {
        let set = parse_policy_set(
            r#"policy "p" { rule permit when subject.a == 1 or subject.b == 2 and subject.c == 3 }"#,
        )
        .unwrap();
        match &set[0].rules()[0].condition {
            Condition::When(Expr::Or(_, rhs)) => {
                assert!(matches!(**rhs, Expr::And(_, _)));
            }
            other => panic!("unexpected condition {other:?}"),
        }
    }
}
