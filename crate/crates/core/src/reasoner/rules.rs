//! Rule syntax and the built-in rule set.
//!
//! One rule per line:
//!
//! ```text
//! @prefix ex: <http://example.org/> .
//! # comment
//! name: ?a rdfs:subClassOf ?b , ?b rdfs:subClassOf ?c -> ?a rdfs:subClassOf ?c
//! ```
//!
//! Premises and conclusions are comma-separated triple patterns. Terms are
//! `?variables`, `<iris>`, prefixed names, or `a` for `rdf:type`. The prefixes
//! `rdf`, `rdfs`, `owl` and `xsd` are predeclared. Every conclusion variable
//! must occur in a premise.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

use crate::term::Iri;
use crate::vocab::{rdf, WELL_KNOWN_PREFIXES};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RuleError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: undefined prefix `{prefix}`")]
    UndefinedPrefix { line: usize, prefix: String },
    #[error("rule `{rule}`: conclusion variable ?{variable} does not occur in any premise")]
    UnboundVariable { rule: String, variable: String },
    #[error("rule `{0}` is defined twice")]
    DuplicateName(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum PatternTerm {
    Var(String),
    Iri(Iri),
}

impl fmt::Display for PatternTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PatternTerm::Var(v) => write!(f, "?{v}"),
            PatternTerm::Iri(i) => write!(f, "{i}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TriplePattern {
    pub subject: PatternTerm,
    pub predicate: PatternTerm,
    pub object: PatternTerm,
}

impl TriplePattern {
    pub fn terms(&self) -> [&PatternTerm; 3] {
        [&self.subject, &self.predicate, &self.object]
    }
}

impl fmt::Display for TriplePattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.subject, self.predicate, self.object)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    pub name: String,
    pub premises: Vec<TriplePattern>,
    pub conclusions: Vec<TriplePattern>,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |ps: &[TriplePattern]| ps.iter().map(ToString::to_string).collect::<Vec<_>>().join(" , ");
        write!(f, "{}: {} -> {}", self.name, join(&self.premises), join(&self.conclusions))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleSet {
    rules: Vec<Rule>,
}

impl RuleSet {
    pub fn new(rules: Vec<Rule>) -> Result<Self, RuleError> {
        let mut names = BTreeSet::new();
        for rule in &rules {
            if !names.insert(rule.name.as_str()) {
                return Err(RuleError::DuplicateName(rule.name.clone()));
            }
            let bound: BTreeSet<&str> = rule
                .premises
                .iter()
                .flat_map(|p| p.terms())
                .filter_map(|t| match t {
                    PatternTerm::Var(v) => Some(v.as_str()),
                    PatternTerm::Iri(_) => None,
                })
                .collect();
            for t in rule.conclusions.iter().flat_map(|p| p.terms()) {
                if let PatternTerm::Var(v) = t {
                    if !bound.contains(v.as_str()) {
                        return Err(RuleError::UnboundVariable {
                            rule: rule.name.clone(),
                            variable: v.clone(),
                        });
                    }
                }
            }
        }
        Ok(RuleSet { rules })
    }

    pub fn parse(text: &str) -> Result<Self, RuleError> {
        let mut prefixes: HashMap<String, String> = WELL_KNOWN_PREFIXES
            .iter()
            .map(|(p, ns)| ((*p).to_owned(), (*ns).to_owned()))
            .collect();
        let mut rules = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.trim();
            if content.is_empty() || content.starts_with('#') {
                continue;
            }
            if let Some(decl) = content.strip_prefix("@prefix") {
                let (prefix, ns) = parse_prefix(decl, line)?;
                prefixes.insert(prefix, ns);
                continue;
            }
            rules.push(parse_rule(content, line, &prefixes)?);
        }
        RuleSet::new(rules)
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn get(&self, name: &str) -> Option<&Rule> {
        self.rules.iter().find(|r| r.name == name)
    }
}

fn syntax(line: usize, message: impl Into<String>) -> RuleError {
    RuleError::Syntax {
        line,
        message: message.into(),
    }
}

fn parse_prefix(decl: &str, line: usize) -> Result<(String, String), RuleError> {
    let decl = decl.trim().strip_suffix('.').unwrap_or(decl).trim();
    let (prefix, ns) = decl
        .split_once(char::is_whitespace)
        .ok_or_else(|| syntax(line, "expected `@prefix name: <iri> .`"))?;
    let prefix = prefix
        .strip_suffix(':')
        .ok_or_else(|| syntax(line, "prefix name must end with `:`"))?;
    let ns = ns
        .trim()
        .strip_prefix('<')
        .and_then(|n| n.strip_suffix('>'))
        .ok_or_else(|| syntax(line, "namespace must be written as <iri>"))?;
    Ok((prefix.to_owned(), ns.to_owned()))
}

fn tokenize(text: &str, line: usize) -> Result<Vec<String>, RuleError> {
    let mut tokens = Vec::new();
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
        } else if c == ',' {
            chars.next();
            tokens.push(",".to_owned());
        } else if c == '<' {
            let mut tok = String::new();
            for c in chars.by_ref() {
                tok.push(c);
                if c == '>' {
                    break;
                }
            }
            if !tok.ends_with('>') {
                return Err(syntax(line, "unterminated <iri>"));
            }
            tokens.push(tok);
        } else {
            let mut tok = String::new();
            while let Some(&c) = chars.peek() {
                if c.is_whitespace() || c == ',' {
                    break;
                }
                tok.push(c);
                chars.next();
            }
            tokens.push(tok);
        }
    }
    Ok(tokens)
}

fn parse_term(tok: &str, line: usize, prefixes: &HashMap<String, String>) -> Result<PatternTerm, RuleError> {
    let iri = |s: String| Iri::new(s).map(PatternTerm::Iri).map_err(|e| syntax(line, e.to_string()));
    if let Some(var) = tok.strip_prefix('?') {
        if var.is_empty() || !var.chars().all(|c| c.is_alphanumeric() || c == '_') {
            return Err(syntax(line, format!("invalid variable `{tok}`")));
        }
        return Ok(PatternTerm::Var(var.to_owned()));
    }
    if tok == "a" {
        return iri(rdf::TYPE.to_owned());
    }
    if let Some(inner) = tok.strip_prefix('<').and_then(|t| t.strip_suffix('>')) {
        return iri(inner.to_owned());
    }
    if tok.starts_with('"') {
        return Err(syntax(line, "literals are not supported in rules"));
    }
    match tok.split_once(':') {
        Some((prefix, local)) => match prefixes.get(prefix) {
            Some(ns) => iri(format!("{ns}{local}")),
            None => Err(RuleError::UndefinedPrefix {
                line,
                prefix: prefix.to_owned(),
            }),
        },
        None => Err(syntax(line, format!("unexpected token `{tok}`"))),
    }
}

fn parse_patterns(
    tokens: &[String],
    line: usize,
    prefixes: &HashMap<String, String>,
) -> Result<Vec<TriplePattern>, RuleError> {
    let mut patterns = Vec::new();
    for group in tokens.split(|t| t == ",") {
        let [s, p, o] = group else {
            return Err(syntax(line, format!("expected 3 terms per pattern, got {}", group.len())));
        };
        let predicate = parse_term(p, line, prefixes)?;
        patterns.push(TriplePattern {
            subject: parse_term(s, line, prefixes)?,
            predicate,
            object: parse_term(o, line, prefixes)?,
        });
    }
    Ok(patterns)
}

fn parse_rule(content: &str, line: usize, prefixes: &HashMap<String, String>) -> Result<Rule, RuleError> {
    let (name, body) = content
        .split_once(": ")
        .ok_or_else(|| syntax(line, "expected `name: premises -> conclusions`"))?;
    let name = name.trim();
    if name.is_empty() || name.contains(char::is_whitespace) {
        return Err(syntax(line, format!("invalid rule name `{name}`")));
    }
    let tokens = tokenize(body, line)?;
    let arrow = tokens
        .iter()
        .position(|t| t == "->")
        .ok_or_else(|| syntax(line, "missing `->`"))?;
    let premises = parse_patterns(&tokens[..arrow], line, prefixes)?;
    let conclusions = parse_patterns(&tokens[arrow + 1..], line, prefixes)?;
    Ok(Rule {
        name: name.to_owned(),
        premises,
        conclusions,
    })
}

/// Text of the built-in rule set.
pub const DEFAULT_RULES: &str = "\
# Class hierarchy
scm-sco: ?c1 rdfs:subClassOf ?c2 , ?c2 rdfs:subClassOf ?c3 -> ?c1 rdfs:subClassOf ?c3
cax-sco: ?c1 rdfs:subClassOf ?c2 , ?x a ?c1 -> ?x a ?c2
scm-eqc1: ?c1 owl:equivalentClass ?c2 -> ?c1 rdfs:subClassOf ?c2 , ?c2 rdfs:subClassOf ?c1
scm-eqc2: ?c1 rdfs:subClassOf ?c2 , ?c2 rdfs:subClassOf ?c1 -> ?c1 owl:equivalentClass ?c2

# Property hierarchy
scm-spo: ?p1 rdfs:subPropertyOf ?p2 , ?p2 rdfs:subPropertyOf ?p3 -> ?p1 rdfs:subPropertyOf ?p3
prp-spo1: ?p1 rdfs:subPropertyOf ?p2 , ?x ?p1 ?y -> ?x ?p2 ?y
scm-eqp1: ?p1 owl:equivalentProperty ?p2 -> ?p1 rdfs:subPropertyOf ?p2 , ?p2 rdfs:subPropertyOf ?p1
scm-eqp2: ?p1 rdfs:subPropertyOf ?p2 , ?p2 rdfs:subPropertyOf ?p1 -> ?p1 owl:equivalentProperty ?p2

# Domain and range
prp-dom: ?p rdfs:domain ?c , ?x ?p ?y -> ?x a ?c
prp-rng: ?p rdfs:range ?c , ?x ?p ?y -> ?y a ?c
scm-dom1: ?p rdfs:domain ?c1 , ?c1 rdfs:subClassOf ?c2 -> ?p rdfs:domain ?c2
scm-dom2: ?p2 rdfs:domain ?c , ?p1 rdfs:subPropertyOf ?p2 -> ?p1 rdfs:domain ?c
scm-rng1: ?p rdfs:range ?c1 , ?c1 rdfs:subClassOf ?c2 -> ?p rdfs:range ?c2
scm-rng2: ?p2 rdfs:range ?c , ?p1 rdfs:subPropertyOf ?p2 -> ?p1 rdfs:range ?c

# Property characteristics
prp-symp: ?p a owl:SymmetricProperty , ?x ?p ?y -> ?y ?p ?x
prp-trp: ?p a owl:TransitiveProperty , ?x ?p ?y , ?y ?p ?z -> ?x ?p ?z
prp-inv1: ?p1 owl:inverseOf ?p2 , ?x ?p1 ?y -> ?y ?p2 ?x
prp-inv2: ?p1 owl:inverseOf ?p2 , ?x ?p2 ?y -> ?y ?p1 ?x

# Equality
eq-sym: ?x owl:sameAs ?y -> ?y owl:sameAs ?x
eq-trans: ?x owl:sameAs ?y , ?y owl:sameAs ?z -> ?x owl:sameAs ?z
eq-rep-s: ?s owl:sameAs ?s2 , ?s ?p ?o -> ?s2 ?p ?o
eq-rep-p: ?p owl:sameAs ?p2 , ?s ?p ?o -> ?s ?p2 ?o
eq-rep-o: ?o owl:sameAs ?o2 , ?s ?p ?o -> ?s ?p ?o2
";

pub fn default_ruleset() -> RuleSet {
    RuleSet::parse(DEFAULT_RULES).expect("built-in rules parse")
}
