//! Turtle subset reader and a plain Turtle writer.
//!
//! Supported: `@prefix`/`@base` and their SPARQL-style forms, the `a` keyword,
//! predicate lists, object lists, blank-node property lists, collections,
//! labelled blank nodes, string literals in all four quoting styles with
//! language tags or datatypes, numeric and boolean literals, and comments.
//! Blank nodes are labelled `b0`, `b1`, ... in document order.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::graph::TripleGraph;
use crate::ingest::{resolve_iri, ParseError};
use crate::term::{BlankNode, Iri, Literal, Term, Triple};
use crate::vocab::{self, rdf, xsd};

pub fn parse_turtle(text: &str) -> Result<TripleGraph, ParseError> {
    let mut parser = Parser::new(text);
    parser.document()?;
    Ok(parser.graph)
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    column: usize,
    prefixes: HashMap<String, String>,
    base: Option<String>,
    bnode_labels: HashMap<String, BlankNode>,
    next_bnode: usize,
    graph: TripleGraph,
}

impl Parser {
    fn new(text: &str) -> Self {
        Parser {
            chars: text.trim_start_matches('\u{feff}').chars().collect(),
            pos: 0,
            line: 1,
            column: 1,
            prefixes: HashMap::new(),
            base: None,
            bnode_labels: HashMap::new(),
            next_bnode: 0,
            graph: TripleGraph::new(),
        }
    }

    // ---- cursor ----

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn peek_at(&self, offset: usize) -> Option<char> {
        self.chars.get(self.pos + offset).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.bump();
            } else if c == '#' {
                while let Some(c) = self.bump() {
                    if c == '\n' {
                        break;
                    }
                }
            } else {
                break;
            }
        }
    }

    fn syntax(&self, message: impl Into<String>) -> ParseError {
        ParseError::Syntax {
            line: self.line,
            column: self.column,
            message: message.into(),
        }
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        self.skip_ws();
        match self.peek() {
            Some(found) if found == c => {
                self.bump();
                Ok(())
            }
            Some(found) => Err(self.syntax(format!("expected `{c}`, found `{found}`"))),
            None => Err(self.syntax(format!("expected `{c}`, found end of input"))),
        }
    }

    /// True if the input at the cursor is `word` (ASCII case-insensitive)
    /// followed by whitespace.
    fn at_keyword(&self, word: &str) -> bool {
        let n = word.len();
        let matches = word
            .chars()
            .enumerate()
            .all(|(i, w)| self.peek_at(i).is_some_and(|c| c.eq_ignore_ascii_case(&w)));
        matches && self.peek_at(n).is_some_and(char::is_whitespace)
    }

    fn fresh_bnode(&mut self) -> BlankNode {
        let b = BlankNode::new(format!("b{}", self.next_bnode));
        self.next_bnode += 1;
        b
    }

    fn emit(&mut self, s: Term, p: Iri, o: Term) -> Result<(), ParseError> {
        let t = Triple::new(s, p, o).map_err(|e| self.syntax(e.to_string()))?;
        self.graph.insert(t);
        Ok(())
    }

    // ---- grammar ----

    fn document(&mut self) -> Result<(), ParseError> {
        loop {
            self.skip_ws();
            let Some(c) = self.peek() else {
                return Ok(());
            };
            if c == '@' {
                self.at_directive()?;
            } else if self.at_keyword("PREFIX") {
                self.pos_advance(6);
                self.prefix_body()?;
            } else if self.at_keyword("BASE") {
                self.pos_advance(4);
                self.base_body()?;
            } else {
                self.triples()?;
                self.expect('.')?;
            }
        }
    }

    fn pos_advance(&mut self, n: usize) {
        for _ in 0..n {
            self.bump();
        }
    }

    fn at_directive(&mut self) -> Result<(), ParseError> {
        let (line, column) = (self.line, self.column);
        self.bump();
        let mut word = String::new();
        while let Some(c) = self.peek().filter(char::is_ascii_alphabetic) {
            word.push(c);
            self.bump();
        }
        match word.as_str() {
            "prefix" => self.prefix_body()?,
            "base" => self.base_body()?,
            _ => {
                return Err(ParseError::Unsupported {
                    line,
                    column,
                    construct: format!("directive `@{word}`"),
                })
            }
        }
        self.expect('.')
    }

    fn prefix_body(&mut self) -> Result<(), ParseError> {
        self.skip_ws();
        let mut name = String::new();
        while let Some(c) = self.peek() {
            if c == ':' {
                break;
            }
            if !is_pn_char(c) && c != '.' {
                return Err(self.syntax(format!("invalid character `{c}` in prefix name")));
            }
            name.push(c);
            self.bump();
        }
        self.expect(':')?;
        self.skip_ws();
        let iri = self.iri_ref()?;
        self.prefixes.insert(name, iri);
        Ok(())
    }

    fn base_body(&mut self) -> Result<(), ParseError> {
        self.skip_ws();
        let iri = self.iri_ref()?;
        self.base = Some(iri);
        Ok(())
    }

    fn triples(&mut self) -> Result<(), ParseError> {
        self.skip_ws();
        if self.peek() == Some('[') {
            let subject = self.blank_node_property_list()?;
            self.skip_ws();
            if self.peek() != Some('.') {
                self.predicate_object_list(&subject)?;
            }
            return Ok(());
        }
        let subject = self.subject()?;
        self.predicate_object_list(&subject)
    }

    fn subject(&mut self) -> Result<Term, ParseError> {
        self.skip_ws();
        match self.peek() {
            Some('<') => Ok(Term::Iri(self.iri_term()?)),
            Some('_') if self.peek_at(1) == Some(':') => Ok(Term::Blank(self.labelled_bnode()?)),
            Some('(') => self.collection(),
            Some('"') | Some('\'') => Err(self.syntax("literal in subject position")),
            Some(c) if is_pn_chars_base(c) || c == ':' => Ok(Term::Iri(self.prefixed_name()?)),
            Some(c) => Err(self.syntax(format!("unexpected `{c}` at start of subject"))),
            None => Err(self.syntax("unexpected end of input")),
        }
    }

    fn predicate_object_list(&mut self, subject: &Term) -> Result<(), ParseError> {
        loop {
            let predicate = self.verb()?;
            self.object_list(subject, &predicate)?;
            self.skip_ws();
            if self.peek() != Some(';') {
                return Ok(());
            }
            while self.peek() == Some(';') {
                self.bump();
                self.skip_ws();
            }
            // A trailing `;` may end the list.
            if matches!(self.peek(), Some('.') | Some(']') | None) {
                return Ok(());
            }
        }
    }

    fn verb(&mut self) -> Result<Iri, ParseError> {
        self.skip_ws();
        if self.peek() == Some('a') && self.peek_at(1).is_none_or(|c| !is_pn_char(c) && c != ':' && c != '.') {
            self.bump();
            return Ok(Iri::from_static(rdf::TYPE));
        }
        match self.peek() {
            Some('<') => self.iri_term(),
            Some(c) if is_pn_chars_base(c) || c == ':' => self.prefixed_name(),
            Some(c) => Err(self.syntax(format!("expected predicate, found `{c}`"))),
            None => Err(self.syntax("expected predicate, found end of input")),
        }
    }

    fn object_list(&mut self, subject: &Term, predicate: &Iri) -> Result<(), ParseError> {
        loop {
            let object = self.object()?;
            self.emit(subject.clone(), predicate.clone(), object)?;
            self.skip_ws();
            if self.peek() == Some(',') {
                self.bump();
            } else {
                return Ok(());
            }
        }
    }

    fn object(&mut self) -> Result<Term, ParseError> {
        self.skip_ws();
        match self.peek() {
            Some('<') => Ok(Term::Iri(self.iri_term()?)),
            Some('_') if self.peek_at(1) == Some(':') => Ok(Term::Blank(self.labelled_bnode()?)),
            Some('[') => self.blank_node_property_list(),
            Some('(') => self.collection(),
            Some('"') | Some('\'') => Ok(Term::Literal(self.rdf_literal()?)),
            Some(c) if c.is_ascii_digit() || matches!(c, '+' | '-' | '.') => {
                Ok(Term::Literal(self.numeric_literal()?))
            }
            Some(_) if self.at_boolean() => Ok(Term::Literal(self.boolean_literal())),
            Some(c) if is_pn_chars_base(c) || c == ':' => Ok(Term::Iri(self.prefixed_name()?)),
            Some(c) => Err(self.syntax(format!("unexpected `{c}` in object position"))),
            None => Err(self.syntax("expected object, found end of input")),
        }
    }

    fn blank_node_property_list(&mut self) -> Result<Term, ParseError> {
        self.expect('[')?;
        let node = Term::Blank(self.fresh_bnode());
        self.skip_ws();
        if self.peek() != Some(']') {
            self.predicate_object_list(&node)?;
        }
        self.expect(']')?;
        Ok(node)
    }

    fn collection(&mut self) -> Result<Term, ParseError> {
        self.expect('(')?;
        let first = Iri::from_static(rdf::FIRST);
        let rest = Iri::from_static(rdf::REST);
        let nil = Term::Iri(Iri::from_static(rdf::NIL));
        let mut head: Option<Term> = None;
        let mut previous: Option<Term> = None;
        loop {
            self.skip_ws();
            match self.peek() {
                Some(')') => {
                    self.bump();
                    break;
                }
                None => return Err(self.syntax("unterminated collection")),
                _ => {}
            }
            let cell = Term::Blank(self.fresh_bnode());
            let item = self.object()?;
            self.emit(cell.clone(), first.clone(), item)?;
            match &previous {
                Some(prev) => self.emit(prev.clone(), rest.clone(), cell.clone())?,
                None => head = Some(cell.clone()),
            }
            previous = Some(cell);
        }
        match previous {
            Some(last) => {
                self.emit(last, rest, nil)?;
                Ok(head.expect("non-empty collection has a head"))
            }
            None => Ok(nil),
        }
    }

    fn labelled_bnode(&mut self) -> Result<BlankNode, ParseError> {
        self.bump();
        self.bump();
        let mut label = String::new();
        while let Some(c) = self.peek() {
            if is_pn_char(c) || (c == '.' && self.peek_at(1).is_some_and(is_pn_char)) {
                label.push(c);
                self.bump();
            } else {
                break;
            }
        }
        if label.is_empty() {
            return Err(self.syntax("empty blank node label"));
        }
        if let Some(b) = self.bnode_labels.get(&label) {
            return Ok(b.clone());
        }
        let b = self.fresh_bnode();
        self.bnode_labels.insert(label, b.clone());
        Ok(b)
    }

    fn iri_term(&mut self) -> Result<Iri, ParseError> {
        let (line, column) = (self.line, self.column);
        let raw = self.iri_ref()?;
        Iri::new(raw).map_err(|e| ParseError::Syntax {
            line,
            column,
            message: e.to_string(),
        })
    }

    /// Reads `<...>` and resolves it against the current base.
    fn iri_ref(&mut self) -> Result<String, ParseError> {
        let (line, column) = (self.line, self.column);
        if self.peek() != Some('<') {
            return Err(self.syntax("expected `<`"));
        }
        self.bump();
        let mut raw = String::new();
        loop {
            match self.bump() {
                Some('>') => break,
                Some('\\') => raw.push(self.unicode_escape()?),
                Some(c) if c.is_whitespace() || matches!(c, '<' | '"' | '{' | '}' | '|' | '^' | '`') => {
                    return Err(self.syntax(format!("invalid character `{}` in IRI", c.escape_default())))
                }
                Some(c) => raw.push(c),
                None => return Err(ParseError::Syntax { line, column, message: "unterminated IRI".into() }),
            }
        }
        resolve_iri(self.base.as_deref(), &raw).map_err(|message| ParseError::Syntax {
            line,
            column,
            message,
        })
    }

    fn unicode_escape(&mut self) -> Result<char, ParseError> {
        let width = match self.bump() {
            Some('u') => 4,
            Some('U') => 8,
            _ => return Err(self.syntax("invalid escape in IRI")),
        };
        self.hex_char(width)
    }

    fn hex_char(&mut self, width: usize) -> Result<char, ParseError> {
        let mut code = 0u32;
        for _ in 0..width {
            let d = self
                .bump()
                .and_then(|c| c.to_digit(16))
                .ok_or_else(|| self.syntax("invalid hex escape"))?;
            code = code * 16 + d;
        }
        char::from_u32(code).ok_or_else(|| self.syntax("escape is not a Unicode scalar value"))
    }

    fn prefixed_name(&mut self) -> Result<Iri, ParseError> {
        let (line, column) = (self.line, self.column);
        let mut prefix = String::new();
        while let Some(c) = self.peek() {
            if c == ':' {
                break;
            }
            if is_pn_char(c) || (c == '.' && self.peek_at(1).is_some_and(|n| is_pn_char(n) || n == ':')) {
                prefix.push(c);
                self.bump();
            } else {
                return Err(self.syntax(format!("unexpected `{c}` in prefixed name")));
            }
        }
        if self.peek() != Some(':') {
            return Err(self.syntax("expected `:` in prefixed name"));
        }
        self.bump();
        let mut local = String::new();
        while let Some(c) = self.peek() {
            if is_pn_char(c) || c == ':' {
                local.push(c);
                self.bump();
            } else if c == '.' && self.peek_at(1).is_some_and(|n| is_pn_char(n) || n == ':' || n == '%' || n == '\\') {
                local.push(c);
                self.bump();
            } else if c == '%' {
                local.push(c);
                self.bump();
                for _ in 0..2 {
                    match self.bump() {
                        Some(h) if h.is_ascii_hexdigit() => local.push(h),
                        _ => return Err(self.syntax("invalid percent escape in local name")),
                    }
                }
            } else if c == '\\' {
                self.bump();
                match self.bump() {
                    Some(e) if "_~.-!$&'()*+,;=/?#@%".contains(e) => local.push(e),
                    _ => return Err(self.syntax("invalid escape in local name")),
                }
            } else {
                break;
            }
        }
        let namespace = self
            .prefixes
            .get(&prefix)
            .ok_or(ParseError::UndefinedPrefix { line, column, prefix })?;
        Iri::new(format!("{namespace}{local}")).map_err(|e| ParseError::Syntax {
            line,
            column,
            message: e.to_string(),
        })
    }

    fn rdf_literal(&mut self) -> Result<Literal, ParseError> {
        let lexical = self.string()?;
        match self.peek() {
            Some('@') => {
                self.bump();
                let mut tag = String::new();
                while let Some(c) = self.peek().filter(|c| c.is_ascii_alphanumeric() || *c == '-') {
                    tag.push(c);
                    self.bump();
                }
                if tag.is_empty() || !tag.starts_with(|c: char| c.is_ascii_alphabetic()) {
                    return Err(self.syntax("invalid language tag"));
                }
                Ok(Literal::with_language(lexical, tag))
            }
            Some('^') if self.peek_at(1) == Some('^') => {
                self.bump();
                self.bump();
                let datatype = match self.peek() {
                    Some('<') => self.iri_term()?,
                    _ => self.prefixed_name()?,
                };
                Ok(Literal::typed(lexical, datatype))
            }
            _ => Ok(Literal::simple(lexical)),
        }
    }

    fn string(&mut self) -> Result<String, ParseError> {
        let (line, column) = (self.line, self.column);
        let quote = self.bump().expect("caller checked for a quote");
        let long = self.peek() == Some(quote) && self.peek_at(1) == Some(quote);
        if long {
            self.bump();
            self.bump();
        }
        let unterminated = ParseError::UnterminatedLiteral { line, column };
        let mut out = String::new();
        loop {
            let Some(c) = self.bump() else {
                return Err(unterminated);
            };
            if c == quote {
                if !long {
                    return Ok(out);
                }
                if self.peek() == Some(quote) && self.peek_at(1) == Some(quote) {
                    // Extra quotes before the closing triple belong to the content.
                    while self.peek_at(2) == Some(quote) {
                        out.push(quote);
                        self.bump();
                    }
                    self.bump();
                    self.bump();
                    return Ok(out);
                }
                out.push(c);
                continue;
            }
            match c {
                '\\' => {
                    let escaped = match self.bump() {
                        Some('t') => '\t',
                        Some('b') => '\u{8}',
                        Some('n') => '\n',
                        Some('r') => '\r',
                        Some('f') => '\u{c}',
                        Some('"') => '"',
                        Some('\'') => '\'',
                        Some('\\') => '\\',
                        Some('u') => self.hex_char(4)?,
                        Some('U') => self.hex_char(8)?,
                        Some(other) => {
                            return Err(self.syntax(format!("invalid string escape `\\{other}`")))
                        }
                        None => return Err(unterminated),
                    };
                    out.push(escaped);
                }
                '\n' | '\r' if !long => return Err(unterminated),
                _ => out.push(c),
            }
        }
    }

    fn numeric_literal(&mut self) -> Result<Literal, ParseError> {
        let mut lexical = String::new();
        if let Some(sign) = self.peek().filter(|c| matches!(c, '+' | '-')) {
            lexical.push(sign);
            self.bump();
        }
        let digits = |p: &mut Self, out: &mut String| {
            let mut n = 0;
            while let Some(d) = p.peek().filter(char::is_ascii_digit) {
                out.push(d);
                p.bump();
                n += 1;
            }
            n
        };
        let int_digits = digits(self, &mut lexical);
        let mut datatype = xsd::INTEGER;
        if self.peek() == Some('.') && self.peek_at(1).is_some_and(|c| c.is_ascii_digit()) {
            lexical.push('.');
            self.bump();
            digits(self, &mut lexical);
            datatype = xsd::DECIMAL;
        } else if int_digits == 0 {
            return Err(self.syntax("malformed number"));
        }
        if let Some(e) = self.peek().filter(|c| matches!(c, 'e' | 'E')) {
            lexical.push(e);
            self.bump();
            if let Some(sign) = self.peek().filter(|c| matches!(c, '+' | '-')) {
                lexical.push(sign);
                self.bump();
            }
            if digits(self, &mut lexical) == 0 {
                return Err(self.syntax("malformed exponent"));
            }
            datatype = xsd::DOUBLE;
        }
        Ok(Literal::typed(lexical, Iri::from_static(datatype)))
    }

    fn at_boolean(&self) -> bool {
        ["true", "false"].iter().any(|word| {
            word.chars().enumerate().all(|(i, w)| self.peek_at(i) == Some(w))
                && self
                    .peek_at(word.len())
                    .is_none_or(|c| !is_pn_char(c) && c != ':')
        })
    }

    fn boolean_literal(&mut self) -> Literal {
        let word = if self.peek() == Some('t') { "true" } else { "false" };
        self.pos_advance(word.len());
        Literal::typed(word, Iri::from_static(xsd::BOOLEAN))
    }
}

fn is_pn_chars_base(c: char) -> bool {
    c.is_alphabetic()
}

fn is_pn_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '-' || c == '\u{b7}'
}

/// Serializes a graph as Turtle, one triple per line, sorted, using the
/// rdf/rdfs/owl/xsd prefixes where the local part is a plain name.
pub fn write_turtle(graph: &TripleGraph) -> String {
    let mut out = String::new();
    for (prefix, ns) in vocab::WELL_KNOWN_PREFIXES {
        let _ = writeln!(out, "@prefix {prefix}: <{ns}> .");
    }
    if !graph.is_empty() {
        out.push('\n');
    }
    for t in graph.to_sorted_vec() {
        let _ = writeln!(
            out,
            "{} {} {} .",
            term_text(t.subject()),
            iri_text(t.predicate()),
            term_text(t.object())
        );
    }
    out
}

fn iri_text(iri: &Iri) -> String {
    for (prefix, ns) in vocab::WELL_KNOWN_PREFIXES {
        if let Some(local) = iri.as_str().strip_prefix(ns) {
            let plain = local
                .chars()
                .next()
                .is_some_and(|c| c.is_ascii_alphabetic())
                && local.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
            if plain {
                return format!("{prefix}:{local}");
            }
        }
    }
    let mut s = String::with_capacity(iri.as_str().len() + 2);
    s.push('<');
    for c in iri.as_str().chars() {
        match c {
            '>' | '<' | '"' | '{' | '}' | '|' | '^' | '`' | '\\' => {
                let _ = write!(s, "\\u{:04X}", c as u32);
            }
            c if c <= ' ' => {
                let _ = write!(s, "\\u{:04X}", c as u32);
            }
            c => s.push(c),
        }
    }
    s.push('>');
    s
}

fn term_text(term: &Term) -> String {
    match term {
        Term::Iri(iri) => iri_text(iri),
        Term::Blank(b) => format!("_:{}", b.label()),
        Term::Literal(l) => {
            let mut s = String::from("\"");
            for c in l.lexical().chars() {
                match c {
                    '"' => s.push_str("\\\""),
                    '\\' => s.push_str("\\\\"),
                    '\n' => s.push_str("\\n"),
                    '\r' => s.push_str("\\r"),
                    '\t' => s.push_str("\\t"),
                    c => s.push(c),
                }
            }
            s.push('"');
            if let Some(lang) = l.language() {
                s.push('@');
                s.push_str(lang);
            } else if let Some(dt) = l.datatype() {
                s.push_str("^^");
                s.push_str(&iri_text(dt));
            }
            s
        }
    }
}
