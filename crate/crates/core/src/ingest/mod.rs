//! Readers for Turtle, RDF/XML and Alignment-format XML, plus the Turtle and
//! alignment writers.
//!
//! Each parser accepts a documented subset of its syntax. Anything outside that
//! subset is reported as [`ParseError::Unsupported`] with a line and column;
//! nothing is skipped silently.

mod alignment;
mod rdfxml;
mod turtle;

use std::path::Path;

use thiserror::Error;

use crate::graph::TripleGraph;

pub use alignment::{
    parse_alignment, parse_alignment_document, write_alignment, AlignmentDocument, Cell,
    ReferenceAlignment, EQUIVALENCE,
};
pub use rdfxml::parse_rdfxml;
pub use turtle::{parse_turtle, write_turtle};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("{line}:{column}: syntax error: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{line}:{column}: undefined prefix `{prefix}`")]
    UndefinedPrefix {
        line: usize,
        column: usize,
        prefix: String,
    },
    #[error("{line}:{column}: unterminated literal")]
    UnterminatedLiteral { line: usize, column: usize },
    #[error("{line}:{column}: unsupported construct: {construct}")]
    Unsupported {
        line: usize,
        column: usize,
        construct: String,
    },
    #[error("{line}:{column}: malformed XML: {message}")]
    Xml {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{line}:{column}: invalid alignment: {message}")]
    Alignment {
        line: usize,
        column: usize,
        message: String,
    },
}

impl ParseError {
    /// 1-based (line, column) of the error.
    pub fn location(&self) -> (usize, usize) {
        match *self {
            ParseError::Syntax { line, column, .. }
            | ParseError::UndefinedPrefix { line, column, .. }
            | ParseError::UnterminatedLiteral { line, column }
            | ParseError::Unsupported { line, column, .. }
            | ParseError::Xml { line, column, .. }
            | ParseError::Alignment { line, column, .. } => (line, column),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RdfFormat {
    Turtle,
    RdfXml,
}

impl RdfFormat {
    /// Picks a format from the file extension, falling back to sniffing the
    /// first non-blank character of `text`.
    pub fn detect(path: &Path, text: &str) -> Self {
        match path
            .extension()
            .and_then(|e| e.to_str())
            .map(str::to_ascii_lowercase)
            .as_deref()
        {
            Some("ttl") => RdfFormat::Turtle,
            Some("owl") | Some("rdf") | Some("xml") => RdfFormat::RdfXml,
            _ => {
                if text.trim_start_matches('\u{feff}').trim_start().starts_with('<')
                    && !text.trim_start().starts_with("<http")
                {
                    RdfFormat::RdfXml
                } else {
                    RdfFormat::Turtle
                }
            }
        }
    }
}

pub fn parse_rdf(text: &str, format: RdfFormat) -> Result<TripleGraph, ParseError> {
    match format {
        RdfFormat::Turtle => parse_turtle(text),
        RdfFormat::RdfXml => parse_rdfxml(text),
    }
}

/// True if `s` starts with an IRI scheme (`[A-Za-z][A-Za-z0-9+.-]*:`).
pub(crate) fn has_scheme(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() => {}
        _ => return false,
    }
    for c in chars {
        match c {
            ':' => return true,
            c if c.is_ascii_alphanumeric() || matches!(c, '+' | '.' | '-') => {}
            _ => return false,
        }
    }
    false
}

/// Resolves `reference` against `base`. Absolute references are returned
/// verbatim.
pub(crate) fn resolve_iri(base: Option<&str>, reference: &str) -> Result<String, String> {
    if has_scheme(reference) {
        return Ok(reference.to_owned());
    }
    let base = base.ok_or_else(|| format!("relative IRI `{reference}` without a base"))?;
    if reference.is_empty() {
        return Ok(base.split('#').next().unwrap_or(base).to_owned());
    }
    if let Some(fragment) = reference.strip_prefix('#') {
        let stem = base.split('#').next().unwrap_or(base);
        return Ok(format!("{stem}#{fragment}"));
    }
    let base_url = url::Url::parse(base).map_err(|e| format!("invalid base `{base}`: {e}"))?;
    base_url
        .join(reference)
        .map(String::from)
        .map_err(|e| format!("cannot resolve `{reference}` against `{base}`: {e}"))
}
