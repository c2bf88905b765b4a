//! C ABI over the `ontomatch` library.
//!
//! Every object crosses the boundary as an opaque handle created by an
//! `om_*` constructor and released by the matching `om_*_free`. Functions
//! return an [`OmStatus`]; on failure [`om_last_error_message`] describes the
//! error. Strings passed in must be NUL-terminated UTF-8. Strings handed out
//! by `om_*_to_*` functions are owned by the caller and released with
//! [`om_string_free`].

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use ontomatch::evaluation::evaluate;
use ontomatch::ingest::{parse_alignment, parse_rdf, write_alignment, write_turtle, RdfFormat};
use ontomatch::matcher::{align, CandidateMapping, WeightConfig};
use ontomatch::model::{build_model_with, ModelOptions};
use ontomatch::reasoner::{default_ruleset, materialize};
use ontomatch::{Iri, OntologyModel, ReferenceAlignment, TripleGraph};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OmStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    ConfigError = 4,
    IndexOutOfRange = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OmFormat {
    Turtle = 0,
    RdfXml = 1,
    /// Guess from the first non-blank character.
    Auto = 2,
}

pub struct OmGraph {
    inner: TripleGraph,
}

pub struct OmModel {
    inner: OntologyModel,
}

pub struct OmConfig {
    inner: WeightConfig,
    options: ModelOptions,
}

pub struct OmAlignment {
    mappings: Vec<CandidateMapping>,
    /// NUL-terminated copies of the source and target IRIs, borrowed by
    /// `OmMapping` views.
    names: Vec<(CString, CString)>,
}

pub struct OmReference {
    inner: ReferenceAlignment,
}

/// Borrowed view of one mapping. The strings stay valid until the alignment
/// is freed.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct OmMapping {
    pub source: *const c_char,
    pub target: *const c_char,
    pub confidence: f64,
    /// Label, property, parent, instance, restriction, neighbourhood.
    pub signals: [f64; 6],
    pub fallback_applied: bool,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct OmMetrics {
    pub true_positives: usize,
    pub false_positives: usize,
    pub false_negatives: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: impl Into<String>) {
    let mut message = message.into();
    message.retain(|c| c != '\0');
    let c = CString::new(message).expect("NUL bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(OmStatus, String);

/// Runs `body`, records any error message and converts panics to
/// `OmStatus::Panic`.
fn guard(body: impl FnOnce() -> Result<(), Failure>) -> OmStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => OmStatus::Ok,
        Ok(Err(Failure(status, message))) => {
            set_error(message);
            status
        }
        Err(_) => {
            set_error("internal panic");
            OmStatus::Panic
        }
    }
}

fn null(name: &str) -> Failure {
    Failure(OmStatus::NullArgument, format!("{name} is null"))
}

unsafe fn str_arg<'a>(p: *const c_char, name: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(name));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(OmStatus::InvalidUtf8, format!("{name} is not valid UTF-8")))
}

unsafe fn ref_arg<'a, T>(p: *const T, name: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(name))
}

unsafe fn mut_arg<'a, T>(p: *mut T, name: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| null(name))
}

unsafe fn put<T>(out: *mut *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("out"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("out"));
    }
    let c = CString::new(s).map_err(|e| Failure(OmStatus::InvalidUtf8, e.to_string()))?;
    *out = c.into_raw();
    Ok(())
}

unsafe fn free<T>(p: *mut T) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Message for the last failed call on this thread, or null. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn om_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn om_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

#[no_mangle]
pub unsafe extern "C" fn om_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

#[no_mangle]
pub unsafe extern "C" fn om_graph_parse(text: *const c_char, format: OmFormat, out: *mut *mut OmGraph) -> OmStatus {
    guard(|| {
        let text = str_arg(text, "text")?;
        let format = match format {
            OmFormat::Turtle => RdfFormat::Turtle,
            OmFormat::RdfXml => RdfFormat::RdfXml,
            OmFormat::Auto => RdfFormat::detect(std::path::Path::new(""), text),
        };
        let graph = parse_rdf(text, format).map_err(|e| Failure(OmStatus::ParseError, e.to_string()))?;
        put(out, OmGraph { inner: graph })
    })
}

#[no_mangle]
pub unsafe extern "C" fn om_graph_len(graph: *const OmGraph) -> usize {
    graph.as_ref().map_or(0, |g| g.inner.len())
}

/// Closure of `graph` under the built-in OWL RL rules.
#[no_mangle]
pub unsafe extern "C" fn om_graph_materialize(graph: *const OmGraph, out: *mut *mut OmGraph) -> OmStatus {
    guard(|| {
        let graph = ref_arg(graph, "graph")?;
        put(out, OmGraph {
            inner: materialize(&graph.inner, &default_ruleset()),
        })
    })
}

#[no_mangle]
pub unsafe extern "C" fn om_graph_to_turtle(graph: *const OmGraph, out: *mut *mut c_char) -> OmStatus {
    guard(|| {
        let graph = ref_arg(graph, "graph")?;
        put_string(out, write_turtle(&graph.inner))
    })
}

#[no_mangle]
pub unsafe extern "C" fn om_graph_free(graph: *mut OmGraph) {
    free(graph)
}

#[no_mangle]
pub unsafe extern "C" fn om_model_build(graph: *const OmGraph, config: *const OmConfig, out: *mut *mut OmModel) -> OmStatus {
    guard(|| {
        let graph = ref_arg(graph, "graph")?;
        let options = config.as_ref().map_or_else(ModelOptions::default, |c| c.options);
        put(out, OmModel {
            inner: build_model_with(&graph.inner, options),
        })
    })
}

#[no_mangle]
pub unsafe extern "C" fn om_model_class_count(model: *const OmModel) -> usize {
    model.as_ref().map_or(0, |m| m.inner.class_count())
}

#[no_mangle]
pub unsafe extern "C" fn om_model_free(model: *mut OmModel) {
    free(model)
}

/// A config holding the default weights and thresholds.
#[no_mangle]
pub unsafe extern "C" fn om_config_new(out: *mut *mut OmConfig) -> OmStatus {
    guard(|| {
        put(out, OmConfig {
            inner: WeightConfig::default(),
            options: ModelOptions::default(),
        })
    })
}

/// Sets the six signal weights. Validation happens in `om_config_validate`
/// and `om_align`.
#[no_mangle]
pub unsafe extern "C" fn om_config_set_weights(config: *mut OmConfig, weights: *const f64) -> OmStatus {
    guard(|| {
        let config = mut_arg(config, "config")?;
        if weights.is_null() {
            return Err(null("weights"));
        }
        let w = std::slice::from_raw_parts(weights, 6);
        config.inner.weights.copy_from_slice(w);
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn om_config_set_min_confidence(config: *mut OmConfig, value: f64) -> OmStatus {
    guard(|| {
        mut_arg(config, "config")?.inner.min_confidence = value;
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn om_config_set_pre_filter(config: *mut OmConfig, value: f64) -> OmStatus {
    guard(|| {
        mut_arg(config, "config")?.inner.pre_filter = value;
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn om_config_set_stable(config: *mut OmConfig, stable: bool) -> OmStatus {
    guard(|| {
        mut_arg(config, "config")?.inner.stable_matching = stable;
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn om_config_set_synonyms(config: *mut OmConfig, enabled: bool) -> OmStatus {
    guard(|| {
        mut_arg(config, "config")?.options.synonyms_enabled = enabled;
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn om_config_validate(config: *const OmConfig) -> OmStatus {
    guard(|| {
        ref_arg(config, "config")?
            .inner
            .validate()
            .map_err(|e| Failure(OmStatus::ConfigError, e.to_string()))
    })
}

#[no_mangle]
pub unsafe extern "C" fn om_config_free(config: *mut OmConfig) {
    free(config)
}

/// Aligns two models. A null config means the defaults.
#[no_mangle]
pub unsafe extern "C" fn om_align(
    source: *const OmModel,
    target: *const OmModel,
    config: *const OmConfig,
    out: *mut *mut OmAlignment,
) -> OmStatus {
    guard(|| {
        let source = ref_arg(source, "source")?;
        let target = ref_arg(target, "target")?;
        let cfg = config.as_ref().map_or_else(WeightConfig::default, |c| c.inner);
        let mappings = align(&source.inner, &target.inner, &cfg)
            .map_err(|e| Failure(OmStatus::ConfigError, e.to_string()))?;
        let names = mappings
            .iter()
            .map(|m| {
                let c = |i: &Iri| CString::new(i.as_str()).expect("IRIs contain no NUL");
                (c(&m.source), c(&m.target))
            })
            .collect();
        put(out, OmAlignment { mappings, names })
    })
}

#[no_mangle]
pub unsafe extern "C" fn om_alignment_len(alignment: *const OmAlignment) -> usize {
    alignment.as_ref().map_or(0, |a| a.mappings.len())
}

/// Mappings are ordered by confidence descending, then source and target.
#[no_mangle]
pub unsafe extern "C" fn om_alignment_get(alignment: *const OmAlignment, index: usize, out: *mut OmMapping) -> OmStatus {
    guard(|| {
        let alignment = ref_arg(alignment, "alignment")?;
        let out = mut_arg(out, "out")?;
        let m = alignment.mappings.get(index).ok_or_else(|| {
            Failure(
                OmStatus::IndexOutOfRange,
                format!("index {index} out of range for {} mappings", alignment.mappings.len()),
            )
        })?;
        let (s, t) = &alignment.names[index];
        *out = OmMapping {
            source: s.as_ptr(),
            target: t.as_ptr(),
            confidence: m.confidence,
            signals: m.signals.to_array(),
            fallback_applied: m.fallback_applied,
        };
        Ok(())
    })
}

/// Alignment-format XML for the mappings.
#[no_mangle]
pub unsafe extern "C" fn om_alignment_to_xml(
    alignment: *const OmAlignment,
    onto1: *const c_char,
    onto2: *const c_char,
    out: *mut *mut c_char,
) -> OmStatus {
    guard(|| {
        let alignment = ref_arg(alignment, "alignment")?;
        let iri = |p, name| -> Result<Iri, Failure> {
            Iri::new(str_arg(p, name)?).map_err(|e| Failure(OmStatus::ParseError, e.to_string()))
        };
        let (o1, o2) = (iri(onto1, "onto1")?, iri(onto2, "onto2")?);
        put_string(out, write_alignment(&alignment.mappings, &o1, &o2))
    })
}

#[no_mangle]
pub unsafe extern "C" fn om_alignment_free(alignment: *mut OmAlignment) {
    free(alignment)
}

#[no_mangle]
pub unsafe extern "C" fn om_reference_parse(xml: *const c_char, out: *mut *mut OmReference) -> OmStatus {
    guard(|| {
        let xml = str_arg(xml, "xml")?;
        let reference = parse_alignment(xml).map_err(|e| Failure(OmStatus::ParseError, e.to_string()))?;
        put(out, OmReference { inner: reference })
    })
}

#[no_mangle]
pub unsafe extern "C" fn om_reference_len(reference: *const OmReference) -> usize {
    reference.as_ref().map_or(0, |r| r.inner.len())
}

#[no_mangle]
pub unsafe extern "C" fn om_reference_free(reference: *mut OmReference) {
    free(reference)
}

#[no_mangle]
pub unsafe extern "C" fn om_evaluate(
    alignment: *const OmAlignment,
    reference: *const OmReference,
    out: *mut OmMetrics,
) -> OmStatus {
    guard(|| {
        let alignment = ref_arg(alignment, "alignment")?;
        let reference = ref_arg(reference, "reference")?;
        let out = mut_arg(out, "out")?;
        let r = evaluate(&alignment.mappings, &reference.inner);
        *out = OmMetrics {
            true_positives: r.true_positives,
            false_positives: r.false_positives,
            false_negatives: r.false_negatives,
            precision: r.precision,
            recall: r.recall,
            f1: r.f1,
        };
        Ok(())
    })
}
