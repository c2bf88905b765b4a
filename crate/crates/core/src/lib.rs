//! Ontology alignment with stable 1-to-1 matching, precision/recall
//! evaluation against reference alignments, and OWL RL materialization.
//!
//! The pipeline reads two ontologies ([`ingest`]), builds a class model for
//! each ([`model`]), computes six similarity signals per class pair
//! ([`similarity`]), combines them into a confidence and selects a 1-to-1
//! alignment ([`matcher`]), and scores it ([`evaluation`]).

pub mod cli;
pub mod config;
pub mod evaluation;
pub mod graph;
pub mod ingest;
pub mod manifest;
pub mod matcher;
pub mod model;
pub mod reasoner;
pub mod similarity;
pub mod term;
pub mod vocab;

pub use config::{ConfigOverrides, RunConfig};
pub use evaluation::{
    builtin_ablation_configs, evaluate, micro_average, run_ablation, threshold_sweep,
    AblationConfig, AblationRow, EvaluationReport,
};
pub use graph::TripleGraph;
pub use ingest::{parse_alignment, parse_rdf, parse_rdfxml, parse_turtle, ParseError, RdfFormat, ReferenceAlignment};
pub use matcher::{align, stable_match, CandidateMapping, ConfigError, WeightConfig};
pub use model::{build_model, build_model_with, ClassEntity, ModelOptions, OntologyModel};
pub use reasoner::{default_ruleset, materialize, RuleSet};
pub use similarity::SignalVector;
pub use term::{Iri, Literal, Term, Triple};
