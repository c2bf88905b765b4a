use std::io::Write;
use std::path::Path;
use std::time::Instant;

use serde::Serialize;

use super::{
    into_text, read_bytes, write_file, AblateArgs, AlignArgs, CliError, EvaluateArgs, MatchArgs,
    MaterializeArgs, OrderChoice, SweepArgs,
};
use crate::config::{ConfigOverrides, RunConfig};
use crate::evaluation::{
    builtin_ablation_configs, evaluate_pairs, micro_average_named, parse_ablation_configs,
    run_ablation, threshold_sweep, AblationRow, EvaluationReport,
};
use crate::graph::TripleGraph;
use crate::ingest::{parse_alignment, parse_rdf, write_alignment, write_turtle, RdfFormat, ReferenceAlignment};
use crate::manifest::{manifest_path, FileDigest, Manifest};
use crate::matcher::{align_detailed, ConfigError, PipelineOrder};
use crate::model::{build_model_with, OntologyModel};
use crate::reasoner::{default_ruleset, materialize_with_stats, RuleSet};
use crate::term::{Iri, Term};
use crate::vocab::{owl, rdf};

fn out(stdout: &mut dyn Write, text: &str) -> Result<(), CliError> {
    stdout.write_all(text.as_bytes()).map_err(|source| CliError::Io {
        path: "<stdout>".into(),
        source,
    })
}

fn load_graph(path: &Path) -> Result<(TripleGraph, FileDigest), CliError> {
    let bytes = read_bytes(path)?;
    let digest = FileDigest::of(path, &bytes);
    let text = into_text(path, bytes)?;
    let graph = parse_rdf(&text, RdfFormat::detect(path, &text)).map_err(|source| CliError::Parse {
        path: path.to_owned(),
        source,
    })?;
    Ok((graph, digest))
}

fn load_reference(path: &Path) -> Result<(ReferenceAlignment, FileDigest), CliError> {
    let bytes = read_bytes(path)?;
    let digest = FileDigest::of(path, &bytes);
    let text = into_text(path, bytes)?;
    let reference = parse_alignment(&text).map_err(|source| CliError::Parse {
        path: path.to_owned(),
        source,
    })?;
    Ok((reference, digest))
}

/// Defaults, then the config file, then flags.
fn resolve_config(args: &MatchArgs, manifest: &mut Manifest) -> Result<RunConfig, CliError> {
    let mut cfg = RunConfig::default();
    if let Some(path) = &args.config {
        let bytes = read_bytes(path)?;
        manifest.inputs.push(FileDigest::of(path, &bytes));
        let file = ConfigOverrides::from_toml(&into_text(path, bytes)?)?;
        cfg = cfg.apply(&file)?;
    }
    let cfg = cfg.apply(&args.overrides())?;
    cfg.validate()?;
    manifest.config = Some(serde_json::to_value(cfg).expect("config serializes"));
    Ok(cfg)
}

/// The graph's `owl:Ontology` IRI, or a `file:` IRI naming the input.
fn ontology_iri(graph: &TripleGraph, path: &Path) -> Iri {
    let ontology = Term::Iri(Iri::new(owl::ONTOLOGY).expect("valid"));
    let rdf_type = Iri::new(rdf::TYPE).expect("valid");
    graph
        .with_object(&ontology)
        .filter(|t| t.predicate == &rdf_type)
        .filter_map(|t| t.subject.as_iri().cloned())
        .min()
        .unwrap_or_else(|| {
            let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
            Iri::new(format!("file:{name}")).expect("has scheme")
        })
}

fn load_models(
    source: &Path,
    target: &Path,
    cfg: &RunConfig,
    manifest: &mut Manifest,
) -> Result<(OntologyModel, OntologyModel, Iri, Iri), CliError> {
    let (src_graph, d1) = load_graph(source)?;
    let (tgt_graph, d2) = load_graph(target)?;
    manifest.inputs.extend([d1, d2]);
    Ok((
        build_model_with(&src_graph, cfg.model),
        build_model_with(&tgt_graph, cfg.model),
        ontology_iri(&src_graph, source),
        ontology_iri(&tgt_graph, target),
    ))
}

fn finish(manifest: &mut Manifest, started: Instant, output: &Path, bytes: &[u8]) -> Result<(), CliError> {
    write_file(output, bytes)?;
    manifest.outputs.push(FileDigest::of(output, bytes));
    manifest.duration_ms = started.elapsed().as_millis() as u64;
    write_file(&manifest_path(output), manifest.to_json().as_bytes())
}

pub(super) fn align(args: AlignArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let started = Instant::now();
    let mut manifest = Manifest::new("align");
    let cfg = resolve_config(&args.matching, &mut manifest)?;
    let (src, tgt, onto1, onto2) = load_models(&args.source, &args.target, &cfg, &mut manifest)?;
    let run = align_detailed(&src, &tgt, &cfg.matcher)?;
    let xml = write_alignment(&run.mappings, &onto1, &onto2);
    finish(&mut manifest, started, &args.output, xml.as_bytes())?;
    out(
        stdout,
        &format!(
            "{} mappings from {} candidates ({} source classes, {} target classes) in {} ms\n",
            run.mappings.len(),
            run.candidates_generated,
            src.class_count(),
            tgt.class_count(),
            manifest.duration_ms
        ),
    )
}

fn metrics_line(r: &EvaluationReport) -> String {
    format!(
        "precision {:.3}  recall {:.3}  f1 {:.3}  tp {}  fp {}  fn {}",
        r.precision, r.recall, r.f1, r.true_positives, r.false_positives, r.false_negatives
    )
}

pub(super) fn evaluate(args: EvaluateArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    if args.alignment.len() != args.reference.len() {
        return Err(ConfigError::Invalid(format!(
            "{} --alignment files but {} --reference files",
            args.alignment.len(),
            args.reference.len()
        ))
        .into());
    }
    let mut reports = Vec::new();
    for (system, gold) in args.alignment.iter().zip(&args.reference) {
        let (system_alignment, _) = load_reference(system)?;
        let (reference, _) = load_reference(gold)?;
        let name = system
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        reports.push((name, evaluate_pairs(system_alignment.equivalences(), &reference)));
    }
    let report = if reports.len() == 1 {
        reports.pop().expect("one report").1
    } else {
        micro_average_named(reports)
    };
    if let Some(path) = &args.json {
        write_file(path, to_json(&report).as_bytes())?;
    }
    let mut text = String::new();
    for p in report.per_pair.iter().flatten() {
        text.push_str(&format!("{}: {}\n", p.pair, metrics_line(&p.report)));
    }
    let label = if report.per_pair.is_some() { "micro-average: " } else { "" };
    text.push_str(&format!("{label}{}\n", metrics_line(&report)));
    out(stdout, &text)
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

#[derive(Serialize)]
struct AblationRun {
    order: &'static str,
    rows: Vec<AblationRow>,
}

pub(super) fn ablate(args: AblateArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let mut manifest = Manifest::new("ablate");
    let cfg = resolve_config(&args.matching, &mut manifest)?;
    let configs = if args.configs == "builtin" {
        builtin_ablation_configs()
    } else {
        let path = Path::new(&args.configs);
        parse_ablation_configs(&into_text(path, read_bytes(path)?)?)?
    };
    let (src, tgt, _, _) = load_models(&args.source, &args.target, &cfg, &mut manifest)?;
    let (reference, _) = load_reference(&args.reference)?;
    let orders: &[PipelineOrder] = match args.orders {
        OrderChoice::MatchThenThreshold => &[PipelineOrder::MatchThenThreshold],
        OrderChoice::ThresholdThenMatch => &[PipelineOrder::ThresholdThenMatch],
        OrderChoice::Both => &[PipelineOrder::MatchThenThreshold, PipelineOrder::ThresholdThenMatch],
    };
    let mut runs = Vec::new();
    for &order in orders {
        let base = crate::matcher::WeightConfig { order, ..cfg.matcher };
        runs.push(AblationRun {
            order: order.name(),
            rows: run_ablation(&src, &tgt, &reference, &configs, &base)?,
        });
    }
    if let Some(path) = &args.json {
        write_file(path, to_json(&serde_json::json!({ "runs": runs })).as_bytes())?;
    }
    let mut text = String::new();
    for run in &runs {
        text.push_str(&format!("order: {}\n", run.order));
        text.push_str(&format!(
            "{:<16} {:<6} {:<36} {:>10} {:>9} {:>6} {:>6}\n",
            "weights", "stable", "w1..w6", "candidates", "precision", "recall", "f1"
        ));
        for r in &run.rows {
            let w: Vec<String> = r.weights.iter().map(|w| format!("{w:.3}")).collect();
            text.push_str(&format!(
                "{:<16} {:<6} {:<36} {:>10} {:>9.3} {:>6.3} {:>6.3}\n",
                r.weight_label,
                if r.stable { "yes" } else { "no" },
                w.join(","),
                r.candidate_count,
                r.precision,
                r.recall,
                r.f1
            ));
        }
    }
    out(stdout, &text)
}

pub(super) fn sweep(args: SweepArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let mut manifest = Manifest::new("sweep");
    let cfg = resolve_config(&args.matching, &mut manifest)?;
    let (src, tgt, _, _) = load_models(&args.source, &args.target, &cfg, &mut manifest)?;
    let (reference, _) = load_reference(&args.reference)?;
    let points = threshold_sweep(&src, &tgt, &reference, &args.thresholds, &cfg.matcher)?;
    if let Some(path) = &args.json {
        write_file(path, to_json(&points).as_bytes())?;
    }
    let text: String = points
        .iter()
        .map(|p| {
            format!(
                "threshold {:.3}  candidates {}  {}\n",
                p.threshold,
                p.report.candidate_count,
                metrics_line(&p.report)
            )
        })
        .collect();
    out(stdout, &text)
}

pub(super) fn materialize(args: MaterializeArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let started = Instant::now();
    let mut manifest = Manifest::new("materialize");
    let (graph, digest) = load_graph(&args.input)?;
    manifest.inputs.push(digest);
    let rules = match &args.rules {
        Some(path) => {
            let bytes = read_bytes(path)?;
            manifest.inputs.push(FileDigest::of(path, &bytes));
            RuleSet::parse(&into_text(path, bytes)?).map_err(|source| CliError::Rules {
                path: path.to_owned(),
                source,
            })?
        }
        None => default_ruleset(),
    };
    let result = materialize_with_stats(&graph, &rules);
    let turtle = write_turtle(&result.graph);
    finish(&mut manifest, started, &args.output, turtle.as_bytes())?;
    out(
        stdout,
        &format!(
            "{} input triples, {} inferred, {} rounds\n",
            graph.len(),
            result.inferred,
            result.rounds
        ),
    )
}
