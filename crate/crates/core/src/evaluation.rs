//! Precision, recall and F1 against reference alignments, plus the ablation
//! and threshold-sweep harnesses.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::ingest::ReferenceAlignment;
use crate::matcher::{
    meets, select, Aligner, CandidateMapping, ConfigError, PipelineOrder, WeightConfig,
    FULL_WEIGHTS,
};
use crate::model::OntologyModel;
use crate::term::Iri;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub true_positives: usize,
    pub false_positives: usize,
    pub false_negatives: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub candidate_count: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub per_pair: Option<Vec<PairReport>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairReport {
    pub pair: String,
    #[serde(flatten)]
    pub report: EvaluationReport,
}

/// x / y, with 0 / 0 read as 0.
fn safe_div(x: f64, y: f64) -> f64 {
    if y == 0.0 {
        0.0
    } else {
        x / y
    }
}

impl EvaluationReport {
    pub fn from_counts(true_positives: usize, false_positives: usize, false_negatives: usize) -> Self {
        let tp = true_positives as f64;
        let precision = safe_div(tp, tp + false_positives as f64);
        let recall = safe_div(tp, tp + false_negatives as f64);
        EvaluationReport {
            true_positives,
            false_positives,
            false_negatives,
            precision,
            recall,
            f1: safe_div(2.0 * precision * recall, precision + recall),
            candidate_count: true_positives + false_positives,
            per_pair: None,
        }
    }
}

fn unordered(a: &Iri, b: &Iri) -> (Iri, Iri) {
    if a <= b {
        (a.clone(), b.clone())
    } else {
        (b.clone(), a.clone())
    }
}

/// Scores a set of predicted pairs. Pair direction is ignored and only `=`
/// reference cells count.
pub fn evaluate_pairs<'a>(
    predicted: impl IntoIterator<Item = (&'a Iri, &'a Iri)>,
    reference: &ReferenceAlignment,
) -> EvaluationReport {
    let gold: BTreeSet<(Iri, Iri)> = reference
        .equivalences()
        .map(|(a, b)| unordered(a, b))
        .collect();
    let output: BTreeSet<(Iri, Iri)> = predicted.into_iter().map(|(a, b)| unordered(a, b)).collect();
    let tp = output.intersection(&gold).count();
    EvaluationReport::from_counts(tp, output.len() - tp, gold.len() - tp)
}

pub fn evaluate(output: &[CandidateMapping], reference: &ReferenceAlignment) -> EvaluationReport {
    evaluate_pairs(output.iter().map(|m| (&m.source, &m.target)), reference)
}

/// Sums counts over all reports, then recomputes the ratios.
pub fn micro_average(reports: &[EvaluationReport]) -> EvaluationReport {
    let (tp, fp, fneg) = reports.iter().fold((0, 0, 0), |(tp, fp, fneg), r| {
        (tp + r.true_positives, fp + r.false_positives, fneg + r.false_negatives)
    });
    EvaluationReport::from_counts(tp, fp, fneg)
}

/// Micro average that keeps the per-pair reports.
pub fn micro_average_named(reports: Vec<(String, EvaluationReport)>) -> EvaluationReport {
    let plain: Vec<EvaluationReport> = reports.iter().map(|(_, r)| r.clone()).collect();
    let mut total = micro_average(&plain);
    total.per_pair = Some(
        reports
            .into_iter()
            .map(|(pair, report)| PairReport { pair, report })
            .collect(),
    );
    total
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AblationConfig {
    pub name: String,
    pub weights: [f64; 6],
    pub stable: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AblationRow {
    pub stable: bool,
    pub weight_label: String,
    pub weights: [f64; 6],
    pub candidate_count: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

pub const EQUAL_WEIGHT: f64 = 1.0 / 6.0;

/// The eight ablation configurations: five weightings with stable matching,
/// then three without.
pub fn builtin_ablation_configs() -> Vec<AblationConfig> {
    let row = |name: &str, weights: [f64; 6], stable: bool| AblationConfig {
        name: name.to_owned(),
        weights,
        stable,
    };
    let label_only = [1.0, 0.0, 0.0, 0.0, 0.0, 0.0];
    let structural_only = [0.0, 0.25, 0.25, 0.20, 0.20, 0.10];
    vec![
        row("Full", FULL_WEIGHTS, true),
        row("Label only", label_only, true),
        row("Structural only", structural_only, true),
        row("Equal", [EQUAL_WEIGHT; 6], true),
        row("Label+parent", [0.4, 0.0, 0.4, 0.0, 0.0, 0.2], true),
        row("Full", FULL_WEIGHTS, false),
        row("Label only", label_only, false),
        row("Structural only", structural_only, false),
    ]
}

/// Parses ablation configs from JSON: an array of `{name, weights, stable}`.
pub fn parse_ablation_configs(json: &str) -> Result<Vec<AblationConfig>, ConfigError> {
    let configs: Vec<AblationConfig> =
        serde_json::from_str(json).map_err(|e| ConfigError::Invalid(e.to_string()))?;
    for c in &configs {
        WeightConfig::default().with_weights(c.weights).validate()?;
    }
    Ok(configs)
}

/// Runs every config against one ontology pair. The label pre-filter runs
/// once; each config rescores and reselects the shared candidates.
pub fn run_ablation(
    source: &OntologyModel,
    target: &OntologyModel,
    reference: &ReferenceAlignment,
    configs: &[AblationConfig],
    base: &WeightConfig,
) -> Result<Vec<AblationRow>, ConfigError> {
    base.validate()?;
    let resolved: Vec<WeightConfig> = configs
        .iter()
        .map(|c| {
            let cfg = WeightConfig {
                weights: c.weights,
                stable_matching: c.stable,
                ..*base
            };
            cfg.validate().map(|_| cfg)
        })
        .collect::<Result<_, _>>()?;
    let aligner = Aligner::new(source, target, base.label_combine);
    let candidates = aligner.candidates(base.pre_filter);
    Ok(configs
        .iter()
        .zip(&resolved)
        .map(|(c, cfg)| {
            let output = select(aligner.score_all(&candidates, cfg), cfg);
            let report = evaluate(&output, reference);
            AblationRow {
                stable: c.stable,
                weight_label: c.name.clone(),
                weights: c.weights,
                candidate_count: report.candidate_count,
                precision: report.precision,
                recall: report.recall,
                f1: report.f1,
            }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub threshold: f64,
    pub report: EvaluationReport,
}

/// Evaluates the alignment at each threshold. Candidates, scores and (for
/// match-then-threshold) the stable matching are computed once.
pub fn threshold_sweep(
    source: &OntologyModel,
    target: &OntologyModel,
    reference: &ReferenceAlignment,
    thresholds: &[f64],
    config: &WeightConfig,
) -> Result<Vec<SweepPoint>, ConfigError> {
    config.validate()?;
    if thresholds.windows(2).any(|w| w[0] > w[1]) {
        return Err(ConfigError::UnsortedThresholds);
    }
    for &t in thresholds {
        if !(0.0..=1.0).contains(&t) {
            return Err(ConfigError::OutOfRange {
                field: "threshold",
                value: t,
            });
        }
    }
    let aligner = Aligner::new(source, target, config.label_combine);
    let candidates = aligner.candidates(config.pre_filter);
    let scored = aligner.score_all(&candidates, config);
    let no_threshold = WeightConfig {
        min_confidence: 0.0,
        ..*config
    };
    let matched = match config.order {
        PipelineOrder::MatchThenThreshold => Some(select(scored.clone(), &no_threshold)),
        PipelineOrder::ThresholdThenMatch => None,
    };
    Ok(thresholds
        .iter()
        .map(|&threshold| {
            let output: Vec<CandidateMapping> = match &matched {
                Some(m) => m.iter().filter(|c| meets(c.confidence, threshold)).cloned().collect(),
                None => select(
                    scored.clone(),
                    &WeightConfig {
                        min_confidence: threshold,
                        ..*config
                    },
                ),
            };
            SweepPoint {
                threshold,
                report: evaluate(&output, reference),
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::Cell;
    use crate::similarity::SignalVector;
    use proptest::prelude::*;

    fn iri(s: &str) -> Iri {
        Iri::new(format!("http://e/{s}")).unwrap()
    }

    fn reference(pairs: &[(&str, &str, &str)]) -> ReferenceAlignment {
        pairs
            .iter()
            .map(|(a, b, r)| Cell {
                entity1: iri(a),
                entity2: iri(b),
                relation: (*r).to_owned(),
                measure: 1.0,
            })
            .collect()
    }

    fn output(pairs: &[(&str, &str)]) -> Vec<CandidateMapping> {
        pairs
            .iter()
            .map(|(a, b)| CandidateMapping {
                source: iri(a),
                target: iri(b),
                signals: SignalVector::default(),
                confidence: 1.0,
                fallback_applied: false,
            })
            .collect()
    }

    #[test]
    fn counts_and_ratios() {
        let r = reference(&[("a", "x", "="), ("b", "y", "="), ("c", "z", "=")]);
        let rep = evaluate(&output(&[("a", "x"), ("b", "q")]), &r);
        assert_eq!((rep.true_positives, rep.false_positives, rep.false_negatives), (1, 1, 2));
        assert_eq!(rep.precision, 0.5);
        assert_eq!(rep.recall, 1.0 / 3.0);
        assert!((rep.f1 - 0.4).abs() < 1e-12);
        assert_eq!(rep.candidate_count, 2);
    }

    #[test]
    fn direction_is_ignored_and_only_equivalences_count() {
        let r = reference(&[("a", "x", "="), ("b", "y", "<")]);
        let rep = evaluate(&output(&[("x", "a"), ("b", "y")]), &r);
        assert_eq!((rep.true_positives, rep.false_positives, rep.false_negatives), (1, 1, 0));
    }

    #[test]
    fn empty_cases_score_zero() {
        let rep = evaluate(&[], &reference(&[]));
        assert_eq!((rep.precision, rep.recall, rep.f1), (0.0, 0.0, 0.0));
        let rep = evaluate(&output(&[("a", "x")]), &reference(&[]));
        assert_eq!((rep.precision, rep.recall, rep.f1), (0.0, 0.0, 0.0));
    }

    #[test]
    fn micro_average_sums_counts() {
        let a = EvaluationReport::from_counts(8, 2, 0);
        let b = EvaluationReport::from_counts(1, 1, 8);
        let m = micro_average(&[a.clone(), b.clone()]);
        assert_eq!((m.true_positives, m.false_positives, m.false_negatives), (9, 3, 8));
        assert_eq!(m.precision, 0.75);
        assert_eq!(m.recall, 9.0 / 17.0);
        let named = micro_average_named(vec![("p1".into(), a), ("p2".into(), b)]);
        assert_eq!(named.per_pair.as_ref().unwrap().len(), 2);
        let json = serde_json::to_value(&named).unwrap();
        assert_eq!(json["per_pair"][0]["pair"], "p1");
        assert_eq!(json["per_pair"][0]["true_positives"], 8);
    }

    #[test]
    fn builtin_configs_are_valid() {
        let configs = builtin_ablation_configs();
        assert_eq!(configs.len(), 8);
        assert_eq!(configs.iter().filter(|c| c.stable).count(), 5);
        for c in &configs {
            WeightConfig::default().with_weights(c.weights).validate().unwrap();
        }
    }

    #[test]
    fn ablation_configs_from_json() {
        let ok = parse_ablation_configs(r#"[{"name":"L","weights":[1,0,0,0,0,0],"stable":true}]"#).unwrap();
        assert_eq!(ok[0].name, "L");
        assert!(parse_ablation_configs(r#"[{"name":"L","weights":[1,1,0,0,0,0],"stable":true}]"#).is_err());
        assert!(parse_ablation_configs("{").is_err());
    }

    proptest! {
        #[test]
        fn report_invariants(tp in 0usize..50, fp in 0usize..50, fneg in 0usize..50) {
            let r = EvaluationReport::from_counts(tp, fp, fneg);
            for v in [r.precision, r.recall, r.f1] {
                prop_assert!((0.0..=1.0).contains(&v));
            }
            prop_assert_eq!(r.true_positives + r.false_positives, r.candidate_count);
            prop_assert!(r.f1 <= r.precision.max(r.recall) + 1e-12);
            prop_assert!(r.f1 + 1e-12 >= r.precision.min(r.recall));
        }
    }
}
