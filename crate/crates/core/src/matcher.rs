//! Candidate generation, weighted scoring, stable 1-to-1 matching and
//! thresholding.

use std::collections::{HashMap, HashSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{label_key, ClassEntity, OntologyModel};
use crate::similarity::{
    jaro_winkler_chars, label_similarity, structural_signals, LabelCombine, SignalVector,
    StructuralProfile,
};
use crate::term::Iri;

/// Tolerance for threshold comparisons, so a score that should equal a
/// threshold is not lost to rounding.
pub const THRESHOLD_EPSILON: f64 = 1e-9;
/// Allowed deviation of the weight sum from 1.
pub const WEIGHT_SUM_TOLERANCE: f64 = 1e-9;

pub const FULL_WEIGHTS: [f64; 6] = [0.25, 0.20, 0.15, 0.15, 0.15, 0.10];
pub const DEFAULT_PRE_FILTER: f64 = 0.75;
pub const DEFAULT_MIN_CONFIDENCE: f64 = 0.80;
pub const DEFAULT_FALLBACK_FACTOR: f64 = 0.85;

/// `value >= threshold`, allowing for rounding.
pub fn meets(value: f64, threshold: f64) -> bool {
    value >= threshold - THRESHOLD_EPSILON
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("weights must sum to 1 (got {sum})")]
    WeightSum { sum: f64 },
    #[error("weight {index} must be a finite non-negative number (got {value})")]
    InvalidWeight { index: usize, value: f64 },
    #[error("expected 6 weights, got {0}")]
    WeightCount(usize),
    #[error("{field} must lie in [0, 1] (got {value})")]
    OutOfRange { field: &'static str, value: f64 },
    #[error("thresholds must be sorted ascending")]
    UnsortedThresholds,
    #[error("invalid config: {0}")]
    Invalid(String),
}

/// Whether stable matching runs before or after the confidence threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PipelineOrder {
    #[default]
    MatchThenThreshold,
    ThresholdThenMatch,
}

impl PipelineOrder {
    pub fn name(self) -> &'static str {
        match self {
            PipelineOrder::MatchThenThreshold => "match-then-threshold",
            PipelineOrder::ThresholdThenMatch => "threshold-then-match",
        }
    }
}

impl std::str::FromStr for PipelineOrder {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "match-then-threshold" => Ok(PipelineOrder::MatchThenThreshold),
            "threshold-then-match" => Ok(PipelineOrder::ThresholdThenMatch),
            other => Err(format!(
                "unknown order `{other}` (expected match-then-threshold or threshold-then-match)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightConfig {
    /// Weights for label, property, parent, instance, restriction and
    /// neighbourhood signals.
    pub weights: [f64; 6],
    pub pre_filter: f64,
    pub min_confidence: f64,
    pub stable_matching: bool,
    /// Multiplier applied to the label score when every structural signal is 0.
    pub fallback_factor: f64,
    pub label_combine: LabelCombine,
    pub order: PipelineOrder,
}

impl Default for WeightConfig {
    fn default() -> Self {
        WeightConfig {
            weights: FULL_WEIGHTS,
            pre_filter: DEFAULT_PRE_FILTER,
            min_confidence: DEFAULT_MIN_CONFIDENCE,
            stable_matching: true,
            fallback_factor: DEFAULT_FALLBACK_FACTOR,
            label_combine: LabelCombine::Mean,
            order: PipelineOrder::MatchThenThreshold,
        }
    }
}

impl WeightConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        for (index, &value) in self.weights.iter().enumerate() {
            if !value.is_finite() || value < 0.0 {
                return Err(ConfigError::InvalidWeight { index, value });
            }
        }
        let sum: f64 = self.weights.iter().sum();
        if (sum - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
            return Err(ConfigError::WeightSum { sum });
        }
        for (field, value) in [
            ("pre_filter", self.pre_filter),
            ("min_confidence", self.min_confidence),
            ("fallback_factor", self.fallback_factor),
        ] {
            if !(0.0..=1.0).contains(&value) {
                return Err(ConfigError::OutOfRange { field, value });
            }
        }
        Ok(())
    }

    pub fn with_weights(mut self, weights: [f64; 6]) -> Self {
        self.weights = weights;
        self
    }
}

/// Converts a weight list of any length, rejecting anything but six entries.
pub fn weights_from_slice(w: &[f64]) -> Result<[f64; 6], ConfigError> {
    w.try_into().map_err(|_| ConfigError::WeightCount(w.len()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateMapping {
    pub source: Iri,
    pub target: Iri,
    pub signals: SignalVector,
    pub confidence: f64,
    pub fallback_applied: bool,
}

/// Weighted sum of the signals, or the label fallback when every structural
/// signal is 0. Returns the confidence and whether the fallback fired.
pub fn combine_signals(signals: &SignalVector, config: &WeightConfig) -> (f64, bool) {
    if signals.structure_is_zero() {
        return ((config.fallback_factor * signals.label).clamp(0.0, 1.0), true);
    }
    let s = signals.to_array();
    let total: f64 = config.weights.iter().zip(s).map(|(w, s)| w * s).sum();
    (total.clamp(0.0, 1.0), false)
}

/// Scores one pair from scratch.
pub fn score(
    source: &Iri,
    target: &Iri,
    source_model: &OntologyModel,
    target_model: &OntologyModel,
    config: &WeightConfig,
) -> Option<CandidateMapping> {
    let src = source_model.get(source)?;
    let tgt = target_model.get(target)?;
    let signals = crate::similarity::signal_vector(
        src,
        source_model,
        tgt,
        target_model,
        config.label_combine,
    );
    let (confidence, fallback_applied) = combine_signals(&signals, config);
    Some(CandidateMapping {
        source: source.clone(),
        target: target.clone(),
        signals,
        confidence,
        fallback_applied,
    })
}

/// Orders by confidence descending, then source and target IRI ascending.
fn rank(a: &CandidateMapping, b: &CandidateMapping) -> std::cmp::Ordering {
    b.confidence
        .total_cmp(&a.confidence)
        .then_with(|| a.source.cmp(&b.source))
        .then_with(|| a.target.cmp(&b.target))
}

/// Greedy 1-to-1 selection: walk candidates best first and keep each one
/// whose source and target are both still free.
pub fn stable_match(mut candidates: Vec<CandidateMapping>) -> Vec<CandidateMapping> {
    candidates.sort_by(rank);
    let mut used_src = HashSet::new();
    let mut used_tgt = HashSet::new();
    candidates.retain(|c| {
        if used_src.contains(&c.source) || used_tgt.contains(&c.target) {
            return false;
        }
        used_src.insert(c.source.clone());
        used_tgt.insert(c.target.clone());
        true
    });
    candidates
}

pub fn filter_threshold(candidates: Vec<CandidateMapping>, min_confidence: f64) -> Vec<CandidateMapping> {
    candidates
        .into_iter()
        .filter(|c| meets(c.confidence, min_confidence))
        .collect()
}

/// Runs matching and thresholding in the configured order. The result is
/// sorted by confidence descending, then source and target.
pub fn select(scored: Vec<CandidateMapping>, config: &WeightConfig) -> Vec<CandidateMapping> {
    let matched = |c: Vec<CandidateMapping>| {
        if config.stable_matching {
            stable_match(c)
        } else {
            let mut c = c;
            c.sort_by(rank);
            c
        }
    };
    match config.order {
        PipelineOrder::MatchThenThreshold => filter_threshold(matched(scored), config.min_confidence),
        PipelineOrder::ThresholdThenMatch => matched(filter_threshold(scored, config.min_confidence)),
    }
}

/// Pairs whose best label score reaches `config.pre_filter`, in (source,
/// target) IRI order.
pub fn generate_candidates(
    source: &OntologyModel,
    target: &OntologyModel,
    config: &WeightConfig,
) -> Vec<(Iri, Iri)> {
    let aligner = Aligner::new(source, target, config.label_combine);
    aligner
        .candidates(config.pre_filter)
        .into_iter()
        .map(|c| (aligner.source_iri(&c).clone(), aligner.target_iri(&c).clone()))
        .collect()
}

pub fn align(
    source: &OntologyModel,
    target: &OntologyModel,
    config: &WeightConfig,
) -> Result<Vec<CandidateMapping>, ConfigError> {
    Ok(align_detailed(source, target, config)?.mappings)
}

pub fn align_detailed(
    source: &OntologyModel,
    target: &OntologyModel,
    config: &WeightConfig,
) -> Result<AlignmentRun, ConfigError> {
    config.validate()?;
    let aligner = Aligner::new(source, target, config.label_combine);
    let candidates = aligner.candidates(config.pre_filter);
    let scored = aligner.score_all(&candidates, config);
    Ok(AlignmentRun {
        candidates_generated: candidates.len(),
        mappings: select(scored, config),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlignmentRun {
    /// Pairs that passed the label pre-filter.
    pub candidates_generated: usize,
    pub mappings: Vec<CandidateMapping>,
}

/// A pair that passed the pre-filter, as indices into the aligner's class
/// lists plus its label score.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Candidate {
    pub source: usize,
    pub target: usize,
    pub label: f64,
}

struct PreparedLabel {
    chars: Vec<char>,
    /// Sorted, deduplicated token ids.
    tokens: Vec<u32>,
}

struct PreparedClass<'m> {
    class: &'m ClassEntity,
    labels: Vec<PreparedLabel>,
    profile: StructuralProfile,
}

/// Per-class data precomputed once for a source/target pair, shared across
/// repeated scoring runs with different weights.
pub struct Aligner<'m> {
    src: Vec<PreparedClass<'m>>,
    tgt: Vec<PreparedClass<'m>>,
    combine: LabelCombine,
}

impl<'m> Aligner<'m> {
    pub fn new(source: &'m OntologyModel, target: &'m OntologyModel, combine: LabelCombine) -> Self {
        let mut vocab: HashMap<String, u32> = HashMap::new();
        let mut prepare = |model: &'m OntologyModel| -> Vec<PreparedClass<'m>> {
            model
                .classes()
                .map(|class| PreparedClass {
                    class,
                    labels: class
                        .labels
                        .iter()
                        .map(|tokens| {
                            let mut ids: Vec<u32> = tokens
                                .iter()
                                .map(|t| {
                                    let next = vocab.len() as u32;
                                    *vocab.entry(t.clone()).or_insert(next)
                                })
                                .collect();
                            ids.sort_unstable();
                            ids.dedup();
                            PreparedLabel {
                                chars: label_key(tokens).chars().collect(),
                                tokens: ids,
                            }
                        })
                        .collect(),
                    profile: StructuralProfile::of(class, model),
                })
                .collect()
        };
        let src = prepare(source);
        let tgt = prepare(target);
        Aligner { src, tgt, combine }
    }

    pub fn source_iri(&self, c: &Candidate) -> &Iri {
        &self.src[c.source].class.iri
    }

    pub fn target_iri(&self, c: &Candidate) -> &Iri {
        &self.tgt[c.target].class.iri
    }

    /// Best label score if it reaches `pre_filter`. Label pairs whose Jaccard
    /// part already rules them out skip the Jaro-Winkler computation.
    fn label_score(&self, a: &PreparedClass, b: &PreparedClass, pre_filter: f64) -> Option<f64> {
        let mut best: Option<f64> = None;
        for la in &a.labels {
            for lb in &b.labels {
                let jac = sorted_jaccard(&la.tokens, &lb.tokens);
                if !meets(self.combine.upper_bound(jac), pre_filter) {
                    continue;
                }
                let s = self.combine.combine(jaro_winkler_chars(&la.chars, &lb.chars), jac);
                if meets(s, pre_filter) && best.is_none_or(|b| s > b) {
                    best = Some(s);
                }
            }
        }
        best
    }

    pub fn candidates(&self, pre_filter: f64) -> Vec<Candidate> {
        self.src
            .par_iter()
            .enumerate()
            .map(|(i, a)| {
                self.tgt
                    .iter()
                    .enumerate()
                    .filter_map(|(j, b)| {
                        self.label_score(a, b, pre_filter).map(|label| Candidate {
                            source: i,
                            target: j,
                            label,
                        })
                    })
                    .collect::<Vec<_>>()
            })
            .flatten()
            .collect()
    }

    pub fn signals(&self, c: &Candidate) -> SignalVector {
        let s = structural_signals(&self.src[c.source].profile, &self.tgt[c.target].profile);
        SignalVector {
            label: c.label,
            property: s[0],
            parent: s[1],
            instance: s[2],
            restriction: s[3],
            neighbourhood: s[4],
        }
    }

    pub fn score(&self, c: &Candidate, config: &WeightConfig) -> CandidateMapping {
        let signals = self.signals(c);
        let (confidence, fallback_applied) = combine_signals(&signals, config);
        CandidateMapping {
            source: self.source_iri(c).clone(),
            target: self.target_iri(c).clone(),
            signals,
            confidence,
            fallback_applied,
        }
    }

    /// Scores candidates in parallel; output order follows `candidates`.
    pub fn score_all(&self, candidates: &[Candidate], config: &WeightConfig) -> Vec<CandidateMapping> {
        candidates.par_iter().map(|c| self.score(c, config)).collect()
    }

    /// Unfiltered label score for a pair, as `label_similarity` computes it.
    pub fn full_label_score(&self, c: &Candidate) -> f64 {
        label_similarity(self.src[c.source].class, self.tgt[c.target].class, self.combine)
    }
}

fn sorted_jaccard(a: &[u32], b: &[u32]) -> f64 {
    if a.is_empty() && b.is_empty() {
        return 1.0;
    }
    let (mut i, mut j, mut shared) = (0, 0, 0usize);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                shared += 1;
                i += 1;
                j += 1;
            }
        }
    }
    shared as f64 / (a.len() + b.len() - shared) as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::normalize_label;
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    fn iri(s: &str) -> Iri {
        Iri::new(format!("http://e/{s}")).unwrap()
    }

    fn mapping(s: &str, t: &str, confidence: f64) -> CandidateMapping {
        CandidateMapping {
            source: iri(s),
            target: iri(t),
            signals: SignalVector::default(),
            confidence,
            fallback_applied: false,
        }
    }

    fn class(name: &str, label: &str) -> ClassEntity {
        ClassEntity {
            iri: iri(name),
            labels: BTreeSet::from([normalize_label(label)]),
            primary_label: Some(label_key(&normalize_label(label))),
            parents: BTreeSet::new(),
            children: BTreeSet::new(),
            properties: BTreeSet::new(),
            instances: BTreeSet::new(),
            restrictions: BTreeSet::new(),
            neighbours: BTreeSet::new(),
        }
    }

    #[test]
    fn default_config_is_valid() {
        WeightConfig::default().validate().unwrap();
        assert_eq!(FULL_WEIGHTS.iter().sum::<f64>(), 1.0);
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let bad = WeightConfig::default().with_weights([0.5, 0.5, 0.5, 0.0, 0.0, 0.0]);
        assert!(matches!(bad.validate(), Err(ConfigError::WeightSum { .. })));
        let neg = WeightConfig::default().with_weights([1.5, -0.5, 0.0, 0.0, 0.0, 0.0]);
        assert!(matches!(neg.validate(), Err(ConfigError::InvalidWeight { index: 1, .. })));
        let nan = WeightConfig::default().with_weights([f64::NAN, 0.0, 0.0, 0.0, 0.0, 1.0]);
        assert!(nan.validate().is_err());
        let range = WeightConfig {
            min_confidence: 1.5,
            ..WeightConfig::default()
        };
        assert!(matches!(range.validate(), Err(ConfigError::OutOfRange { .. })));
        assert_eq!(weights_from_slice(&[1.0]), Err(ConfigError::WeightCount(1)));
    }

    #[test]
    fn weighted_sum_and_fallback() {
        let cfg = WeightConfig::default();
        let s = SignalVector::from_array([1.0, 1.0, 1.0, 1.0, 1.0, 1.0]);
        assert_eq!(combine_signals(&s, &cfg), (1.0, false));

        let label_only = SignalVector::from_array([0.9, 0.0, 0.0, 0.0, 0.0, 0.0]);
        let (c, f) = combine_signals(&label_only, &cfg);
        assert!(f);
        assert!((c - 0.765).abs() < 1e-12);

        let mixed = SignalVector::from_array([0.8, 0.5, 0.0, 0.0, 0.0, 0.0]);
        let (c, f) = combine_signals(&mixed, &cfg);
        assert!(!f);
        assert!((c - (0.25 * 0.8 + 0.20 * 0.5)).abs() < 1e-12);

        let perfect_label = SignalVector::from_array([1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        assert_eq!(combine_signals(&perfect_label, &cfg), (0.85, true));
    }

    #[test]
    fn stable_match_examples() {
        let out = stable_match(vec![mapping("A", "X", 0.95), mapping("A", "Y", 0.90), mapping("B", "X", 0.88)]);
        assert_eq!(out, vec![mapping("A", "X", 0.95)]);

        let out = stable_match(vec![mapping("B", "X", 0.9), mapping("A", "X", 0.9)]);
        assert_eq!(out, vec![mapping("A", "X", 0.9)]);

        assert!(stable_match(vec![]).is_empty());
    }

    #[test]
    fn threshold_is_inclusive() {
        let out = filter_threshold(
            vec![mapping("A", "X", 0.80), mapping("B", "Y", 0.799), mapping("C", "Z", 0.8 - 1e-12)],
            0.80,
        );
        let kept: Vec<_> = out.iter().map(|m| m.source.local_name().to_owned()).collect();
        assert_eq!(kept, ["A", "C"]);
    }

    #[test]
    fn pipeline_orders_example() {
        let scored = vec![mapping("A", "X", 0.95), mapping("B", "X", 0.85), mapping("B", "Y", 0.79)];
        let ttm = WeightConfig {
            order: PipelineOrder::ThresholdThenMatch,
            ..WeightConfig::default()
        };
        assert_eq!(select(scored.clone(), &WeightConfig::default()), vec![mapping("A", "X", 0.95)]);
        assert_eq!(select(scored, &ttm), vec![mapping("A", "X", 0.95)]);
    }

    #[test]
    fn candidate_generation_matches_brute_force() {
        let src = OntologyModel::from_classes([
            class("a1", "heart valve"),
            class("a2", "left atrium"),
            class("a3", "bone"),
        ]);
        let tgt = OntologyModel::from_classes([
            class("b1", "Heart Valve"),
            class("b2", "valve of heart"),
            class("b3", "atrium left"),
            class("b4", "kidney"),
        ]);
        let cfg = WeightConfig::default();
        let got = generate_candidates(&src, &tgt, &cfg);
        let mut want = vec![];
        for a in src.classes() {
            for b in tgt.classes() {
                if meets(label_similarity(a, b, cfg.label_combine), cfg.pre_filter) {
                    want.push((a.iri.clone(), b.iri.clone()));
                }
            }
        }
        assert_eq!(got, want);
        assert!(got.contains(&(iri("a1"), iri("b1"))));
        assert!(!got.iter().any(|(_, t)| t == &iri("b4")));
    }

    #[test]
    fn align_end_to_end() {
        let src = OntologyModel::from_classes([class("a1", "heart valve"), class("a2", "bone")]);
        let tgt = OntologyModel::from_classes([class("b1", "heart valve"), class("b2", "bone")]);
        // With no structure every pair falls back to 0.85 x label.
        let out = align(&src, &tgt, &WeightConfig::default()).unwrap();
        assert_eq!(out.len(), 2);
        assert!(out.iter().all(|m| m.fallback_applied && m.confidence == 0.85));

        let bad = WeightConfig::default().with_weights([1.0; 6]);
        assert!(align(&src, &tgt, &bad).is_err());
    }

    fn arb_mappings() -> impl Strategy<Value = Vec<CandidateMapping>> {
        let names = prop::sample::select(vec!["A", "B", "C", "D", "E"]);
        let conf = prop::sample::select(vec![0.5, 0.7, 0.8, 0.85, 0.9, 0.95, 1.0]);
        prop::collection::vec((names.clone(), names, conf), 0..20).prop_map(|v| {
            let mut seen = HashSet::new();
            v.into_iter()
                .filter(|(s, t, _)| seen.insert((*s, *t)))
                .map(|(s, t, c)| mapping(s, &t.to_lowercase(), c))
                .collect()
        })
    }

    proptest! {
        #[test]
        fn stable_match_is_one_to_one_and_greedy(c in arb_mappings()) {
            let out = stable_match(c.clone());
            let srcs: HashSet<_> = out.iter().map(|m| &m.source).collect();
            let tgts: HashSet<_> = out.iter().map(|m| &m.target).collect();
            prop_assert_eq!(srcs.len(), out.len());
            prop_assert_eq!(tgts.len(), out.len());
            // Every dropped candidate is blocked by a kept one ranked at least as high.
            for d in &c {
                if out.contains(d) { continue; }
                prop_assert!(out.iter().any(|k| (k.source == d.source || k.target == d.target)
                    && rank(k, d) != std::cmp::Ordering::Greater));
            }
            let mut shuffled = c.clone();
            shuffled.reverse();
            prop_assert_eq!(stable_match(shuffled), out);
        }

        #[test]
        fn pipeline_orders_agree(c in arb_mappings(), t in prop::sample::select(vec![0.7, 0.8, 0.85, 0.9])) {
            // Anything below the threshold ranks below everything above it, so
            // it can never block a surviving candidate.
            let base = WeightConfig { min_confidence: t, ..WeightConfig::default() };
            let ttm = WeightConfig { order: PipelineOrder::ThresholdThenMatch, ..base };
            prop_assert_eq!(select(c.clone(), &base), select(c, &ttm));
        }

        #[test]
        fn confidence_stays_in_unit_interval(
            s in prop::array::uniform6(0.0f64..=1.0),
            w in prop::array::uniform6(0.0f64..=1.0),
        ) {
            let total: f64 = w.iter().sum();
            prop_assume!(total > 0.0);
            let mut weights = w.map(|x| x / total);
            let rest: f64 = weights[1..].iter().sum();
            weights[0] = 1.0 - rest;
            prop_assume!(weights[0] >= 0.0);
            let cfg = WeightConfig::default().with_weights(weights);
            let (c, _) = combine_signals(&SignalVector::from_array(s), &cfg);
            prop_assert!((0.0..=1.0).contains(&c));
        }
    }
}
