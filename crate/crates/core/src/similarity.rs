//! String metrics and the six per-pair similarity signals.
//!
//! Signal 1 compares labels. Signals 2 to 6 compare structure: property,
//! parent, instance, restriction and neighbourhood sets. Source and target
//! IRIs come from different ontologies and never coincide, so structural sets
//! are compared through names: local-name tokens for properties, instances and
//! restrictions, primary labels for parents and neighbours.

use std::cmp::{max, min};
use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::model::{
    label_key, normalize_label, ClassEntity, OntologyModel, RestrictionFiller, RestrictionKind,
};

/// Winkler prefix scaling factor.
pub const WINKLER_SCALING: f64 = 0.1;
/// Longest common prefix that earns the Winkler boost.
pub const WINKLER_MAX_PREFIX: usize = 4;

/// How the Jaro-Winkler and token-Jaccard scores of one label pair combine.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LabelCombine {
    #[default]
    Mean,
    Max,
}

impl LabelCombine {
    pub fn combine(self, jaro_winkler: f64, jaccard: f64) -> f64 {
        match self {
            LabelCombine::Mean => 0.5 * jaro_winkler + 0.5 * jaccard,
            LabelCombine::Max => jaro_winkler.max(jaccard),
        }
    }

    /// Largest value `combine` can reach given the Jaccard part.
    pub(crate) fn upper_bound(self, jaccard: f64) -> f64 {
        match self {
            LabelCombine::Mean => 0.5 + 0.5 * jaccard,
            LabelCombine::Max => 1.0,
        }
    }
}

impl std::str::FromStr for LabelCombine {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "mean" => Ok(LabelCombine::Mean),
            "max" => Ok(LabelCombine::Max),
            other => Err(format!("unknown label combination `{other}` (expected mean or max)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct SignalVector {
    pub label: f64,
    pub property: f64,
    pub parent: f64,
    pub instance: f64,
    pub restriction: f64,
    pub neighbourhood: f64,
}

impl SignalVector {
    pub fn from_array(s: [f64; 6]) -> Self {
        SignalVector {
            label: s[0],
            property: s[1],
            parent: s[2],
            instance: s[3],
            restriction: s[4],
            neighbourhood: s[5],
        }
    }

    pub fn to_array(self) -> [f64; 6] {
        [
            self.label,
            self.property,
            self.parent,
            self.instance,
            self.restriction,
            self.neighbourhood,
        ]
    }

    /// True when signals 2 to 6 are all exactly zero.
    pub fn structure_is_zero(&self) -> bool {
        self.to_array()[1..].iter().all(|&s| s == 0.0)
    }
}

pub fn jaro_winkler(a: &str, b: &str) -> f64 {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    jaro_winkler_chars(&a, &b)
}

pub fn jaro(a: &str, b: &str) -> f64 {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    jaro_chars(&a, &b)
}

pub(crate) fn jaro_winkler_chars(a: &[char], b: &[char]) -> f64 {
    let j = jaro_chars(a, b);
    let prefix = a
        .iter()
        .zip(b)
        .take(WINKLER_MAX_PREFIX)
        .take_while(|(x, y)| x == y)
        .count();
    (j + prefix as f64 * WINKLER_SCALING * (1.0 - j)).min(1.0)
}

pub(crate) fn jaro_chars(a: &[char], b: &[char]) -> f64 {
    if a.is_empty() && b.is_empty() {
        return 1.0;
    }
    if a.is_empty() || b.is_empty() {
        return 0.0;
    }
    // Greedy matching depends on which side scans; a canonical order keeps
    // the metric symmetric.
    let (a, b) = if (a.len(), a) <= (b.len(), b) { (a, b) } else { (b, a) };
    let window = (max(a.len(), b.len()) / 2).saturating_sub(1);

    let mut b_used = vec![false; b.len()];
    let mut a_matched: Vec<char> = Vec::with_capacity(a.len());
    for (i, ca) in a.iter().enumerate() {
        let lo = i.saturating_sub(window);
        let hi = min(i + window + 1, b.len());
        for j in lo..hi {
            if !b_used[j] && b[j] == *ca {
                b_used[j] = true;
                a_matched.push(*ca);
                break;
            }
        }
    }
    let m = a_matched.len();
    if m == 0 {
        return 0.0;
    }
    let b_matched = b.iter().zip(&b_used).filter(|(_, used)| **used).map(|(c, _)| c);
    let half_transpositions = a_matched.iter().zip(b_matched).filter(|(x, y)| x != y).count();
    let m = m as f64;
    let t = half_transpositions as f64 / 2.0;
    (m / a.len() as f64 + m / b.len() as f64 + (m - t) / m) / 3.0
}

/// |A ∩ B| / |A ∪ B| over the token sets; two empty lists score 1.
pub fn token_jaccard<S: AsRef<str>>(a: &[S], b: &[S]) -> f64 {
    let a: BTreeSet<&str> = a.iter().map(AsRef::as_ref).collect();
    let b: BTreeSet<&str> = b.iter().map(AsRef::as_ref).collect();
    if a.is_empty() && b.is_empty() {
        return 1.0;
    }
    let shared = a.intersection(&b).count();
    ratio(shared, a.len() + b.len() - shared)
}

fn ratio(shared: usize, union: usize) -> f64 {
    shared as f64 / union as f64
}

/// Best combined label score over all (source label, target label) pairs;
/// 0 if either class has no label.
pub fn label_similarity(src: &ClassEntity, tgt: &ClassEntity, combine: LabelCombine) -> f64 {
    let mut best: f64 = 0.0;
    for a in &src.labels {
        for b in &tgt.labels {
            let jw = jaro_winkler(&label_key(a), &label_key(b));
            let jac = token_jaccard(a, b);
            best = best.max(combine.combine(jw, jac));
        }
    }
    best
}

type RestrictionName = (String, RestrictionKind, String);

/// Name-level view of one class's structure, precomputed once per class.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StructuralProfile {
    pub properties: BTreeSet<String>,
    pub parents: BTreeSet<String>,
    pub instances: BTreeSet<String>,
    pub restrictions: BTreeSet<RestrictionName>,
    pub neighbours: BTreeSet<String>,
}

fn local_key(iri: &crate::term::Iri) -> String {
    label_key(&normalize_label(iri.local_name()))
}

impl StructuralProfile {
    pub fn of(class: &ClassEntity, model: &OntologyModel) -> Self {
        let primary_labels = |iris: &BTreeSet<crate::term::Iri>| -> BTreeSet<String> {
            iris.iter()
                .filter_map(|i| model.get(i))
                .filter_map(|c| c.primary_label.clone())
                .collect()
        };
        StructuralProfile {
            properties: class.properties.iter().map(local_key).collect(),
            parents: primary_labels(&class.parents),
            instances: class.instances.iter().map(local_key).collect(),
            restrictions: class
                .restrictions
                .iter()
                .map(|r| {
                    let filler = match &r.filler {
                        RestrictionFiller::Iri(i) => local_key(i),
                        RestrictionFiller::Literal(l) => label_key(&normalize_label(l)),
                    };
                    (local_key(&r.property), r.kind, filler)
                })
                .collect(),
            neighbours: primary_labels(&class.neighbours),
        }
    }
}

/// Jaccard overlap where two empty sets score 0.
fn overlap<T: Ord>(a: &BTreeSet<T>, b: &BTreeSet<T>) -> f64 {
    if a.is_empty() && b.is_empty() {
        return 0.0;
    }
    let shared = a.intersection(b).count();
    ratio(shared, a.len() + b.len() - shared)
}

/// Signals 2 to 6: property, parent, instance, restriction, neighbourhood.
pub fn structural_signals(src: &StructuralProfile, tgt: &StructuralProfile) -> [f64; 5] {
    [
        overlap(&src.properties, &tgt.properties),
        overlap(&src.parents, &tgt.parents),
        overlap(&src.instances, &tgt.instances),
        overlap(&src.restrictions, &tgt.restrictions),
        overlap(&src.neighbours, &tgt.neighbours),
    ]
}

/// All six signals for a class pair, computed from scratch.
pub fn signal_vector(
    src: &ClassEntity,
    src_model: &OntologyModel,
    tgt: &ClassEntity,
    tgt_model: &OntologyModel,
    combine: LabelCombine,
) -> SignalVector {
    let s = structural_signals(
        &StructuralProfile::of(src, src_model),
        &StructuralProfile::of(tgt, tgt_model),
    );
    SignalVector {
        label: label_similarity(src, tgt, combine),
        property: s[0],
        parent: s[1],
        instance: s[2],
        restriction: s[3],
        neighbourhood: s[4],
    }
}
