//! Per-class lexical and structural records extracted from a triple graph.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::graph::TripleGraph;
use crate::term::{Iri, Term};
use crate::vocab::{obo, owl, rdf, rdfs};

/// Splits a raw label into lowercase alphanumeric tokens.
///
/// Boundaries are any non-alphanumeric character (underscore included) and
/// every lowercase-to-uppercase transition, so `hasValue_of-Thing` becomes
/// `[has, value, of, thing]`.
pub fn normalize_label(raw: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    let mut current = String::new();
    let mut prev_lower = false;
    for ch in raw.chars() {
        if !ch.is_alphanumeric() {
            flush(&mut tokens, &mut current);
            prev_lower = false;
            continue;
        }
        let has_case_mapping = ch.to_lowercase().ne(std::iter::once(ch));
        if prev_lower && ch.is_uppercase() && has_case_mapping {
            flush(&mut tokens, &mut current);
        }
        current.extend(ch.to_lowercase().filter(|c| c.is_alphanumeric()));
        prev_lower = ch.is_lowercase();
    }
    flush(&mut tokens, &mut current);
    tokens
}

fn flush(tokens: &mut Vec<String>, current: &mut String) {
    if !current.is_empty() {
        tokens.push(std::mem::take(current));
    }
}

/// A token list joined with single spaces.
pub fn label_key(tokens: &[String]) -> String {
    tokens.join(" ")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum RestrictionKind {
    SomeValuesFrom,
    AllValuesFrom,
    HasValue,
    Cardinality,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RestrictionFiller {
    Iri(Iri),
    /// Literal values and cardinality bounds such as `min 1`.
    Literal(String),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RestrictionKey {
    pub property: Iri,
    pub kind: RestrictionKind,
    pub filler: RestrictionFiller,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassEntity {
    pub iri: Iri,
    /// Normalized token lists from `rdfs:label` and, when enabled, synonyms.
    pub labels: BTreeSet<Vec<String>>,
    /// Smallest joined `rdfs:label` token list; the class's name when it
    /// appears as someone else's parent or neighbour.
    pub primary_label: Option<String>,
    pub parents: BTreeSet<Iri>,
    pub children: BTreeSet<Iri>,
    pub properties: BTreeSet<Iri>,
    pub instances: BTreeSet<Iri>,
    pub restrictions: BTreeSet<RestrictionKey>,
    pub neighbours: BTreeSet<Iri>,
}

impl ClassEntity {
    fn new(iri: Iri) -> Self {
        ClassEntity {
            iri,
            labels: BTreeSet::new(),
            primary_label: None,
            parents: BTreeSet::new(),
            children: BTreeSet::new(),
            properties: BTreeSet::new(),
            instances: BTreeSet::new(),
            restrictions: BTreeSet::new(),
            neighbours: BTreeSet::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelOptions {
    /// Read `oboInOwl:hasRelatedSynonym` / `hasExactSynonym` as extra labels.
    pub synonyms_enabled: bool,
    /// Use the IRI local name as the label of classes that have no `rdfs:label`.
    pub local_name_labels: bool,
}

impl Default for ModelOptions {
    fn default() -> Self {
        ModelOptions {
            synonyms_enabled: true,
            local_name_labels: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct OntologyModel {
    classes: BTreeMap<Iri, ClassEntity>,
}

impl OntologyModel {
    pub fn class_count(&self) -> usize {
        self.classes.len()
    }

    pub fn get(&self, iri: &Iri) -> Option<&ClassEntity> {
        self.classes.get(iri)
    }

    /// Classes in IRI order.
    pub fn classes(&self) -> impl ExactSizeIterator<Item = &ClassEntity> + '_ {
        self.classes.values()
    }

    pub fn from_classes(classes: impl IntoIterator<Item = ClassEntity>) -> Self {
        OntologyModel {
            classes: classes.into_iter().map(|c| (c.iri.clone(), c)).collect(),
        }
    }
}

pub fn build_model(graph: &TripleGraph, synonyms_enabled: bool) -> OntologyModel {
    build_model_with(
        graph,
        ModelOptions {
            synonyms_enabled,
            ..ModelOptions::default()
        },
    )
}

pub fn build_model_with(graph: &TripleGraph, options: ModelOptions) -> OntologyModel {
    let iri = Iri::from_static;
    let rdf_type = iri(rdf::TYPE);
    let sub_class_of = iri(rdfs::SUB_CLASS_OF);
    let owl_class = Term::Iri(iri(owl::CLASS));
    let is_builtin = |i: &Iri| i.as_str() == owl::THING || i.as_str() == owl::NOTHING;

    let mut classes: BTreeMap<Iri, ClassEntity> = BTreeMap::new();
    let add_class = |classes: &mut BTreeMap<Iri, ClassEntity>, i: &Iri| {
        if !is_builtin(i) && !classes.contains_key(i) {
            classes.insert(i.clone(), ClassEntity::new(i.clone()));
        }
    };

    for t in graph.with_predicate(&rdf_type) {
        if *t.object == owl_class {
            if let Some(subject) = t.subject.as_iri() {
                add_class(&mut classes, subject);
            }
        }
    }
    for t in graph.with_predicate(&sub_class_of) {
        if let Some(s) = t.subject.as_iri() {
            add_class(&mut classes, s);
        }
        if let Some(o) = t.object.as_iri() {
            add_class(&mut classes, o);
        }
    }

    // Hierarchy and restrictions.
    for t in graph.with_predicate(&sub_class_of) {
        let Some(sub) = t.subject.as_iri().filter(|s| classes.contains_key(*s)) else {
            continue;
        };
        match t.object {
            Term::Iri(sup) if sup != sub && classes.contains_key(sup) => {
                classes.get_mut(sub).unwrap().parents.insert(sup.clone());
                classes.get_mut(sup).unwrap().children.insert(sub.clone());
            }
            Term::Blank(_) => {
                let (props, keys) = read_restriction(graph, t.object);
                let entity = classes.get_mut(sub).unwrap();
                entity.properties.extend(props);
                entity.restrictions.extend(keys);
            }
            _ => {}
        }
    }

    // Domain and range.
    let mut domains: BTreeMap<Iri, BTreeSet<Iri>> = BTreeMap::new();
    let mut ranges: BTreeMap<Iri, BTreeSet<Iri>> = BTreeMap::new();
    for (pred, sink) in [(rdfs::DOMAIN, &mut domains), (rdfs::RANGE, &mut ranges)] {
        for t in graph.with_predicate(&iri(pred)) {
            if let (Some(p), Some(c)) = (t.subject.as_iri(), t.object.as_iri()) {
                if classes.contains_key(c) {
                    sink.entry(p.clone()).or_default().insert(c.clone());
                }
            }
        }
    }
    for (p, cs) in domains.iter().chain(ranges.iter()) {
        for c in cs {
            classes.get_mut(c).unwrap().properties.insert(p.clone());
        }
    }

    // Instances.
    for t in graph.with_predicate(&rdf_type) {
        if let (Some(ind), Some(c)) = (t.subject.as_iri(), t.object.as_iri()) {
            if let Some(entity) = classes.get_mut(c) {
                entity.instances.insert(ind.clone());
            }
        }
    }

    // Labels.
    let label = iri(rdfs::LABEL);
    let synonym_preds = [iri(obo::HAS_RELATED_SYNONYM), iri(obo::HAS_EXACT_SYNONYM)];
    for entity in classes.values_mut() {
        let subject = Term::Iri(entity.iri.clone());
        let primary: Vec<Vec<String>> = graph
            .objects(&subject, &label)
            .filter_map(Term::as_literal)
            .map(|l| normalize_label(l.lexical()))
            .filter(|tokens| !tokens.is_empty())
            .collect();
        entity.primary_label = primary.iter().map(|t| label_key(t)).min();
        entity.labels.extend(primary);

        if options.synonyms_enabled {
            for pred in &synonym_preds {
                for object in graph.objects(&subject, pred) {
                    let raws: Vec<&str> = match object {
                        Term::Literal(l) => vec![l.lexical()],
                        other => graph
                            .objects(other, &label)
                            .filter_map(Term::as_literal)
                            .map(|l| l.lexical())
                            .collect(),
                    };
                    entity.labels.extend(
                        raws.into_iter()
                            .map(normalize_label)
                            .filter(|tokens| !tokens.is_empty()),
                    );
                }
            }
        }

        if options.local_name_labels && entity.primary_label.is_none() {
            let tokens = normalize_label(entity.iri.local_name());
            if !tokens.is_empty() {
                entity.primary_label = Some(label_key(&tokens));
                entity.labels.insert(tokens);
            }
        }
    }

    // Neighbourhoods: hierarchy, restriction fillers, and domain-range links.
    let mut links: Vec<(Iri, Iri)> = Vec::new();
    for entity in classes.values() {
        for n in entity.parents.iter().chain(entity.children.iter()) {
            links.push((entity.iri.clone(), n.clone()));
        }
        for key in &entity.restrictions {
            if let RestrictionFiller::Iri(filler) = &key.filler {
                if classes.contains_key(filler) {
                    links.push((entity.iri.clone(), filler.clone()));
                    links.push((filler.clone(), entity.iri.clone()));
                }
            }
        }
    }
    for (p, doms) in &domains {
        if let Some(rngs) = ranges.get(p) {
            for d in doms {
                for r in rngs {
                    links.push((d.clone(), r.clone()));
                    links.push((r.clone(), d.clone()));
                }
            }
        }
    }
    for (from, to) in links {
        if from != to {
            classes.get_mut(&from).unwrap().neighbours.insert(to);
        }
    }

    OntologyModel { classes }
}

/// Reads one restriction blank node. Returns the properties it mentions and
/// the restriction keys it yields; fillers that are themselves anonymous
/// class expressions are not followed.
fn read_restriction(graph: &TripleGraph, node: &Term) -> (Vec<Iri>, Vec<RestrictionKey>) {
    let iri = Iri::from_static;
    let properties: Vec<Iri> = graph
        .objects(node, &iri(owl::ON_PROPERTY))
        .filter_map(Term::as_iri)
        .cloned()
        .collect();
    let mut keys = Vec::new();
    let Some(property) = properties.first() else {
        return (properties, keys);
    };
    let key = |kind, filler| RestrictionKey {
        property: property.clone(),
        kind,
        filler,
    };

    for (pred, kind) in [
        (owl::SOME_VALUES_FROM, RestrictionKind::SomeValuesFrom),
        (owl::ALL_VALUES_FROM, RestrictionKind::AllValuesFrom),
        (owl::HAS_VALUE, RestrictionKind::HasValue),
    ] {
        for filler in graph.objects(node, &iri(pred)) {
            match filler {
                Term::Iri(f) => keys.push(key(kind, RestrictionFiller::Iri(f.clone()))),
                Term::Literal(l) => {
                    keys.push(key(kind, RestrictionFiller::Literal(l.lexical().to_owned())))
                }
                Term::Blank(_) => {}
            }
        }
    }

    let on_class = graph
        .objects(node, &iri(owl::ON_CLASS))
        .find_map(Term::as_iri)
        .cloned();
    for (pred, bound) in [
        (owl::CARDINALITY, "exactly"),
        (owl::QUALIFIED_CARDINALITY, "exactly"),
        (owl::MIN_CARDINALITY, "min"),
        (owl::MIN_QUALIFIED_CARDINALITY, "min"),
        (owl::MAX_CARDINALITY, "max"),
        (owl::MAX_QUALIFIED_CARDINALITY, "max"),
    ] {
        for n in graph.objects(node, &iri(pred)).filter_map(Term::as_literal) {
            let filler = match &on_class {
                Some(c) => RestrictionFiller::Iri(c.clone()),
                None => RestrictionFiller::Literal(format!("{bound} {}", n.lexical().trim())),
            };
            keys.push(key(RestrictionKind::Cardinality, filler));
        }
    }
    (properties, keys)
}
