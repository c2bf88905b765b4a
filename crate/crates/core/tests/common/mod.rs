//! Shared oracles and fixture generators for the integration tests.

#![allow(dead_code)]

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use ontomatch::reasoner::{PatternTerm, RuleSet};
use ontomatch::term::{Iri, Literal, Term, Triple};
use ontomatch::vocab::{owl, rdf, rdfs};
use ontomatch::TripleGraph;
use rand::rngs::StdRng;
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};

pub const SOURCE_NS: &str = "http://source.example/onto#";
pub const TARGET_NS: &str = "http://target.example/onto#";

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

// ---- naive fixpoint oracle ----

type Row = (Term, Term, Term);

/// Closure of `graph` under `rules` by brute force: every round tries every
/// rule against every combination of triples, until a round adds nothing.
pub fn naive_closure(graph: &TripleGraph, rules: &RuleSet) -> BTreeSet<Row> {
    let mut facts: BTreeSet<Row> = graph
        .iter()
        .map(|t| (t.subject.clone(), Term::Iri(t.predicate.clone()), t.object.clone()))
        .collect();
    loop {
        let snapshot: Vec<Row> = facts.iter().cloned().collect();
        let mut added = false;
        for rule in rules.rules() {
            let mut bindings: Vec<Vec<(String, Term)>> = vec![Vec::new()];
            for premise in &rule.premises {
                let mut next = Vec::new();
                for b in &bindings {
                    for fact in &snapshot {
                        if let Some(nb) = extend(b, premise.terms(), fact) {
                            next.push(nb);
                        }
                    }
                }
                bindings = next;
            }
            for b in &bindings {
                for c in &rule.conclusions {
                    let [s, p, o] = c.terms().map(|t| instantiate(t, b));
                    if s.is_literal() || p.as_iri().is_none() {
                        continue;
                    }
                    added |= facts.insert((s, p, o));
                }
            }
        }
        if !added {
            return facts;
        }
    }
}

fn lookup<'a>(b: &'a [(String, Term)], v: &str) -> Option<&'a Term> {
    b.iter().find(|(n, _)| n == v).map(|(_, t)| t)
}

fn extend(b: &[(String, Term)], pattern: [&PatternTerm; 3], fact: &Row) -> Option<Vec<(String, Term)>> {
    let mut out = b.to_vec();
    for (p, value) in pattern.into_iter().zip([&fact.0, &fact.1, &fact.2]) {
        match p {
            PatternTerm::Iri(i) => {
                if value.as_iri() != Some(i) {
                    return None;
                }
            }
            PatternTerm::Var(v) => match lookup(&out, v) {
                Some(bound) if bound != value => return None,
                Some(_) => {}
                None => out.push((v.clone(), value.clone())),
            },
        }
    }
    Some(out)
}

fn instantiate(t: &PatternTerm, b: &[(String, Term)]) -> Term {
    match t {
        PatternTerm::Iri(i) => Term::Iri(i.clone()),
        PatternTerm::Var(v) => lookup(b, v).expect("bound").clone(),
    }
}

pub fn rows(graph: &TripleGraph) -> BTreeSet<Row> {
    graph
        .iter()
        .map(|t| (t.subject.clone(), Term::Iri(t.predicate.clone()), t.object.clone()))
        .collect()
}

// ---- random graphs over the rule vocabulary ----

fn iri(s: &str) -> Iri {
    Iri::new(s).unwrap()
}

fn ex(name: String) -> Term {
    Term::Iri(iri(&format!("http://g.example/{name}")))
}

/// A random graph of at most `max` triples. A small fixed vocabulary keeps
/// rule premises joining often while closures stay small.
pub fn random_graph(rng: &mut StdRng, max: usize) -> TripleGraph {
    let classes: Vec<Term> = (0..4).map(|i| ex(format!("C{i}"))).collect();
    let props: Vec<Term> = (0..4).map(|i| ex(format!("p{i}"))).collect();
    let mut inds: Vec<Term> = (0..6).map(|i| ex(format!("i{i}"))).collect();
    inds.push(Term::Blank(ontomatch::term::BlankNode::new("b0")));
    let n = rng.random_range(0..=max);
    let mut g = TripleGraph::new();
    let pick = |rng: &mut StdRng, v: &[Term]| v.choose(rng).unwrap().clone();
    while g.len() < n {
        let (s, p, o) = match rng.random_range(0..12) {
            0 => (pick(rng, &classes), rdfs::SUB_CLASS_OF, pick(rng, &classes)),
            1 => (pick(rng, &props), rdfs::SUB_PROPERTY_OF, pick(rng, &props)),
            2 => (pick(rng, &props), rdfs::DOMAIN, pick(rng, &classes)),
            3 => (pick(rng, &props), rdfs::RANGE, pick(rng, &classes)),
            4 => (pick(rng, &classes), owl::EQUIVALENT_CLASS, pick(rng, &classes)),
            5 => (pick(rng, &props), owl::EQUIVALENT_PROPERTY, pick(rng, &props)),
            6 => (pick(rng, &props), owl::INVERSE_OF, pick(rng, &props)),
            7 => {
                let kind = [owl::SYMMETRIC_PROPERTY, owl::TRANSITIVE_PROPERTY].choose(rng).unwrap();
                (pick(rng, &props), rdf::TYPE, Term::Iri(iri(kind)))
            }
            8 => (pick(rng, &inds), owl::SAME_AS, pick(rng, &inds)),
            9 => (pick(rng, &inds), rdf::TYPE, pick(rng, &classes)),
            10 => {
                let lit = Term::Literal(Literal::simple(format!("v{}", rng.random_range(0..3))));
                let p = pick(rng, &props);
                let triple = Triple::new(pick(rng, &inds), p.as_iri().unwrap().clone(), lit).unwrap();
                g.insert(triple);
                continue;
            }
            _ => {
                let p = pick(rng, &props);
                let triple = Triple::new(pick(rng, &inds), p.as_iri().unwrap().clone(), pick(rng, &inds)).unwrap();
                g.insert(triple);
                continue;
            }
        };
        g.insert(Triple::new(s, iri(p), o).unwrap());
    }
    g
}

// ---- ontology corpora ----

/// A source/target ontology pair with its reference alignment.
#[derive(Debug, Clone)]
pub struct Corpus {
    pub source_ttl: String,
    pub target_ttl: String,
    /// Intended (source local name, target local name) correspondences.
    pub reference_pairs: Vec<(String, String)>,
}

impl Corpus {
    pub fn reference_xml(&self) -> String {
        reference_xml(&self.reference_pairs)
    }

    pub fn write_to(&self, dir: &Path) -> (PathBuf, PathBuf, PathBuf) {
        let s = dir.join("source.ttl");
        let t = dir.join("target.ttl");
        let r = dir.join("reference.rdf");
        std::fs::write(&s, &self.source_ttl).unwrap();
        std::fs::write(&t, &self.target_ttl).unwrap();
        std::fs::write(&r, self.reference_xml()).unwrap();
        (s, t, r)
    }
}

/// Alignment-format XML for the given local-name pairs, written by hand so
/// the tests do not depend on the library's writer.
pub fn reference_xml(pairs: &[(String, String)]) -> String {
    let mut x = String::from(
        "<?xml version=\"1.0\" encoding=\"utf-8\"?>\n\
         <rdf:RDF xmlns=\"http://knowledgeweb.semanticweb.org/heterogeneity/alignment\"\n  \
         xmlns:rdf=\"http://www.w3.org/1999/02/22-rdf-syntax-ns#\">\n<Alignment>\n",
    );
    for (a, b) in pairs {
        write!(
            x,
            "<map><Cell><entity1 rdf:resource=\"{SOURCE_NS}{a}\"/><entity2 rdf:resource=\"{TARGET_NS}{b}\"/>\
             <relation>=</relation><measure rdf:datatype=\"http://www.w3.org/2001/XMLSchema#float\">1.0</measure></Cell></map>\n"
        )
        .unwrap();
    }
    x.push_str("</Alignment>\n</rdf:RDF>\n");
    x
}

fn ontology_ttl(ns: &str, classes: &[(String, String)]) -> String {
    let mut t = format!(
        "@prefix : <{ns}> .\n@prefix owl: <http://www.w3.org/2002/07/owl#> .\n\
         @prefix rdfs: <http://www.w3.org/2000/01/rdf-schema#> .\n\n"
    );
    for (local, label) in classes {
        writeln!(t, ":{local} a owl:Class ; rdfs:label \"{label}\" .").unwrap();
    }
    t
}

pub fn random_word(rng: &mut StdRng, min: usize, max: usize) -> String {
    let len = rng.random_range(min..=max);
    (0..len).map(|_| rng.random_range(b'a'..=b'z') as char).collect()
}

fn camel(words: &[String]) -> String {
    words
        .iter()
        .map(|w| {
            let mut c = w.chars();
            c.next().map(|f| f.to_ascii_uppercase().to_string() + c.as_str()).unwrap_or_default()
        })
        .collect()
}

/// Structure-free corpus: classes carry labels only. `matched` source classes
/// have a target whose label normalizes to the same tokens (case or
/// CamelCase variants); every other label is random. The reference lists the
/// matched pairs plus `unmatched_refs` pairs the labels cannot recover.
pub fn structure_free_corpus(seed: u64, size: usize, matched: usize, unmatched_refs: usize) -> Corpus {
    let mut rng = rng(seed);
    let mut src = Vec::new();
    let mut tgt = Vec::new();
    let mut reference = Vec::new();
    for i in 0..size {
        let n = rng.random_range(2..=3);
        let words: Vec<String> = (0..n).map(|_| random_word(&mut rng, 5, 9)).collect();
        src.push((format!("S{i:03}"), words.join(" ")));
        let target_label = if i < matched {
            reference.push((format!("S{i:03}"), format!("T{i:03}")));
            if i % 2 == 0 {
                camel(&words)
            } else {
                words.join(" ").to_uppercase()
            }
        } else {
            let n = rng.random_range(2..=3);
            let other: Vec<String> = (0..n).map(|_| random_word(&mut rng, 5, 9)).collect();
            if i < matched + unmatched_refs {
                reference.push((format!("S{i:03}"), format!("T{i:03}")));
            }
            other.join(" ")
        };
        tgt.push((format!("T{i:03}"), target_label));
    }
    Corpus {
        source_ttl: ontology_ttl(SOURCE_NS, &src),
        target_ttl: ontology_ttl(TARGET_NS, &tgt),
        reference_pairs: reference,
    }
}

/// Many-to-many corpus: each source label `head a b c` has its intended
/// target with the same label and two decoy targets with the tail tokens
/// permuted, which keeps the token sets equal and the strings close.
pub fn many_to_many_corpus(seed: u64, sources: usize) -> Corpus {
    let mut rng = rng(seed);
    let mut src = Vec::new();
    let mut tgt = Vec::new();
    let mut reference = Vec::new();
    for i in 0..sources {
        let head = random_word(&mut rng, 9, 11);
        let tail: Vec<String> = (0..3).map(|_| random_word(&mut rng, 2, 3)).collect();
        let label = |order: [usize; 3]| {
            format!("{head} {} {} {}", tail[order[0]], tail[order[1]], tail[order[2]])
        };
        src.push((format!("S{i:03}"), label([0, 1, 2])));
        tgt.push((format!("T{i:03}"), label([0, 1, 2])));
        tgt.push((format!("T{i:03}x"), label([0, 2, 1])));
        tgt.push((format!("T{i:03}y"), label([1, 0, 2])));
        reference.push((format!("S{i:03}"), format!("T{i:03}")));
    }
    Corpus {
        source_ttl: ontology_ttl(SOURCE_NS, &src),
        target_ttl: ontology_ttl(TARGET_NS, &tgt),
        reference_pairs: reference,
    }
}

pub fn model_of(ttl: &str) -> ontomatch::OntologyModel {
    ontomatch::build_model(&ontomatch::parse_turtle(ttl).unwrap(), true)
}

pub fn reference_of(corpus: &Corpus) -> ontomatch::ReferenceAlignment {
    ontomatch::parse_alignment(&corpus.reference_xml()).unwrap()
}

/// Structure-free corpus with graded similarity: a third of the targets
/// repeat their source label, the rest append one or two extra words, so
/// confidences spread across the usual threshold range.
pub fn graded_corpus(seed: u64, size: usize) -> Corpus {
    let mut rng = rng(seed);
    let mut src = Vec::new();
    let mut tgt = Vec::new();
    let mut reference = Vec::new();
    for i in 0..size {
        let n = rng.random_range(2..=4);
        let words: Vec<String> = (0..n).map(|_| random_word(&mut rng, 4, 9)).collect();
        let mut target = words.clone();
        for _ in 0..(i % 3) {
            target.push(random_word(&mut rng, 2, 6));
        }
        src.push((format!("S{i:03}"), words.join(" ")));
        tgt.push((format!("T{i:03}"), target.join(" ")));
        reference.push((format!("S{i:03}"), format!("T{i:03}")));
    }
    Corpus {
        source_ttl: ontology_ttl(SOURCE_NS, &src),
        target_ttl: ontology_ttl(TARGET_NS, &tgt),
        reference_pairs: reference,
    }
}
