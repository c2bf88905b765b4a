//! Forward-chaining materialization of an OWL RL rule subset.
//!
//! Evaluation is semi-naive: each round joins one premise against the triples
//! derived in the previous round and the other premises against the whole
//! graph, so every derivation is found without re-deriving old combinations.

mod rules;

use std::collections::HashSet;

use crate::graph::{IdTriple, TermId, TripleGraph};
use crate::term::Term;

pub use rules::{default_ruleset, PatternTerm, Rule, RuleError, RuleSet, TriplePattern, DEFAULT_RULES};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Materialization {
    pub graph: TripleGraph,
    /// Rounds run, including the final round that derived nothing.
    pub rounds: usize,
    /// Triples added on top of the input.
    pub inferred: usize,
}

pub fn materialize(graph: &TripleGraph, rules: &RuleSet) -> TripleGraph {
    materialize_with_stats(graph, rules).graph
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Slot {
    Var(usize),
    Const(TermId),
}

type Pattern = [Slot; 3];

struct CompiledRule {
    premises: Vec<Pattern>,
    conclusions: Vec<Pattern>,
    vars: usize,
}

fn compile(rule: &Rule, graph: &mut TripleGraph) -> CompiledRule {
    let mut names: Vec<String> = Vec::new();
    let mut slot = |t: &PatternTerm, graph: &mut TripleGraph| -> Slot {
        match t {
            PatternTerm::Var(v) => match names.iter().position(|n| n == v) {
                Some(i) => Slot::Var(i),
                None => {
                    names.push(v.clone());
                    Slot::Var(names.len() - 1)
                }
            },
            PatternTerm::Iri(i) => Slot::Const(graph.intern(Term::Iri(i.clone()))),
        }
    };
    let mut pattern = |p: &TriplePattern, graph: &mut TripleGraph| -> Pattern {
        [
            slot(&p.subject, graph),
            slot(&p.predicate, graph),
            slot(&p.object, graph),
        ]
    };
    let premises = rule.premises.iter().map(|p| pattern(p, graph)).collect();
    let conclusions = rule.conclusions.iter().map(|p| pattern(p, graph)).collect();
    drop(pattern);
    CompiledRule {
        premises,
        conclusions,
        vars: names.len(),
    }
}

type Binding = Vec<Option<TermId>>;

/// Extends `binding` so that `pattern` matches `triple`.
fn unify(pattern: &Pattern, triple: &IdTriple, binding: &Binding) -> Option<Binding> {
    let mut out = binding.clone();
    for (slot, &id) in pattern.iter().zip(triple) {
        match *slot {
            Slot::Const(c) if c != id => return None,
            Slot::Const(_) => {}
            Slot::Var(v) => match out[v] {
                Some(bound) if bound != id => return None,
                Some(_) => {}
                None => out[v] = Some(id),
            },
        }
    }
    Some(out)
}

fn resolve(slot: Slot, binding: &Binding) -> Option<TermId> {
    match slot {
        Slot::Const(c) => Some(c),
        Slot::Var(v) => binding[v],
    }
}

/// Joins the premises in `remaining` against `graph`, calling `emit` for
/// each complete binding. The most constrained premise goes first.
fn join(graph: &TripleGraph, premises: &[Pattern], remaining: &mut Vec<usize>, binding: &Binding, emit: &mut dyn FnMut(&Binding)) {
    if remaining.is_empty() {
        emit(binding);
        return;
    }
    let (pick, _) = remaining
        .iter()
        .enumerate()
        .max_by_key(|(k, &i)| {
            let bound = premises[i].iter().filter(|s| resolve(**s, binding).is_some()).count();
            (bound, std::cmp::Reverse(*k))
        })
        .expect("non-empty");
    let idx = remaining.remove(pick);
    let pattern = &premises[idx];

    let narrowest = (0..3)
        .filter_map(|pos| resolve(pattern[pos], binding).map(|id| graph.slots(pos, id)))
        .min_by_key(|s| s.len());
    let triples = graph.id_triples();
    let mut visit = |t: &IdTriple| {
        if let Some(b) = unify(pattern, t, binding) {
            join(graph, premises, remaining, &b, emit);
        }
    };
    match narrowest {
        Some(slots) => slots.iter().for_each(|&s| visit(&triples[s as usize])),
        None => triples.iter().for_each(visit),
    }
    remaining.insert(pick, idx);
}

pub fn materialize_with_stats(graph: &TripleGraph, rules: &RuleSet) -> Materialization {
    let mut g = graph.clone();
    let compiled: Vec<CompiledRule> = rules.rules().iter().map(|r| compile(r, &mut g)).collect();
    let input_len = g.len();

    let mut delta: Vec<IdTriple> = g.id_triples().to_vec();
    let mut rounds = 0;
    loop {
        rounds += 1;
        let mut fresh: Vec<IdTriple> = Vec::new();
        let mut seen: HashSet<IdTriple> = HashSet::new();
        for rule in &compiled {
            for (i, premise) in rule.premises.iter().enumerate() {
                let mut remaining: Vec<usize> = (0..rule.premises.len()).filter(|&k| k != i).collect();
                let empty: Binding = vec![None; rule.vars];
                for t in &delta {
                    let Some(b) = unify(premise, t, &empty) else { continue };
                    join(&g, &rule.premises, &mut remaining, &b, &mut |b| {
                        for c in &rule.conclusions {
                            let ids = c.map(|s| resolve(s, b).expect("conclusion variables are bound"));
                            if g.term(ids[0]).is_literal() || g.term(ids[1]).as_iri().is_none() {
                                continue;
                            }
                            if !g.contains_ids(&ids) && seen.insert(ids) {
                                fresh.push(ids);
                            }
                        }
                    });
                }
            }
        }
        if fresh.is_empty() {
            break;
        }
        for t in &fresh {
            g.insert_ids(*t);
        }
        delta = fresh;
    }
    let inferred = g.len() - input_len;
    Materialization {
        graph: g,
        rounds,
        inferred,
    }
}
