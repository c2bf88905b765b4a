//! Semi-naive materialization checked against the naive fixpoint oracle.

mod common;

use ontomatch::reasoner::materialize_with_stats;
use ontomatch::{default_ruleset, materialize, parse_turtle, RuleSet, TripleGraph};
use proptest::prelude::*;

use common::{naive_closure, random_graph, rng, rows};

fn graph_of(seed: u64, max: usize) -> TripleGraph {
    random_graph(&mut rng(seed), max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn equals_naive_oracle(seed in any::<u64>(), max in 0usize..150) {
        let g = graph_of(seed, max);
        let rules = default_ruleset();
        prop_assert_eq!(rows(&materialize(&g, &rules)), naive_closure(&g, &rules));
    }

    #[test]
    fn idempotent_and_extensive(seed in any::<u64>(), max in 0usize..150) {
        let g = graph_of(seed, max);
        let rules = default_ruleset();
        let closed = materialize(&g, &rules);
        prop_assert!(g.is_subset_of(&closed));
        let again = materialize_with_stats(&closed, &rules);
        prop_assert_eq!(again.inferred, 0);
        prop_assert_eq!(rows(&again.graph), rows(&closed));
    }

    #[test]
    fn monotone(seed in any::<u64>(), max in 0usize..150, keep in proptest::collection::vec(any::<bool>(), 150)) {
        let g = graph_of(seed, max);
        let mut sub = TripleGraph::new();
        for (t, k) in g.iter().zip(keep) {
            if k {
                sub.insert(t.to_owned());
            }
        }
        let rules = default_ruleset();
        prop_assert!(materialize(&sub, &rules).is_subset_of(&materialize(&g, &rules)));
    }

    #[test]
    fn custom_rules_match_oracle(seed in any::<u64>(), max in 0usize..100) {
        let rules = RuleSet::parse(
            "@prefix ex: <http://g.example/> .\n\
             chain: ?x ex:p0 ?y , ?y ex:p1 ?z -> ?x ex:p2 ?z\n\
             flip: ?x ex:p2 ?y -> ?y ex:p3 ?x\n",
        )
        .unwrap();
        let g = graph_of(seed, max);
        prop_assert_eq!(rows(&materialize(&g, &rules)), naive_closure(&g, &rules));
    }
}

const PREFIXES: &str = "@prefix : <http://e.example/> .\n\
    @prefix rdfs: <http://www.w3.org/2000/01/rdf-schema#> .\n\
    @prefix owl: <http://www.w3.org/2002/07/owl#> .\n";

fn closure_of(body: &str) -> TripleGraph {
    materialize(&parse_turtle(&format!("{PREFIXES}{body}")).unwrap(), &default_ruleset())
}

fn holds(g: &TripleGraph, body: &str) -> bool {
    parse_turtle(&format!("{PREFIXES}{body}")).unwrap().is_subset_of(g)
}

#[test]
fn subclass_chain_and_typing() {
    let g = closure_of(":A rdfs:subClassOf :B .\n:B rdfs:subClassOf :C .\n:x a :A .");
    assert!(holds(&g, ":A rdfs:subClassOf :C .\n:x a :B , :C ."));
    assert_eq!(g.len(), 6);
}

#[test]
fn domain_range_and_subproperty() {
    let g = closure_of(":hasPart rdfs:subPropertyOf :related .\n:related rdfs:domain :Thing .\n:a :hasPart :b .");
    assert!(holds(&g, ":a :related :b .\n:a a :Thing ."));
}

#[test]
fn inverse_symmetric_transitive() {
    let g = closure_of(
        ":partOf owl:inverseOf :hasPart .\n:partOf a owl:TransitiveProperty .\n\
         :adj a owl:SymmetricProperty .\n:a :partOf :b .\n:b :partOf :c .\n:a :adj :d .",
    );
    assert!(holds(&g, ":a :partOf :c .\n:c :hasPart :a .\n:b :hasPart :a .\n:d :adj :a ."));
}

#[test]
fn same_as_replaces_in_every_position() {
    let g = closure_of(":a owl:sameAs :b .\n:a :p :c .\n:d :q :a .");
    assert!(holds(&g, ":b owl:sameAs :a .\n:a owl:sameAs :a .\n:b :p :c .\n:d :q :b ."));
}

#[test]
fn equivalent_class_gives_mutual_subclasses() {
    let g = closure_of(":A owl:equivalentClass :B .\n:x a :A .");
    assert!(holds(&g, ":A rdfs:subClassOf :B .\n:B rdfs:subClassOf :A .\n:x a :B ."));
}

#[test]
fn empty_graph_stays_empty() {
    let stats = materialize_with_stats(&TripleGraph::new(), &default_ruleset());
    assert!(stats.graph.is_empty());
    assert_eq!(stats.inferred, 0);
}
