//! In-memory triple store with subject, predicate and object indexes.
//!
//! Terms are interned into a per-graph dictionary so that the indexes and the
//! reasoner can work on integer triples. The public surface speaks in terms of
//! [`Term`] and [`Triple`]; the id-level API is crate-private.

use std::collections::{HashMap, HashSet};
use std::fmt;

use crate::term::{Iri, Term, Triple};

pub(crate) type TermId = u32;
pub(crate) type IdTriple = [TermId; 3];

/// A set of triples. Inserting a duplicate is a no-op.
#[derive(Clone, Default)]
pub struct TripleGraph {
    terms: Vec<Term>,
    ids: HashMap<Term, TermId>,
    triples: Vec<IdTriple>,
    present: HashSet<IdTriple>,
    by_subject: HashMap<TermId, Vec<u32>>,
    by_predicate: HashMap<TermId, Vec<u32>>,
    by_object: HashMap<TermId, Vec<u32>>,
}

/// Borrowed view of one stored triple.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TripleRef<'a> {
    pub subject: &'a Term,
    pub predicate: &'a Iri,
    pub object: &'a Term,
}

impl TripleRef<'_> {
    pub fn to_owned(&self) -> Triple {
        Triple::new(
            self.subject.clone(),
            self.predicate.clone(),
            self.object.clone(),
        )
        .expect("stored triples have non-literal subjects")
    }
}

impl TripleGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    /// Inserts a triple, returning `false` if it was already present.
    pub fn insert(&mut self, triple: Triple) -> bool {
        let (s, p, o) = triple.into_parts();
        let ids = [self.intern(s), self.intern(Term::Iri(p)), self.intern(o)];
        self.insert_ids(ids)
    }

    pub fn contains(&self, triple: &Triple) -> bool {
        let lookup = |t: &Term| self.ids.get(t).copied();
        match (
            lookup(triple.subject()),
            self.ids.get(&Term::Iri(triple.predicate().clone())).copied(),
            lookup(triple.object()),
        ) {
            (Some(s), Some(p), Some(o)) => self.present.contains(&[s, p, o]),
            _ => false,
        }
    }

    /// Triples in insertion order.
    pub fn iter(&self) -> impl Iterator<Item = TripleRef<'_>> + '_ {
        self.triples.iter().map(move |ids| self.view(*ids))
    }

    pub fn with_subject<'a>(&'a self, subject: &Term) -> impl Iterator<Item = TripleRef<'a>> + 'a {
        self.indexed(&self.by_subject, subject)
    }

    pub fn with_predicate<'a>(&'a self, predicate: &Iri) -> impl Iterator<Item = TripleRef<'a>> + 'a {
        self.indexed(&self.by_predicate, &Term::Iri(predicate.clone()))
    }

    pub fn with_object<'a>(&'a self, object: &Term) -> impl Iterator<Item = TripleRef<'a>> + 'a {
        self.indexed(&self.by_object, object)
    }

    /// Objects of `(subject, predicate, ?)`.
    pub fn objects<'a>(&'a self, subject: &Term, predicate: &Iri) -> impl Iterator<Item = &'a Term> + 'a {
        let predicate = predicate.clone();
        self.with_subject(subject)
            .filter(move |t| *t.predicate == predicate)
            .map(|t| t.object)
    }

    /// Triples sorted by (subject, predicate, object).
    pub fn to_sorted_vec(&self) -> Vec<Triple> {
        let mut out: Vec<Triple> = self.iter().map(|t| t.to_owned()).collect();
        out.sort();
        out
    }

    /// True iff every triple of `self` is in `other`.
    pub fn is_subset_of(&self, other: &TripleGraph) -> bool {
        self.len() <= other.len() && self.iter().all(|t| other.contains_ref(t))
    }

    fn contains_ref(&self, t: TripleRef<'_>) -> bool {
        let s = self.ids.get(t.subject);
        let p = self.ids.get(&Term::Iri(t.predicate.clone()));
        let o = self.ids.get(t.object);
        match (s, p, o) {
            (Some(&s), Some(&p), Some(&o)) => self.present.contains(&[s, p, o]),
            _ => false,
        }
    }

    fn indexed<'a>(
        &'a self,
        index: &'a HashMap<TermId, Vec<u32>>,
        key: &Term,
    ) -> impl Iterator<Item = TripleRef<'a>> + 'a {
        let slots: &[u32] = self
            .ids
            .get(key)
            .and_then(|id| index.get(id))
            .map(Vec::as_slice)
            .unwrap_or(&[]);
        slots.iter().map(move |&i| self.view(self.triples[i as usize]))
    }

    fn view(&self, [s, p, o]: IdTriple) -> TripleRef<'_> {
        TripleRef {
            subject: &self.terms[s as usize],
            predicate: self.terms[p as usize]
                .as_iri()
                .expect("predicates are IRIs"),
            object: &self.terms[o as usize],
        }
    }

    // ---- id-level API used by the reasoner ----

    pub(crate) fn intern(&mut self, term: Term) -> TermId {
        if let Some(&id) = self.ids.get(&term) {
            return id;
        }
        let id = TermId::try_from(self.terms.len()).expect("term dictionary overflow");
        self.terms.push(term.clone());
        self.ids.insert(term, id);
        id
    }

    pub(crate) fn term(&self, id: TermId) -> &Term {
        &self.terms[id as usize]
    }

    /// Inserts an id triple. The caller guarantees the subject is not a
    /// literal and the predicate is an IRI.
    pub(crate) fn insert_ids(&mut self, ids: IdTriple) -> bool {
        if !self.present.insert(ids) {
            return false;
        }
        let slot = u32::try_from(self.triples.len()).expect("triple store overflow");
        self.triples.push(ids);
        self.by_subject.entry(ids[0]).or_default().push(slot);
        self.by_predicate.entry(ids[1]).or_default().push(slot);
        self.by_object.entry(ids[2]).or_default().push(slot);
        true
    }

    pub(crate) fn contains_ids(&self, ids: &IdTriple) -> bool {
        self.present.contains(ids)
    }

    pub(crate) fn id_triples(&self) -> &[IdTriple] {
        &self.triples
    }

    /// Slots of triples whose position `pos` (0 = s, 1 = p, 2 = o) holds `id`.
    pub(crate) fn slots(&self, pos: usize, id: TermId) -> &[u32] {
        let index = match pos {
            0 => &self.by_subject,
            1 => &self.by_predicate,
            _ => &self.by_object,
        };
        index.get(&id).map(Vec::as_slice).unwrap_or(&[])
    }
}

impl PartialEq for TripleGraph {
    fn eq(&self, other: &Self) -> bool {
        self.len() == other.len() && self.is_subset_of(other)
    }
}

impl Eq for TripleGraph {}

impl fmt::Debug for TripleGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.to_sorted_vec()).finish()
    }
}

impl FromIterator<Triple> for TripleGraph {
    fn from_iter<I: IntoIterator<Item = Triple>>(iter: I) -> Self {
        let mut g = TripleGraph::new();
        g.extend(iter);
        g
    }
}

impl Extend<Triple> for TripleGraph {
    fn extend<I: IntoIterator<Item = Triple>>(&mut self, iter: I) {
        for t in iter {
            self.insert(t);
        }
    }
}
