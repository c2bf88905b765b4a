//! RDF/XML subset reader.
//!
//! Supported: `rdf:RDF` wrapper (optional), `rdf:Description` and typed node
//! elements, `rdf:about`, `rdf:ID`, `rdf:nodeID`, `rdf:resource`,
//! `rdf:datatype`, property attributes, nested node elements,
//! `rdf:parseType="Resource"` and `"Collection"`, `xml:lang` and `xml:base`,
//! and entities declared in an internal DTD subset. `rdf:parseType="Literal"`,
//! `rdf:li`, reification via `rdf:ID` on property elements, and the deprecated
//! `rdf:bagID`/`rdf:aboutEach*` attributes are rejected.

use std::collections::HashMap;

use roxmltree::{Document, Node, ParsingOptions};

use crate::graph::TripleGraph;
use crate::ingest::{resolve_iri, ParseError};
use crate::term::{BlankNode, Iri, Literal, Term, Triple};
use crate::vocab::{rdf, RDF, XML};

pub fn parse_rdfxml(text: &str) -> Result<TripleGraph, ParseError> {
    let options = ParsingOptions {
        allow_dtd: true,
        ..ParsingOptions::default()
    };
    let doc = Document::parse_with_options(text, options).map_err(|e| {
        let pos = e.pos();
        ParseError::Xml {
            line: pos.row as usize,
            column: pos.col as usize,
            message: e.to_string(),
        }
    })?;
    let mut reader = Reader {
        doc: &doc,
        graph: TripleGraph::new(),
        node_ids: HashMap::new(),
        next_bnode: 0,
    };
    let root = doc.root_element();
    let scope = Scope::default().enter(root);
    if is_rdf(root, "RDF") {
        for child in reader.element_children(root)? {
            let child_scope = scope.enter(child);
            reader.node_element(child, &child_scope)?;
        }
    } else {
        reader.node_element(root, &scope)?;
    }
    Ok(reader.graph)
}

#[derive(Debug, Clone, Default)]
struct Scope {
    base: Option<String>,
    lang: Option<String>,
}

impl Scope {
    fn enter(&self, node: Node<'_, '_>) -> Scope {
        let mut next = self.clone();
        if let Some(base) = node.attribute((XML, "base")) {
            next.base = match resolve_iri(self.base.as_deref(), base) {
                Ok(resolved) => Some(resolved),
                Err(_) => Some(base.to_owned()),
            };
        }
        if let Some(lang) = node.attribute((XML, "lang")) {
            next.lang = (!lang.is_empty()).then(|| lang.to_owned());
        }
        next
    }
}

struct Reader<'d, 'input> {
    doc: &'d Document<'input>,
    graph: TripleGraph,
    node_ids: HashMap<String, BlankNode>,
    next_bnode: usize,
}

fn is_rdf(node: Node<'_, '_>, local: &str) -> bool {
    node.tag_name().namespace() == Some(RDF) && node.tag_name().name() == local
}

const FORBIDDEN_ATTRIBUTES: [&str; 4] = ["bagID", "aboutEach", "aboutEachPrefix", "li"];

impl Reader<'_, '_> {
    fn location(&self, node: Node<'_, '_>) -> (usize, usize) {
        let pos = self.doc.text_pos_at(node.range().start);
        (pos.row as usize, pos.col as usize)
    }

    fn unsupported(&self, node: Node<'_, '_>, construct: impl Into<String>) -> ParseError {
        let (line, column) = self.location(node);
        ParseError::Unsupported {
            line,
            column,
            construct: construct.into(),
        }
    }

    fn syntax(&self, node: Node<'_, '_>, message: impl Into<String>) -> ParseError {
        let (line, column) = self.location(node);
        ParseError::Syntax {
            line,
            column,
            message: message.into(),
        }
    }

    fn fresh_bnode(&mut self) -> BlankNode {
        let b = BlankNode::new(format!("b{}", self.next_bnode));
        self.next_bnode += 1;
        b
    }

    fn named_bnode(&mut self, id: &str) -> BlankNode {
        if let Some(b) = self.node_ids.get(id) {
            return b.clone();
        }
        let b = self.fresh_bnode();
        self.node_ids.insert(id.to_owned(), b.clone());
        b
    }

    fn emit(&mut self, node: Node<'_, '_>, s: Term, p: Iri, o: Term) -> Result<(), ParseError> {
        let t = Triple::new(s, p, o).map_err(|e| self.syntax(node, e.to_string()))?;
        self.graph.insert(t);
        Ok(())
    }

    fn element_iri(&self, node: Node<'_, '_>) -> Result<Iri, ParseError> {
        let name = node.tag_name();
        let ns = name
            .namespace()
            .ok_or_else(|| self.unsupported(node, format!("element `{}` without a namespace", name.name())))?;
        Iri::new(format!("{ns}{}", name.name())).map_err(|e| self.syntax(node, e.to_string()))
    }

    fn resolve(&self, node: Node<'_, '_>, scope: &Scope, value: &str) -> Result<Iri, ParseError> {
        let resolved =
            resolve_iri(scope.base.as_deref(), value).map_err(|m| self.syntax(node, m))?;
        Iri::new(resolved).map_err(|e| self.syntax(node, e.to_string()))
    }

    /// Element children, rejecting stray non-whitespace text.
    fn element_children<'a, 'i>(
        &self,
        node: Node<'a, 'i>,
    ) -> Result<Vec<Node<'a, 'i>>, ParseError> {
        let mut out = Vec::new();
        for child in node.children() {
            if child.is_element() {
                out.push(child);
            } else if child.is_text() && !child.text().unwrap_or("").trim().is_empty() {
                return Err(self.syntax(child, "unexpected text content"));
            }
        }
        Ok(out)
    }

    fn check_forbidden(&self, node: Node<'_, '_>) -> Result<(), ParseError> {
        for attr in node.attributes() {
            if attr.namespace() == Some(RDF) && FORBIDDEN_ATTRIBUTES.contains(&attr.name()) {
                return Err(self.unsupported(node, format!("rdf:{} attribute", attr.name())));
            }
            if attr.namespace().is_none() {
                return Err(self.unsupported(node, format!("unqualified attribute `{}`", attr.name())));
            }
        }
        Ok(())
    }

    /// Attributes that become property triples on a node.
    fn property_attributes<'a>(
        &self,
        node: Node<'a, '_>,
        reserved: &[&str],
    ) -> Result<Vec<(Iri, &'a str)>, ParseError> {
        let mut out = Vec::new();
        for attr in node.attributes() {
            match attr.namespace() {
                Some(XML) => continue,
                Some(RDF) if reserved.contains(&attr.name()) => continue,
                Some(ns) => {
                    let iri = Iri::new(format!("{ns}{}", attr.name()))
                        .map_err(|e| self.syntax(node, e.to_string()))?;
                    out.push((iri, attr.value()));
                }
                None => {}
            }
        }
        Ok(out)
    }

    fn node_element(&mut self, node: Node<'_, '_>, scope: &Scope) -> Result<Term, ParseError> {
        self.check_forbidden(node)?;
        if is_rdf(node, "li") {
            return Err(self.unsupported(node, "rdf:li"));
        }
        let about = node.attribute((RDF, "about"));
        let id = node.attribute((RDF, "ID"));
        let node_id = node.attribute((RDF, "nodeID"));
        if [about, id, node_id].iter().filter(|a| a.is_some()).count() > 1 {
            return Err(self.syntax(node, "at most one of rdf:about, rdf:ID, rdf:nodeID"));
        }
        let subject = if let Some(about) = about {
            Term::Iri(self.resolve(node, scope, about)?)
        } else if let Some(id) = id {
            Term::Iri(self.resolve(node, scope, &format!("#{id}"))?)
        } else if let Some(node_id) = node_id {
            Term::Blank(self.named_bnode(node_id))
        } else {
            Term::Blank(self.fresh_bnode())
        };

        if !is_rdf(node, "Description") {
            let class = self.element_iri(node)?;
            self.emit(node, subject.clone(), Iri::from_static(rdf::TYPE), Term::Iri(class))?;
        }

        for (predicate, value) in
            self.property_attributes(node, &["about", "ID", "nodeID", "type"])?
        {
            let object = literal(value, scope);
            self.emit(node, subject.clone(), predicate, object)?;
        }
        if let Some(ty) = node.attribute((RDF, "type")) {
            let class = self.resolve(node, scope, ty)?;
            self.emit(node, subject.clone(), Iri::from_static(rdf::TYPE), Term::Iri(class))?;
        }

        for child in self.element_children(node)? {
            let child_scope = scope.enter(child);
            self.property_element(child, &subject, &child_scope)?;
        }
        Ok(subject)
    }

    fn property_element(
        &mut self,
        node: Node<'_, '_>,
        subject: &Term,
        scope: &Scope,
    ) -> Result<(), ParseError> {
        self.check_forbidden(node)?;
        if is_rdf(node, "li") {
            return Err(self.unsupported(node, "rdf:li"));
        }
        if node.attribute((RDF, "ID")).is_some() {
            return Err(self.unsupported(node, "reification via rdf:ID on a property element"));
        }
        let predicate = self.element_iri(node)?;

        if let Some(parse_type) = node.attribute((RDF, "parseType")) {
            return match parse_type {
                "Resource" => {
                    let object = Term::Blank(self.fresh_bnode());
                    self.emit(node, subject.clone(), predicate, object.clone())?;
                    for child in self.element_children(node)? {
                        let child_scope = scope.enter(child);
                        self.property_element(child, &object, &child_scope)?;
                    }
                    Ok(())
                }
                "Collection" => {
                    let head = self.collection(node, scope)?;
                    self.emit(node, subject.clone(), predicate, head)
                }
                other => Err(self.unsupported(node, format!("rdf:parseType=\"{other}\""))),
            };
        }

        // Text is only stray when it sits next to a nested node element.
        let children = if node.children().any(|c| c.is_element()) {
            self.element_children(node)?
        } else {
            Vec::new()
        };
        match children.as_slice() {
            [] => {}
            [child] => {
                let child_scope = scope.enter(*child);
                let object = self.node_element(*child, &child_scope)?;
                return self.emit(node, subject.clone(), predicate, object);
            }
            _ => return Err(self.syntax(node, "property element with several node elements")),
        }

        let resource = node.attribute((RDF, "resource"));
        let node_id = node.attribute((RDF, "nodeID"));
        let datatype = node.attribute((RDF, "datatype"));
        let props =
            self.property_attributes(node, &["resource", "nodeID", "datatype", "parseType", "type"])?;
        let typed = node.attribute((RDF, "type"));

        if resource.is_some() || node_id.is_some() || !props.is_empty() || typed.is_some() {
            if datatype.is_some() {
                return Err(self.syntax(node, "rdf:datatype on a resource-valued property"));
            }
            let object = match (resource, node_id) {
                (Some(_), Some(_)) => {
                    return Err(self.syntax(node, "both rdf:resource and rdf:nodeID"))
                }
                (Some(r), None) => Term::Iri(self.resolve(node, scope, r)?),
                (None, Some(id)) => Term::Blank(self.named_bnode(id)),
                (None, None) => Term::Blank(self.fresh_bnode()),
            };
            self.emit(node, subject.clone(), predicate, object.clone())?;
            if let Some(ty) = typed {
                let class = self.resolve(node, scope, ty)?;
                self.emit(node, object.clone(), Iri::from_static(rdf::TYPE), Term::Iri(class))?;
            }
            for (p, value) in props {
                self.emit(node, object.clone(), p, literal(value, scope))?;
            }
            return Ok(());
        }

        let text: String = node
            .children()
            .filter(|c| c.is_text())
            .filter_map(|c| c.text())
            .collect();
        let object = match datatype {
            Some(dt) => Literal::typed(text, self.resolve(node, scope, dt)?),
            None => match &scope.lang {
                Some(lang) => Literal::with_language(text, lang.clone()),
                None => Literal::simple(text),
            },
        };
        self.emit(node, subject.clone(), predicate, Term::Literal(object))
    }

    fn collection(&mut self, node: Node<'_, '_>, scope: &Scope) -> Result<Term, ParseError> {
        let first = Iri::from_static(rdf::FIRST);
        let rest = Iri::from_static(rdf::REST);
        let mut head: Option<Term> = None;
        let mut previous: Option<Term> = None;
        for child in self.element_children(node)? {
            let cell = Term::Blank(self.fresh_bnode());
            let child_scope = scope.enter(child);
            let item = self.node_element(child, &child_scope)?;
            self.emit(node, cell.clone(), first.clone(), item)?;
            match &previous {
                Some(prev) => self.emit(node, prev.clone(), rest.clone(), cell.clone())?,
                None => head = Some(cell.clone()),
            }
            previous = Some(cell);
        }
        let nil = Term::Iri(Iri::from_static(rdf::NIL));
        match previous {
            Some(last) => {
                self.emit(node, last, rest, nil)?;
                Ok(head.expect("non-empty collection has a head"))
            }
            None => Ok(nil),
        }
    }
}

fn literal(value: &str, scope: &Scope) -> Term {
    Term::Literal(match &scope.lang {
        Some(lang) => Literal::with_language(value, lang.clone()),
        None => Literal::simple(value),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vocab::{owl, rdfs, xsd};

    const OPEN: &str = r#"<rdf:RDF xmlns:rdf="http://www.w3.org/1999/02/22-rdf-syntax-ns#"
        xmlns:rdfs="http://www.w3.org/2000/01/rdf-schema#"
        xmlns:owl="http://www.w3.org/2002/07/owl#"
        xmlns:ex="http://e/">"#;

    fn doc(body: &str) -> String {
        format!("{OPEN}\n{body}\n</rdf:RDF>")
    }

    fn iri(s: &str) -> Iri {
        Iri::new(s).unwrap()
    }

    fn ex(s: &str) -> Iri {
        iri(&format!("http://e/{s}"))
    }

    #[test]
    fn typed_node_with_label() {
        let g = parse_rdfxml(&doc(
            r#"<owl:Class rdf:about="http://e/A"><rdfs:label>A thing</rdfs:label></owl:Class>"#,
        ))
        .unwrap();
        assert_eq!(g.len(), 2);
        assert!(g.contains(&Triple::new(ex("A"), iri(rdf::TYPE), iri(owl::CLASS)).unwrap()));
        assert!(g.contains(&Triple::new(ex("A"), iri(rdfs::LABEL), Literal::simple("A thing")).unwrap()));
    }

    #[test]
    fn nested_restriction() {
        let g = parse_rdfxml(&doc(
            r#"<rdf:Description rdf:about="http://e/A">
                 <rdfs:subClassOf>
                   <owl:Restriction>
                     <owl:onProperty rdf:resource="http://e/p"/>
                     <owl:someValuesFrom rdf:resource="http://e/B"/>
                   </owl:Restriction>
                 </rdfs:subClassOf>
               </rdf:Description>"#,
        ))
        .unwrap();
        let b = BlankNode::new("b0");
        let expected: TripleGraph = [
            Triple::new(ex("A"), iri(rdfs::SUB_CLASS_OF), b.clone()).unwrap(),
            Triple::new(b.clone(), iri(rdf::TYPE), iri(owl::RESTRICTION)).unwrap(),
            Triple::new(b.clone(), iri(owl::ON_PROPERTY), ex("p")).unwrap(),
            Triple::new(b, iri(owl::SOME_VALUES_FROM), ex("B")).unwrap(),
        ]
        .into_iter()
        .collect();
        assert_eq!(g, expected);
    }

    #[test]
    fn empty_document() {
        assert!(parse_rdfxml(&doc("")).unwrap().is_empty());
    }

    #[test]
    fn base_id_lang_datatype_and_entities() {
        let text = r#"<?xml version="1.0"?>
<!DOCTYPE rdf:RDF [
  <!ENTITY xsd "http://www.w3.org/2001/XMLSchema#">
  <!ENTITY ex "http://e/">
]>
<rdf:RDF xmlns:rdf="http://www.w3.org/1999/02/22-rdf-syntax-ns#"
         xmlns:rdfs="http://www.w3.org/2000/01/rdf-schema#"
         xmlns:ex="http://e/" xml:base="http://e/onto" xml:lang="en">
  <ex:Thing rdf:ID="T" rdfs:label="attr label">
    <ex:n rdf:datatype="&xsd;integer">3</ex:n>
    <ex:same rdf:resource="&ex;Other"/>
    <rdfs:comment xml:lang="">plain</rdfs:comment>
    <ex:empty/>
  </ex:Thing>
</rdf:RDF>"#;
        let g = parse_rdfxml(text).unwrap();
        let t = iri("http://e/onto#T");
        assert!(g.contains(&Triple::new(t.clone(), iri(rdf::TYPE), ex("Thing")).unwrap()));
        assert!(g.contains(&Triple::new(t.clone(), iri(rdfs::LABEL), Literal::with_language("attr label", "en")).unwrap()));
        assert!(g.contains(&Triple::new(t.clone(), ex("n"), Literal::typed("3", iri(xsd::INTEGER))).unwrap()));
        assert!(g.contains(&Triple::new(t.clone(), ex("same"), ex("Other")).unwrap()));
        assert!(g.contains(&Triple::new(t.clone(), iri("http://www.w3.org/2000/01/rdf-schema#comment"), Literal::simple("plain")).unwrap()));
        assert!(g.contains(&Triple::new(t, ex("empty"), Literal::with_language("", "en")).unwrap()));
        assert_eq!(g.len(), 6);
    }

    #[test]
    fn node_ids_parse_type_resource_and_collection() {
        let g = parse_rdfxml(&doc(
            r#"<rdf:Description rdf:about="http://e/U">
                 <owl:unionOf rdf:parseType="Collection">
                   <rdf:Description rdf:about="http://e/A"/>
                   <rdf:Description rdf:about="http://e/B"/>
                 </owl:unionOf>
                 <ex:r rdf:parseType="Resource"><ex:q rdf:nodeID="n1"/></ex:r>
               </rdf:Description>
               <rdf:Description rdf:nodeID="n1"><ex:v>1</ex:v></rdf:Description>"#,
        ))
        .unwrap();
        // unionOf + 2 first + 2 rest, then r + q, then v
        assert_eq!(g.len(), 1 + 4 + 2 + 1);
        let n1 = Term::Blank(BlankNode::new("b3"));
        assert_eq!(g.with_subject(&n1).count(), 1);
        assert_eq!(g.with_object(&n1).count(), 1);
    }

    #[test]
    fn unsupported_constructs_fail_with_location() {
        let err = parse_rdfxml(&doc(
            r#"<rdf:Description rdf:about="http://e/A">
  <ex:p rdf:parseType="Literal"><b>x</b></ex:p>
</rdf:Description>"#,
        ))
        .unwrap_err();
        match err {
            ParseError::Unsupported { line, construct, .. } => {
                assert_eq!(line, 6);
                assert!(construct.contains("Literal"));
            }
            other => panic!("unexpected {other:?}"),
        }
        let err = parse_rdfxml(&doc(
            r#"<rdf:Bag rdf:about="http://e/b"><rdf:li>x</rdf:li></rdf:Bag>"#,
        ))
        .unwrap_err();
        assert!(matches!(err, ParseError::Unsupported { .. }));
    }

    #[test]
    fn malformed_xml() {
        let err = parse_rdfxml("<rdf:RDF xmlns:rdf=\"http://www.w3.org/1999/02/22-rdf-syntax-ns#\">\n<a>").unwrap_err();
        assert!(matches!(err, ParseError::Xml { .. }));
    }
}
