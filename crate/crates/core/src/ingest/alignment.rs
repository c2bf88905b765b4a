//! Alignment-format XML (the OAEI exchange format) reader and writer.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use roxmltree::{Document, Node, ParsingOptions};

use crate::ingest::ParseError;
use crate::matcher::CandidateMapping;
use crate::term::Iri;
use crate::vocab::RDF;

/// The relation symbol of an equivalence cell.
pub const EQUIVALENCE: &str = "=";

const ALIGNMENT_NS: &str = "http://knowledgeweb.semanticweb.org/heterogeneity/alignment";

#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub entity1: Iri,
    pub entity2: Iri,
    pub relation: String,
    pub measure: f64,
}

impl Cell {
    pub fn is_equivalence(&self) -> bool {
        self.relation == EQUIVALENCE
    }
}

/// A set of correspondences keyed by (entity1, entity2, relation).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ReferenceAlignment {
    cells: BTreeMap<(Iri, Iri, String), f64>,
}

impl ReferenceAlignment {
    pub fn new() -> Self {
        Self::default()
    }

    /// Inserts a cell. A repeated (entity1, entity2, relation) key keeps the
    /// first measure and returns `false`.
    pub fn insert(&mut self, cell: Cell) -> bool {
        let key = (cell.entity1, cell.entity2, cell.relation);
        if self.cells.contains_key(&key) {
            return false;
        }
        self.cells.insert(key, cell.measure);
        true
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn cells(&self) -> impl Iterator<Item = Cell> + '_ {
        self.cells.iter().map(|((e1, e2, rel), m)| Cell {
            entity1: e1.clone(),
            entity2: e2.clone(),
            relation: rel.clone(),
            measure: *m,
        })
    }

    /// Entity pairs of the "=" cells.
    pub fn equivalences(&self) -> impl Iterator<Item = (&Iri, &Iri)> + '_ {
        self.cells
            .keys()
            .filter(|(_, _, rel)| rel == EQUIVALENCE)
            .map(|(a, b, _)| (a, b))
    }

    /// Number of cells whose relation is not "=". They are kept but never
    /// scored.
    pub fn non_equivalence_count(&self) -> usize {
        self.cells
            .keys()
            .filter(|(_, _, rel)| rel != EQUIVALENCE)
            .count()
    }
}

impl FromIterator<Cell> for ReferenceAlignment {
    fn from_iter<I: IntoIterator<Item = Cell>>(iter: I) -> Self {
        let mut out = ReferenceAlignment::new();
        for cell in iter {
            out.insert(cell);
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct AlignmentDocument {
    pub onto1: Option<String>,
    pub onto2: Option<String>,
    pub alignment: ReferenceAlignment,
}

pub fn parse_alignment(text: &str) -> Result<ReferenceAlignment, ParseError> {
    parse_alignment_document(text).map(|d| d.alignment)
}

pub fn parse_alignment_document(text: &str) -> Result<AlignmentDocument, ParseError> {
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
    let error = |node: Node<'_, '_>, message: String| {
        let pos = doc.text_pos_at(node.range().start);
        ParseError::Alignment {
            line: pos.row as usize,
            column: pos.col as usize,
            message,
        }
    };

    let Some(alignment) = doc
        .descendants()
        .find(|n| n.is_element() && n.tag_name().name() == "Alignment")
    else {
        return Err(error(doc.root_element(), "no <Alignment> element".into()));
    };

    let mut out = AlignmentDocument::default();
    for child in alignment.children().filter(Node::is_element) {
        match child.tag_name().name() {
            "onto1" => out.onto1 = ontology_reference(child),
            "onto2" => out.onto2 = ontology_reference(child),
            _ => {}
        }
    }

    for cell in alignment
        .descendants()
        .filter(|n| n.is_element() && n.tag_name().name() == "Cell")
    {
        let entity = |name: &str| -> Result<Iri, ParseError> {
            let node = child_element(cell, name)
                .ok_or_else(|| error(cell, format!("missing <{name}>")))?;
            let value = node
                .attribute((RDF, "resource"))
                .or_else(|| node.attribute("resource"))
                .ok_or_else(|| error(node, format!("<{name}> has no rdf:resource attribute")))?;
            Iri::new(value).map_err(|e| error(node, e.to_string()))
        };
        let entity1 = entity("entity1")?;
        let entity2 = entity("entity2")?;
        let measure = match child_element(cell, "measure") {
            Some(node) => {
                let text = node.text().unwrap_or("").trim();
                let value: f64 = text
                    .parse()
                    .map_err(|_| error(node, format!("non-numeric measure `{text}`")))?;
                if !(0.0..=1.0).contains(&value) {
                    return Err(error(node, format!("measure {value} outside [0, 1]")));
                }
                value
            }
            None => 1.0,
        };
        let relation = child_element(cell, "relation")
            .and_then(|n| n.text())
            .map(|t| t.trim().to_owned())
            .filter(|t| !t.is_empty())
            .unwrap_or_else(|| EQUIVALENCE.to_owned());
        out.alignment.insert(Cell {
            entity1,
            entity2,
            relation,
            measure,
        });
    }
    Ok(out)
}

fn child_element<'a, 'i>(node: Node<'a, 'i>, name: &str) -> Option<Node<'a, 'i>> {
    node.children()
        .find(|c| c.is_element() && c.tag_name().name() == name)
}

/// `<onto1>` holds either a bare IRI or an `<Ontology rdf:about=...>`.
fn ontology_reference(node: Node<'_, '_>) -> Option<String> {
    if let Some(onto) = child_element(node, "Ontology") {
        return onto.attribute((RDF, "about")).map(str::to_owned);
    }
    node.text()
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(str::to_owned)
}

/// Renders mappings as Alignment-format XML. Cells are sorted by
/// (entity1, entity2); measures carry six decimals. Output is UTF-8 with LF
/// line endings.
pub fn write_alignment(mappings: &[CandidateMapping], onto1: &Iri, onto2: &Iri) -> String {
    let mut cells: Vec<(&Iri, &Iri, f64)> = mappings
        .iter()
        .map(|m| (&m.source, &m.target, m.confidence))
        .collect();
    cells.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)).then(b.2.total_cmp(&a.2)));
    cells.dedup_by(|a, b| a.0 == b.0 && a.1 == b.1);

    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"utf-8\"?>\n");
    let _ = writeln!(
        out,
        "<rdf:RDF xmlns=\"{ALIGNMENT_NS}\"\n         xmlns:rdf=\"{RDF}\"\n         xmlns:xsd=\"http://www.w3.org/2001/XMLSchema#\">"
    );
    out.push_str("<Alignment>\n");
    out.push_str("  <xml>yes</xml>\n  <level>0</level>\n  <type>11</type>\n");
    let _ = writeln!(out, "  <onto1>{}</onto1>", escape(onto1.as_str()));
    let _ = writeln!(out, "  <onto2>{}</onto2>", escape(onto2.as_str()));
    for (e1, e2, measure) in cells {
        out.push_str("  <map>\n    <Cell>\n");
        let _ = writeln!(out, "      <entity1 rdf:resource=\"{}\"/>", escape(e1.as_str()));
        let _ = writeln!(out, "      <entity2 rdf:resource=\"{}\"/>", escape(e2.as_str()));
        let _ = writeln!(out, "      <relation>{EQUIVALENCE}</relation>");
        let _ = writeln!(
            out,
            "      <measure rdf:datatype=\"http://www.w3.org/2001/XMLSchema#float\">{measure:.6}</measure>"
        );
        out.push_str("    </Cell>\n  </map>\n");
    }
    out.push_str("</Alignment>\n</rdf:RDF>\n");
    out
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::similarity::SignalVector;

    fn iri(s: &str) -> Iri {
        Iri::new(s).unwrap()
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

    const OAEI_STYLE: &str = r#"<?xml version='1.0' encoding='utf-8' standalone='no'?>
<rdf:RDF xmlns='http://knowledgeweb.semanticweb.org/heterogeneity/alignment#'
         xmlns:rdf='http://www.w3.org/1999/02/22-rdf-syntax-ns#'
         xmlns:xsd='http://www.w3.org/2001/XMLSchema#'>
<Alignment>
  <xml>yes</xml>
  <level>0</level>
  <type>??</type>
  <onto1><Ontology rdf:about="http://mouse.owl"/></onto1>
  <onto2>http://human.owl</onto2>
  <map>
    <Cell>
      <entity1 rdf:resource='http://mouse.owl#MA_1'/>
      <entity2 rdf:resource='http://human.owl#NCI_1'/>
      <relation>=</relation>
      <measure rdf:datatype='xsd:float'>1.0</measure>
    </Cell>
  </map>
  <map>
    <Cell>
      <entity1 rdf:resource='http://mouse.owl#MA_2'/>
      <entity2 rdf:resource='http://human.owl#NCI_2'/>
      <relation>&lt;</relation>
      <measure rdf:datatype='xsd:float'>0.5</measure>
    </Cell>
  </map>
</Alignment>
</rdf:RDF>"#;

    #[test]
    fn reads_oaei_cells() {
        let doc = parse_alignment_document(OAEI_STYLE).unwrap();
        assert_eq!(doc.onto1.as_deref(), Some("http://mouse.owl"));
        assert_eq!(doc.onto2.as_deref(), Some("http://human.owl"));
        assert_eq!(doc.alignment.len(), 2);
        assert_eq!(doc.alignment.non_equivalence_count(), 1);
        let eq: Vec<_> = doc.alignment.equivalences().collect();
        assert_eq!(eq, vec![(&iri("http://mouse.owl#MA_1"), &iri("http://human.owl#NCI_1"))]);
    }

    #[test]
    fn empty_alignment() {
        let text = "<Alignment></Alignment>";
        assert!(parse_alignment(text).unwrap().is_empty());
    }

    #[test]
    fn missing_entity_and_bad_measure() {
        let missing = "<Alignment><map><Cell><entity1 rdf:resource='http://a' xmlns:rdf='http://www.w3.org/1999/02/22-rdf-syntax-ns#'/></Cell></map></Alignment>";
        let err = parse_alignment(missing).unwrap_err();
        assert!(matches!(err, ParseError::Alignment { ref message, .. } if message.contains("entity2")));

        let bad = "<Alignment><map><Cell><entity1 resource='http://a'/><entity2 resource='http://b'/><measure>high</measure></Cell></map></Alignment>";
        let err = parse_alignment(bad).unwrap_err();
        assert!(matches!(err, ParseError::Alignment { ref message, .. } if message.contains("non-numeric")));
    }

    #[test]
    fn write_then_read() {
        let empty = write_alignment(&[], &iri("http://a"), &iri("http://b"));
        assert!(parse_alignment(&empty).unwrap().is_empty());

        let maps = vec![
            mapping("http://a#2", "http://b#x&y", 0.85),
            mapping("http://a#1", "http://b#1", 0.9123456789),
        ];
        let text = write_alignment(&maps, &iri("http://a"), &iri("http://b"));
        let doc = parse_alignment_document(&text).unwrap();
        assert_eq!(doc.onto1.as_deref(), Some("http://a"));
        let cells: Vec<Cell> = doc.alignment.cells().collect();
        assert_eq!(cells.len(), 2);
        assert_eq!(cells[0].entity1.as_str(), "http://a#1");
        assert_eq!(cells[0].measure, 0.912346);
        assert_eq!(cells[1].entity2.as_str(), "http://b#x&y");
        assert!(text.find("http://a#1").unwrap() < text.find("http://a#2").unwrap());

        let mut reversed = maps.clone();
        reversed.reverse();
        assert_eq!(
            text,
            write_alignment(&reversed, &iri("http://a"), &iri("http://b"))
        );
        assert!(!text.contains('\r'));
    }
}
