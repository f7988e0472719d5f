//! Reader for the GML subset used by the Internet Topology Zoo.
//!
//! ```text
//! graph [
//!   node [ id 0 label "A" ... ]
//!   edge [ source 0 target 1 ... ]
//! ]
//! ```
//!
//! Unknown keys are skipped. Node ids may be arbitrary integers and are
//! remapped to dense ids in input order.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::topology::Topology;

#[derive(Debug, Clone, PartialEq)]
enum Value {
    Int(i64),
    Real(f64),
    Str(String),
    List(Vec<Entry>),
}

#[derive(Debug, Clone, PartialEq)]
struct Entry {
    key: String,
    value: Value,
    offset: usize,
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

fn err<T>(offset: usize, message: impl Into<String>) -> Result<T> {
    Err(Error::Gml {
        offset,
        message: message.into(),
    })
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while let Some(&c) = self.src.get(self.pos) {
            if c.is_ascii_whitespace() {
                self.pos += 1;
            } else if c == b'#' {
                while self.src.get(self.pos).is_some_and(|&c| c != b'\n') {
                    self.pos += 1;
                }
            } else {
                break;
            }
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    /// Parses `key value` pairs until `]` (nested) or end of input (top level).
    fn list(&mut self, nested: bool, open_at: usize) -> Result<Vec<Entry>> {
        let mut entries = Vec::new();
        loop {
            match self.peek() {
                None if nested => return err(open_at, "unbalanced '[': missing ']'"),
                None => return Ok(entries),
                Some(b']') if nested => {
                    self.pos += 1;
                    return Ok(entries);
                }
                Some(b']') => return err(self.pos, "unbalanced ']'"),
                Some(_) => {
                    let offset = self.pos;
                    let key = self.key()?;
                    let value = self.value(&key)?;
                    entries.push(Entry { key, value, offset });
                }
            }
        }
    }

    fn key(&mut self) -> Result<String> {
        let start = self.pos;
        while self
            .src
            .get(self.pos)
            .is_some_and(|c| c.is_ascii_alphanumeric() || *c == b'_')
        {
            self.pos += 1;
        }
        if start == self.pos || self.src[start].is_ascii_digit() {
            return err(start, "expected a key");
        }
        Ok(String::from_utf8_lossy(&self.src[start..self.pos]).into_owned())
    }

    fn value(&mut self, key: &str) -> Result<Value> {
        let start = match self.peek() {
            Some(_) => self.pos,
            None => return err(self.pos, format!("missing value for key `{key}`")),
        };
        match self.src[start] {
            b'[' => {
                self.pos += 1;
                Ok(Value::List(self.list(true, start)?))
            }
            b'"' => {
                self.pos += 1;
                let body = self.pos;
                while self.src.get(self.pos).is_some_and(|&c| c != b'"') {
                    self.pos += 1;
                }
                if self.pos >= self.src.len() {
                    return err(start, "unterminated string");
                }
                let s = String::from_utf8_lossy(&self.src[body..self.pos]).into_owned();
                self.pos += 1;
                Ok(Value::Str(s))
            }
            b']' => err(start, format!("missing value for key `{key}`")),
            _ => {
                while self
                    .src
                    .get(self.pos)
                    .is_some_and(|c| !c.is_ascii_whitespace() && *c != b'[' && *c != b']')
                {
                    self.pos += 1;
                }
                let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap_or("");
                if let Ok(i) = text.parse::<i64>() {
                    Ok(Value::Int(i))
                } else if let Ok(r) = text.parse::<f64>() {
                    Ok(Value::Real(r))
                } else {
                    err(start, format!("invalid value `{text}` for key `{key}`"))
                }
            }
        }
    }
}

fn int_field(entries: &[Entry], key: &str, owner: &Entry) -> Result<i64> {
    match entries.iter().find(|e| e.key == key).map(|e| &e.value) {
        Some(Value::Int(i)) => Ok(*i),
        Some(_) => err(owner.offset, format!("`{}` field `{key}` is not an integer", owner.key)),
        None => err(owner.offset, format!("`{}` is missing `{key}`", owner.key)),
    }
}

/// Parses a GML document into a [`Topology`].
pub fn parse_gml(text: &str) -> Result<Topology> {
    let mut parser = Parser {
        src: text.as_bytes(),
        pos: 0,
    };
    let top = parser.list(false, 0)?;
    let graph = top
        .iter()
        .find_map(|e| match &e.value {
            Value::List(items) if e.key == "graph" => Some(items),
            _ => None,
        })
        .ok_or(Error::Gml {
            offset: 0,
            message: "no `graph [ ... ]` block".into(),
        })?;

    let mut name = String::from("gml");
    let mut labels = Vec::new();
    let mut ids: HashMap<i64, usize> = HashMap::new();
    let mut links = Vec::new();

    for entry in graph {
        match (entry.key.as_str(), &entry.value) {
            ("label" | "Network", Value::Str(s)) if name == "gml" => name = s.trim().to_string(),
            ("node", Value::List(fields)) => {
                let id = int_field(fields, "id", entry)?;
                let label = match fields.iter().find(|e| e.key == "label").map(|e| &e.value) {
                    Some(Value::Str(s)) => s.clone(),
                    Some(Value::Int(i)) => i.to_string(),
                    _ => id.to_string(),
                };
                if ids.insert(id, labels.len()).is_some() {
                    return err(entry.offset, format!("duplicate node id {id}"));
                }
                labels.push(label);
            }
            _ => {}
        }
    }
    for entry in graph {
        if let ("edge", Value::List(fields)) = (entry.key.as_str(), &entry.value) {
            let mut ends = [0usize; 2];
            for (slot, key) in ends.iter_mut().zip(["source", "target"]) {
                let raw = int_field(fields, key, entry)?;
                *slot = *ids.get(&raw).ok_or_else(|| Error::Gml {
                    offset: entry.offset,
                    message: format!("edge {key} references unknown node {raw}"),
                })?;
            }
            links.push((ends[0], ends[1]));
        }
    }

    let input_edges = links.len();
    let topo = Topology::from_links(name, labels, links)?;
    let stats = topo.dedup_stats();
    if stats.duplicate_links + stats.self_loops > 0 {
        log::info!(
            "{}: dropped {} duplicate links and {} self-loops out of {input_edges} input edges",
            topo.name(),
            stats.duplicate_links,
            stats.self_loops
        );
    }
    Ok(topo)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::{DedupStats, DirEdge};

    #[test]
    fn smallest_graph() {
        let t = parse_gml("graph [ node [ id 0 ] node [ id 1 ] edge [ source 0 target 1 ] ]").unwrap();
        assert_eq!(t.node_count(), 2);
        assert_eq!(t.dir_edges(), &[DirEdge { from: 0, to: 1 }, DirEdge { from: 1, to: 0 }]);
    }

    #[test]
    fn remaps_ids_in_input_order_and_skips_unknown_keys() {
        let text = r#"
            # comment line
            Creator "someone"
            graph [
              directed 0
              label "Tiny"
              node_default [ ]
              node [ id 42 label "Paris" Latitude 48.85 ]
              node [ id 7 label "Berlin" extra [ a 1 b "x" ] ]
              edge [ source 7 target 42 LinkLabel "10G" ]
              edge [ source 42 target 7 ]
              edge [ source 7 target 7 ]
            ]"#;
        let t = parse_gml(text).unwrap();
        assert_eq!(t.name(), "Tiny");
        assert_eq!(t.label(0), Some("Paris"));
        assert_eq!(t.label(1), Some("Berlin"));
        assert_eq!(t.link_count(), 1);
        assert_eq!(
            t.dedup_stats(),
            DedupStats {
                duplicate_links: 1,
                self_loops: 1
            }
        );
    }

    #[test]
    fn unbalanced_brackets_report_offset() {
        let text = "graph [ node [ id 0 ]";
        match parse_gml(text) {
            Err(Error::Gml { offset, .. }) => assert_eq!(offset, 6),
            other => panic!("unexpected {other:?}"),
        }
        match parse_gml("graph [ ] ]") {
            Err(Error::Gml { offset, .. }) => assert_eq!(offset, 10),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_node_reports_edge_offset() {
        let text = "graph [ node [ id 0 ] edge [ source 0 target 9 ] ]";
        match parse_gml(text) {
            Err(Error::Gml { offset, message }) => {
                assert_eq!(offset, 22);
                assert!(message.contains("unknown node 9"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unterminated_string() {
        assert!(matches!(
            parse_gml("graph [ node [ id 0 label \"abc ] ]"),
            Err(Error::Gml { offset: 26, .. })
        ));
    }

    #[test]
    fn missing_graph_block() {
        assert!(matches!(parse_gml("foo 1"), Err(Error::Gml { .. })));
    }
}
