use std::collections::HashMap;
use std::path::Path;

use crate::error::{Error, Result};
use crate::topology::{parse_gml, Topology};

pub const BUILTIN_NAMES: [&str; 4] = ["gscale", "agis", "ans", "cogent"];

const GSCALE: &str = include_str!("../../data/GScale.edges");
const AGIS: &str = include_str!("../../data/Agis.gml");
const ANS: &str = include_str!("../../data/Ans.gml");
const COGENT: &str = include_str!("../../data/Cogentco.gml");

/// Loads one of the bundled topologies by (case-insensitive) name.
pub fn builtin_topology(name: &str) -> Result<Topology> {
    let mut topo = match name.to_ascii_lowercase().as_str() {
        "gscale" => parse_edge_list("GScale", GSCALE)?,
        "agis" => parse_gml(AGIS)?,
        "ans" => parse_gml(ANS)?,
        "cogent" | "cogentco" => parse_gml(COGENT)?,
        _ => {
            return Err(Error::UnknownTopology {
                name: name.to_string(),
                valid: BUILTIN_NAMES.join(", "),
            })
        }
    };
    topo.name = match topo.name.as_str() {
        "AGIS" => "Agis".into(),
        "ANS" => "Ans".into(),
        other => other.to_string(),
    };
    Ok(topo)
}

/// Resolves a builtin name, or failing that, a file path.
pub fn load_topology(name_or_path: &str) -> Result<Topology> {
    match builtin_topology(name_or_path) {
        Err(Error::UnknownTopology { .. }) if Path::new(name_or_path).exists() => load_file(Path::new(name_or_path)),
        other => other,
    }
}

pub(crate) fn load_file(path: &Path) -> Result<Topology> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::File {
        path: path.to_path_buf(),
        source,
    })?;
    let is_gml = path.extension().is_some_and(|ext| ext.eq_ignore_ascii_case("gml"));
    if is_gml {
        parse_gml(&text)
    } else {
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "edges".into());
        parse_edge_list(&name, &text)
    }
}

/// Parses whitespace-separated `a b` link lines; `#` starts a comment.
///
/// When every node token is an integer, nodes are numbered in ascending
/// numeric order, otherwise in order of first appearance.
pub fn parse_edge_list(name: &str, text: &str) -> Result<Topology> {
    let mut pairs = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut it = line.split_whitespace();
        match (it.next(), it.next(), it.next()) {
            (Some(a), Some(b), None) => pairs.push((a.to_string(), b.to_string())),
            _ => {
                return Err(Error::EdgeList {
                    line: i + 1,
                    message: format!("expected two node names, got `{line}`"),
                })
            }
        }
    }

    let numeric = pairs
        .iter()
        .all(|(a, b)| a.parse::<i64>().is_ok() && b.parse::<i64>().is_ok());
    let key = |v: &str| {
        if numeric {
            v.parse::<i64>().unwrap().to_string()
        } else {
            v.to_string()
        }
    };
    let mut order: Vec<String> = Vec::new();
    for (a, b) in &pairs {
        for v in [key(a), key(b)] {
            if !order.contains(&v) {
                order.push(v);
            }
        }
    }
    if numeric {
        order.sort_by_key(|v| v.parse::<i64>().unwrap());
    }
    let position: HashMap<&str, usize> = order.iter().enumerate().map(|(i, v)| (v.as_str(), i)).collect();
    let links: Vec<_> = pairs
        .iter()
        .map(|(a, b)| (position[key(a).as_str()], position[key(b).as_str()]))
        .collect();
    Topology::from_links(name, order.clone(), links)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_sizes() {
        for (name, nodes, links) in [
            ("gscale", 12, 19),
            ("agis", 25, 30),
            ("ans", 18, 25),
            ("cogent", 197, 243),
        ] {
            let t = builtin_topology(name).unwrap();
            assert_eq!((t.node_count(), t.link_count()), (nodes, links), "{name}");
            assert_eq!(t.edge_count(), 2 * links);
            assert_eq!(t.components().len(), 1, "{name} is connected");
        }
    }

    #[test]
    fn cogent_has_two_duplicate_links() {
        let t = builtin_topology("Cogent").unwrap();
        assert_eq!(t.dedup_stats().duplicate_links, 2);
    }

    #[test]
    fn unknown_builtin() {
        match builtin_topology("bogus") {
            Err(Error::UnknownTopology { valid, .. }) => assert!(valid.contains("gscale")),
            other => panic!("unexpected {other:?}"),
        }
        assert!(load_topology("bogus").is_err());
    }

    #[test]
    fn edge_list_numeric_order() {
        let t = parse_edge_list("x", "10 2\n2 3 # tail\n\n# full comment\n").unwrap();
        assert_eq!(t.label(0), Some("2"));
        assert_eq!(t.label(2), Some("10"));
        assert_eq!(t.link_count(), 2);
        assert!(matches!(
            parse_edge_list("x", "1 2 3"),
            Err(Error::EdgeList { line: 1, .. })
        ));
    }
}
