use std::fs;

use bwr::{load_topology, Error};

#[test]
fn gml_file_round_trip() {
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("tri.gml");
    fs::write(
        &path,
        "graph [ label \"tri\" directed 0\n node [ id 7 label \"x\" ] node [ id 3 label \"y\" ] node [ id 5 ]\n \
         edge [ source 7 target 3 ] edge [ source 3 target 5 ] edge [ source 5 target 5 ] ]",
    )
    .unwrap();
    let t = load_topology(path.to_str().unwrap()).unwrap();
    assert_eq!((t.name(), t.node_count(), t.link_count()), ("tri", 3, 2));
    assert_eq!(t.label(0), Some("x"));
    assert_eq!(t.label(2), Some("5"));
    assert_eq!(t.dedup_stats().self_loops, 1);
    assert_eq!(t.min_hop_distance(0, 2).unwrap(), 2);
}

#[test]
fn edge_list_file() {
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("line.edges");
    fs::write(&path, "# a line\n10 2\n2 01\n\n1 2 # repeated\n").unwrap();
    let t = load_topology(path.to_str().unwrap()).unwrap();
    assert_eq!(t.name(), "line");
    assert_eq!(t.node_count(), 3);
    assert_eq!(t.link_count(), 2);
    assert_eq!(t.dedup_stats().duplicate_links, 1);
    assert_eq!((t.label(0), t.label(1), t.label(2)), (Some("1"), Some("2"), Some("10")));
}

#[test]
fn malformed_files_report_positions() {
    let tmp = tempfile::tempdir().unwrap();
    let gml = tmp.path().join("bad.gml");
    fs::write(&gml, "graph [ node [ id 1 ]").unwrap();
    assert!(matches!(
        load_topology(gml.to_str().unwrap()),
        Err(Error::Gml { offset: 6, .. })
    ));
    fs::write(&gml, "graph [ node [ id 1 ] edge [ source 1 target 2 ] ]").unwrap();
    assert!(matches!(load_topology(gml.to_str().unwrap()), Err(Error::Gml { .. })));

    let edges = tmp.path().join("bad.txt");
    fs::write(&edges, "a b\nb c d\n").unwrap();
    assert!(matches!(
        load_topology(edges.to_str().unwrap()),
        Err(Error::EdgeList { line: 2, .. })
    ));
}

#[test]
fn builtin_names_win_over_missing_files() {
    assert_eq!(load_topology("GSCALE").unwrap().node_count(), 12);
    assert!(matches!(
        load_topology("./missing.gml"),
        Err(Error::UnknownTopology { .. })
    ));
}
