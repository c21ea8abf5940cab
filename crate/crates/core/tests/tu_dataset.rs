//! Loading the TU benchmark text layout.

use std::fs;
use std::path::{Path, PathBuf};

use grnf::io::parse_tu_dataset;
use grnf::GrnfError;

fn fixture() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/toy")
}

fn write_dataset(dir: &Path, files: &[(&str, &str)]) {
    for (suffix, body) in files {
        fs::write(dir.join(format!("BAD_{suffix}.txt")), body).unwrap();
    }
}

#[test]
fn toy_dataset_loads() {
    let ds = parse_tu_dataset(&fixture(), "TOY").unwrap();
    assert_eq!(ds.graphs.len(), 2);
    assert_eq!(ds.self_loops_dropped, 1);
    assert_eq!(ds.node_label_channels, 3);

    let (g1, g2) = (&ds.graphs[0], &ds.graphs[1]);
    assert_eq!((g1.label, g2.label), (1, -1));
    assert_eq!((g1.graph.n(), g2.graph.n()), (3, 2));
    assert!(!g1.graph.directed());

    // Reverse duplicates collapse to one undirected edge keeping the first
    // attribute row.
    assert_eq!(g1.graph.edges(), &[(0, 1), (1, 2)]);
    assert_eq!(g1.graph.edge_attrs(), &[vec![0.5], vec![2.5]]);
    assert_eq!(g2.graph.edges(), &[(0, 1)]);
    assert_eq!(g2.graph.edge_attrs(), &[vec![5.5]]);

    // Labels {0, 1, 2} one-hot in sorted order.
    assert_eq!(
        g1.graph.node_attrs(),
        &[
            vec![1.0, 0.0, 0.0],
            vec![0.0, 0.0, 1.0],
            vec![1.0, 0.0, 0.0]
        ]
    );
    assert_eq!(
        g2.graph.node_attrs(),
        &[vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]]
    );
}

#[test]
fn missing_required_file_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    write_dataset(
        dir.path(),
        &[("A", "1, 2\n"), ("graph_indicator", "1\n1\n")],
    );
    let err = parse_tu_dataset(dir.path(), "BAD").unwrap_err();
    assert!(matches!(err, GrnfError::MissingFile(_)), "{err}");
}

#[test]
fn edges_across_graphs_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    write_dataset(
        dir.path(),
        &[
            ("A", "1, 2\n2, 3\n"),
            ("graph_indicator", "1\n1\n2\n"),
            ("graph_labels", "0\n1\n"),
        ],
    );
    let err = parse_tu_dataset(dir.path(), "BAD").unwrap_err();
    assert!(matches!(err, GrnfError::Parse(_)), "{err}");
}

#[test]
fn malformed_inputs_are_rejected() {
    let cases: [&[(&str, &str)]; 4] = [
        // Graph ids must be contiguous from 1.
        &[
            ("A", "1, 2\n"),
            ("graph_indicator", "1\n3\n"),
            ("graph_labels", "0\n1\n"),
        ],
        // Label count mismatch.
        &[
            ("A", "1, 2\n"),
            ("graph_indicator", "1\n1\n"),
            ("graph_labels", "0\n1\n"),
        ],
        // Node id out of range.
        &[
            ("A", "1, 9\n"),
            ("graph_indicator", "1\n1\n"),
            ("graph_labels", "0\n"),
        ],
        // Non-numeric edge line.
        &[
            ("A", "1; 2\n"),
            ("graph_indicator", "1\n1\n"),
            ("graph_labels", "0\n"),
        ],
    ];
    for files in cases {
        let dir = tempfile::tempdir().unwrap();
        write_dataset(dir.path(), files);
        let err = parse_tu_dataset(dir.path(), "BAD").unwrap_err();
        assert!(matches!(err, GrnfError::Parse(_)), "{files:?}: {err}");
    }
}

#[test]
fn continuous_attributes_follow_label_channels() {
    let dir = tempfile::tempdir().unwrap();
    write_dataset(
        dir.path(),
        &[
            ("A", "1, 2\n2, 1\n"),
            ("graph_indicator", "1\n1\n"),
            ("graph_labels", "4\n"),
            ("node_labels", "7\n3\n"),
            ("node_attributes", "0.25, -1.0\n2.0, 0.5\n"),
        ],
    );
    let ds = parse_tu_dataset(dir.path(), "BAD").unwrap();
    assert_eq!(ds.node_label_channels, 2);
    let g = &ds.graphs[0].graph;
    assert_eq!(
        g.node_attrs(),
        &[vec![0.0, 1.0, 0.25, -1.0], vec![1.0, 0.0, 2.0, 0.5]]
    );
    assert_eq!(g.edge_dim(), 0);
}
