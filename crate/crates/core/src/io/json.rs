use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{GrnfError, Result};
use crate::graph::Graph;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphDoc {
    n: usize,
    #[serde(default)]
    directed: bool,
    nodes: Vec<NodeDoc>,
    #[serde(default)]
    edges: Vec<EdgeDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NodeDoc {
    id: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    attr: Option<Vec<f64>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgeDoc {
    src: usize,
    dst: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    attr: Option<Vec<f64>>,
}

/// Attributes are all present or all absent.
fn collect_attrs<'a>(
    attrs: impl Iterator<Item = &'a Option<Vec<f64>>>,
    what: &str,
) -> Result<Vec<Vec<f64>>> {
    let attrs: Vec<&Option<Vec<f64>>> = attrs.collect();
    let present = attrs.iter().filter(|a| a.is_some()).count();
    if present == 0 {
        return Ok(Vec::new());
    }
    if present != attrs.len() {
        return Err(GrnfError::Parse(format!(
            "{present} of {} {what}s carry attributes; either all or none must",
            attrs.len()
        )));
    }
    Ok(attrs
        .into_iter()
        .map(|a| a.clone().expect("checked"))
        .collect())
}

impl GraphDoc {
    fn into_graph(self) -> Result<Graph> {
        let n = self.n;
        let mut slots: Vec<Option<NodeDoc>> = (0..n).map(|_| None).collect();
        for node in self.nodes {
            let id = node.id;
            let slot = slots
                .get_mut(id)
                .ok_or_else(|| GrnfError::InvalidGraph(format!("node id {id} outside 0..{n}")))?;
            if slot.is_some() {
                return Err(GrnfError::InvalidGraph(format!(
                    "node id {id} listed twice"
                )));
            }
            *slot = Some(node);
        }
        if let Some(missing) = slots.iter().position(Option::is_none) {
            return Err(GrnfError::InvalidGraph(format!(
                "node {missing} is not listed"
            )));
        }
        let nodes: Vec<NodeDoc> = slots.into_iter().map(|s| s.expect("checked")).collect();
        let node_attrs = collect_attrs(nodes.iter().map(|v| &v.attr), "node")?;
        let edge_attrs = collect_attrs(self.edges.iter().map(|e| &e.attr), "edge")?;
        let edges = self.edges.iter().map(|e| (e.src, e.dst)).collect();
        Graph::new(n, node_attrs, edges, edge_attrs, self.directed)
    }

    fn from_graph(g: &Graph) -> Self {
        let node_attr = |i: usize| g.node_attrs().get(i).cloned();
        let edge_attr = |e: usize| g.edge_attrs().get(e).cloned();
        GraphDoc {
            n: g.n(),
            directed: g.directed(),
            nodes: (0..g.n())
                .map(|i| NodeDoc {
                    id: i,
                    attr: node_attr(i),
                })
                .collect(),
            edges: g
                .edges()
                .iter()
                .enumerate()
                .map(|(e, &(src, dst))| EdgeDoc {
                    src,
                    dst,
                    attr: edge_attr(e),
                })
                .collect(),
        }
    }
}

pub fn graph_from_value(value: serde_json::Value) -> Result<Graph> {
    let doc: GraphDoc = serde_json::from_value(value)
        .map_err(|e| GrnfError::Parse(format!("graph document: {e}")))?;
    doc.into_graph()
}

pub fn graph_to_value(g: &Graph) -> serde_json::Value {
    serde_json::to_value(GraphDoc::from_graph(g)).expect("graph documents always serialize")
}

pub fn parse_graph_json(text: &str) -> Result<Graph> {
    let doc: GraphDoc =
        serde_json::from_str(text).map_err(|e| GrnfError::Parse(format!("graph document: {e}")))?;
    doc.into_graph()
}

pub fn write_graph_json(g: &Graph) -> String {
    serde_json::to_string(&GraphDoc::from_graph(g)).expect("graph documents always serialize")
}

/// One record of a corpus file.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledGraph {
    pub graph: Graph,
    pub label: i64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RecordIn {
    graph: GraphDoc,
    label: i64,
}

#[derive(Serialize)]
struct RecordOut {
    graph: GraphDoc,
    label: i64,
}

/// Parses a JSON-lines corpus of `{"graph": ..., "label": ...}` records.
/// Blank lines are ignored.
pub fn parse_corpus(text: &str) -> Result<Vec<LabeledGraph>> {
    text.lines()
        .enumerate()
        .filter(|(_, line)| !line.trim().is_empty())
        .map(|(i, line)| {
            let rec: RecordIn = serde_json::from_str(line)
                .map_err(|e| GrnfError::Parse(format!("corpus line {}: {e}", i + 1)))?;
            let graph = rec
                .graph
                .into_graph()
                .map_err(|e| GrnfError::Parse(format!("corpus line {}: {e}", i + 1)))?;
            Ok(LabeledGraph {
                graph,
                label: rec.label,
            })
        })
        .collect()
}

pub fn write_corpus(records: &[LabeledGraph]) -> String {
    let mut out = String::new();
    for r in records {
        let line = serde_json::to_string(&RecordOut {
            graph: GraphDoc::from_graph(&r.graph),
            label: r.label,
        })
        .expect("corpus records always serialize");
        out.push_str(&line);
        out.push('\n');
    }
    out
}

pub fn read_corpus(path: &Path) -> Result<Vec<LabeledGraph>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| GrnfError::MissingFile(format!("{}: {e}", path.display())))?;
    parse_corpus(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn minimal_document() {
        let g = parse_graph_json(r#"{"n": 1, "nodes": [{"id": 0}], "edges": []}"#).unwrap();
        assert_eq!(g.n(), 1);
        assert_eq!(g.num_edges(), 0);
        assert!(!g.directed());
    }

    #[test]
    fn random_attributed_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for directed in [false, true] {
            let n = 12;
            let attrs: Vec<Vec<f64>> = (0..n)
                .map(|_| vec![rng.random_range(-10.0..10.0), rng.random::<f64>()])
                .collect();
            let mut edges = Vec::new();
            for i in 0..n {
                for j in 0..n {
                    if i != j && (directed || i < j) && rng.random::<f64>() < 0.3 {
                        edges.push((i, j));
                    }
                }
            }
            let eattrs = edges
                .iter()
                .map(|_| vec![rng.random::<f64>() / 3.0])
                .collect();
            let g = Graph::new(n, attrs, edges, eattrs, directed).unwrap();
            let back = parse_graph_json(&write_graph_json(&g)).unwrap();
            assert_eq!(back, g);
        }
    }

    #[test]
    fn node_order_in_document_is_free() {
        let g = parse_graph_json(
            r#"{"n": 2, "nodes": [{"id": 1, "attr": [2.0]}, {"id": 0, "attr": [1.0]}], "edges": [{"src": 1, "dst": 0}]}"#,
        )
        .unwrap();
        assert_eq!(g.node_attrs(), &[vec![1.0], vec![2.0]]);
        assert_eq!(g.edges(), &[(0, 1)]);
    }

    #[test]
    fn schema_violations() {
        let cases = [
            (
                r#"{"n": 1, "nodes": [{"id": 0}], "edges": [{"src": 0, "dst": 0}]}"#,
                "self-loop",
            ),
            (
                r#"{"n": 2, "nodes": [{"id": 0}, {"id": 1}], "edges": [{"src": 0, "dst": 1}, {"src": 1, "dst": 0}]}"#,
                "duplicate",
            ),
            (
                r#"{"n": 2, "nodes": [{"id": 0}, {"id": 1}], "edges": [{"src": 0, "dst": 2}]}"#,
                "outside",
            ),
            (
                r#"{"n": 2, "nodes": [{"id": 0}], "edges": []}"#,
                "not listed",
            ),
            (
                r#"{"n": 1, "nodes": [{"id": 0}, {"id": 0}], "edges": []}"#,
                "twice",
            ),
            (
                r#"{"n": 2, "nodes": [{"id": 0, "attr": [1]}, {"id": 1}], "edges": []}"#,
                "all or none",
            ),
            (
                r#"{"n": 1, "nodes": [{"id": 0}], "edges": [], "extra": 1}"#,
                "unknown field",
            ),
            (r#"{"n": 1, "nodes": [{"id": 0}"#, "graph document"),
        ];
        for (text, needle) in cases {
            let err = parse_graph_json(text).unwrap_err().to_string();
            assert!(err.contains(needle), "{text}: {err}");
        }
    }

    #[test]
    fn corpus_round_trip() {
        let records = vec![
            LabeledGraph {
                graph: Graph::unattributed(3, vec![(0, 1)]).unwrap(),
                label: 4,
            },
            LabeledGraph {
                graph: Graph::unattributed(1, vec![]).unwrap(),
                label: -1,
            },
        ];
        let text = write_corpus(&records);
        assert_eq!(text.lines().count(), 2);
        assert_eq!(parse_corpus(&format!("{text}\n\n")).unwrap(), records);
        let err = parse_corpus("{}\n").unwrap_err().to_string();
        assert!(err.contains("line 1"), "{err}");
    }
}
