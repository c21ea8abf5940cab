//! The TU benchmark layout: `NAME_A.txt` (one `i, j` edge per line, 1-based
//! global node ids), `NAME_graph_indicator.txt` (graph id per node),
//! `NAME_graph_labels.txt` (label per graph), and optionally
//! `NAME_node_labels.txt`, `NAME_node_attributes.txt`,
//! `NAME_edge_attributes.txt`.

use std::collections::{BTreeSet, HashMap};
use std::path::Path;

use crate::error::{GrnfError, Result};
use crate::graph::Graph;

use super::json::LabeledGraph;

#[derive(Debug, Clone)]
pub struct TuDataset {
    pub graphs: Vec<LabeledGraph>,
    /// Self-loops present in the edge file and dropped.
    pub self_loops_dropped: usize,
    /// Channels taken by the one-hot encoded node labels.
    pub node_label_channels: usize,
}

fn read_required(dir: &Path, name: &str, suffix: &str) -> Result<String> {
    let path = dir.join(format!("{name}_{suffix}.txt"));
    std::fs::read_to_string(&path)
        .map_err(|e| GrnfError::MissingFile(format!("{}: {e}", path.display())))
}

fn read_optional(dir: &Path, name: &str, suffix: &str) -> Result<Option<String>> {
    let path = dir.join(format!("{name}_{suffix}.txt"));
    if !path.exists() {
        return Ok(None);
    }
    Ok(Some(std::fs::read_to_string(&path)?))
}

fn lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty())
}

fn parse_ints(text: &str, file: &str) -> Result<Vec<i64>> {
    lines(text)
        .map(|(no, l)| {
            l.parse::<i64>()
                .map_err(|e| GrnfError::Parse(format!("{file} line {no}: '{l}': {e}")))
        })
        .collect()
}

fn parse_rows(text: &str, file: &str) -> Result<Vec<Vec<f64>>> {
    lines(text)
        .map(|(no, l)| {
            l.split(',')
                .map(|v| {
                    v.trim()
                        .parse::<f64>()
                        .map_err(|e| GrnfError::Parse(format!("{file} line {no}: '{v}': {e}")))
                })
                .collect()
        })
        .collect()
}

/// Loads `dir/NAME_*.txt`. Edges are symmetrised into undirected graphs; node
/// labels become one-hot channels, followed by any continuous node
/// attributes. Attribute magnitudes are not bounded here.
pub fn parse_tu_dataset(dir: &Path, name: &str) -> Result<TuDataset> {
    let a_text = read_required(dir, name, "A")?;
    let indicator = parse_ints(
        &read_required(dir, name, "graph_indicator")?,
        "graph_indicator",
    )?;
    let graph_labels = parse_ints(&read_required(dir, name, "graph_labels")?, "graph_labels")?;
    let node_labels = read_optional(dir, name, "node_labels")?
        .map(|t| parse_ints(&t, "node_labels"))
        .transpose()?;
    let node_attributes = read_optional(dir, name, "node_attributes")?
        .map(|t| parse_rows(&t, "node_attributes"))
        .transpose()?;
    let edge_attributes = read_optional(dir, name, "edge_attributes")?
        .map(|t| parse_rows(&t, "edge_attributes"))
        .transpose()?;

    let total_nodes = indicator.len();
    if total_nodes == 0 {
        return Err(GrnfError::Parse("graph_indicator lists no nodes".into()));
    }
    let distinct: BTreeSet<i64> = indicator.iter().copied().collect();
    let num_graphs = distinct.len();
    if distinct.first() != Some(&1) || distinct.last() != Some(&(num_graphs as i64)) {
        return Err(GrnfError::Parse(format!(
            "graph ids must be 1..{num_graphs}, found range {:?}..{:?}",
            distinct.first(),
            distinct.last()
        )));
    }
    if graph_labels.len() != num_graphs {
        return Err(GrnfError::Parse(format!(
            "{} graph labels for {num_graphs} graphs",
            graph_labels.len()
        )));
    }
    if let Some(l) = &node_labels {
        if l.len() != total_nodes {
            return Err(GrnfError::Parse(format!(
                "{} node labels for {total_nodes} nodes",
                l.len()
            )));
        }
    }
    if let Some(a) = &node_attributes {
        if a.len() != total_nodes {
            return Err(GrnfError::Parse(format!(
                "{} node attribute rows for {total_nodes} nodes",
                a.len()
            )));
        }
    }

    // Global node -> (graph, local index).
    let mut local = Vec::with_capacity(total_nodes);
    let mut sizes = vec![0usize; num_graphs];
    for &g in &indicator {
        let g = (g - 1) as usize;
        local.push((g, sizes[g]));
        sizes[g] += 1;
    }

    let label_values: Vec<i64> = node_labels
        .as_ref()
        .map(|l| {
            l.iter()
                .copied()
                .collect::<BTreeSet<_>>()
                .into_iter()
                .collect()
        })
        .unwrap_or_default();
    let label_channel: HashMap<i64, usize> = label_values
        .iter()
        .enumerate()
        .map(|(i, &v)| (v, i))
        .collect();
    let node_features = |v: usize| -> Vec<f64> {
        let mut f = vec![0.0; label_values.len()];
        if let Some(l) = &node_labels {
            f[label_channel[&l[v]]] = 1.0;
        }
        if let Some(a) = &node_attributes {
            f.extend_from_slice(&a[v]);
        }
        f
    };

    let mut edges: Vec<Vec<(usize, usize)>> = vec![Vec::new(); num_graphs];
    let mut eattrs: Vec<Vec<Vec<f64>>> = vec![Vec::new(); num_graphs];
    let mut seen: Vec<BTreeSet<(usize, usize)>> = vec![BTreeSet::new(); num_graphs];
    let mut self_loops = 0;
    let edge_lines: Vec<(usize, &str)> = lines(&a_text).collect();
    if let Some(ea) = &edge_attributes {
        if ea.len() != edge_lines.len() {
            return Err(GrnfError::Parse(format!(
                "{} edge attribute rows for {} edges",
                ea.len(),
                edge_lines.len()
            )));
        }
    }
    for (e, (no, line)) in edge_lines.iter().enumerate() {
        let ids: Vec<usize> = line
            .split(',')
            .map(|v| v.trim().parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|err| GrnfError::Parse(format!("A line {no}: '{line}': {err}")))?;
        let &[i, j] = ids.as_slice() else {
            return Err(GrnfError::Parse(format!(
                "A line {no}: expected 'i, j', got '{line}'"
            )));
        };
        if i == 0 || j == 0 || i > total_nodes || j > total_nodes {
            return Err(GrnfError::Parse(format!(
                "A line {no}: node id outside 1..={total_nodes}"
            )));
        }
        let (gi, li) = local[i - 1];
        let (gj, lj) = local[j - 1];
        if gi != gj {
            return Err(GrnfError::Parse(format!(
                "A line {no}: edge joins graphs {} and {}",
                gi + 1,
                gj + 1
            )));
        }
        if li == lj {
            self_loops += 1;
            continue;
        }
        let key = (li.min(lj), li.max(lj));
        if seen[gi].insert(key) {
            edges[gi].push(key);
            if let Some(ea) = &edge_attributes {
                eattrs[gi].push(ea[e].clone());
            }
        }
    }
    if self_loops > 0 {
        log::warn!("{name}: dropped {self_loops} self-loops");
    }

    let mut node_lists: Vec<Vec<Vec<f64>>> = vec![Vec::new(); num_graphs];
    for (v, &(g, _)) in local.iter().enumerate() {
        node_lists[g].push(node_features(v));
    }
    let graphs = (0..num_graphs)
        .map(|g| {
            let graph = Graph::with_bound(
                sizes[g],
                std::mem::take(&mut node_lists[g]),
                std::mem::take(&mut edges[g]),
                std::mem::take(&mut eattrs[g]),
                false,
                f64::INFINITY,
            )
            .map_err(|e| GrnfError::Parse(format!("graph {}: {e}", g + 1)))?;
            Ok(LabeledGraph {
                graph,
                label: graph_labels[g],
            })
        })
        .collect::<Result<_>>()?;
    Ok(TuDataset {
        graphs,
        self_loops_dropped: self_loops,
        node_label_channels: label_values.len(),
    })
}
