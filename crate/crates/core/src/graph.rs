//! Attributed graphs and their order-2 tensor representation.

use crate::error::{GrnfError, Result};
use crate::tensor::{DenseTensor, Permutation};

/// Default bound on the magnitude of node and edge attributes.
pub const DEFAULT_ATTR_BOUND: f64 = 10.0;

/// A graph with real-vector attributes on nodes and edges.
///
/// Undirected graphs store each edge once as `(i, j)` with `i < j`. Self-loops
/// are not representable.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    n: usize,
    node_attrs: Vec<Vec<f64>>,
    edges: Vec<(usize, usize)>,
    edge_attrs: Vec<Vec<f64>>,
    directed: bool,
}

impl Graph {
    /// Validates and builds a graph using [`DEFAULT_ATTR_BOUND`].
    ///
    /// `node_attrs` is either empty (no node attributes) or has one vector per
    /// node; likewise `edge_attrs` is empty or parallel to `edges`.
    pub fn new(
        n: usize,
        node_attrs: Vec<Vec<f64>>,
        edges: Vec<(usize, usize)>,
        edge_attrs: Vec<Vec<f64>>,
        directed: bool,
    ) -> Result<Self> {
        Self::with_bound(
            n,
            node_attrs,
            edges,
            edge_attrs,
            directed,
            DEFAULT_ATTR_BOUND,
        )
    }

    pub fn with_bound(
        n: usize,
        node_attrs: Vec<Vec<f64>>,
        edges: Vec<(usize, usize)>,
        edge_attrs: Vec<Vec<f64>>,
        directed: bool,
        bound: f64,
    ) -> Result<Self> {
        if n == 0 {
            return Err(GrnfError::InvalidGraph(
                "graph must have at least one node".into(),
            ));
        }
        let node_attrs = normalize_attrs(node_attrs, n, "node")?;
        let edge_attrs = normalize_attrs(edge_attrs, edges.len(), "edge")?;
        for v in node_attrs.iter().chain(edge_attrs.iter()).flatten() {
            if !v.is_finite() || v.abs() > bound {
                return Err(GrnfError::InvalidGraph(format!(
                    "attribute value {v} outside the bound {bound}"
                )));
            }
        }
        let mut seen = std::collections::HashSet::with_capacity(edges.len());
        let mut canonical = Vec::with_capacity(edges.len());
        for &(i, j) in &edges {
            if i >= n || j >= n {
                return Err(GrnfError::InvalidGraph(format!(
                    "edge ({i}, {j}) references a node outside 0..{n}"
                )));
            }
            if i == j {
                return Err(GrnfError::InvalidGraph(format!("self-loop on node {i}")));
            }
            let e = if directed {
                (i, j)
            } else {
                (i.min(j), i.max(j))
            };
            if !seen.insert(e) {
                return Err(GrnfError::InvalidGraph(format!(
                    "duplicate edge ({i}, {j})"
                )));
            }
            canonical.push(e);
        }
        Ok(Self {
            n,
            node_attrs,
            edges: canonical,
            edge_attrs,
            directed,
        })
    }

    /// Unattributed undirected graph.
    pub fn unattributed(n: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        Self::new(n, Vec::new(), edges, Vec::new(), false)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn directed(&self) -> bool {
        self.directed
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Node attribute vectors; empty when the graph has none.
    pub fn node_attrs(&self) -> &[Vec<f64>] {
        &self.node_attrs
    }

    pub fn edge_attrs(&self) -> &[Vec<f64>] {
        &self.edge_attrs
    }

    pub fn node_dim(&self) -> usize {
        self.node_attrs.first().map_or(0, Vec::len)
    }

    pub fn edge_dim(&self) -> usize {
        self.edge_attrs.first().map_or(0, Vec::len)
    }

    /// Channel count of [`graph_to_tensor`]: `max(d_node, d_edge, 1)`.
    pub fn channels(&self) -> usize {
        self.node_dim().max(self.edge_dim()).max(1)
    }

    /// Relabels nodes so that node `i` of the result is node `π(i)` of `self`;
    /// then `graph_to_tensor(g.relabel(π)) = π⋆graph_to_tensor(g)`.
    pub fn relabel(&self, pi: &Permutation) -> Result<Graph> {
        if pi.len() != self.n {
            return Err(GrnfError::Shape(format!(
                "permutation of size {} applied to graph with {} nodes",
                pi.len(),
                self.n
            )));
        }
        let inv = pi.inverse();
        let node_attrs = if self.node_attrs.is_empty() {
            Vec::new()
        } else {
            (0..self.n)
                .map(|i| self.node_attrs[pi.apply(i)].clone())
                .collect()
        };
        let edges = self
            .edges
            .iter()
            .map(|&(a, b)| (inv.apply(a), inv.apply(b)))
            .collect();
        Graph::with_bound(
            self.n,
            node_attrs,
            edges,
            self.edge_attrs.clone(),
            self.directed,
            f64::INFINITY,
        )
    }
}

fn normalize_attrs(attrs: Vec<Vec<f64>>, count: usize, what: &str) -> Result<Vec<Vec<f64>>> {
    if attrs.is_empty() {
        return Ok(attrs);
    }
    if attrs.len() != count {
        return Err(GrnfError::InvalidGraph(format!(
            "{} {what} attribute vectors for {count} {what}s",
            attrs.len()
        )));
    }
    let dim = attrs[0].len();
    if attrs.iter().any(|a| a.len() != dim) {
        return Err(GrnfError::InvalidGraph(format!(
            "{what} attributes have inconsistent dimensions"
        )));
    }
    // Zero-dimensional attributes are the same as none.
    if dim == 0 {
        return Ok(Vec::new());
    }
    Ok(attrs)
}

/// Order-2 tensor of a graph.
///
/// Node attributes sit on the diagonal and edge attributes off the diagonal,
/// both zero-padded to `max(d_node, d_edge, 1)` channels. A side without
/// attributes is marked with `1.0` in channel 0, so an unattributed graph
/// becomes its binary adjacency with a unit diagonal. Undirected edges are
/// written symmetrically.
pub fn graph_to_tensor(g: &Graph) -> DenseTensor {
    let n = g.n;
    let d = g.channels();
    let mut data = vec![0.0; n * n * d];
    for i in 0..n {
        let off = (i * n + i) * d;
        match g.node_attrs.get(i) {
            Some(a) => data[off..off + a.len()].copy_from_slice(a),
            None => data[off] = 1.0,
        }
    }
    for (e, &(i, j)) in g.edges.iter().enumerate() {
        let attr = g.edge_attrs.get(e);
        let mut write = |a: usize, b: usize| {
            let off = (a * n + b) * d;
            match attr {
                Some(v) => data[off..off + v.len()].copy_from_slice(v),
                None => data[off] = 1.0,
            }
        };
        write(i, j);
        if !g.directed {
            write(j, i);
        }
    }
    DenseTensor::from_data(2, n, d, data).expect("graph tensor shape")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::apply_permutation;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn single_node_and_null_graph() {
        let g = Graph::unattributed(1, vec![]).unwrap();
        assert_eq!(graph_to_tensor(&g).data(), &[1.0]);
        assert_eq!(DenseTensor::null_graph(1).data(), &[0.0]);
    }

    #[test]
    fn one_edge_pair() {
        let g = Graph::unattributed(2, vec![(1, 0)]).unwrap();
        assert_eq!(g.edges(), &[(0, 1)]);
        assert_eq!(graph_to_tensor(&g).data(), &[1.0, 1.0, 1.0, 1.0]);
    }

    #[test]
    fn node_attributes_on_diagonal() {
        let g = Graph::new(
            2,
            vec![vec![1.5, -2.0], vec![3.0, 4.0]],
            vec![],
            vec![],
            false,
        )
        .unwrap();
        let t = graph_to_tensor(&g);
        assert_eq!(t.channels(), 2);
        assert_eq!(t.data(), &[1.5, -2.0, 0.0, 0.0, 0.0, 0.0, 3.0, 4.0]);
    }

    #[test]
    fn edges_without_attributes_are_marked() {
        let g = Graph::new(
            2,
            vec![vec![1.5, -2.0], vec![3.0, 4.0]],
            vec![(0, 1)],
            vec![],
            false,
        )
        .unwrap();
        let t = graph_to_tensor(&g);
        assert_eq!(t.get(&[0, 1], 0), 1.0);
        assert_eq!(t.get(&[0, 1], 1), 0.0);
        assert_eq!(t.get(&[1, 0], 0), 1.0);
    }

    #[test]
    fn edge_attributes_padded() {
        let g = Graph::new(3, vec![], vec![(0, 2)], vec![vec![0.5, 0.25, -1.0]], true).unwrap();
        let t = graph_to_tensor(&g);
        assert_eq!(t.channels(), 3);
        assert_eq!(t.get(&[1, 1], 0), 1.0);
        assert_eq!(t.get(&[0, 2], 2), -1.0);
        assert_eq!(t.get(&[2, 0], 0), 0.0);
    }

    #[test]
    fn validation_errors() {
        assert!(Graph::unattributed(0, vec![]).is_err());
        assert!(Graph::unattributed(2, vec![(0, 0)]).is_err());
        assert!(Graph::unattributed(2, vec![(0, 2)]).is_err());
        assert!(Graph::unattributed(2, vec![(0, 1), (1, 0)]).is_err());
        assert!(Graph::new(2, vec![], vec![(0, 1), (1, 0)], vec![], true).is_ok());
        assert!(Graph::new(1, vec![vec![11.0]], vec![], vec![], false).is_err());
        assert!(Graph::new(1, vec![vec![f64::NAN]], vec![], vec![], false).is_err());
        assert!(Graph::new(2, vec![vec![1.0], vec![1.0, 2.0]], vec![], vec![], false).is_err());
    }

    fn random_graph(rng: &mut ChaCha8Rng, n: usize, directed: bool) -> Graph {
        use rand::Rng;
        let mut edges = Vec::new();
        let mut eattr = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if i != j && (directed || i < j) && rng.random::<f64>() < 0.4 {
                    edges.push((i, j));
                    eattr.push(vec![rng.random_range(-1.0..1.0)]);
                }
            }
        }
        let nattr = (0..n)
            .map(|_| vec![rng.random_range(-5.0..5.0), 1.0])
            .collect();
        Graph::new(n, nattr, edges, eattr, directed).unwrap()
    }

    #[test]
    fn relabel_commutes_with_tensor() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for trial in 0..50 {
            let n = 1 + trial % 7;
            let g = random_graph(&mut rng, n, trial % 2 == 0);
            let pi = Permutation::random(n, &mut rng);
            let lhs = graph_to_tensor(&g.relabel(&pi).unwrap());
            let rhs = apply_permutation(&graph_to_tensor(&g), &pi).unwrap();
            assert_eq!(lhs, rhs);
        }
    }
}
