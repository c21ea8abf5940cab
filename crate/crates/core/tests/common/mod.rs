#![allow(dead_code)]

use grnf::tensor::Permutation;
use grnf::Graph;
use rand::Rng;

pub fn random_graph<R: Rng + ?Sized>(rng: &mut R, n: usize, p: f64) -> Graph {
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.random::<f64>() < p {
                edges.push((i, j));
            }
        }
    }
    Graph::unattributed(n, edges).unwrap()
}

pub fn attributed_graph<R: Rng + ?Sized>(rng: &mut R, n: usize, p: f64) -> Graph {
    let mut edges = Vec::new();
    let mut edge_attrs = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.random::<f64>() < p {
                edges.push((i, j));
                edge_attrs.push(vec![rng.random_range(-1.0..1.0)]);
            }
        }
    }
    let node_attrs = (0..n)
        .map(|_| vec![rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)])
        .collect();
    Graph::new(n, node_attrs, edges, edge_attrs, false).unwrap()
}

pub fn permuted<R: Rng + ?Sized>(g: &Graph, rng: &mut R) -> Graph {
    g.relabel(&Permutation::random(g.n(), rng)).unwrap()
}

fn adjacency(g: &Graph) -> Vec<Vec<bool>> {
    let mut a = vec![vec![false; g.n()]; g.n()];
    for &(i, j) in g.edges() {
        a[i][j] = true;
        a[j][i] = true;
    }
    a
}

/// Brute-force isomorphism test for small unattributed undirected graphs.
pub fn isomorphic(g: &Graph, h: &Graph) -> bool {
    if g.n() != h.n() || g.num_edges() != h.num_edges() {
        return false;
    }
    let (a, b) = (adjacency(g), adjacency(h));
    let degrees = |m: &Vec<Vec<bool>>| -> Vec<usize> {
        m.iter().map(|r| r.iter().filter(|&&x| x).count()).collect()
    };
    let (da, db) = (degrees(&a), degrees(&b));
    let mut sa = da.clone();
    let mut sb = db.clone();
    sa.sort_unstable();
    sb.sort_unstable();
    if sa != sb {
        return false;
    }
    fn extend(
        u: usize,
        map: &mut Vec<usize>,
        used: &mut [bool],
        a: &[Vec<bool>],
        b: &[Vec<bool>],
        da: &[usize],
        db: &[usize],
    ) -> bool {
        let n = a.len();
        if u == n {
            return true;
        }
        for v in 0..n {
            if used[v] || da[u] != db[v] {
                continue;
            }
            if (0..u).all(|w| a[u][w] == b[v][map[w]]) {
                used[v] = true;
                map.push(v);
                if extend(u + 1, map, used, a, b, da, db) {
                    return true;
                }
                map.pop();
                used[v] = false;
            }
        }
        false
    }
    extend(
        0,
        &mut Vec::new(),
        &mut vec![false; g.n()],
        &a,
        &b,
        &da,
        &db,
    )
}
