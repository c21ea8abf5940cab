//! Bowyer–Watson Delaunay triangulation and the planar-point graph family.
//!
//! Instead of a finite super-triangle the triangulation keeps "ghost"
//! triangles `(u, v, ∞)` on the outside of every hull edge `u → v`; a point
//! conflicts with a ghost when it lies strictly outside that edge. This keeps
//! the convex hull exact without huge coordinates in the predicates.

use std::collections::{BTreeSet, HashSet};

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{GrnfError, Result};
use crate::graph::Graph;

pub type Point = [f64; 2];

const GHOST: usize = usize::MAX;
/// Relative tolerance of the orientation and in-circle determinants: a
/// determinant counts as zero when it is within `EPS` times the sum of the
/// absolute values of its products.
const EPS: f64 = 1e-12;
const DUPLICATE_JITTER: f64 = 1e-9;

/// `1`, `-1` or `0` from a determinant and the magnitude of its terms.
fn guarded_sign(det: f64, permanent: f64) -> i8 {
    if det > EPS * permanent {
        1
    } else if det < -EPS * permanent {
        -1
    } else {
        0
    }
}

/// Sign of the signed area of `abc`: positive when counter-clockwise.
fn orient(a: Point, b: Point, c: Point) -> i8 {
    let l = (b[0] - a[0]) * (c[1] - a[1]);
    let r = (b[1] - a[1]) * (c[0] - a[0]);
    guarded_sign(l - r, l.abs() + r.abs())
}

/// Positive when `p` is strictly inside the circumcircle of the
/// counter-clockwise triangle `abc`.
fn incircle(a: Point, b: Point, c: Point, p: Point) -> i8 {
    let (adx, ady) = (a[0] - p[0], a[1] - p[1]);
    let (bdx, bdy) = (b[0] - p[0], b[1] - p[1]);
    let (cdx, cdy) = (c[0] - p[0], c[1] - p[1]);
    let (alift, blift, clift) = (
        adx * adx + ady * ady,
        bdx * bdx + bdy * bdy,
        cdx * cdx + cdy * cdy,
    );
    let det = alift * (bdx * cdy - cdx * bdy) - blift * (adx * cdy - cdx * ady)
        + clift * (adx * bdy - bdx * ady);
    let permanent = alift * ((bdx * cdy).abs() + (cdx * bdy).abs())
        + blift * ((adx * cdy).abs() + (cdx * ady).abs())
        + clift * ((adx * bdy).abs() + (bdx * ady).abs());
    guarded_sign(det, permanent)
}

fn conflicts(t: &[usize; 3], p: Point, q: &[Point]) -> bool {
    if t[2] == GHOST {
        let (u, v) = (q[t[0]], q[t[1]]);
        let o = orient(u, v, p);
        if o != 0 {
            return o > 0;
        }
        // On the hull line: only points strictly inside the segment split it.
        let dot = |a: Point, b: Point, c: Point| {
            (c[0] - a[0]) * (b[0] - a[0]) + (c[1] - a[1]) * (b[1] - a[1])
        };
        dot(u, v, p) > 0.0 && dot(v, u, p) > 0.0
    } else {
        incircle(q[t[0]], q[t[1]], q[t[2]], p) > 0
    }
}

/// Rotates a triangle so that a ghost vertex, if any, comes last.
fn canonical(t: [usize; 3]) -> [usize; 3] {
    match t.iter().position(|&v| v == GHOST) {
        Some(0) => [t[1], t[2], t[0]],
        Some(1) => [t[2], t[0], t[1]],
        _ => t,
    }
}

/// Coordinates rescaled to the unit box, with exact duplicates nudged apart.
fn prepare(points: &[Point]) -> Result<Vec<Point>> {
    if points.len() < 3 {
        return Err(GrnfError::InvalidArgument(format!(
            "triangulation needs at least 3 points, got {}",
            points.len()
        )));
    }
    if points.iter().flatten().any(|x| !x.is_finite()) {
        return Err(GrnfError::InvalidArgument(
            "non-finite point coordinate".into(),
        ));
    }
    let min = |c: usize| points.iter().map(|p| p[c]).fold(f64::INFINITY, f64::min);
    let max = |c: usize| {
        points
            .iter()
            .map(|p| p[c])
            .fold(f64::NEG_INFINITY, f64::max)
    };
    let (x0, y0) = (min(0), min(1));
    let extent = (max(0) - x0).max(max(1) - y0);
    if extent == 0.0 {
        return Err(GrnfError::InvalidArgument("all points coincide".into()));
    }
    let mut seen = HashSet::new();
    Ok(points
        .iter()
        .map(|p| {
            let mut q = [(p[0] - x0) / extent, (p[1] - y0) / extent];
            while !seen.insert((q[0].to_bits(), q[1].to_bits())) {
                q[0] += DUPLICATE_JITTER;
                q[1] += 0.5 * DUPLICATE_JITTER;
            }
            q
        })
        .collect())
}

/// Counter-clockwise triangles of the Delaunay triangulation, as point
/// indices. Cocircular configurations are resolved by insertion (index)
/// order.
pub fn delaunay_triangles(points: &[Point]) -> Result<Vec<[usize; 3]>> {
    let q = prepare(points)?;
    let c = (2..q.len())
        .find(|&c| orient(q[0], q[1], q[c]) != 0)
        .ok_or_else(|| GrnfError::InvalidArgument("all points are collinear".into()))?;
    let (a, b) = if orient(q[0], q[1], q[c]) > 0 {
        (0, 1)
    } else {
        (1, 0)
    };
    let mut tris: Vec<[usize; 3]> = vec![[a, b, c], [b, a, GHOST], [c, b, GHOST], [a, c, GHOST]];

    for p in (2..q.len()).filter(|&i| i != c) {
        let (cavity, kept): (Vec<[usize; 3]>, Vec<[usize; 3]>) =
            tris.into_iter().partition(|t| conflicts(t, q[p], &q));
        if cavity.is_empty() {
            return Err(GrnfError::InvalidArgument(format!(
                "point {p} could not be inserted"
            )));
        }
        let edges: HashSet<(usize, usize)> = cavity
            .iter()
            .flat_map(|t| [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])])
            .collect();
        tris = kept;
        // Deterministic order of the new triangles.
        let boundary: BTreeSet<(usize, usize)> = edges
            .iter()
            .copied()
            .filter(|&(u, v)| !edges.contains(&(v, u)))
            .collect();
        tris.extend(boundary.into_iter().map(|(u, v)| canonical([u, v, p])));
    }
    Ok(tris.into_iter().filter(|t| t[2] != GHOST).collect())
}

/// Unique undirected edges `(i, j)`, `i < j`, of the Delaunay triangulation,
/// sorted.
pub fn delaunay_triangulation(points: &[Point]) -> Result<Vec<(usize, usize)>> {
    let edges: BTreeSet<(usize, usize)> = delaunay_triangles(points)?
        .iter()
        .flat_map(|t| [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])])
        .map(|(i, j)| (i.min(j), i.max(j)))
        .collect();
    Ok(edges.into_iter().collect())
}

/// Planar point-set graphs of one class.
#[derive(Debug, Clone, PartialEq)]
pub struct DelaunayParams {
    pub points_per_graph: usize,
    /// Class prototype; graph point `i` perturbs seed point `i mod len`.
    pub seed_points: Vec<Point>,
    pub noise_sigma: f64,
    /// Perturbed coordinates are reflected back into `[box_min, box_max]²`.
    pub box_min: f64,
    pub box_max: f64,
}

impl DelaunayParams {
    pub fn new(seed_points: Vec<Point>) -> Self {
        Self {
            points_per_graph: 12,
            seed_points,
            noise_sigma: 1.0,
            box_min: 0.0,
            box_max: 10.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.points_per_graph < 3 {
            return Err(GrnfError::InvalidArgument(
                "Delaunay graphs need at least 3 points".into(),
            ));
        }
        if self.seed_points.is_empty() {
            return Err(GrnfError::InvalidArgument("no seed points".into()));
        }
        if !(self.noise_sigma >= 0.0 && self.noise_sigma.is_finite()) {
            return Err(GrnfError::InvalidArgument(format!(
                "noise sigma {} must be ≥ 0",
                self.noise_sigma
            )));
        }
        if !(self.box_min < self.box_max) || !self.box_min.is_finite() || !self.box_max.is_finite()
        {
            return Err(GrnfError::InvalidArgument("empty coordinate box".into()));
        }
        Ok(())
    }
}

/// Folds `x` into `[lo, hi]` by mirroring at the walls. Unlike clamping this
/// does not pile points onto the boundary, so no duplicates or collinear runs
/// appear.
fn reflect(x: f64, lo: f64, hi: f64) -> f64 {
    let width = hi - lo;
    let t = (x - lo).rem_euclid(2.0 * width);
    let y = if t <= width { lo + t } else { hi - (t - width) };
    y.clamp(lo, hi)
}

/// `count` points uniform in `[box_min, box_max]²`.
pub fn random_seed_points<R: Rng + ?Sized>(
    count: usize,
    box_min: f64,
    box_max: f64,
    rng: &mut R,
) -> Vec<Point> {
    (0..count)
        .map(|_| {
            [
                rng.random_range(box_min..box_max),
                rng.random_range(box_min..box_max),
            ]
        })
        .collect()
}

/// `count` graphs: perturbed seed points (x then y noise per point, reflected
/// into the box),
/// triangulated, with the coordinates as 2-d node attributes.
pub fn delaunay_generate<R: Rng + ?Sized>(
    params: &DelaunayParams,
    count: usize,
    rng: &mut R,
) -> Result<Vec<Graph>> {
    params.validate()?;
    let bound = params.box_min.abs().max(params.box_max.abs());
    (0..count)
        .map(|_| {
            let points: Vec<Point> = (0..params.points_per_graph)
                .map(|i| {
                    let s = params.seed_points[i % params.seed_points.len()];
                    let mut coord = |c: usize| {
                        let noise: f64 = rng.sample(StandardNormal);
                        reflect(
                            s[c] + params.noise_sigma * noise,
                            params.box_min,
                            params.box_max,
                        )
                    };
                    let x = coord(0);
                    [x, coord(1)]
                })
                .collect();
            let edges = delaunay_triangulation(&points)?;
            Graph::with_bound(
                points.len(),
                points.iter().map(|p| p.to_vec()).collect(),
                edges,
                Vec::new(),
                false,
                bound,
            )
        })
        .collect()
}

/// Seed-point collections for a multi-class Delaunay task.
#[derive(Debug, Clone, PartialEq)]
pub struct DelaunayTask {
    pub classes: usize,
    pub seeds_per_class: usize,
    /// Template for every class; its `seed_points` are replaced per class.
    pub params: DelaunayParams,
}

impl DelaunayTask {
    pub fn new(classes: usize, seeds_per_class: usize) -> Self {
        Self {
            classes,
            seeds_per_class,
            params: DelaunayParams::new(Vec::new()),
        }
    }
}

/// `count` graphs per class, labelled `0..classes`. Class `c` first draws its
/// seed points uniformly in the box, then its graphs, all from `rng`.
pub fn delaunay_classification<R: Rng + ?Sized>(
    task: &DelaunayTask,
    count: usize,
    rng: &mut R,
) -> Result<(Vec<Graph>, Vec<i64>)> {
    if task.classes == 0 || task.seeds_per_class == 0 {
        return Err(GrnfError::InvalidArgument(
            "need at least one class and one seed point per class".into(),
        ));
    }
    let mut graphs = Vec::with_capacity(task.classes * count);
    let mut labels = Vec::with_capacity(task.classes * count);
    for c in 0..task.classes {
        let seeds = random_seed_points(
            task.seeds_per_class,
            task.params.box_min,
            task.params.box_max,
            rng,
        );
        let params = DelaunayParams {
            seed_points: seeds,
            ..task.params.clone()
        };
        graphs.extend(delaunay_generate(&params, count, rng)?);
        labels.extend(std::iter::repeat_n(c as i64, count));
    }
    Ok((graphs, labels))
}
