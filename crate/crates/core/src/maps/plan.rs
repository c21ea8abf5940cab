//! Fast evaluation of the partition bases.
//!
//! An equivariant basis element `E_γ` only ever reads `A` through a handful of
//! pooled quantities once the output tuple `j` is fixed: single entries
//! `A[u_s, u_t]` at the distinct values `u` of `j`, row and column sums, the
//! trace and the total. Strictness (free input indices must avoid every value
//! in `j`) is restored by inclusion-exclusion over those same quantities.
//! For a given parameter vector all basis elements that share an output
//! pattern are folded into one set of coefficients, so evaluation costs
//! `O(n^max(2, k))` instead of the `O(n^(k+2))` of direct enumeration.
//!
//! All pooled sums go through [`FixedGrid`] and every per-entry combination is
//! evaluated in an order fixed by the pattern, never by node labels, so the
//! output is exactly (bitwise) equivariant.

use crate::accum::FixedGrid;
use crate::error::{GrnfError, Result};
use crate::partition::{enumerate_partitions, PatternIndex};
use std::sync::OnceLock;

use crate::tensor::DenseTensor;

use super::{falling_factorial, EquivariantLayerParams, Normalization};

/// Largest tensor order the pattern tables are built for (`6^6` entries).
const MAX_ORDER: usize = 6;

/// Node counts below this keep row sums of activated values inside `i64`.
const MAX_POOLED_N: usize = 4096;

/// Block structure of the order-`k` patterns, in enumeration order.
#[derive(Debug)]
pub(crate) struct OrderTable {
    pub(crate) blocks: Vec<usize>,
    /// Block of every position, per pattern.
    pub(crate) block_of: Vec<Vec<usize>>,
}

/// How one `E_γ` reads its input, relative to its output pattern.
#[derive(Debug, Clone, Copy)]
struct GammaShape {
    pattern: usize,
    first: Slot,
    second: Slot,
    joined: bool,
}

fn order_table(k: usize) -> Result<&'static OrderTable> {
    static TABLES: OnceLock<Vec<OrderTable>> = OnceLock::new();
    if k > MAX_ORDER {
        return Err(GrnfError::DimensionLimit {
            what: "tensor order",
            value: k,
            max: MAX_ORDER,
        });
    }
    let tables = TABLES.get_or_init(|| {
        (0..=MAX_ORDER)
            .map(|k| {
                let patterns = enumerate_partitions(k).expect("order within partition limit");
                OrderTable {
                    blocks: patterns.iter().map(|p| p.blocks()).collect(),
                    block_of: patterns
                        .iter()
                        .map(|p| (0..k).map(|t| p.block_of(t)).collect())
                        .collect(),
                }
            })
            .collect()
    });
    Ok(&tables[k])
}

fn gamma_shapes(k: usize) -> Result<&'static [GammaShape]> {
    static SHAPES: OnceLock<Vec<Vec<GammaShape>>> = OnceLock::new();
    if k == 0 || k + 2 > crate::partition::MAX_PARTITION_SIZE || k > MAX_ORDER {
        return Err(GrnfError::DimensionLimit {
            what: "equivariant output order",
            value: k,
            max: crate::partition::MAX_PARTITION_SIZE - 2,
        });
    }
    let shapes = SHAPES.get_or_init(|| {
        (0..=crate::partition::MAX_PARTITION_SIZE - 2)
            .map(|k| if k == 0 { Vec::new() } else { build_shapes(k) })
            .collect()
    });
    Ok(&shapes[k])
}

fn build_shapes(k: usize) -> Vec<GammaShape> {
    let out_index = PatternIndex::new(k).expect("order within limit");
    enumerate_partitions(k + 2)
        .expect("size within limit")
        .iter()
        .map(|gamma| {
            let out_pattern = gamma.restrict_from(2);
            // γ block -> output block, for blocks that touch an output position.
            let slot = |pos: usize| -> Slot {
                let block = gamma.block_of(pos);
                (0..k)
                    .find(|&t| gamma.block_of(t + 2) == block)
                    .map_or(Slot::Free, |t| Slot::Tied(out_pattern.block_of(t)))
            };
            GammaShape {
                pattern: out_index.index_of(&out_pattern),
                first: slot(0),
                second: slot(1),
                joined: gamma.block_of(0) == gamma.block_of(1),
            }
        })
        .collect()
}

impl OrderTable {
    /// Flat-offset weight of each block of pattern `p`: a tuple with block
    /// values `u` sits at `Σ_s u_s weights[s]`.
    fn block_weights(&self, p: usize, n: usize) -> Vec<usize> {
        let k = self.block_of[p].len();
        let mut w = vec![0; self.blocks[p]];
        let mut stride = 1;
        for t in (0..k).rev() {
            w[self.block_of[p][t]] += stride;
            stride *= n;
        }
        w
    }
}

/// Visits every assignment of pairwise distinct values in `0..n` to `b`
/// blocks, in lexicographic order.
fn for_each_distinct(b: usize, n: usize, mut f: impl FnMut(&[usize])) {
    fn rec(depth: usize, u: &mut [usize], used: &mut [bool], f: &mut impl FnMut(&[usize])) {
        if depth == u.len() {
            f(u);
            return;
        }
        for x in 0..used.len() {
            if !used[x] {
                used[x] = true;
                u[depth] = x;
                rec(depth + 1, u, used, f);
                used[x] = false;
            }
        }
    }
    if b > n {
        return;
    }
    match b {
        1 => (0..n).for_each(|i| f(&[i])),
        2 => {
            for i in 0..n {
                for j in (0..n).filter(|&j| j != i) {
                    f(&[i, j]);
                }
            }
        }
        3 => {
            for i in 0..n {
                for j in (0..n).filter(|&j| j != i) {
                    for l in (0..n).filter(|&l| l != i && l != j) {
                        f(&[i, j, l]);
                    }
                }
            }
        }
        _ => {
            let mut u = vec![0; b];
            let mut used = vec![false; n];
            rec(0, &mut u, &mut used, &mut f);
        }
    }
}

/// Per-pattern, per-channel basis sums `I_γ T` (normalized), laid out
/// `pattern_index * channels + c`.
pub(crate) fn invariant_pattern_sums(t: &DenseTensor, norm: Normalization) -> Result<Vec<f64>> {
    let k = t.order();
    let table = order_table(k)?;
    let d = t.channels();
    let grid = FixedGrid::new(t.max_abs());
    let n = t.n();
    let mut acc = vec![0i128; table.blocks.len() * d];
    let data = t.data();
    for (p, &b) in table.blocks.iter().enumerate() {
        let w = table.block_weights(p, n);
        let acc = &mut acc[p * d..(p + 1) * d];
        for_each_distinct(b, n, |u| {
            let off: usize = u.iter().zip(&w).map(|(x, y)| x * y).sum();
            for (a, &x) in acc.iter_mut().zip(&data[off * d..(off + 1) * d]) {
                *a += grid.to_fixed(x);
            }
        });
    }
    let mut out = vec![0.0; acc.len()];
    for (p, &blocks) in table.blocks.iter().enumerate() {
        let scale = match norm {
            Normalization::Sum => 1.0,
            Normalization::Mean => {
                let count = falling_factorial(t.n(), blocks);
                if count == 0.0 {
                    continue;
                }
                1.0 / count
            }
        };
        for c in 0..d {
            out[p * d + c] = grid.to_f64(acc[p * d + c]) * scale;
        }
    }
    Ok(out)
}

/// One input index of an equivariant basis element, relative to the output
/// pattern: either equal to the value of output block `s`, or free (distinct
/// from every output value).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Slot {
    Tied(usize),
    Free,
}

/// Folded coefficients for all basis elements sharing one output pattern.
#[derive(Debug, Clone)]
struct PatternTerms {
    blocks: usize,
    /// `[c][s][t]` coefficient of `A[u_s, u_t, c]`.
    pair: Vec<f64>,
    /// `[c][s]` coefficient of the row sum at `u_s`.
    row: Vec<f64>,
    /// `[c][s]` coefficient of the column sum at `u_s`.
    col: Vec<f64>,
    trace: Vec<f64>,
    total: Vec<f64>,
    bias: f64,
    /// Flat-offset weight of each block at the plan's node count.
    weights: Vec<usize>,
    /// Block pairs `s < q`, in the order of the pairwise tables.
    pairs: Vec<(usize, usize)>,
}

impl PatternTerms {
    fn new(blocks: usize, d: usize) -> Self {
        Self {
            blocks,
            pair: vec![0.0; d * blocks * blocks],
            row: vec![0.0; d * blocks],
            col: vec![0.0; d * blocks],
            trace: vec![0.0; d],
            total: vec![0.0; d],
            bias: 0.0,
            weights: Vec::new(),
            pairs: (0..blocks)
                .flat_map(|s| (s + 1..blocks).map(move |q| (s, q)))
                .collect(),
        }
    }

    fn pair_mut(&mut self, c: usize, s: usize, t: usize) -> &mut f64 {
        let b = self.blocks;
        &mut self.pair[(c * b + s) * b + t]
    }
}

/// An equivariant layer specialised to a node count `n`.
#[derive(Debug, Clone)]
pub(crate) struct EquivariantPlan {
    k: usize,
    n: usize,
    channels: usize,
    terms: Vec<PatternTerms>,
}

impl EquivariantPlan {
    pub(crate) fn new(
        params: &EquivariantLayerParams,
        n: usize,
        norm: Normalization,
    ) -> Result<Self> {
        let k = params.k;
        let shapes = gamma_shapes(k)?;
        let table = order_table(k)?;
        let d = params.channels()?;
        let mut terms: Vec<PatternTerms> = table
            .blocks
            .iter()
            .map(|&b| PatternTerms::new(b, d))
            .collect();
        for (p, &b) in terms.iter_mut().zip(&params.theta_bias) {
            p.bias = b;
        }

        for (g_idx, shape) in shapes.iter().enumerate() {
            let t = &mut terms[shape.pattern];
            let b = t.blocks;
            let (s0, s1, joined) = (shape.first, shape.second, shape.joined);
            let free = n.saturating_sub(b) as f64;
            let count = match (s0, s1) {
                (Slot::Tied(_), Slot::Tied(_)) => 1.0,
                (Slot::Free, Slot::Free) if !joined => free * (free - 1.0).max(0.0),
                _ => free,
            };
            if count <= 0.0 {
                continue;
            }
            let scale = match norm {
                Normalization::Sum => 1.0,
                Normalization::Mean => 1.0 / count,
            };
            for c in 0..d {
                let w = params.theta_lin[g_idx * d + c] * scale;
                if w == 0.0 {
                    continue;
                }
                match (s0, s1) {
                    (Slot::Tied(s), Slot::Tied(q)) => *t.pair_mut(c, s, q) += w,
                    (Slot::Tied(s), Slot::Free) => {
                        // Σ_{v ∉ u} A[u_s, v]
                        t.row[c * b + s] += w;
                        for q in 0..b {
                            *t.pair_mut(c, s, q) -= w;
                        }
                    }
                    (Slot::Free, Slot::Tied(q)) => {
                        t.col[c * b + q] += w;
                        for s in 0..b {
                            *t.pair_mut(c, s, q) -= w;
                        }
                    }
                    (Slot::Free, Slot::Free) if joined => {
                        // Σ_{v ∉ u} A[v, v]
                        t.trace[c] += w;
                        for s in 0..b {
                            *t.pair_mut(c, s, s) -= w;
                        }
                    }
                    (Slot::Free, Slot::Free) => {
                        // Σ_{v ≠ v', both ∉ u} A[v, v']
                        //   = total - Σ_s row(u_s) - Σ_s col(u_s) + Σ_{s,q} A[u_s, u_q]
                        //     - (trace - Σ_s A[u_s, u_s])
                        t.total[c] += w;
                        t.trace[c] -= w;
                        for s in 0..b {
                            t.row[c * b + s] -= w;
                            t.col[c * b + s] -= w;
                            *t.pair_mut(c, s, s) += w;
                            for q in 0..b {
                                *t.pair_mut(c, s, q) += w;
                            }
                        }
                    }
                }
            }
        }

        for (p, t) in terms.iter_mut().enumerate() {
            t.weights = table.block_weights(p, n);
        }
        Ok(Self {
            k,
            n,
            channels: d,
            terms,
        })
    }

    fn check_input(&self, a: &DenseTensor) -> Result<()> {
        if a.order() != 2 || a.n() != self.n || a.channels() != self.channels {
            return Err(GrnfError::Shape(format!(
                "equivariant layer for n = {}, {} channels applied to order-{} tensor with n = {}, {} channels",
                self.n,
                self.channels,
                a.order(),
                a.n(),
                a.channels()
            )));
        }
        Ok(())
    }

    /// Evaluates the layer on `a`, producing a single-channel order-`k` tensor.
    pub(crate) fn apply(&self, a: &DenseTensor) -> Result<DenseTensor> {
        self.check_input(a)?;
        let sums = InputSums::new(a);
        let mut out = DenseTensor::zeros(self.k, self.n, 1)?;
        let out_data = out.data_mut();
        self.visit_rows(
            &sums,
            &mut RowScratch::default(),
            |_, off, stride, vals, skip| {
                for (l, &v) in vals.iter().enumerate() {
                    if !skip.contains(&l) {
                        out_data[off + l * stride] = v;
                    }
                }
            },
        );
        Ok(out)
    }

    /// Per-pattern sums `I_γ act(F(A))` (normalized), without materialising
    /// `F(A)`. `act` is applied to a buffer in place and must map into
    /// `[-1, 1]`.
    ///
    /// Activated values are rounded to multiples of `2^-50` by adding `6.0`
    /// (whose ulp is `2^-50` on `[4, 8)`) and read back as integers, then
    /// summed exactly. A row of at most `n < 2^12` such terms fits an `i64`.
    pub(crate) fn pooled_activation(
        &self,
        sums: &InputSums,
        scratch: &mut RowScratch,
        norm: Normalization,
        act: impl Fn(&mut [f64]),
    ) -> Result<Vec<f64>> {
        if sums.n != self.n || sums.channels != self.channels {
            return Err(GrnfError::Shape(format!(
                "equivariant layer for n = {}, {} channels applied to input with n = {}, {} channels",
                self.n, self.channels, sums.n, sums.channels
            )));
        }
        if !self.supports_pooled() {
            return Err(GrnfError::Shape(format!(
                "pooled evaluation supports n < {MAX_POOLED_N}, got {}",
                self.n
            )));
        }
        const OFFSET: f64 = 6.0;
        let zero = OFFSET.to_bits() as i64;
        let fixed = |v: f64| ((v + OFFSET).to_bits() as i64).wrapping_sub(zero);
        let mut acc = vec![0i128; self.terms.len()];
        self.visit_rows(sums, scratch, |p, _, _, vals, skip| {
            act(vals);
            let mut s = 0i64;
            for &v in vals.iter() {
                s = s.wrapping_add(fixed(v));
            }
            for &l in skip {
                s = s.wrapping_sub(fixed(vals[l]));
            }
            acc[p] += s as i128;
        });
        let unit = 2f64.powi(-50);
        Ok(self
            .terms
            .iter()
            .zip(&acc)
            .map(|(t, &s)| {
                let scale = match norm {
                    Normalization::Sum => 1.0,
                    Normalization::Mean => {
                        let count = falling_factorial(self.n, t.blocks);
                        if count == 0.0 {
                            return 0.0;
                        }
                        1.0 / count
                    }
                };
                s as f64 * unit * scale
            })
            .collect())
    }

    pub(crate) fn supports_pooled(&self) -> bool {
        self.n < MAX_POOLED_N
    }

    /// Calls `f(pattern, offset, stride, values, skip)` for every row of
    /// output entries: `values[l]` belongs at `offset + l * stride`, except
    /// that positions listed in `skip` are not entries of this pattern and
    /// hold arbitrary finite values.
    fn visit_rows(
        &self,
        sums: &InputSums,
        scratch: &mut RowScratch,
        mut f: impl FnMut(usize, usize, usize, &mut [f64], &[usize]),
    ) {
        let (n, d) = (self.n, self.channels);
        let nn = n * n;
        let RowScratch {
            unary,
            binary,
            vals,
        } = scratch;
        vals.resize(n, 0.0);

        // Within one pattern the value at a tuple with block values `u` is
        //   constant + Σ_s unary_s(u_s) + Σ_{s<q} binary_sq(u_s, u_q),
        // evaluated in slot order so the rounding never depends on labels.
        for (p, t) in self.terms.iter().enumerate() {
            let b = t.blocks;
            if b > n {
                continue;
            }
            let base = (0..d).fold(t.bias, |acc, c| {
                acc + t.trace[c] * sums.trace[c] + t.total[c] * sums.total[c]
            });
            unary.clear();
            unary.resize(b * n, 0.0);
            for s in 0..b {
                let dst = &mut unary[s * n..(s + 1) * n];
                for c in 0..d {
                    let (wd, wr, wc) = (
                        t.pair[(c * b + s) * b + s],
                        t.row[c * b + s],
                        t.col[c * b + s],
                    );
                    let (diag, row, col) = (sums.diag(c), sums.row(c), sums.col(c));
                    for (((v, &x), &y), &z) in dst.iter_mut().zip(diag).zip(row).zip(col) {
                        *v += wd * x + wr * y + wc * z;
                    }
                }
            }
            binary.clear();
            binary.resize(t.pairs.len() * nn, 0.0);
            for (e, &(s, q)) in t.pairs.iter().enumerate() {
                let table = &mut binary[e * nn..(e + 1) * nn];
                for c in 0..d {
                    let (wf, wt) = (t.pair[(c * b + s) * b + q], t.pair[(c * b + q) * b + s]);
                    let (plane, plane_t) = (sums.plane(c), sums.plane_t(c));
                    for ((v, &x), &y) in table.iter_mut().zip(plane).zip(plane_t) {
                        *v += wf * x + wt * y;
                    }
                }
            }
            let w = &t.weights;
            match b {
                1 => {
                    for (v, &u) in vals.iter_mut().zip(unary.iter()) {
                        *v = base + u;
                    }
                    f(p, 0, w[0], vals, &[]);
                }
                2 => {
                    let (u0, u1) = unary.split_at(n);
                    for i in 0..n {
                        let row01 = &binary[i * n..(i + 1) * n];
                        let v0 = base + u0[i];
                        for ((v, &x), &y) in vals.iter_mut().zip(u1).zip(row01) {
                            *v = v0 + x + y;
                        }
                        f(p, i * w[0], w[1], vals, &[i]);
                    }
                }
                3 => {
                    let (u0, rest) = unary.split_at(n);
                    let (u1, u2) = rest.split_at(n);
                    let (b01, rest) = binary.split_at(nn);
                    let (b02, b12) = rest.split_at(nn);
                    for i in 0..n {
                        let v0 = base + u0[i];
                        let r02 = &b02[i * n..(i + 1) * n];
                        for j in 0..n {
                            if j == i {
                                continue;
                            }
                            let v1 = v0 + u1[j] + b01[i * n + j];
                            let r12 = &b12[j * n..(j + 1) * n];
                            for (((v, &x), &y), &z) in vals.iter_mut().zip(u2).zip(r02).zip(r12) {
                                *v = v1 + x + y + z;
                            }
                            f(p, i * w[0] + j * w[1], w[2], vals, &[i, j]);
                        }
                    }
                }
                _ => for_each_distinct(b, n, |u| {
                    let mut v = base;
                    let mut off = 0;
                    for s in 0..b {
                        v += unary[s * n + u[s]];
                        off += u[s] * w[s];
                    }
                    for (e, &(s, q)) in t.pairs.iter().enumerate() {
                        v += binary[(e * n + u[s]) * n + u[q]];
                    }
                    let mut one = [v];
                    f(p, off, 1, &mut one, &[]);
                }),
            }
        }
    }
}

/// Reusable buffers for [`EquivariantPlan`] row evaluation.
#[derive(Debug, Default)]
pub(crate) struct RowScratch {
    unary: Vec<f64>,
    binary: Vec<f64>,
    vals: Vec<f64>,
}

/// Channel-major copies of an order-2 input together with its row, column,
/// diagonal and grand sums, shared by every equivariant layer applied to it.
#[derive(Debug, Clone)]
pub(crate) struct InputSums {
    n: usize,
    channels: usize,
    /// `[c][i * n + j] = A[i, j, c]`.
    planes: Vec<f64>,
    /// `[c][i * n + j] = A[j, i, c]`.
    planes_t: Vec<f64>,
    /// `[c][i]`.
    diag: Vec<f64>,
    row: Vec<f64>,
    col: Vec<f64>,
    trace: Vec<f64>,
    total: Vec<f64>,
}

impl InputSums {
    pub(crate) fn new(a: &DenseTensor) -> Self {
        let (n, d) = (a.n(), a.channels());
        let nn = n * n;
        let data = a.data();
        let grid = FixedGrid::new(a.max_abs());
        let mut planes = vec![0.0; d * nn];
        let mut planes_t = vec![0.0; d * nn];
        let mut diag = vec![0.0; d * n];
        let mut row_acc = vec![0i128; d * n];
        let mut col_acc = vec![0i128; d * n];
        let mut tr_acc = vec![0i128; d];
        for i in 0..n {
            for j in 0..n {
                for c in 0..d {
                    let v = data[(i * n + j) * d + c];
                    planes[c * nn + i * n + j] = v;
                    planes_t[c * nn + j * n + i] = v;
                    let x = grid.to_fixed(v);
                    row_acc[c * n + i] += x;
                    col_acc[c * n + j] += x;
                    if i == j {
                        diag[c * n + i] = v;
                        tr_acc[c] += x;
                    }
                }
            }
        }
        let total = (0..d)
            .map(|c| grid.to_f64(row_acc[c * n..(c + 1) * n].iter().sum()))
            .collect();
        Self {
            n,
            channels: d,
            planes,
            planes_t,
            diag,
            row: row_acc.iter().map(|&x| grid.to_f64(x)).collect(),
            col: col_acc.iter().map(|&x| grid.to_f64(x)).collect(),
            trace: tr_acc.iter().map(|&x| grid.to_f64(x)).collect(),
            total,
        }
    }

    fn plane(&self, c: usize) -> &[f64] {
        let nn = self.n * self.n;
        &self.planes[c * nn..(c + 1) * nn]
    }

    fn plane_t(&self, c: usize) -> &[f64] {
        let nn = self.n * self.n;
        &self.planes_t[c * nn..(c + 1) * nn]
    }

    fn diag(&self, c: usize) -> &[f64] {
        &self.diag[c * self.n..(c + 1) * self.n]
    }

    fn row(&self, c: usize) -> &[f64] {
        &self.row[c * self.n..(c + 1) * self.n]
    }

    fn col(&self, c: usize) -> &[f64] {
        &self.col[c * self.n..(c + 1) * self.n]
    }
}
