//! Dense order-`k` tensors with a trailing channel axis, and node permutations.

use crate::error::{GrnfError, Result};

/// Order-`k` real tensor of size `n` on every mode, with `channels` values per
/// entry. Storage is row-major with the channel index fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseTensor {
    order: usize,
    n: usize,
    channels: usize,
    data: Vec<f64>,
}

impl DenseTensor {
    pub fn zeros(order: usize, n: usize, channels: usize) -> Result<Self> {
        if channels == 0 {
            return Err(GrnfError::Shape("channel count must be positive".into()));
        }
        let len = entries(order, n)? * channels;
        Ok(Self {
            order,
            n,
            channels,
            data: vec![0.0; len],
        })
    }

    pub fn from_data(order: usize, n: usize, channels: usize, data: Vec<f64>) -> Result<Self> {
        if channels == 0 {
            return Err(GrnfError::Shape("channel count must be positive".into()));
        }
        let expected = entries(order, n)? * channels;
        if data.len() != expected {
            return Err(GrnfError::Shape(format!(
                "data length {} does not match n^k * d = {expected}",
                data.len()
            )));
        }
        if let Some(bad) = data.iter().find(|x| !x.is_finite()) {
            return Err(GrnfError::Shape(format!("non-finite tensor entry {bad}")));
        }
        Ok(Self {
            order,
            n,
            channels,
            data,
        })
    }

    /// Single-channel order-2 tensor from a square row-major matrix.
    pub fn from_matrix(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(GrnfError::Shape("matrix is not square".into()));
        }
        Self::from_data(2, n, 1, rows.iter().flatten().copied().collect())
    }

    /// The centering reference graph: one node, all-zero attributes.
    pub fn null_graph(channels: usize) -> Self {
        Self::zeros(2, 1, channels.max(1)).expect("1x1 tensor")
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub(crate) fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    /// Number of index tuples, `n^k`.
    pub fn num_entries(&self) -> usize {
        self.data.len() / self.channels
    }

    /// Flat offset of `index` (excluding the channel).
    pub fn offset(&self, index: &[usize]) -> usize {
        debug_assert_eq!(index.len(), self.order);
        index.iter().fold(0, |acc, &i| acc * self.n + i)
    }

    pub fn get(&self, index: &[usize], channel: usize) -> f64 {
        self.data[self.offset(index) * self.channels + channel]
    }

    pub fn set(&mut self, index: &[usize], channel: usize, value: f64) {
        let off = self.offset(index) * self.channels + channel;
        self.data[off] = value;
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |m, x| m.max(x.abs()))
    }

    /// Zero-pads (or keeps) channels up to `channels`.
    pub fn pad_channels(&self, channels: usize) -> Result<Self> {
        if channels < self.channels {
            return Err(GrnfError::Shape(format!(
                "cannot shrink {} channels to {channels}",
                self.channels
            )));
        }
        if channels == self.channels {
            return Ok(self.clone());
        }
        let mut data = vec![0.0; self.num_entries() * channels];
        for (e, chunk) in self.data.chunks(self.channels).enumerate() {
            data[e * channels..e * channels + self.channels].copy_from_slice(chunk);
        }
        Ok(Self {
            order: self.order,
            n: self.n,
            channels,
            data,
        })
    }
}

fn entries(order: usize, n: usize) -> Result<usize> {
    n.checked_pow(order as u32)
        .ok_or_else(|| GrnfError::Shape(format!("n^k overflows for n = {n}, k = {order}")))
}

/// Visits every index tuple of length `order` over `0..n` in row-major order,
/// together with its flat offset.
pub(crate) fn for_each_tuple(order: usize, n: usize, mut f: impl FnMut(usize, &[usize])) {
    if n == 0 && order > 0 {
        return;
    }
    let mut current = vec![0usize; order];
    let mut offset = 0;
    loop {
        f(offset, &current);
        offset += 1;
        let mut i = order;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            current[i] += 1;
            if current[i] < n {
                break;
            }
            current[i] = 0;
        }
    }
}

/// A bijection on `{0, .., n-1}` given by its image array.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    image: Vec<usize>,
}

impl Permutation {
    pub fn new(image: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; image.len()];
        for &i in &image {
            if i >= image.len() || seen[i] {
                return Err(GrnfError::InvalidArgument(format!(
                    "not a permutation: {image:?}"
                )));
            }
            seen[i] = true;
        }
        Ok(Self { image })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            image: (0..n).collect(),
        }
    }

    /// Uniformly random permutation.
    pub fn random<R: rand::Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        use rand::seq::SliceRandom;
        let mut image: Vec<usize> = (0..n).collect();
        image.shuffle(rng);
        Self { image }
    }

    pub fn len(&self) -> usize {
        self.image.len()
    }

    pub fn is_empty(&self) -> bool {
        self.image.is_empty()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.image[i]
    }

    pub fn image(&self) -> &[usize] {
        &self.image
    }

    /// `self ∘ other`: `i ↦ self(other(i))`.
    pub fn compose(&self, other: &Permutation) -> Result<Permutation> {
        if self.len() != other.len() {
            return Err(GrnfError::Shape("permutation sizes differ".into()));
        }
        Ok(Permutation {
            image: other.image.iter().map(|&i| self.image[i]).collect(),
        })
    }

    pub fn inverse(&self) -> Permutation {
        let mut image = vec![0; self.len()];
        for (i, &p) in self.image.iter().enumerate() {
            image[p] = i;
        }
        Permutation { image }
    }
}

/// `(π⋆T)[j_1..j_k, c] = T[π(j_1)..π(j_k), c]`.
pub fn apply_permutation(t: &DenseTensor, pi: &Permutation) -> Result<DenseTensor> {
    if pi.len() != t.n {
        return Err(GrnfError::Shape(format!(
            "permutation of size {} applied to tensor with n = {}",
            pi.len(),
            t.n
        )));
    }
    let d = t.channels;
    let mut out = vec![0.0; t.data.len()];
    let mut src = vec![0usize; t.order];
    for_each_tuple(t.order, t.n, |off, j| {
        for (s, &ji) in src.iter_mut().zip(j) {
            *s = pi.apply(ji);
        }
        let from = t.offset(&src) * d;
        out[off * d..(off + 1) * d].copy_from_slice(&t.data[from..from + d]);
    });
    Ok(DenseTensor {
        order: t.order,
        n: t.n,
        channels: d,
        data: out,
    })
}
