//! Set partitions in restricted-growth-string form.
//!
//! A partition of `{0, .., m-1}` is stored as its canonical RGS: `rgs[0] = 0`
//! and `rgs[i] <= 1 + max(rgs[..i])`. Position `i` belongs to block `rgs[i]`.
//! [`enumerate_partitions`] lists them in lexicographic RGS order, which is the
//! order used everywhere for basis-coefficient indexing.

use std::fmt;

use crate::error::{GrnfError, Result};

/// Largest argument accepted by [`bell`].
pub const MAX_BELL_ARG: usize = 12;
/// Largest ground-set size accepted by [`enumerate_partitions`].
pub const MAX_PARTITION_SIZE: usize = 8;

/// The `m`-th Bell number, via the Bell triangle.
pub fn bell(m: usize) -> Result<u64> {
    if m > MAX_BELL_ARG {
        return Err(GrnfError::DimensionLimit {
            what: "bell argument",
            value: m,
            max: MAX_BELL_ARG,
        });
    }
    let mut row = vec![1u64];
    for _ in 0..m {
        let mut next = Vec::with_capacity(row.len() + 1);
        next.push(*row.last().unwrap());
        for &x in &row {
            let prev = *next.last().unwrap();
            next.push(prev + x);
        }
        row = next;
    }
    Ok(row[0])
}

/// Bell number for arguments already known to be in range.
pub(crate) fn bell_usize(m: usize) -> usize {
    bell(m).expect("bell argument within limit") as usize
}

/// A set partition of `{0, .., m-1}`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    rgs: Vec<u8>,
    blocks: usize,
}

impl Partition {
    /// Builds a partition from a restricted-growth string, checking canonicity.
    pub fn from_rgs(rgs: Vec<u8>) -> Result<Self> {
        let mut blocks = 0usize;
        for (i, &r) in rgs.iter().enumerate() {
            if (r as usize) > blocks || (i == 0 && r != 0) {
                return Err(GrnfError::InvalidArgument(format!(
                    "not a canonical restricted-growth string: {rgs:?}"
                )));
            }
            if r as usize == blocks {
                blocks += 1;
            }
        }
        Ok(Self { rgs, blocks })
    }

    /// The equality pattern of an index tuple: positions are in the same block
    /// iff they carry the same index.
    pub fn pattern_of(tuple: &[usize]) -> Self {
        let mut rgs = Vec::with_capacity(tuple.len());
        let mut firsts: Vec<usize> = Vec::with_capacity(tuple.len());
        for &t in tuple {
            match firsts.iter().position(|&f| f == t) {
                Some(b) => rgs.push(b as u8),
                None => {
                    rgs.push(firsts.len() as u8);
                    firsts.push(t);
                }
            }
        }
        let blocks = firsts.len();
        Self { rgs, blocks }
    }

    /// Ground-set size.
    pub fn len(&self) -> usize {
        self.rgs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rgs.is_empty()
    }

    pub fn blocks(&self) -> usize {
        self.blocks
    }

    pub fn rgs(&self) -> &[u8] {
        &self.rgs
    }

    /// Block index of position `i`.
    pub fn block_of(&self, i: usize) -> usize {
        self.rgs[i] as usize
    }

    /// Restriction to positions `start..`, re-canonicalized.
    pub fn restrict_from(&self, start: usize) -> Partition {
        let tail: Vec<usize> = self.rgs[start..].iter().map(|&r| r as usize).collect();
        Partition::pattern_of(&tail)
    }

    /// Does the tuple's equality pattern equal this partition exactly?
    pub fn matches(&self, tuple: &[usize]) -> bool {
        if tuple.len() != self.rgs.len() {
            return false;
        }
        for i in 0..tuple.len() {
            for j in (i + 1)..tuple.len() {
                if (tuple[i] == tuple[j]) != (self.rgs[i] == self.rgs[j]) {
                    return false;
                }
            }
        }
        true
    }
}

impl fmt::Debug for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Partition(")?;
        for r in &self.rgs {
            write!(f, "{r}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Display for Partition {
    /// Block notation, 1-based: `{1,3|2}`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for b in 0..self.blocks {
            if b > 0 {
                write!(f, "|")?;
            }
            let members: Vec<String> = self
                .rgs
                .iter()
                .enumerate()
                .filter(|(_, &r)| r as usize == b)
                .map(|(i, _)| (i + 1).to_string())
                .collect();
            write!(f, "{}", members.join(","))?;
        }
        write!(f, "}}")
    }
}

/// All partitions of an `m`-element set in lexicographic RGS order.
///
/// `m = 0` yields the single empty partition.
pub fn enumerate_partitions(m: usize) -> Result<Vec<Partition>> {
    if m > MAX_PARTITION_SIZE {
        return Err(GrnfError::DimensionLimit {
            what: "partition ground-set size",
            value: m,
            max: MAX_PARTITION_SIZE,
        });
    }
    if m == 0 {
        return Ok(vec![Partition {
            rgs: Vec::new(),
            blocks: 0,
        }]);
    }
    let mut out = Vec::new();
    let mut rgs = vec![0u8; m];
    // prefix_max[i] = max(rgs[..=i])
    let mut prefix_max = vec![0u8; m];
    loop {
        out.push(Partition::from_rgs(rgs.clone()).expect("enumeration yields canonical strings"));
        // Find the rightmost position that can still grow.
        let mut i = m - 1;
        loop {
            if i == 0 {
                return Ok(out);
            }
            if rgs[i] <= prefix_max[i - 1] {
                break;
            }
            i -= 1;
        }
        rgs[i] += 1;
        prefix_max[i] = prefix_max[i - 1].max(rgs[i]);
        for j in (i + 1)..m {
            rgs[j] = 0;
            prefix_max[j] = prefix_max[j - 1];
        }
    }
}

/// Index lookup from an order-`m` equality pattern to its position in
/// [`enumerate_partitions`] order.
#[derive(Debug, Clone)]
pub(crate) struct PatternIndex {
    order: usize,
    // Dense table keyed by the base-`order` reading of the RGS.
    table: Vec<u16>,
}

impl PatternIndex {
    pub(crate) fn new(order: usize) -> Result<Self> {
        let parts = enumerate_partitions(order)?;
        let size = order.max(1).pow(order as u32);
        let mut table = vec![u16::MAX; size];
        for (idx, p) in parts.iter().enumerate() {
            table[Self::code(order, p.rgs())] = idx as u16;
        }
        Ok(Self { order, table })
    }

    fn code(order: usize, rgs: &[u8]) -> usize {
        rgs.iter()
            .fold(0usize, |acc, &r| acc * order.max(1) + r as usize)
    }

    pub(crate) fn index_of(&self, p: &Partition) -> usize {
        debug_assert_eq!(p.len(), self.order);
        self.index_of_code(Self::code(self.order, p.rgs()))
    }

    /// Lookup by the base-`order` code of an RGS.
    #[inline]
    pub(crate) fn index_of_code(&self, code: usize) -> usize {
        self.table[code] as usize
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bell_values() {
        let expected = [
            1u64, 1, 2, 5, 15, 52, 203, 877, 4140, 21147, 115975, 678570, 4213597,
        ];
        for (m, &b) in expected.iter().enumerate() {
            assert_eq!(bell(m).unwrap(), b, "bell({m})");
        }
        assert!(matches!(bell(13), Err(GrnfError::DimensionLimit { .. })));
    }

    #[test]
    fn partitions_of_two_and_three() {
        let p2 = enumerate_partitions(2).unwrap();
        assert_eq!(p2.len(), 2);
        assert_eq!(p2[0].rgs(), &[0, 0]);
        assert_eq!(p2[1].rgs(), &[0, 1]);
        assert_eq!(p2[0].to_string(), "{1,2}");
        assert_eq!(p2[1].to_string(), "{1|2}");

        let p3 = enumerate_partitions(3).unwrap();
        assert_eq!(p3.len(), 5);
        assert_eq!(p3[0].rgs(), &[0, 0, 0]);
        assert_eq!(p3[4].rgs(), &[0, 1, 2]);
        assert_eq!(enumerate_partitions(4).unwrap().len(), 15);
    }

    #[test]
    fn empty_and_oversized() {
        let p0 = enumerate_partitions(0).unwrap();
        assert_eq!(p0.len(), 1);
        assert!(p0[0].is_empty());
        assert!(enumerate_partitions(9).is_err());
    }

    #[test]
    fn counts_match_bell_and_are_canonical_and_unique() {
        for m in 1..=8 {
            let parts = enumerate_partitions(m).unwrap();
            assert_eq!(parts.len() as u64, bell(m).unwrap());
            let mut sorted = parts.clone();
            sorted.sort();
            assert_eq!(sorted, parts, "lexicographic order for m = {m}");
            sorted.dedup();
            assert_eq!(sorted.len(), parts.len());
            for p in &parts {
                assert!(Partition::from_rgs(p.rgs().to_vec()).is_ok());
            }
        }
    }

    #[test]
    fn non_canonical_rgs_rejected() {
        assert!(Partition::from_rgs(vec![1, 0]).is_err());
        assert!(Partition::from_rgs(vec![0, 2]).is_err());
        assert!(Partition::from_rgs(vec![0, 1, 0, 2]).is_ok());
    }

    #[test]
    fn pattern_of_tuples() {
        assert_eq!(Partition::pattern_of(&[4, 4, 1]).rgs(), &[0, 0, 1]);
        assert_eq!(Partition::pattern_of(&[3, 1, 3]).rgs(), &[0, 1, 0]);
        let p = Partition::from_rgs(vec![0, 1, 0]).unwrap();
        assert!(p.matches(&[7, 2, 7]));
        assert!(!p.matches(&[7, 7, 7]));
        assert_eq!(p.restrict_from(1).rgs(), &[0, 1]);
    }

    #[test]
    fn pattern_index_round_trip() {
        for m in 0..=5 {
            let idx = PatternIndex::new(m).unwrap();
            for (i, p) in enumerate_partitions(m).unwrap().iter().enumerate() {
                assert_eq!(idx.index_of(p), i);
            }
        }
    }
}
