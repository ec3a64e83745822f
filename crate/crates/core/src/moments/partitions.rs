//! Set partitions of `{1..k}` and the non-crossing ones.

use std::fmt;

use crate::error::{Error, Result};

/// Largest `k` accepted by [`enumerate_nc`]; `C_14 = 2_674_440`.
pub const NC_GUARD: usize = 14;

/// A set partition stored as its restricted growth string: `labels[x]` is the
/// index of the block of element `x + 1`, blocks numbered by first appearance.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SetPartition {
    labels: Vec<u8>,
}

impl SetPartition {
    /// From blocks of 1-based elements covering `{1..k}` exactly once.
    pub fn from_blocks(k: usize, blocks: &[Vec<usize>]) -> Result<Self> {
        let mut raw = vec![usize::MAX; k];
        for (b, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                return Err(Error::InvalidInput("empty block".into()));
            }
            for &x in block {
                if x == 0 || x > k || raw[x - 1] != usize::MAX {
                    return Err(Error::InvalidInput(format!("element {x} is out of range or repeated")));
                }
                raw[x - 1] = b;
            }
        }
        if raw.contains(&usize::MAX) {
            return Err(Error::InvalidInput(format!("blocks do not cover 1..{k}")));
        }
        Ok(Self::from_raw_labels(&raw))
    }

    /// Canonicalizes arbitrary block labels.
    pub fn from_raw_labels(raw: &[usize]) -> Self {
        let mut map: Vec<(usize, u8)> = Vec::new();
        let labels = raw
            .iter()
            .map(|&r| match map.iter().find(|(from, _)| *from == r) {
                Some(&(_, to)) => to,
                None => {
                    let to = map.len() as u8;
                    map.push((r, to));
                    to
                }
            })
            .collect();
        SetPartition { labels }
    }

    pub fn size(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn num_blocks(&self) -> usize {
        self.labels.iter().map(|&l| l as usize + 1).max().unwrap_or(0)
    }

    /// Blocks of 1-based elements, ordered by smallest element.
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut blocks = vec![Vec::new(); self.num_blocks()];
        for (x, &l) in self.labels.iter().enumerate() {
            blocks[l as usize].push(x + 1);
        }
        blocks
    }

    /// No `a < b < c < d` with `a, c` in one block and `b, d` in another.
    pub fn is_noncrossing(&self) -> bool {
        let k = self.labels.len();
        let l = &self.labels;
        for a in 0..k {
            for b in a + 1..k {
                if l[b] == l[a] {
                    continue;
                }
                for c in b + 1..k {
                    if l[c] != l[a] {
                        continue;
                    }
                    if (c + 1..k).any(|d| l[d] == l[b]) {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Number of blocks of the join `self ∨ other` in the partition lattice.
    pub fn join_blocks(&self, other: &Self) -> usize {
        assert_eq!(self.size(), other.size(), "partitions of different sets");
        let k = self.size();
        let mut parent: Vec<usize> = (0..k).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for labels in [&self.labels, &other.labels] {
            let mut first: Vec<Option<usize>> = vec![None; k];
            for (x, &l) in labels.iter().enumerate() {
                match first[l as usize] {
                    None => first[l as usize] = Some(x),
                    Some(root) => {
                        let (a, b) = (find(&mut parent, root), find(&mut parent, x));
                        if a != b {
                            parent[a.max(b)] = a.min(b);
                        }
                    }
                }
            }
        }
        (0..k).filter(|&x| find(&mut parent, x) == x).count()
    }

    /// Whether the 1-based `tuple` is constant on every block.
    pub fn is_constant_on_blocks(&self, tuple: &[usize]) -> bool {
        debug_assert_eq!(tuple.len(), self.size());
        let mut seen: Vec<Option<usize>> = vec![None; self.num_blocks()];
        for (&l, &v) in self.labels.iter().zip(tuple) {
            match seen[l as usize] {
                None => seen[l as usize] = Some(v),
                Some(w) if w != v => return false,
                _ => {}
            }
        }
        true
    }
}

impl fmt::Display for SetPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for block in self.blocks() {
            write!(f, "{{")?;
            for (t, x) in block.iter().enumerate() {
                if t > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{x}")?;
            }
            write!(f, "}}")?;
        }
        Ok(())
    }
}

/// All non-crossing partitions of `{1..k}` in lexicographic order of their
/// restricted growth strings.
///
/// Elements are placed left to right while a stack holds the blocks that can
/// still grow. Joining a block closes every block opened after it, which is
/// exactly the non-crossing condition, so each partition is produced once.
pub fn enumerate_nc(k: usize) -> Result<Vec<SetPartition>> {
    if k == 0 || k > NC_GUARD {
        return Err(Error::SizeGuard { what: "non-crossing partition size k (1..=14)", limit: NC_GUARD });
    }
    let mut out = Vec::new();
    let mut labels = Vec::with_capacity(k);
    let mut open: Vec<u8> = Vec::with_capacity(k);
    place(k, 0, &mut labels, &mut open, &mut out);
    Ok(out)
}

fn place(k: usize, blocks: u8, labels: &mut Vec<u8>, open: &mut Vec<u8>, out: &mut Vec<SetPartition>) {
    if labels.len() == k {
        out.push(SetPartition { labels: labels.clone() });
        return;
    }
    // stack labels increase from bottom to top, so this visits labels in ascending order
    for depth in 0..open.len() {
        let label = open[depth];
        let closed: Vec<u8> = open.drain(depth + 1..).collect();
        labels.push(label);
        place(k, blocks, labels, open, out);
        labels.pop();
        open.extend(closed);
    }
    open.push(blocks);
    labels.push(blocks);
    place(k, blocks + 1, labels, open, out);
    labels.pop();
    open.pop();
}

/// Catalan numbers by `C_{m+1} = Σ_{i=0..m} C_i C_{m−i}`.
pub fn catalan(k: usize) -> num_bigint::BigUint {
    let mut c: Vec<num_bigint::BigUint> = vec![1u32.into()];
    for m in 0..k {
        let next = (0..=m).map(|i| &c[i] * &c[m - i]).sum();
        c.push(next);
    }
    c.swap_remove(k)
}
