//! Ordered set partitions of `[n]` and compositions.
//!
//! An [`Osp`] is stored canonically: every block is sorted ascending and the
//! blocks keep their given order. The textual form is `13|4|2`; for `n > 9`
//! the elements inside a block are comma separated (`1,10|2`).

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OspError {
    #[error("empty block in ordered set partition")]
    EmptyBlock,
    #[error("element {0} is out of range for n = {1}")]
    OutOfRange(usize, usize),
    #[error("element {0} appears more than once")]
    Duplicate(usize),
    #[error("element {0} is missing")]
    Missing(usize),
    #[error("cannot build an order class from an empty vector")]
    EmptyVector,
    #[error("invalid ordered set partition notation {0:?}")]
    Syntax(String),
}

/// A sequence of disjoint nonempty blocks covering `[n]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Osp {
    n: usize,
    blocks: Vec<Vec<usize>>,
}

impl Osp {
    /// Builds an ordered set partition from blocks of 1-based elements.
    /// The arity is the total number of elements.
    pub fn new(blocks: Vec<Vec<usize>>) -> Result<Self, OspError> {
        let n = blocks.iter().map(Vec::len).sum();
        let mut seen = vec![false; n + 1];
        let mut canonical = Vec::with_capacity(blocks.len());
        for mut block in blocks {
            if block.is_empty() {
                return Err(OspError::EmptyBlock);
            }
            for &e in &block {
                if e == 0 || e > n {
                    return Err(OspError::OutOfRange(e, n));
                }
                if seen[e] {
                    return Err(OspError::Duplicate(e));
                }
                seen[e] = true;
            }
            block.sort_unstable();
            canonical.push(block);
        }
        if let Some(missing) = (1..=n).find(|&e| !seen[e]) {
            return Err(OspError::Missing(missing));
        }
        Ok(Osp { n, blocks: canonical })
    }

    /// Builds from per-element block indices (`labels[i-1]` is the 0-based
    /// block of element `i`). Labels must be a surjection onto `0..len`.
    pub(crate) fn from_labels(labels: &[usize], len: usize) -> Self {
        let mut blocks = vec![Vec::new(); len];
        for (i, &b) in labels.iter().enumerate() {
            blocks[b].push(i + 1);
        }
        Osp { n: labels.len(), blocks }
    }

    fn from_blocks_unchecked(n: usize, blocks: Vec<Vec<usize>>) -> Self {
        Osp { n, blocks }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of blocks, `ℓ(Φ)`.
    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    /// 0-based block index of every element, indexed by `element - 1`.
    pub fn block_indices(&self) -> Vec<usize> {
        let mut idx = vec![0; self.n];
        for (b, block) in self.blocks.iter().enumerate() {
            for &e in block {
                idx[e - 1] = b;
            }
        }
        idx
    }

    /// The point whose order class is this partition: element `i` gets the
    /// 1-based index of its block.
    pub fn representative(&self) -> Vec<u64> {
        self.block_indices().into_iter().map(|b| b as u64 + 1).collect()
    }

    pub fn is_permutation(&self) -> bool {
        self.blocks.len() == self.n
    }

    /// Merges adjacent blocks: `keep[i]` says whether the boundary between
    /// block `i` and block `i + 1` survives.
    fn merge(&self, keep: &[bool]) -> Osp {
        debug_assert_eq!(keep.len() + 1, self.blocks.len());
        let mut out: Vec<Vec<usize>> = Vec::new();
        let mut cur = self.blocks[0].clone();
        for (i, block) in self.blocks.iter().enumerate().skip(1) {
            if keep[i - 1] {
                out.push(std::mem::take(&mut cur));
                cur = block.clone();
            } else {
                cur.extend_from_slice(block);
            }
        }
        out.push(cur);
        for block in &mut out {
            block.sort_unstable();
        }
        Osp::from_blocks_unchecked(self.n, out)
    }

    /// All merges of adjacent blocks whose boundary is in `mergeable`,
    /// including `self`.
    fn merges_over(&self, mergeable: &[bool]) -> Vec<Osp> {
        if self.blocks.len() <= 1 {
            return vec![self.clone()];
        }
        let free: Vec<usize> = (0..mergeable.len()).filter(|&i| mergeable[i]).collect();
        let mut out = Vec::with_capacity(1 << free.len());
        for mask in 0u64..(1u64 << free.len()) {
            let mut keep = vec![true; mergeable.len()];
            for (bit, &pos) in free.iter().enumerate() {
                if mask >> bit & 1 == 1 {
                    keep[pos] = false;
                }
            }
            out.push(self.merge(&keep));
        }
        out.sort();
        out
    }

    fn boundaries(&self, pred: impl Fn(&[usize], &[usize]) -> bool) -> Vec<bool> {
        self.blocks.windows(2).map(|w| pred(&w[0], &w[1])).collect()
    }

    /// Every coarsening obtained by merging adjacent blocks, including `self`.
    pub fn coarsenings(&self) -> Vec<Osp> {
        self.merges_over(&vec![true; self.blocks.len().saturating_sub(1)])
    }

    /// All `Ψ ⪯ Φ` under directed refinement: merges of adjacent blocks where
    /// `max(left) < min(right)`.
    pub fn directed_coarsenings(&self) -> Vec<Osp> {
        let ascents = self.boundaries(|l, r| l[l.len() - 1] < r[0]);
        self.merges_over(&ascents)
    }

    /// Merges of adjacent blocks where `min(left) > max(right)`.
    pub fn reversed_directed_coarsenings(&self) -> Vec<Osp> {
        let descents = self.boundaries(|l, r| l[0] > r[r.len() - 1]);
        self.merges_over(&descents)
    }

    /// All `Ψ` with `Φ ⪯ Ψ`, i.e. the refinement interval `[Φ, Φ̂]`.
    pub fn directed_refinements(&self) -> Vec<Osp> {
        interval(self, &self.hat()).expect("hat refines its source")
    }

    /// All `Ψ` having `Φ` among their reversed directed coarsenings: every
    /// block is cut into consecutive runs of its descending order.
    pub fn reversed_directed_refinements(&self) -> Vec<Osp> {
        let check = Osp::from_blocks_unchecked(
            self.n,
            self.blocks
                .iter()
                .flat_map(|b| b.iter().rev().map(|&e| vec![e]))
                .collect(),
        );
        interval(self, &check).expect("descending split refines its source")
    }

    /// The permutation refining `Φ` with each block listed in increasing order.
    pub fn hat(&self) -> Osp {
        let blocks = self
            .blocks
            .iter()
            .flat_map(|b| b.iter().map(|&e| vec![e]))
            .collect();
        Osp::from_blocks_unchecked(self.n, blocks)
    }

    /// Block sizes.
    pub fn type_of(&self) -> Composition {
        Composition(self.blocks.iter().map(Vec::len).collect())
    }
}

impl Ord for Osp {
    fn cmp(&self, other: &Self) -> Ordering {
        self.n
            .cmp(&other.n)
            .then(self.blocks.len().cmp(&other.blocks.len()))
            .then_with(|| self.blocks.cmp(&other.blocks))
    }
}

impl PartialOrd for Osp {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Osp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sep = if self.n > 9 { "," } else { "" };
        for (i, block) in self.blocks.iter().enumerate() {
            if i > 0 {
                f.write_str("|")?;
            }
            let parts: Vec<String> = block.iter().map(usize::to_string).collect();
            f.write_str(&parts.join(sep))?;
        }
        Ok(())
    }
}

impl FromStr for Osp {
    type Err = OspError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let syntax = || OspError::Syntax(s.to_string());
        let mut blocks = Vec::new();
        for part in s.split('|') {
            let part = part.trim();
            let block: Vec<usize> = if s.contains(',') {
                part.split(',')
                    .map(|t| t.trim().parse::<usize>().map_err(|_| syntax()))
                    .collect::<Result<_, _>>()?
            } else {
                part.chars()
                    .map(|c| c.to_digit(10).map(|d| d as usize).ok_or_else(syntax))
                    .collect::<Result<_, _>>()?
            };
            blocks.push(block);
        }
        match Osp::new(blocks) {
            // "10|2|...|1": all singletons on more than nine items
            Err(e) if !s.contains(',') => {
                let singles: Result<Vec<Vec<usize>>, _> =
                    s.split('|').map(|p| p.trim().parse::<usize>().map(|v| vec![v])).collect();
                match singles.ok().map(Osp::new) {
                    Some(Ok(phi)) if phi.n() > 9 => Ok(phi),
                    _ => Err(e),
                }
            }
            r => r,
        }
    }
}

impl serde::Serialize for Osp {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> serde::Deserialize<'de> for Osp {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A sequence of positive parts.
#[derive(Debug, Clone, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(transparent)]
pub struct Composition(pub Vec<usize>);

impl Composition {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn size(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn parts(&self) -> &[usize] {
        &self.0
    }

    /// All compositions obtained by adding adjacent parts, including `self`.
    pub fn coarsenings(&self) -> Vec<Composition> {
        let cuts = self.0.len().saturating_sub(1);
        let mut out = Vec::with_capacity(1 << cuts);
        for mask in 0u64..(1u64 << cuts) {
            let mut parts = vec![self.0[0]];
            for i in 0..cuts {
                if mask >> i & 1 == 1 {
                    *parts.last_mut().unwrap() += self.0[i + 1];
                } else {
                    parts.push(self.0[i + 1]);
                }
            }
            out.push(Composition(parts));
        }
        out.sort();
        out
    }

    /// All compositions that refine `self` (split parts), including `self`.
    pub fn refinements(&self) -> Vec<Composition> {
        let mut acc = vec![Vec::new()];
        for &p in &self.0 {
            let pieces = Composition(vec![1; p]).coarsenings();
            acc = acc
                .into_iter()
                .flat_map(|prefix: Vec<usize>| {
                    pieces.iter().map(move |c| {
                        let mut v = prefix.clone();
                        v.extend_from_slice(&c.0);
                        v
                    })
                })
                .collect();
        }
        let mut out: Vec<Composition> = acc.into_iter().map(Composition).collect();
        out.sort();
        out
    }
}

impl Ord for Composition {
    fn cmp(&self, other: &Self) -> Ordering {
        self.size()
            .cmp(&other.size())
            .then(self.0.len().cmp(&other.0.len()))
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Composition {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Composition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(usize::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Every ordered set partition of `[n]`, by length and then
/// lexicographically on the canonical block lists.
pub fn all_osps(n: usize) -> Vec<Osp> {
    let mut out = Vec::new();
    if n == 0 {
        return out;
    }
    // Restricted growth is not enough here: block order matters, so walk all
    // surjections [n] -> [len] for each length.
    let mut labels = vec![0usize; n];
    for len in 1..=n {
        labels.iter_mut().for_each(|l| *l = 0);
        loop {
            let mut hit = vec![false; len];
            labels.iter().for_each(|&l| hit[l] = true);
            if hit.iter().all(|&h| h) {
                out.push(Osp::from_labels(&labels, len));
            }
            let mut wrapped = true;
            for l in labels.iter_mut().rev() {
                *l += 1;
                if *l < len {
                    wrapped = false;
                    break;
                }
                *l = 0;
            }
            if wrapped {
                break;
            }
        }
    }
    out.sort();
    out
}

/// The order class of `a`: its level sets ordered by increasing value.
pub fn delta(a: &[u64]) -> Result<Osp, OspError> {
    if a.is_empty() {
        return Err(OspError::EmptyVector);
    }
    let mut values: Vec<u64> = a.to_vec();
    values.sort_unstable();
    values.dedup();
    let labels: Vec<usize> = a
        .iter()
        .map(|v| values.binary_search(v).expect("value present"))
        .collect();
    Ok(Osp::from_labels(&labels, values.len()))
}

/// True iff every block of `coarse` is a union of consecutive blocks of
/// `fine`.
pub fn refines(fine: &Osp, coarse: &Osp) -> bool {
    if fine.n != coarse.n || fine.len() < coarse.len() {
        return false;
    }
    let mut fine_blocks = fine.blocks.iter();
    for block in &coarse.blocks {
        let mut taken = 0;
        while taken < block.len() {
            let Some(piece) = fine_blocks.next() else {
                return false;
            };
            if !piece.iter().all(|e| block.binary_search(e).is_ok()) {
                return false;
            }
            taken += piece.len();
        }
        if taken != block.len() {
            return false;
        }
    }
    fine_blocks.next().is_none()
}

/// The refinement interval `[lower, upper]`: every `Ψ` with `upper`
/// refining `Ψ` and `Ψ` refining `lower`. `None` if `upper` does not refine
/// `lower`.
pub fn interval(lower: &Osp, upper: &Osp) -> Option<Vec<Osp>> {
    if !refines(upper, lower) {
        return None;
    }
    // boundaries of `upper` that are also boundaries of `lower` are fixed
    let mut fixed = Vec::with_capacity(upper.len().saturating_sub(1));
    let mut seen = 0;
    let mut lower_ends = Vec::new();
    let mut acc = 0;
    for block in &lower.blocks {
        acc += block.len();
        lower_ends.push(acc);
    }
    for block in upper.blocks.iter().take(upper.len().saturating_sub(1)) {
        seen += block.len();
        fixed.push(lower_ends.binary_search(&seen).is_ok());
    }
    let free: Vec<bool> = fixed.iter().map(|f| !f).collect();
    Some(upper.merges_over(&free))
}
