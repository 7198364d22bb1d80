//! Multisets, multiset partitions, and a signature-keyed partition cache.
//!
//! Partition lists depend only on a multiset's multiplicity signature, so the
//! cache enumerates one canonical representative per signature and relabels on
//! demand. Enumeration emits blocks in non-increasing multiplicity-vector
//! (lexicographic) order, so the partition list for a given multiset is
//! deterministic and duplicate-free by construction.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::poly::Monomial;

/// Default cap on the total number of cached partitions. Partition counts grow
/// super-exponentially in the multiset size, so cache builds abort with an
/// error instead of exhausting memory.
pub const DEFAULT_PARTITION_CEILING: usize = 10_000_000;

/// A multiset of variable indices, stored as (element, multiplicity) pairs
/// with strictly increasing elements.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Multiset {
    entries: Vec<(u32, u32)>,
}

impl Multiset {
    /// Count occurrences in an unordered element list.
    pub fn from_elements(elements: &[u32]) -> Self {
        let mut sorted = elements.to_vec();
        sorted.sort_unstable();
        let mut entries: Vec<(u32, u32)> = Vec::new();
        for &e in &sorted {
            match entries.last_mut() {
                Some((last, mult)) if *last == e => *mult += 1,
                _ => entries.push((e, 1)),
            }
        }
        Multiset { entries }
    }

    /// The multiset housing a monomial's variable occurrences. The intercept
    /// has no multiset.
    pub fn from_label(label: &Monomial) -> Result<Self> {
        if label.is_intercept() {
            return Err(Error::InterceptHasNoMultiset);
        }
        Ok(Multiset::from_elements(label.indices()))
    }

    pub fn entries(&self) -> &[(u32, u32)] {
        &self.entries
    }

    /// Total size T (sum of multiplicities).
    pub fn size(&self) -> usize {
        self.entries.iter().map(|&(_, m)| m as usize).sum()
    }

    /// Elements expanded with repetition, sorted.
    pub fn expanded(&self) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.size());
        for &(e, m) in &self.entries {
            out.extend(std::iter::repeat_n(e, m as usize));
        }
        out
    }

    pub fn signature(&self) -> Signature {
        Signature::new(self.entries.iter().map(|&(_, m)| m).collect())
    }
}

/// Multiplicity profile of a multiset, sorted non-increasing. Two multisets
/// with equal signatures have structurally identical partition lists.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Signature(Vec<u32>);

impl Signature {
    pub fn new(mut multiplicities: Vec<u32>) -> Self {
        debug_assert!(multiplicities.iter().all(|&m| m >= 1));
        multiplicities.sort_unstable_by(|a, b| b.cmp(a));
        Signature(multiplicities)
    }

    pub fn parts(&self) -> &[u32] {
        &self.0
    }

    /// Size of any multiset with this signature.
    pub fn size(&self) -> usize {
        self.0.iter().map(|&m| m as usize).sum()
    }

    /// The representative multiset: elements 1..=d carrying the parts in
    /// descending order.
    pub fn canonical_multiset(&self) -> Multiset {
        Multiset {
            entries: self
                .0
                .iter()
                .enumerate()
                .map(|(i, &m)| (i as u32 + 1, m))
                .collect(),
        }
    }
}

/// A partition of a multiset into non-empty blocks. Blocks are kept in
/// non-increasing multiplicity-vector order over the partitioned multiset's
/// distinct elements.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct MultisetPartition {
    blocks: Vec<Multiset>,
}

impl MultisetPartition {
    pub fn blocks(&self) -> &[Multiset] {
        &self.blocks
    }

    /// Number of blocks.
    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Block sizes sorted descending; equal-signature multisets produce
    /// identical profiles partition by partition.
    pub fn block_size_profile(&self) -> Vec<usize> {
        let mut sizes: Vec<usize> = self.blocks.iter().map(Multiset::size).collect();
        sizes.sort_unstable_by(|a, b| b.cmp(a));
        sizes
    }

    /// Multiset union of all blocks.
    pub fn union(&self) -> Multiset {
        let mut all = Vec::new();
        for block in &self.blocks {
            all.extend(block.expanded());
        }
        Multiset::from_elements(&all)
    }

    fn canonical_sort(&mut self) {
        let universe: Vec<u32> = self.union().entries.iter().map(|&(e, _)| e).collect();
        let key = |block: &Multiset| -> Vec<u32> {
            universe
                .iter()
                .map(|&e| {
                    block
                        .entries
                        .iter()
                        .find(|&&(be, _)| be == e)
                        .map_or(0, |&(_, m)| m)
                })
                .collect()
        };
        self.blocks.sort_by_cached_key(|b| std::cmp::Reverse(key(b)));
    }
}

/// All partitions of `ms`, each exactly once, in the deterministic order
/// described at module level.
pub fn enumerate_partitions(ms: &Multiset) -> Vec<MultisetPartition> {
    let mut out = Vec::new();
    enumerate_into(ms, usize::MAX, &mut out).expect("no ceiling");
    out
}

fn enumerate_into(
    ms: &Multiset,
    ceiling: usize,
    out: &mut Vec<MultisetPartition>,
) -> Result<()> {
    let elements: Vec<u32> = ms.entries.iter().map(|&(e, _)| e).collect();
    let mut remaining: Vec<u32> = ms.entries.iter().map(|&(_, m)| m).collect();
    if remaining.is_empty() {
        return Ok(());
    }
    let bound = remaining.clone();
    let mut blocks: Vec<Vec<u32>> = Vec::new();
    descend(&elements, &mut remaining, &bound, &mut blocks, ceiling, out)
}

fn descend(
    elements: &[u32],
    remaining: &mut Vec<u32>,
    bound: &[u32],
    blocks: &mut Vec<Vec<u32>>,
    ceiling: usize,
    out: &mut Vec<MultisetPartition>,
) -> Result<()> {
    if remaining.iter().all(|&r| r == 0) {
        if out.len() >= ceiling {
            return Err(Error::PartitionCeilingExceeded { ceiling });
        }
        let partition = MultisetPartition {
            blocks: blocks
                .iter()
                .map(|vector| Multiset {
                    entries: elements
                        .iter()
                        .zip(vector)
                        .filter(|&(_, &m)| m > 0)
                        .map(|(&e, &m)| (e, m))
                        .collect(),
                })
                .collect(),
        };
        out.push(partition);
        return Ok(());
    }
    for vector in sub_vectors_desc(remaining, bound) {
        for (r, &v) in remaining.iter_mut().zip(&vector) {
            *r -= v;
        }
        blocks.push(vector.clone());
        let result = descend(elements, remaining, &vector, blocks, ceiling, out);
        blocks.pop();
        for (r, &v) in remaining.iter_mut().zip(&vector) {
            *r += v;
        }
        result?;
    }
    Ok(())
}

/// Non-zero vectors v with v ≤ `remaining` componentwise and v ≤ `bound`
/// lexicographically, in decreasing lexicographic order.
fn sub_vectors_desc(remaining: &[u32], bound: &[u32]) -> Vec<Vec<u32>> {
    fn rec(
        j: usize,
        tight: bool,
        remaining: &[u32],
        bound: &[u32],
        current: &mut Vec<u32>,
        out: &mut Vec<Vec<u32>>,
    ) {
        if j == remaining.len() {
            if current.iter().any(|&v| v > 0) {
                out.push(current.clone());
            }
            return;
        }
        let cap = if tight {
            bound[j].min(remaining[j])
        } else {
            remaining[j]
        };
        for v in (0..=cap).rev() {
            current.push(v);
            rec(j + 1, tight && v == bound[j], remaining, bound, current, out);
            current.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, true, remaining, bound, &mut Vec::new(), &mut out);
    out
}

/// Partition lists for every signature reachable from monomials of order up
/// to `max_order`, built eagerly and immutable afterwards.
#[derive(Debug)]
pub struct PartitionCache {
    map: HashMap<Signature, Vec<MultisetPartition>>,
    max_order: usize,
}

impl PartitionCache {
    /// Build with the default partition ceiling.
    pub fn build(p: usize, max_order: usize) -> Result<Self> {
        Self::build_with_ceiling(p, max_order, DEFAULT_PARTITION_CEILING)
    }

    /// Build covering every signature that can arise from a label of order 1
    /// to `max_order` over `p` variables: the integer partitions of each
    /// total, with at most `p` distinct elements.
    pub fn build_with_ceiling(p: usize, max_order: usize, ceiling: usize) -> Result<Self> {
        let mut map = HashMap::new();
        let mut total = 0usize;
        for size in 1..=max_order {
            for parts in integer_partitions(size, p) {
                let signature = Signature::new(parts);
                let representative = signature.canonical_multiset();
                let mut partitions = Vec::new();
                let budget = ceiling.saturating_sub(total);
                enumerate_into(&representative, budget, &mut partitions)
                    .map_err(|_| Error::PartitionCeilingExceeded { ceiling })?;
                total += partitions.len();
                map.insert(signature, partitions);
            }
        }
        Ok(PartitionCache { map, max_order })
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    pub fn signatures(&self) -> impl Iterator<Item = &Signature> {
        self.map.keys()
    }

    pub fn contains(&self, signature: &Signature) -> bool {
        self.map.contains_key(signature)
    }

    /// Partitions of a label's multiset, relabeled from the cached canonical
    /// representative. Canonical elements are paired to actual elements by
    /// descending multiplicity, ties by ascending variable index.
    pub fn partitions_for_label(&self, label: &Monomial) -> Result<Vec<MultisetPartition>> {
        let ms = Multiset::from_label(label)?;
        let signature = ms.signature();
        let cached = self.map.get(&signature).ok_or_else(|| Error::SignatureMissing {
            signature: signature.parts().to_vec(),
            max_order: self.max_order,
        })?;

        let mut actual: Vec<(u32, u32)> = ms.entries.clone();
        actual.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
        // canonical element k (1-based) maps to actual[k - 1]
        let relabel = |e: u32| actual[e as usize - 1].0;

        Ok(cached
            .iter()
            .map(|partition| {
                let blocks = partition
                    .blocks
                    .iter()
                    .map(|block| {
                        let mut entries: Vec<(u32, u32)> = block
                            .entries
                            .iter()
                            .map(|&(e, m)| (relabel(e), m))
                            .collect();
                        entries.sort_unstable();
                        Multiset { entries }
                    })
                    .collect();
                let mut relabeled = MultisetPartition { blocks };
                relabeled.canonical_sort();
                relabeled
            })
            .collect())
    }
}

/// Integer partitions of `total` into at most `max_parts` parts, each
/// partition as a non-increasing list.
fn integer_partitions(total: usize, max_parts: usize) -> Vec<Vec<u32>> {
    fn rec(
        left: usize,
        largest: usize,
        parts_left: usize,
        current: &mut Vec<u32>,
        out: &mut Vec<Vec<u32>>,
    ) {
        if left == 0 {
            out.push(current.clone());
            return;
        }
        if parts_left == 0 {
            return;
        }
        for part in (1..=left.min(largest)).rev() {
            current.push(part as u32);
            rec(left - part, part, parts_left - 1, current, out);
            current.pop();
        }
    }
    let mut out = Vec::new();
    rec(total, total, max_parts, &mut Vec::new(), &mut out);
    out
}

/// Debug text dump: one partition per line, blocks separated by `|`,
/// elements by `,`.
pub fn dump_partitions(partitions: &[MultisetPartition]) -> String {
    let mut out = String::new();
    for partition in partitions {
        let mut first = true;
        for block in partition.blocks() {
            if !first {
                out.push('|');
            }
            first = false;
            let expanded = block.expanded();
            for (i, e) in expanded.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                let _ = write!(out, "{e}");
            }
        }
        out.push('\n');
    }
    out
}
