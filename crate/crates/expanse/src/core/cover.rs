//! Partitions of a vertex, their meets, and the standard covers used to
//! decompose descending links.

use serde::{Deserialize, Serialize};

use super::{CoreError, Kind};

/// A partition of the element indices {0, …, k−1} of a ground vertex.
/// Blocks are kept sorted internally and ordered by first element, so equal
/// partitions compare equal structurally.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug, Serialize, Deserialize)]
#[serde(try_from = "PartitionRepr", into = "PartitionRepr")]
pub struct Partition {
    blocks: Vec<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
struct PartitionRepr {
    blocks: Vec<Vec<usize>>,
}

impl TryFrom<PartitionRepr> for Partition {
    type Error = String;

    fn try_from(r: PartitionRepr) -> Result<Self, String> {
        Partition::new(r.blocks).map_err(|e| e.to_string())
    }
}

impl From<Partition> for PartitionRepr {
    fn from(p: Partition) -> Self {
        PartitionRepr { blocks: p.blocks }
    }
}

impl Partition {
    /// Builds a partition from blocks; they must be disjoint and nonempty.
    /// Whether they cover a particular ground vertex is checked separately
    /// by [`Partition::validate`].
    pub fn new(mut blocks: Vec<Vec<usize>>) -> Result<Self, CoreError> {
        let mut seen = std::collections::BTreeSet::new();
        for b in &mut blocks {
            if b.is_empty() {
                return Err(CoreError::NotAPartition("empty block".into()));
            }
            b.sort_unstable();
            b.dedup();
            for &i in b.iter() {
                if !seen.insert(i) {
                    return Err(CoreError::NotAPartition(format!(
                        "index {i} occurs in two blocks"
                    )));
                }
            }
        }
        blocks.sort();
        Ok(Partition { blocks })
    }

    /// The two-block partition {T, complement} of {0..k}; `t` must be a
    /// proper nonempty subset.
    pub fn two_block(t: &[usize], k: usize) -> Result<Self, CoreError> {
        let t: std::collections::BTreeSet<usize> = t.iter().copied().collect();
        let rest: Vec<usize> = (0..k).filter(|i| !t.contains(i)).collect();
        if t.is_empty() || rest.is_empty() {
            return Err(CoreError::NotAPartition(
                "two-block partitions need a proper nonempty subset".into(),
            ));
        }
        Partition::new(vec![t.into_iter().collect(), rest])
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    /// Total number of indices covered.
    pub fn ground_size(&self) -> usize {
        self.blocks.iter().map(|b| b.len()).sum()
    }

    /// Checks the blocks exactly cover {0..k}.
    pub fn validate(&self, k: usize) -> Result<(), CoreError> {
        let mut all: Vec<usize> = self.blocks.iter().flatten().copied().collect();
        all.sort_unstable();
        if all != (0..k).collect::<Vec<_>>() {
            return Err(CoreError::NotAPartition(format!(
                "blocks cover {:?}, expected 0..{}",
                all, k
            )));
        }
        Ok(())
    }

    /// The block containing index `i`, if any.
    pub fn block_of(&self, i: usize) -> Option<usize> {
        self.blocks.iter().position(|b| b.contains(&i))
    }
}

/// The common refinement of two partitions of the same ground vertex:
/// blocks are all nonempty pairwise intersections.
pub fn partition_meet(p1: &Partition, p2: &Partition) -> Result<Partition, CoreError> {
    let mut g1: Vec<usize> = p1.blocks.iter().flatten().copied().collect();
    let mut g2: Vec<usize> = p2.blocks.iter().flatten().copied().collect();
    g1.sort_unstable();
    g2.sort_unstable();
    if g1 != g2 {
        return Err(CoreError::DifferentGround);
    }
    let mut blocks = Vec::new();
    for a in &p1.blocks {
        for b in &p2.blocks {
            let cut: Vec<usize> = a.iter().filter(|i| b.contains(i)).copied().collect();
            if !cut.is_empty() {
                blocks.push(cut);
            }
        }
    }
    Partition::new(blocks)
}

/// The standard cover of two-block partitions for a vertex of height `k`,
/// depending on the instance kind:
///
/// * permutational — 𝒫_T for every subset T with 1 ≤ |T| ≤ C0;
/// * linear — 𝒫_[i,j] for intervals of length ≤ C0 starting at i ≤ C1
///   (1-based, so 0-based start < C1);
/// * cyclic — wrap-around intervals of length ≤ C0 allowed, kept when the
///   interval contains the first element or starts at i ≤ C1.
pub fn standard_cover(
    k: usize,
    c0: usize,
    c1: usize,
    kind: Kind,
) -> Result<Vec<Partition>, CoreError> {
    if k <= c0 {
        return Err(CoreError::TooSmall { k, c0 });
    }
    let mut out = Vec::new();
    match kind {
        Kind::Permutational => {
            // subsets by size, lexicographic within a size
            for size in 1..=c0 {
                let mut t: Vec<usize> = Vec::new();
                subsets_of_size(0, k, size, &mut t, &mut out)?;
            }
        }
        Kind::Linear => {
            for i in 0..c1.min(k) {
                for len in 1..=c0 {
                    if i + len > k {
                        break;
                    }
                    let t: Vec<usize> = (i..i + len).collect();
                    out.push(Partition::two_block(&t, k)?);
                }
            }
            out = dedup_partitions(out);
        }
        Kind::Cyclic => {
            for i in 0..k {
                for len in 1..=c0.min(k - 1) {
                    let t: Vec<usize> = (0..len).map(|d| (i + d) % k).collect();
                    let contains_first = t.contains(&0);
                    if contains_first || i < c1 {
                        out.push(Partition::two_block(&t, k)?);
                    }
                }
            }
            out = dedup_partitions(out);
        }
    }
    Ok(out)
}

fn subsets_of_size(
    start: usize,
    k: usize,
    size: usize,
    cur: &mut Vec<usize>,
    out: &mut Vec<Partition>,
) -> Result<(), CoreError> {
    if cur.len() == size {
        out.push(Partition::two_block(cur, k)?);
        return Ok(());
    }
    for i in start..k {
        cur.push(i);
        subsets_of_size(i + 1, k, size, cur, out)?;
        cur.pop();
    }
    Ok(())
}

fn dedup_partitions(ps: Vec<Partition>) -> Vec<Partition> {
    let mut seen = std::collections::BTreeSet::new();
    ps.into_iter().filter(|p| seen.insert(p.clone())).collect()
}
