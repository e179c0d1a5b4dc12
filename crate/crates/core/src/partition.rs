//! Partitions of `[n]` into at most `k` labeled blocks.

use crate::error::{Error, Result};
use crate::matrix::SymMatrix;

/// Assignment of `n` elements to at most `k` blocks. Blocks may be empty:
/// labels simply never use some value in `[0, k)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    k: usize,
    labels: Vec<usize>,
}

impl Partition {
    pub fn new(labels: Vec<usize>, k: usize) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::invalid("partition must cover at least one element"));
        }
        if k == 0 {
            return Err(Error::invalid("partition must allow at least one block"));
        }
        if let Some(&bad) = labels.iter().find(|&&l| l >= k) {
            return Err(Error::invalid(format!(
                "label {bad} out of range for k = {k}"
            )));
        }
        Ok(Partition { k, labels })
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> usize {
        self.labels[i]
    }

    /// Number of non-empty blocks.
    pub fn block_count(&self) -> usize {
        let mut seen = vec![false; self.k];
        for &l in &self.labels {
            seen[l] = true;
        }
        seen.iter().filter(|&&s| s).count()
    }

    /// Elements of each non-empty block, ordered by first occurrence.
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let canon = self.canonical();
        let mut blocks: Vec<Vec<usize>> = vec![Vec::new(); canon.block_count()];
        for (i, &l) in canon.labels.iter().enumerate() {
            blocks[l].push(i);
        }
        blocks
    }

    /// Canonical form: blocks renumbered by order of first occurrence.
    pub fn canonical(&self) -> Partition {
        let mut map = vec![usize::MAX; self.k];
        let mut next = 0;
        let labels = self
            .labels
            .iter()
            .map(|&l| {
                if map[l] == usize::MAX {
                    map[l] = next;
                    next += 1;
                }
                map[l]
            })
            .collect();
        Partition { k: self.k, labels }
    }

    /// True when both partitions induce the same grouping, ignoring label
    /// names and the block budget `k`.
    pub fn same_clustering(&self, other: &Partition) -> bool {
        self.n() == other.n() && self.canonical().labels == other.canonical().labels
    }

    /// All distinct partitions of `[n]` into at most `k` blocks, in canonical
    /// form. Enumerates restricted growth strings, so each partition appears
    /// exactly once. Intended for small `n`.
    pub fn enumerate(n: usize, k: usize) -> Vec<Partition> {
        assert!(n >= 1 && k >= 1);
        let mut out = Vec::new();
        let mut labels = vec![0usize; n];
        fn rec(labels: &mut Vec<usize>, pos: usize, used: usize, k: usize, out: &mut Vec<Partition>) {
            if pos == labels.len() {
                out.push(Partition {
                    k,
                    labels: labels.clone(),
                });
                return;
            }
            let limit = (used + 1).min(k);
            for l in 0..limit {
                labels[pos] = l;
                rec(labels, pos + 1, used.max(l + 1), k, out);
            }
        }
        rec(&mut labels, 0, 0, k, &mut out);
        out
    }
}

/// Total weight of the unordered pairs split by `p`: `sum over {i, j} with
/// different labels of M_ij`, each pair counted once.
pub fn cut_weight(p: &Partition, m: &SymMatrix) -> Result<f64> {
    if m.n() != p.n() {
        return Err(Error::dims(format!(
            "cut_weight: partition over {} elements, matrix is {}x{}",
            p.n(),
            m.n(),
            m.n()
        )));
    }
    let n = p.n();
    let mut total = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            if p.label(i) != p.label(j) {
                total += m.get(i, j);
            }
        }
    }
    Ok(total)
}
