//! The k-way elliptope and its vertices.
//!
//! The k-way elliptope is the set of positive semidefinite matrices with unit
//! diagonal whose entries are all at least `-1/(k-1)`. Its vertices are the
//! k-partition matrices: Gram matrices of the simplex encoding of a
//! partition, with entries only `1` (together) and `-1/(k-1)` (split).

use crate::error::{Error, Result};
use crate::linalg;
use crate::matrix::SymMatrix;
use crate::partition::Partition;

/// Lower bound `-1/(k-1)` on the entries of the k-way elliptope.
pub fn entry_floor(k: usize) -> f64 {
    assert!(k >= 2, "entry floor requires k >= 2");
    -1.0 / (k as f64 - 1.0)
}

/// Midpoint between the two entry values a vertex can take; entries above it
/// are read as "together". Maximizes the noise margin symmetrically.
pub fn link_threshold(k: usize) -> f64 {
    0.5 * (1.0 + entry_floor(k))
}

/// Gram matrix of the simplex encoding of `p`: `1` where labels agree,
/// `-1/(k-1)` where they differ.
pub fn partition_matrix(p: &Partition) -> SymMatrix {
    let off = if p.k() >= 2 { entry_floor(p.k()) } else { 1.0 };
    SymMatrix::from_fn(p.n(), |i, j| {
        if p.label(i) == p.label(j) {
            1.0
        } else {
            off
        }
    })
}

/// Partition weight in matrix form: `((k-1)/(2k)) * sum_ij (1 - X_ij) M_ij`,
/// the full double sum over ordered pairs. Equals `cut_weight` when `X` is
/// the partition matrix and `M` has zero diagonal.
pub fn cut_weight_matrix_form(x: &SymMatrix, m: &SymMatrix, k: usize) -> Result<f64> {
    if x.n() != m.n() {
        return Err(Error::dims(format!(
            "cut_weight_matrix_form: {} vs {}",
            x.n(),
            m.n()
        )));
    }
    if k < 2 {
        return Err(Error::invalid("cut_weight_matrix_form requires k >= 2"));
    }
    let kf = k as f64;
    let n = x.n();
    let mut sum = 0.0;
    for i in 0..n {
        for j in 0..n {
            sum += (1.0 - x.get(i, j)) * m.get(i, j);
        }
    }
    Ok((kf - 1.0) / (2.0 * kf) * sum)
}

/// Membership test: unit diagonal within `tol`, minimum eigenvalue at least
/// `-tol`, every entry at least `-1/(k-1) - tol`.
pub fn in_kway_elliptope(x: &SymMatrix, k: usize, tol: f64) -> Result<bool> {
    assert!(tol >= 0.0);
    let floor = entry_floor(k);
    let n = x.n();
    for i in 0..n {
        if (x.get(i, i) - 1.0).abs() > tol {
            return Ok(false);
        }
        for j in 0..n {
            if x.get(i, j) < floor - tol {
                return Ok(false);
            }
        }
    }
    Ok(linalg::min_eigenvalue(x)? >= -tol)
}

/// Reads the partition off a (near-)vertex of the k-way elliptope.
///
/// Every entry must lie within `tol` of `{1, -1/(k-1)}`. Elements are grouped
/// when their entry exceeds the link threshold and the grouping is closed
/// transitively; a within-group pair at or below the threshold, or more than
/// `k` groups, means the matrix is not a partition matrix and is an error
/// rather than silently repaired.
pub fn extract_partition(x: &SymMatrix, k: usize, tol: f64) -> Result<Partition> {
    if k < 2 {
        return Err(Error::invalid("extract_partition requires k >= 2"));
    }
    let n = x.n();
    let floor = entry_floor(k);
    let tau = link_threshold(k);

    for i in 0..n {
        for j in i..n {
            let v = x.get(i, j);
            if (v - 1.0).abs() > tol && (v - floor).abs() > tol {
                return Err(Error::NotPartitionMatrix(format!(
                    "entry ({i}, {j}) = {v} is not within {tol} of 1 or {floor}"
                )));
            }
        }
    }

    let mut uf = UnionFind::new(n);
    for i in 0..n {
        for j in (i + 1)..n {
            if x.get(i, j) > tau {
                uf.union(i, j);
            }
        }
    }

    // Transitive closure must agree with the entrywise rule.
    for i in 0..n {
        for j in (i + 1)..n {
            if uf.find(i) == uf.find(j) && x.get(i, j) <= tau {
                return Err(Error::NotPartitionMatrix(format!(
                    "grouping is not transitive: elements {i} and {j} joined \
                     through intermediates but X[{i}][{j}] = {} <= {tau}",
                    x.get(i, j)
                )));
            }
        }
    }

    let mut root_label = vec![usize::MAX; n];
    let mut next = 0;
    let mut labels = vec![0usize; n];
    for (i, label) in labels.iter_mut().enumerate() {
        let r = uf.find(i);
        if root_label[r] == usize::MAX {
            root_label[r] = next;
            next += 1;
        }
        *label = root_label[r];
    }
    if next > k {
        return Err(Error::NotPartitionMatrix(format!(
            "found {next} groups, more than k = {k}"
        )));
    }
    Partition::new(labels, k)
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut i: usize) -> usize {
        while self.parent[i] != i {
            self.parent[i] = self.parent[self.parent[i]];
            i = self.parent[i];
        }
        i
    }

    fn union(&mut self, i: usize, j: usize) {
        let (ri, rj) = (self.find(i), self.find(j));
        if ri != rj {
            self.parent[ri.max(rj)] = ri.min(rj);
        }
    }
}
