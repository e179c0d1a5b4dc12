//! Unit-norm equilateral simplex vertices.
//!
//! The `k` vertices live in `R^{k-1}`, are centered on the origin, have unit
//! norm and pairwise dot products `-1/(k-1)`. They are the target vectors of
//! the simplex encoding of a partition.

use crate::error::{Error, Result};
use crate::matrix::SymMatrix;

#[derive(Debug, Clone)]
pub struct SimplexBasis {
    k: usize,
    vectors: Vec<Vec<f64>>,
}

impl SimplexBasis {
    pub fn k(&self) -> usize {
        self.k
    }

    /// The `k` vertices, each of dimension `k - 1`.
    pub fn vectors(&self) -> &[Vec<f64>] {
        &self.vectors
    }

    pub fn vector(&self, i: usize) -> &[f64] {
        &self.vectors[i]
    }

    /// Gram matrix of the vertices: `(k/(k-1)) I - (1/(k-1)) ones`.
    pub fn gram(&self) -> SymMatrix {
        SymMatrix::from_fn(self.k, |i, j| dot(&self.vectors[i], &self.vectors[j]))
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Deterministic construction of the simplex vertices.
///
/// The first vertex is `e_1`; the rest share first coordinate `-1/(k-1)` and
/// embed a scaled `(k-1)`-vertex simplex in the orthogonal complement.
pub fn simplex_vertices(k: usize) -> Result<SimplexBasis> {
    if k < 2 {
        return Err(Error::invalid(format!(
            "simplex needs at least 2 vertices, got {k}"
        )));
    }
    Ok(SimplexBasis {
        k,
        vectors: build(k),
    })
}

fn build(k: usize) -> Vec<Vec<f64>> {
    if k == 2 {
        return vec![vec![1.0], vec![-1.0]];
    }
    let head = -1.0 / (k as f64 - 1.0);
    let scale = (1.0 - head * head).sqrt();
    let inner = build(k - 1);
    let mut vectors = Vec::with_capacity(k);
    let mut first = vec![0.0; k - 1];
    first[0] = 1.0;
    vectors.push(first);
    for v in inner {
        let mut w = Vec::with_capacity(k - 1);
        w.push(head);
        w.extend(v.iter().map(|x| x * scale));
        vectors.push(w);
    }
    vectors
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn rejects_k_below_two() {
        assert!(simplex_vertices(1).is_err());
    }

    #[test]
    fn two_vertices_are_antipodal() {
        let s = simplex_vertices(2).unwrap();
        assert_eq!(s.vectors(), &[vec![1.0], vec![-1.0]]);
    }

    #[test]
    fn invariants_hold_for_small_k() {
        for k in 2..=10 {
            let s = simplex_vertices(k).unwrap();
            let expected_off = -1.0 / (k as f64 - 1.0);
            // unit norms and pairwise dots
            for i in 0..k {
                assert_abs_diff_eq!(dot(s.vector(i), s.vector(i)), 1.0, epsilon = 1e-12);
                for j in (i + 1)..k {
                    assert_abs_diff_eq!(
                        dot(s.vector(i), s.vector(j)),
                        expected_off,
                        epsilon = 1e-12
                    );
                }
            }
            // vertices sum to zero
            for d in 0..(k - 1) {
                let sum: f64 = s.vectors().iter().map(|v| v[d]).sum();
                assert_abs_diff_eq!(sum, 0.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn gram_matches_closed_form() {
        for k in 2..=8 {
            let s = simplex_vertices(k).unwrap();
            let g = s.gram();
            let kf = k as f64;
            let expected =
                SymMatrix::from_fn(k, |i, j| if i == j { 1.0 } else { -1.0 / (kf - 1.0) });
            assert!(g.max_abs_diff(&expected).unwrap() <= 1e-12);
        }
    }

    #[test]
    fn k_five_pairwise_dot() {
        let s = simplex_vertices(5).unwrap();
        for i in 0..5 {
            for j in (i + 1)..5 {
                assert_abs_diff_eq!(dot(s.vector(i), s.vector(j)), -0.25, epsilon = 1e-12);
            }
        }
    }
}
