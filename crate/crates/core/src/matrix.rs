//! Dense real symmetric matrices.
//!
//! `SymMatrix` is the carrier for pairwise weights, relaxation solutions and
//! partition matrices. Storage is a full row-major buffer; every mutation
//! writes both `(i, j)` and `(j, i)` so symmetry holds by construction.

use std::ops::Index;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    /// All-zero matrix. Panics if `n == 0`.
    pub fn zeros(n: usize) -> Self {
        Self::constant(n, 0.0)
    }

    /// Matrix with every entry equal to `value`. Panics if `n == 0`.
    pub fn constant(n: usize, value: f64) -> Self {
        assert!(n >= 1, "SymMatrix dimension must be at least 1");
        SymMatrix {
            n,
            data: vec![value; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    /// Builds from `f(i, j)` evaluated on the upper triangle (`i <= j`) and
    /// mirrored below the diagonal.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in i..n {
                let v = f(i, j);
                m.data[i * n + j] = v;
                m.data[j * n + i] = v;
            }
        }
        m
    }

    /// Builds from full row data, verifying symmetry up to a small relative
    /// tolerance. Intended for data read back from files.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::invalid("matrix must have at least one row"));
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::dims(format!(
                    "row {} has {} entries, expected {}",
                    i,
                    row.len(),
                    n
                )));
            }
        }
        let scale = rows
            .iter()
            .flatten()
            .fold(0.0f64, |acc, v| acc.max(v.abs()));
        let tol = 1e-9 * (1.0 + scale);
        let mut m = Self::zeros(n);
        for (i, row) in rows.iter().enumerate() {
            for (j, other) in rows.iter().enumerate().skip(i) {
                let a = row[j];
                let b = other[i];
                if (a - b).abs() > tol {
                    return Err(Error::invalid(format!(
                        "matrix is not symmetric at ({i}, {j}): {a} vs {b}"
                    )));
                }
                let v = 0.5 * (a + b);
                m.data[i * n + j] = v;
                m.data[j * n + i] = v;
            }
        }
        Ok(m)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    /// Sets both `(i, j)` and `(j, i)`.
    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        self.data[i * self.n + j] = value;
        self.data[j * self.n + i] = value;
    }

    /// Full double sum `sum_ij X_ij * Y_ij` over ordered pairs.
    pub fn frobenius_dot(&self, other: &SymMatrix) -> Result<f64> {
        if self.n != other.n {
            return Err(Error::dims(format!(
                "frobenius_dot: {} vs {}",
                self.n, other.n
            )));
        }
        Ok(self
            .data
            .iter()
            .zip(other.data.iter())
            .map(|(a, b)| a * b)
            .sum())
    }

    pub fn frob_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Frobenius norm of the difference.
    pub fn frob_dist(&self, other: &SymMatrix) -> Result<f64> {
        if self.n != other.n {
            return Err(Error::dims(format!("frob_dist: {} vs {}", self.n, other.n)));
        }
        Ok(self
            .data
            .iter()
            .zip(other.data.iter())
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt())
    }

    /// Largest entrywise absolute difference.
    pub fn max_abs_diff(&self, other: &SymMatrix) -> Result<f64> {
        if self.n != other.n {
            return Err(Error::dims(format!(
                "max_abs_diff: {} vs {}",
                self.n, other.n
            )));
        }
        Ok(self
            .data
            .iter()
            .zip(other.data.iter())
            .fold(0.0f64, |acc, (a, b)| acc.max((a - b).abs())))
    }

    /// Entrywise `self + shift` (every entry, diagonal included).
    pub fn shifted(&self, shift: f64) -> SymMatrix {
        SymMatrix {
            n: self.n,
            data: self.data.iter().map(|v| v + shift).collect(),
        }
    }

    pub fn scaled(&self, factor: f64) -> SymMatrix {
        SymMatrix {
            n: self.n,
            data: self.data.iter().map(|v| v * factor).collect(),
        }
    }

    pub fn add(&self, other: &SymMatrix) -> Result<SymMatrix> {
        if self.n != other.n {
            return Err(Error::dims(format!("add: {} vs {}", self.n, other.n)));
        }
        Ok(SymMatrix {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(other.data.iter())
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn min_entry(&self) -> f64 {
        self.data.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_entry(&self) -> f64 {
        self.data.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub(crate) fn to_dmatrix(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.n, self.n, &self.data)
    }

    /// Symmetrizes on the way in; the numeric kernels only guarantee symmetry
    /// up to rounding.
    pub(crate) fn from_dmatrix(m: &DMatrix<f64>) -> SymMatrix {
        let n = m.nrows();
        SymMatrix::from_fn(n, |i, j| 0.5 * (m[(i, j)] + m[(j, i)]))
    }
}

impl Index<(usize, usize)> for SymMatrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.n + j]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_maintains_symmetry() {
        let mut m = SymMatrix::zeros(3);
        m.set(0, 2, 4.5);
        assert_eq!(m.get(2, 0), 4.5);
        assert_eq!(m.get(0, 2), 4.5);
    }

    #[test]
    fn frobenius_dot_examples() {
        // identity . identity at n=4
        let id = SymMatrix::identity(4);
        assert_eq!(id.frobenius_dot(&id).unwrap(), 4.0);

        // anything . zero
        let z = SymMatrix::zeros(4);
        assert_eq!(id.frobenius_dot(&z).unwrap(), 0.0);
    }

    #[test]
    fn frobenius_dot_dimension_mismatch() {
        let a = SymMatrix::identity(2);
        let b = SymMatrix::identity(3);
        assert!(matches!(
            a.frobenius_dot(&b),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn from_rows_rejects_asymmetry() {
        let rows = vec![vec![1.0, 2.0], vec![3.0, 1.0]];
        assert!(SymMatrix::from_rows(&rows).is_err());
    }

    #[test]
    fn from_rows_rejects_ragged() {
        let rows = vec![vec![1.0, 2.0], vec![2.0]];
        assert!(SymMatrix::from_rows(&rows).is_err());
    }

    #[test]
    #[should_panic]
    fn zero_dimension_panics() {
        let _ = SymMatrix::zeros(0);
    }
}
