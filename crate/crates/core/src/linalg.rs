//! Minimal dense linear algebra: a row-major matrix and Householder QR.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use crate::error::{Error, Result};

/// Row-major dense matrix of `f64`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    /// Builds a matrix from equal-length rows.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            if row.len() != cols {
                return Err(Error::DimensionMismatch { expected: cols, got: row.len() });
            }
            data.extend_from_slice(row);
        }
        Ok(Self { rows: rows.len(), cols, data })
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch { expected: rows * cols, got: data.len() });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn mul_vec(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch { expected: self.cols, got: v.len() });
        }
        Ok((0..self.rows).map(|i| dot(self.row(i), v)).collect())
    }

    /// `Aᵀ v`
    pub fn transpose_mul_vec(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.rows {
            return Err(Error::DimensionMismatch { expected: self.rows, got: v.len() });
        }
        let mut out = vec![0.0; self.cols];
        for (i, &vi) in v.iter().enumerate() {
            for (o, &a) in out.iter_mut().zip(self.row(i)) {
                *o += a * vi;
            }
        }
        Ok(out)
    }

    /// `v A vᵀ` for a square matrix.
    pub fn quadratic_form(&self, v: &[f64]) -> Result<f64> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch { expected: self.rows, got: self.cols });
        }
        Ok(dot(v, &self.mul_vec(v)?))
    }

    pub fn is_symmetric(&self) -> bool {
        self.rows == self.cols && (0..self.rows).all(|i| (0..i).all(|j| self[(i, j)] == self[(j, i)]))
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Thin Householder QR of a tall matrix (`rows >= cols`).
///
/// Only `R` and the reflectors are kept; `Qᵀ b` is applied on demand.
#[derive(Debug, Clone)]
pub struct Qr {
    /// Householder vectors, one per column, each of length `rows`.
    reflectors: Vec<Vec<f64>>,
    /// Upper-triangular factor, `cols × cols`.
    r: Matrix,
    rows: usize,
}

/// Relative pivot threshold below which a column counts as linearly dependent.
pub const PIVOT_TOLERANCE: f64 = 1e-10;

impl Qr {
    pub fn decompose(a: &Matrix) -> Result<Self> {
        let (m, n) = (a.rows(), a.cols());
        if m < n {
            return Err(Error::InsufficientData { what: "QR rows", needed: n, got: m });
        }
        let mut work = a.clone();
        let mut reflectors = Vec::with_capacity(n);
        let col_scale =
            (0..n).map(|j| libm::sqrt((0..m).map(|i| a[(i, j)] * a[(i, j)]).sum::<f64>())).collect::<Vec<_>>();

        for k in 0..n {
            let norm = libm::sqrt((k..m).map(|i| work[(i, k)] * work[(i, k)]).sum::<f64>());
            let scale = col_scale[k];
            if scale == 0.0 || norm <= PIVOT_TOLERANCE * scale {
                return Err(Error::RankDeficient { column: k });
            }
            let alpha = if work[(k, k)] > 0.0 { -norm } else { norm };
            let mut v = vec![0.0; m];
            v[k] = work[(k, k)] - alpha;
            for i in k + 1..m {
                v[i] = work[(i, k)];
            }
            let vnorm2: f64 = v[k..].iter().map(|x| x * x).sum();
            if vnorm2 > 0.0 {
                for j in k..n {
                    let s: f64 = (k..m).map(|i| v[i] * work[(i, j)]).sum::<f64>() * 2.0 / vnorm2;
                    for i in k..m {
                        work[(i, j)] -= s * v[i];
                    }
                }
            }
            reflectors.push(v);
        }

        let mut r = Matrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                r[(i, j)] = work[(i, j)];
            }
        }
        Ok(Self { reflectors, r, rows: m })
    }

    pub fn r(&self) -> &Matrix {
        &self.r
    }

    /// Applies `Qᵀ` to `b` in place.
    fn apply_qt(&self, b: &mut [f64]) {
        for (k, v) in self.reflectors.iter().enumerate() {
            let vnorm2: f64 = v[k..].iter().map(|x| x * x).sum();
            if vnorm2 == 0.0 {
                continue;
            }
            let s: f64 = (k..self.rows).map(|i| v[i] * b[i]).sum::<f64>() * 2.0 / vnorm2;
            for i in k..self.rows {
                b[i] -= s * v[i];
            }
        }
    }

    /// Least-squares solution of `A x ≈ b`.
    pub fn solve_least_squares(&self, b: &[f64]) -> Result<Vec<f64>> {
        if b.len() != self.rows {
            return Err(Error::DimensionMismatch { expected: self.rows, got: b.len() });
        }
        let mut qtb = b.to_vec();
        self.apply_qt(&mut qtb);
        let n = self.r.cols();
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let s: f64 = (i + 1..n).map(|j| self.r[(i, j)] * x[j]).sum();
            x[i] = (qtb[i] - s) / self.r[(i, i)];
        }
        Ok(x)
    }

    /// `(AᵀA)⁻¹ = R⁻¹ R⁻ᵀ`.
    pub fn gram_inverse(&self) -> Matrix {
        let n = self.r.cols();
        // R⁻¹ by back substitution, column by column.
        let mut rinv = Matrix::zeros(n, n);
        for j in 0..n {
            for i in (0..=j).rev() {
                let rhs = if i == j { 1.0 } else { 0.0 };
                let s: f64 = (i + 1..=j).map(|k| self.r[(i, k)] * rinv[(k, j)]).sum();
                rinv[(i, j)] = (rhs - s) / self.r[(i, i)];
            }
        }
        let mut out = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..=i {
                let s: f64 = (i.max(j)..n).map(|k| rinv[(i, k)] * rinv[(j, k)]).sum();
                out[(i, j)] = s;
                out[(j, i)] = s;
            }
        }
        out
    }
}
