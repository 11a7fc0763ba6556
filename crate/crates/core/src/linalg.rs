//! Dense vectors and row-major matrices over `f64`.
//!
//! Only what a single-layer model needs: matrix-vector products, `axpy`, and
//! rank-one accumulation for weight gradients. Rows of a [`Matrix`] map to
//! output units, columns to inputs.

use std::ops::{Deref, DerefMut, Index, IndexMut};

use crate::{Error, Result};

/// A non-empty dense vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Vector(Vec<f64>);

impl Vector {
    pub fn new(elements: Vec<f64>) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::Empty);
        }
        Ok(Self(elements))
    }

    /// # Panics
    /// If `len == 0`.
    pub fn zeros(len: usize) -> Self {
        assert!(len > 0, "Vector::zeros requires len >= 1");
        Self(vec![0.0; len])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for Vector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl DerefMut for Vector {
    fn deref_mut(&mut self) -> &mut [f64] {
        &mut self.0
    }
}

impl TryFrom<Vec<f64>> for Vector {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

/// Row-major dense matrix with `rows >= 1` and `cols >= 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Empty);
        }
        Ok(Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        })
    }

    pub fn identity(n: usize) -> Result<Self> {
        let mut m = Self::zeros(n, n)?;
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        Ok(m)
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Empty);
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                op: "Matrix::from_vec",
                expected: rows * cols,
                found: data.len(),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(Error::DimensionMismatch {
                    op: "Matrix::from_rows",
                    expected: cols,
                    found: r.len(),
                });
            }
            data.extend_from_slice(r);
        }
        Self::from_vec(rows.len(), cols, data)
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

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// Row-major element slice.
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn fill(&mut self, value: f64) {
        self.data.fill(value);
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

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `m · x`.
pub fn matvec(m: &Matrix, x: &[f64]) -> Result<Vector> {
    if m.cols != x.len() {
        return Err(Error::DimensionMismatch {
            op: "matvec",
            expected: m.cols,
            found: x.len(),
        });
    }
    Ok(Vector((0..m.rows).map(|i| dot(m.row(i), x)).collect()))
}

/// `a · x + y`.
pub fn axpy(a: f64, x: &[f64], y: &[f64]) -> Result<Vector> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            op: "axpy",
            expected: x.len(),
            found: y.len(),
        });
    }
    Vector::new(x.iter().zip(y).map(|(xi, yi)| a * xi + yi).collect())
}

/// `acc[i, j] += scale · u[i] · v[j]`.
pub fn outer_accumulate(acc: &mut Matrix, u: &[f64], v: &[f64], scale: f64) -> Result<()> {
    if acc.rows != u.len() {
        return Err(Error::DimensionMismatch {
            op: "outer_accumulate (rows)",
            expected: acc.rows,
            found: u.len(),
        });
    }
    if acc.cols != v.len() {
        return Err(Error::DimensionMismatch {
            op: "outer_accumulate (cols)",
            expected: acc.cols,
            found: v.len(),
        });
    }
    for (i, &ui) in u.iter().enumerate() {
        let s = scale * ui;
        for (a, &vj) in acc.row_mut(i).iter_mut().zip(v) {
            *a += s * vj;
        }
    }
    Ok(())
}
