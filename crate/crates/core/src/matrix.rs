//! Small dense row-major matrices over any [`Real`] backend.

use std::ops::{Index, IndexMut};

use serde_json::Value;

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Real> Matrix<T> {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize, ctx: T::Ctx) -> Self {
        Self {
            rows,
            cols,
            data: vec![T::zero(ctx); rows * cols],
        }
    }

    pub fn identity(n: usize, ctx: T::Ctx) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { T::one(ctx) } else { T::zero(ctx) })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    /// Top-left `rows x cols` block.
    pub fn block(&self, rows: usize, cols: usize) -> Self {
        assert!(rows <= self.rows && cols <= self.cols);
        Self::from_fn(rows, cols, |i, j| self[(i, j)].clone())
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "inner dimensions differ");
        let ctx = self.data.first().or(other.data.first()).map(T::ctx);
        let Some(ctx) = ctx else {
            return Self {
                rows: self.rows,
                cols: other.cols,
                data: Vec::new(),
            };
        };
        let mut out = Self::zeros(self.rows, other.cols, ctx);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if b.is_zero() {
                        continue;
                    }
                    let cur = std::mem::replace(&mut out[(i, j)], T::zero(ctx));
                    out[(i, j)] = cur + a.clone() * b.clone();
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.cols, v.len(), "vector length differs from column count");
        (0..self.rows)
            .map(|i| {
                let row = self.row(i);
                let mut acc: Option<T> = None;
                for (a, b) in row.iter().zip(v) {
                    let term = a.clone() * b.clone();
                    acc = Some(match acc {
                        Some(s) => s + term,
                        None => term,
                    });
                }
                acc.unwrap_or_else(|| T::zero(v.first().map(T::ctx).unwrap_or_else(|| self.data[0].ctx())))
            })
            .collect()
    }

    /// `max |self - other|` over all entries.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut best: Option<T> = None;
        for (a, b) in self.data.iter().zip(&other.data) {
            let d = (a.clone() - b.clone()).abs();
            best = Some(match best {
                Some(m) if m >= d => m,
                _ => d,
            });
        }
        best.expect("max_abs_diff on an empty matrix")
    }

    pub fn max_abs(&self) -> T {
        let ctx = self.data[0].ctx();
        crate::scalar::max_abs(&self.data, ctx)
    }

    pub fn is_symmetric(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| (0..i).all(|j| self[(i, j)] == self[(j, i)]))
    }

    pub fn map<U: Real>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    /// Nested JSON arrays, one inner array per row.
    pub fn to_json(&self) -> Value {
        Value::Array(
            (0..self.rows)
                .map(|i| Value::Array(self.row(i).iter().map(T::to_json).collect()))
                .collect(),
        )
    }

    pub fn from_json(v: &Value, ctx: T::Ctx) -> Result<Self> {
        let rows = v
            .as_array()
            .ok_or_else(|| Error::Parse("matrix must be an array of rows".into()))?;
        let mut data = Vec::new();
        let mut cols = None;
        for row in rows {
            let row = row
                .as_array()
                .ok_or_else(|| Error::Parse("matrix row must be an array".into()))?;
            match cols {
                None => cols = Some(row.len()),
                Some(c) if c != row.len() => {
                    return Err(Error::Parse("ragged matrix rows".into()));
                }
                _ => {}
            }
            for x in row {
                data.push(T::from_json(x, ctx)?);
            }
        }
        Ok(Self {
            rows: rows.len(),
            cols: cols.unwrap_or(0),
            data,
        })
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

/// Vector to JSON array.
pub fn vec_to_json<T: Real>(v: &[T]) -> Value {
    Value::Array(v.iter().map(T::to_json).collect())
}

pub fn vec_from_json<T: Real>(v: &Value, ctx: T::Ctx) -> Result<Vec<T>> {
    v.as_array()
        .ok_or_else(|| Error::Parse("vector must be a JSON array".into()))?
        .iter()
        .map(|x| T::from_json(x, ctx))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rational_ratio, Rational};

    #[test]
    fn product_and_transpose() {
        let a = Matrix::from_fn(2, 3, |i, j| (i * 3 + j) as f64);
        let b = a.transpose();
        let p = a.matmul(&b);
        assert_eq!(p[(0, 0)], 5.0);
        assert_eq!(p[(1, 1)], 50.0);
        assert_eq!(p[(0, 1)], 14.0);
        assert!(p.is_symmetric());
        assert_eq!(a.mul_vec(&[1.0, 1.0, 1.0]), vec![3.0, 12.0]);
    }

    #[test]
    fn json_round_trip() {
        let m = Matrix::from_fn(2, 2, |i, j| rational_ratio(i as i64 + 1, j as i64 + 2));
        let back = Matrix::<Rational>::from_json(&m.to_json(), ()).unwrap();
        assert_eq!(back, m);
        assert!(Matrix::<f64>::from_json(&serde_json::json!([[1.0], [1.0, 2.0]]), ()).is_err());
    }
}
