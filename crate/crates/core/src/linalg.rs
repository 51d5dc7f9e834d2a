//! Square-root-free triangular factorization `H = Uᵗ D U` and unit-triangular
//! inversion. Exact under the rational backend.

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::Real;

/// Result of [`ldl_upper`]: `U` unit upper triangular, `D` the pivots.
#[derive(Clone, Debug)]
pub struct Ldl<T> {
    pub unit: Matrix<T>,
    pub pivots: Vec<T>,
}

/// Outcome of a factorization attempt that may stop at a non-positive pivot.
#[derive(Clone, Debug)]
pub struct PartialLdl<T> {
    pub ldl: Ldl<T>,
    /// Number of leading pivots that are strictly positive.
    pub positive_up_to: usize,
}

/// Factors the leading principal block of a symmetric matrix for as long as
/// the pivots stay strictly positive.
pub fn ldl_upper_partial<T: Real>(h: &Matrix<T>) -> PartialLdl<T> {
    let n = h.rows();
    assert_eq!(n, h.cols(), "matrix must be square");
    let ctx = h[(0, 0)].ctx();
    let zero = T::zero(ctx);
    let mut unit = Matrix::<T>::identity(n, ctx);
    let mut pivots: Vec<T> = Vec::with_capacity(n);
    for j in 0..n {
        for i in 0..j {
            let mut s = h[(i, j)].clone();
            for k in 0..i {
                s = s - unit[(k, i)].clone() * pivots[k].clone() * unit[(k, j)].clone();
            }
            unit[(i, j)] = s / pivots[i].clone();
        }
        let mut d = h[(j, j)].clone();
        for k in 0..j {
            let u = unit[(k, j)].clone();
            d = d - u.clone() * u * pivots[k].clone();
        }
        if !(d > zero) || !d.is_finite() {
            // Clear the partially filled column so `unit` stays consistent.
            for i in 0..j {
                unit[(i, j)] = zero.clone();
            }
            return PartialLdl {
                ldl: Ldl { unit, pivots },
                positive_up_to: j,
            };
        }
        pivots.push(d);
    }
    PartialLdl {
        ldl: Ldl { unit, pivots },
        positive_up_to: n,
    }
}

/// Full factorization; fails at the first non-positive pivot.
pub fn ldl_upper<T: Real>(h: &Matrix<T>) -> Result<Ldl<T>> {
    let partial = ldl_upper_partial(h);
    if partial.positive_up_to < h.rows() {
        return Err(Error::Positivity {
            dimension: partial.positive_up_to + 1,
            precision_suspect: !T::EXACT,
        });
    }
    Ok(partial.ldl)
}

/// Inverse of a unit upper-triangular matrix by back substitution.
pub fn unit_upper_inverse<T: Real>(u: &Matrix<T>) -> Matrix<T> {
    let n = u.rows();
    let ctx = u[(0, 0)].ctx();
    let mut inv = Matrix::<T>::identity(n, ctx);
    for col in 0..n {
        // Solve U x = e_col; x_i = 0 for i > col.
        for i in (0..col).rev() {
            let mut s = T::zero(ctx);
            for k in i + 1..=col {
                let uik = &u[(i, k)];
                if !uik.is_zero() {
                    s = s - uik.clone() * inv[(k, col)].clone();
                }
            }
            inv[(i, col)] = s;
        }
    }
    inv
}
