//! Dense complex linear algebra for the small (n ≤ 8) matrices used here.

use alloc::vec::Vec;

use num_traits::Float;

use crate::error::{Error, Result};
use crate::scalar::{C64, ONE, ZERO};

/// A square matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareMatrix {
    n: usize,
    data: Vec<C64>,
}

impl SquareMatrix {
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        SquareMatrix { n, data }
    }

    /// Like [`SquareMatrix::from_fn`] but propagates the first error.
    pub fn try_from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Result<C64>) -> Result<Self> {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j)?);
            }
        }
        Ok(SquareMatrix { n, data })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.n + j]
    }

    /// Product of the Euclidean row norms, an upper bound on `|det|`.
    pub fn hadamard_bound(&self) -> f64 {
        self.data
            .chunks(self.n.max(1))
            .map(|row| Float::sqrt(row.iter().map(|z| z.norm_sqr()).sum::<f64>()))
            .product()
    }

    /// Determinant by Gaussian elimination with partial pivoting.
    pub fn determinant(&self) -> C64 {
        let n = self.n;
        let mut a = self.data.clone();
        let mut det = ONE;
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&r, &s| a[r * n + col].norm().total_cmp(&a[s * n + col].norm()))
                .unwrap_or(col);
            let pv = a[pivot * n + col];
            if pv == ZERO {
                return ZERO;
            }
            if pivot != col {
                for k in 0..n {
                    a.swap(col * n + k, pivot * n + k);
                }
                det = -det;
            }
            det *= pv;
            for r in col + 1..n {
                let factor = a[r * n + col] / pv;
                if factor == ZERO {
                    continue;
                }
                for k in col + 1..n {
                    let v = a[col * n + k];
                    a[r * n + k] -= factor * v;
                }
            }
        }
        det
    }
}

/// Solves the 2×2 system `m · (u, v) = rhs`, rejecting near-singular matrices.
pub fn solve2(m: [[C64; 2]; 2], rhs: [C64; 2]) -> Result<[C64; 2]> {
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let scale = m.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max);
    if scale == 0.0 || det.norm() <= 1e-12 * scale * scale {
        return Err(Error::Numeric("ill-conditioned 2x2 solve".into()));
    }
    let u = (rhs[0] * m[1][1] - rhs[1] * m[0][1]) / det;
    let v = (m[0][0] * rhs[1] - m[1][0] * rhs[0]) / det;
    Ok([u, v])
}
