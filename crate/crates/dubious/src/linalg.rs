//! Minimal dense square-matrix routines for the smoothing operator. Sizes are
//! the interior waypoint count, so simple O(n^3) algorithms are plenty.

use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Matrix<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: Real> Matrix<T> {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![T::zero(); n * n],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> T {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.n + j] = v;
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.at(i, k);
                if a == T::zero() {
                    continue;
                }
                for j in 0..n {
                    out.set(i, j, out.at(i, j) + a * other.at(k, j));
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.set(j, i, self.at(i, j));
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(v.len(), self.n);
        let n = self.n;
        let mut out = vec![T::zero(); n];
        for i in 0..n {
            let mut acc = T::zero();
            for j in 0..n {
                acc += self.at(i, j) * v[j];
            }
            out[i] = acc;
        }
        out
    }

    /// Lower-triangular Cholesky factor `L` with `L * L^T = self`.
    /// `None` when the matrix is not positive definite.
    pub fn cholesky(&self) -> Option<Self> {
        let n = self.n;
        let mut l = Self::zeros(n);
        for i in 0..n {
            for j in 0..=i {
                let mut s = self.at(i, j);
                for k in 0..j {
                    s -= l.at(i, k) * l.at(j, k);
                }
                if i == j {
                    if s <= T::zero() || !s.is_finite() {
                        return None;
                    }
                    l.set(i, i, s.sqrt());
                } else {
                    l.set(i, j, s / l.at(j, j));
                }
            }
        }
        Some(l)
    }

    /// Inverse of a symmetric positive definite matrix via Cholesky solves.
    pub fn inverse_spd(&self) -> Option<Self> {
        let n = self.n;
        let l = self.cholesky()?;
        let mut inv = Self::zeros(n);
        let mut y = vec![T::zero(); n];
        for col in 0..n {
            // forward solve L y = e_col
            for i in 0..n {
                let mut s = if i == col { T::one() } else { T::zero() };
                for k in 0..i {
                    s -= l.at(i, k) * y[k];
                }
                y[i] = s / l.at(i, i);
            }
            // back solve L^T x = y
            for i in (0..n).rev() {
                let mut s = y[i];
                for k in (i + 1)..n {
                    s -= l.at(k, i) * inv.at(k, col);
                }
                inv.set(i, col, s / l.at(i, i));
            }
        }
        Some(inv)
    }
}
