//! Dense complex square matrices over a generic scalar.
//!
//! Only what the R-matrix algebra needs: products, Kronecker products,
//! permutations and an LU inverse. Row-major storage.

use crate::error::{Error, Result};
use crate::scalar::{one, zero, Real};
use num_complex::Complex;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

#[derive(Clone, Debug, PartialEq)]
pub struct CMat<T: Real> {
    n: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> CMat<T> {
    pub fn zeros(n: usize) -> Self {
        CMat { n, data: vec![zero(); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = one();
        }
        m
    }

    pub fn from_diag(d: &[Complex<T>]) -> Self {
        let mut m = Self::zeros(d.len());
        for (i, v) in d.iter().enumerate() {
            m[(i, i)] = *v;
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Complex<T>) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn diag(&self) -> Vec<Complex<T>> {
        (0..self.n).map(|i| self[(i, i)]).collect()
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        CMat { n: self.n, data: self.data.iter().map(|x| *x * s).collect() }
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, x| m.max(x.norm()))
    }

    /// `max|self - other| / max|self|`.
    pub fn rel_diff(&self, other: &Self) -> T {
        let d = (self - other).max_abs();
        let s = self.max_abs().max(other.max_abs());
        if s == T::zero() {
            d
        } else {
            d / s
        }
    }

    pub fn kron(&self, other: &Self) -> Self {
        let (n, m) = (self.n, other.n);
        let mut out = Self::zeros(n * m);
        for i in 0..n {
            for j in 0..n {
                let a = self[(i, j)];
                if a == zero() {
                    continue;
                }
                for k in 0..m {
                    for l in 0..m {
                        out[(i * m + k, j * m + l)] = a * other[(k, l)];
                    }
                }
            }
        }
        out
    }

    /// Flip `v_a ⊗ v_b ↦ v_b ⊗ v_a` on `C^n ⊗ C^n`.
    pub fn flip(n: usize) -> Self {
        let mut p = Self::zeros(n * n);
        for a in 0..n {
            for b in 0..n {
                p[(b * n + a, a * n + b)] = one();
            }
        }
        p
    }

    /// Inverse by LU with partial pivoting.
    pub fn inverse(&self) -> Result<Self> {
        let n = self.n;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        let tiny = T::min_positive_value().sqrt();
        for col in 0..n {
            let mut piv = col;
            let mut best = a[(col, col)].norm();
            for r in col + 1..n {
                let v = a[(r, col)].norm();
                if v > best {
                    best = v;
                    piv = r;
                }
            }
            if best <= tiny || !best.is_finite() {
                return Err(Error::Singular);
            }
            if piv != col {
                for c in 0..n {
                    a.data.swap(col * n + c, piv * n + c);
                    inv.data.swap(col * n + c, piv * n + c);
                }
            }
            let d = one::<T>() / a[(col, col)];
            for c in 0..n {
                a[(col, c)] = a[(col, c)] * d;
                inv[(col, c)] = inv[(col, c)] * d;
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let f = a[(r, col)];
                if f == zero() {
                    continue;
                }
                for c in 0..n {
                    let ac = a[(col, c)];
                    let ic = inv[(col, c)];
                    a[(r, c)] = a[(r, c)] - f * ac;
                    inv[(r, c)] = inv[(r, c)] - f * ic;
                }
            }
        }
        Ok(inv)
    }

    pub fn mul_ref(&self, other: &Self) -> Self {
        let n = self.n;
        assert_eq!(n, other.n, "dimension mismatch");
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == zero() {
                    continue;
                }
                let row = &other.data[k * n..(k + 1) * n];
                let dst = &mut out.data[i * n..(i + 1) * n];
                for (d, b) in dst.iter_mut().zip(row) {
                    *d = *d + a * *b;
                }
            }
        }
        out
    }
}

/// `M ⊗ 1` on `V⊗V⊗V` for `M` on `V⊗V`.
pub fn lift12<T: Real>(m: &CMat<T>, n: usize) -> CMat<T> {
    m.kron(&CMat::identity(n))
}

/// `1 ⊗ M` on `V⊗V⊗V`.
pub fn lift23<T: Real>(m: &CMat<T>, n: usize) -> CMat<T> {
    CMat::identity(n).kron(m)
}

/// `M` acting on slots 1 and 3 of `V⊗V⊗V`.
pub fn lift13<T: Real>(m: &CMat<T>, n: usize) -> CMat<T> {
    let p23 = CMat::identity(n).kron(&CMat::flip(n));
    &(&p23 * &lift12(m, n)) * &p23
}

impl<T: Real> Index<(usize, usize)> for CMat<T> {
    type Output = Complex<T>;
    fn index(&self, (i, j): (usize, usize)) -> &Complex<T> {
        &self.data[i * self.n + j]
    }
}

impl<T: Real> IndexMut<(usize, usize)> for CMat<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex<T> {
        &mut self.data[i * self.n + j]
    }
}

impl<'a, T: Real> Mul<&'a CMat<T>> for &'a CMat<T> {
    type Output = CMat<T>;
    fn mul(self, rhs: &'a CMat<T>) -> CMat<T> {
        self.mul_ref(rhs)
    }
}

impl<'a, T: Real> Add<&'a CMat<T>> for &'a CMat<T> {
    type Output = CMat<T>;
    fn add(self, rhs: &'a CMat<T>) -> CMat<T> {
        assert_eq!(self.n, rhs.n, "dimension mismatch");
        CMat { n: self.n, data: self.data.iter().zip(&rhs.data).map(|(a, b)| *a + *b).collect() }
    }
}

impl<'a, T: Real> Sub<&'a CMat<T>> for &'a CMat<T> {
    type Output = CMat<T>;
    fn sub(self, rhs: &'a CMat<T>) -> CMat<T> {
        assert_eq!(self.n, rhs.n, "dimension mismatch");
        CMat { n: self.n, data: self.data.iter().zip(&rhs.data).map(|(a, b)| *a - *b).collect() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_roundtrip() {
        let m = CMat::<f64>::from_fn(4, |i, j| {
            Complex::new((i * 3 + j) as f64 * 0.1 + if i == j { 2.0 } else { 0.0 }, (i as f64 - j as f64) * 0.2)
        });
        let inv = m.inverse().unwrap();
        assert!((&m * &inv).rel_diff(&CMat::identity(4)) < 1e-14);
    }

    #[test]
    fn singular_rejected() {
        let m = CMat::<f64>::zeros(3);
        assert_eq!(m.inverse(), Err(Error::Singular));
    }

    #[test]
    fn flip_is_involution() {
        let p = CMat::<f64>::flip(3);
        assert_eq!(&p * &p, CMat::identity(9));
    }
}
