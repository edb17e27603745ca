//! Dense complex matrices used for finite-dimensional R-matrices.

use std::ops::{Add, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct DenseCMatrix(DMatrix<Complex64>);

impl DenseCMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self(DMatrix::zeros(rows, cols))
    }

    pub fn identity(n: usize) -> Self {
        Self(DMatrix::identity(n, n))
    }

    /// Builds a matrix from row-major entries.
    pub fn from_row_major(rows: usize, cols: usize, entries: &[Complex64]) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        if entries.iter().any(|e| !(e.re.is_finite() && e.im.is_finite())) {
            return Err(Error::Invariant("matrix entries must be finite".into()));
        }
        Ok(Self(DMatrix::from_row_slice(rows, cols, entries)))
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl FnMut(usize, usize) -> Complex64) -> Self {
        Self(DMatrix::from_fn(rows, cols, f))
    }

    pub fn from_inner(m: DMatrix<Complex64>) -> Self {
        Self(m)
    }

    pub fn inner(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.0[(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.0[(i, j)] = v;
    }

    pub fn row_major(&self) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(self.rows() * self.cols());
        for i in 0..self.rows() {
            for j in 0..self.cols() {
                out.push(self.0[(i, j)]);
            }
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |m, v| m.max(v.norm()))
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self(&self.0 * s)
    }

    pub fn transpose(&self) -> Self {
        Self(self.0.transpose())
    }

    pub fn kron(&self, other: &Self) -> Self {
        Self(self.0.kronecker(&other.0))
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        if self.cols() != other.rows() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows(),
                self.cols(),
                other.rows(),
                other.cols()
            )));
        }
        Ok(Self(&self.0 * &other.0))
    }

    /// Number of entries with modulus above `tol · max|entry|`.
    pub fn count_nonzero(&self, tol: f64) -> usize {
        let cut = tol * self.max_abs();
        self.0.iter().filter(|v| v.norm() > cut).count()
    }

    pub fn try_inverse(&self) -> Result<Self> {
        self.0.clone().try_inverse().map(Self).ok_or(Error::SingularBasis)
    }

    /// Permutation exchanging the factors of `C^{d1} ⊗ C^{d2}`.
    pub fn swap_permutation(d1: usize, d2: usize) -> Self {
        let mut m = Self::zeros(d1 * d2, d1 * d2);
        for a in 0..d1 {
            for c in 0..d2 {
                m.0[(c * d1 + a, a * d2 + c)] = Complex64::new(1.0, 0.0);
            }
        }
        m
    }
}

impl Add for &DenseCMatrix {
    type Output = DenseCMatrix;
    fn add(self, rhs: Self) -> DenseCMatrix {
        DenseCMatrix(&self.0 + &rhs.0)
    }
}

impl Sub for &DenseCMatrix {
    type Output = DenseCMatrix;
    fn sub(self, rhs: Self) -> DenseCMatrix {
        DenseCMatrix(&self.0 - &rhs.0)
    }
}

impl Mul for &DenseCMatrix {
    type Output = DenseCMatrix;
    /// Panics on incompatible shapes; use [`DenseCMatrix::try_mul`] otherwise.
    fn mul(self, rhs: Self) -> DenseCMatrix {
        DenseCMatrix(&self.0 * &rhs.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cx::c;

    #[test]
    fn row_major_round_trip() {
        let e: Vec<Complex64> = (0..6).map(|k| c(k as f64, -(k as f64))).collect();
        let m = DenseCMatrix::from_row_major(2, 3, &e).unwrap();
        assert_eq!(m.get(1, 0), c(3.0, -3.0));
        assert_eq!(m.row_major(), e);
        assert!(DenseCMatrix::from_row_major(2, 2, &e).is_err());
    }

    #[test]
    fn swap_permutation_exchanges_factors() {
        let a = DenseCMatrix::from_fn(2, 2, |i, j| c((i + 2 * j) as f64, 1.0));
        let b = DenseCMatrix::from_fn(3, 3, |i, j| c(i as f64 - j as f64, 0.5));
        let p = DenseCMatrix::swap_permutation(2, 3);
        let lhs = &(&p * &a.kron(&b)) * &p.transpose();
        assert!((&lhs - &b.kron(&a)).max_abs() < 1e-14);
    }

    #[test]
    fn mismatched_product_is_an_error() {
        let a = DenseCMatrix::identity(2);
        let b = DenseCMatrix::identity(3);
        assert!(matches!(a.try_mul(&b), Err(Error::DimensionMismatch(_))));
    }
}
