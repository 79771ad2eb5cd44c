//! Dense complex linear algebra for the small operators used throughout the crate.
//!
//! Matrices are square and stored row-major. Dimensions here never exceed a
//! few dozen, so everything is written for clarity over blocking or SIMD.

mod eigen;
mod random;

pub use eigen::{hermitian_eigen, trace_norm, HermitianEigen};
pub use random::{haar_random_unitary, haar_unitary_from, random_density, random_density_from};

use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::{CONSTRUCT_TOL, VALIDATE_TOL};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    entries: Vec<C64>,
}

impl ComplexMatrix {
    pub fn from_vec(dim: usize, entries: Vec<C64>) -> Result<Self> {
        if dim == 0 || entries.len() != dim * dim {
            return Err(Error::BadShape {
                dim,
                len: entries.len(),
            });
        }
        Ok(Self { dim, entries })
    }

    /// Builds a matrix from nested rows. Panics on ragged input; meant for literals.
    pub fn from_rows<R: AsRef<[C64]>>(rows: &[R]) -> Self {
        let dim = rows.len();
        let entries: Vec<C64> = rows
            .iter()
            .flat_map(|r| {
                let r = r.as_ref();
                assert_eq!(r.len(), dim, "ragged matrix literal");
                r.iter().copied()
            })
            .collect();
        Self::from_vec(dim, entries).expect("square literal")
    }

    pub fn from_real_rows<R: AsRef<[f64]>>(rows: &[R]) -> Self {
        let rows: Vec<Vec<C64>> = rows
            .iter()
            .map(|r| r.as_ref().iter().map(|&x| C64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0);
        Self {
            dim,
            entries: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::diagonal(&vec![ONE; dim])
    }

    pub fn diagonal(diag: &[C64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    pub fn real_diagonal(diag: &[f64]) -> Self {
        let d: Vec<C64> = diag.iter().map(|&x| C64::new(x, 0.0)).collect();
        Self::diagonal(&d)
    }

    /// Projector `|v><v|` onto the (not necessarily normalized) vector `v`.
    pub fn outer(v: &[C64]) -> Self {
        let n = v.len();
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = v[i] * v[j].conj();
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[C64] {
        &self.entries
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.dim).map(|i| self[(i, j)]).collect()
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, k: C64) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|&z| z * k).collect(),
        }
    }

    pub fn scale_real(&self, k: f64) -> Self {
        self.scale(C64::new(k, 0.0))
    }

    pub fn mat_mul(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                for j in 0..n {
                    out.entries[i * n + j] += a * other.entries[k * n + j];
                }
            }
        }
        Ok(out)
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    /// Kronecker product; `self` carries the slow (outer) index.
    pub fn kron(&self, other: &Self) -> Self {
        let (na, nb) = (self.dim, other.dim);
        let n = na * nb;
        let mut out = Self::zeros(n);
        for i in 0..na {
            for j in 0..na {
                let a = self[(i, j)];
                if a == ZERO {
                    continue;
                }
                for k in 0..nb {
                    for l in 0..nb {
                        out[(i * nb + k, j * nb + l)] = a * other[(k, l)];
                    }
                }
            }
        }
        out
    }

    /// `self * x * self^dagger`.
    pub fn conjugate(&self, x: &Self) -> Result<Self> {
        self.mat_mul(x)?.mat_mul(&self.dagger())
    }

    /// `self^dagger * x * self`.
    pub fn conjugate_by_dagger(&self, x: &Self) -> Result<Self> {
        self.dagger().mat_mul(x)?.mat_mul(self)
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        Ok(self.zip_with(other, |a, b| a + b))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        Ok(self.zip_with(other, |a, b| a - b))
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.dim;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol
    }

    /// `(M + M^dagger) / 2`, removing round-off asymmetry.
    pub fn hermitian_part(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] = (self[(i, j)] + self[(j, i)].conj()) * 0.5;
            }
        }
        out
    }

    /// `max |U^dagger U - I|`.
    pub fn unitarity_defect(&self) -> f64 {
        let g = self.dagger().mat_mul(self).expect("same dim");
        g.max_abs_diff(&Self::identity(self.dim))
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_defect() <= tol
    }

    /// `tr(self * other)` without forming the product.
    pub fn trace_product(&self, other: &Self) -> Result<C64> {
        self.check_same_dim(other)?;
        let n = self.dim;
        let mut acc = ZERO;
        for i in 0..n {
            for k in 0..n {
                acc += self[(i, k)] * other[(k, i)];
            }
        }
        Ok(acc)
    }

    /// `<v| self |v>`.
    pub fn expectation(&self, v: &[C64]) -> C64 {
        assert_eq!(v.len(), self.dim);
        let mut acc = ZERO;
        for i in 0..self.dim {
            let row: C64 = (0..self.dim).map(|j| self[(i, j)] * v[j]).sum();
            acc += v[i].conj() * row;
        }
        acc
    }

    /// Extracts the `n x n` block at block position `(bi, bj)` of a matrix
    /// partitioned into `n x n` blocks.
    pub fn block(&self, n: usize, bi: usize, bj: usize) -> Self {
        assert!(self.dim.is_multiple_of(n) && (bi + 1) * n <= self.dim && (bj + 1) * n <= self.dim);
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] = self[(bi * n + i, bj * n + j)];
            }
        }
        out
    }

    /// Reassembles a matrix from a row-major grid of equally sized blocks.
    pub fn from_blocks(grid: &[&[&ComplexMatrix]]) -> Result<Self> {
        let nb = grid.len();
        let n = grid[0][0].dim;
        let mut out = Self::zeros(nb * n);
        for (bi, row) in grid.iter().enumerate() {
            if row.len() != nb {
                return Err(Error::DimensionMismatch {
                    expected: nb,
                    found: row.len(),
                });
            }
            for (bj, blk) in row.iter().enumerate() {
                if blk.dim != n {
                    return Err(Error::DimensionMismatch {
                        expected: n,
                        found: blk.dim,
                    });
                }
                for i in 0..n {
                    for j in 0..n {
                        out[(bi * n + i, bj * n + j)] = blk[(i, j)];
                    }
                }
            }
        }
        Ok(out)
    }

    /// `tr_A{(op (x) I_B) self}` for a bipartite matrix on `A (x) B` with
    /// `A` of dimension `op.dim()` as the outer index.
    pub fn partial_trace_first_weighted(&self, op: &Self) -> Result<Self> {
        let da = op.dim;
        if !self.dim.is_multiple_of(da) {
            return Err(Error::DimensionMismatch {
                expected: da,
                found: self.dim,
            });
        }
        let db = self.dim / da;
        let mut out = Self::zeros(db);
        for a in 0..da {
            for b in 0..da {
                let w = op[(b, a)];
                if w == ZERO {
                    continue;
                }
                for i in 0..db {
                    for j in 0..db {
                        out[(i, j)] += w * self[(a * db + i, b * db + j)];
                    }
                }
            }
        }
        Ok(out)
    }

    /// `tr_A{self}` with `A` of dimension `da` as the outer index.
    pub fn partial_trace_first(&self, da: usize) -> Result<Self> {
        self.partial_trace_first_weighted(&Self::identity(da))
    }

    /// `tr_B{self}` with `B` of dimension `db` as the inner index.
    pub fn partial_trace_second(&self, db: usize) -> Result<Self> {
        if !self.dim.is_multiple_of(db) {
            return Err(Error::DimensionMismatch {
                expected: db,
                found: self.dim,
            });
        }
        let da = self.dim / db;
        let mut out = Self::zeros(da);
        for a in 0..da {
            for b in 0..da {
                out[(a, b)] = (0..db).map(|k| self[(a * db + k, b * db + k)]).sum();
            }
        }
        Ok(out)
    }

    /// Checks Hermiticity, unit trace and positivity of a density matrix.
    pub fn validate_density(&self) -> Result<()> {
        let defect = self.hermiticity_defect();
        if defect > CONSTRUCT_TOL {
            return Err(Error::InvalidDensity(format!(
                "not Hermitian (deviation {defect:e})"
            )));
        }
        let tr = self.trace();
        if (tr.re - 1.0).abs() > CONSTRUCT_TOL || tr.im.abs() > CONSTRUCT_TOL {
            return Err(Error::InvalidDensity(format!("trace {tr} differs from 1")));
        }
        let eig = hermitian_eigen(self)?;
        let min = eig.eigenvalues.last().copied().unwrap_or(0.0);
        if min < -VALIDATE_TOL {
            return Err(Error::InvalidDensity(format!(
                "negative eigenvalue {min:e}"
            )));
        }
        Ok(())
    }

    /// `tr(rho^2)`.
    pub fn purity(&self) -> f64 {
        self.trace_product(self).expect("same dim").re
    }

    fn check_same_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        Ok(())
    }

    fn zip_with(&self, other: &Self, f: impl Fn(C64, C64) -> C64) -> Self {
        Self {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.entries[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.entries[i * self.dim + j]
    }
}

// Operator sugar for internal use where dimensions are known to agree.
impl<'a> Mul<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        self.mat_mul(rhs)
            .expect("dimension mismatch in matrix product")
    }
}

impl<'a> Add<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        self.try_add(rhs).expect("dimension mismatch in matrix sum")
    }
}

impl<'a> Sub<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        self.try_sub(rhs)
            .expect("dimension mismatch in matrix difference")
    }
}

pub mod pauli {
    use super::*;

    pub fn x() -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[[0.0, 1.0], [1.0, 0.0]])
    }

    pub fn y() -> ComplexMatrix {
        ComplexMatrix::from_rows(&[[ZERO, -I], [I, ZERO]])
    }

    pub fn z() -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[[1.0, 0.0], [0.0, -1.0]])
    }

    /// `exp(-i theta sigma_z / 2)`.
    pub fn rz(theta: f64) -> ComplexMatrix {
        ComplexMatrix::diagonal(&[
            C64::from_polar(1.0, -theta / 2.0),
            C64::from_polar(1.0, theta / 2.0),
        ])
    }

    /// `exp(-i theta sigma_y / 2)`.
    pub fn ry(theta: f64) -> ComplexMatrix {
        let (s, c) = (theta / 2.0).sin_cos();
        ComplexMatrix::from_real_rows(&[[c, -s], [s, c]])
    }

    /// Qubit state with Bloch vector `r`: `(I + r . sigma) / 2`.
    pub fn bloch_state(r: [f64; 3]) -> ComplexMatrix {
        ComplexMatrix::from_rows(&[
            [
                C64::new((1.0 + r[2]) / 2.0, 0.0),
                C64::new(r[0] / 2.0, -r[1] / 2.0),
            ],
            [
                C64::new(r[0] / 2.0, r[1] / 2.0),
                C64::new((1.0 - r[2]) / 2.0, 0.0),
            ],
        ])
    }

    /// Bloch vector `(tr rho sigma_x, tr rho sigma_y, tr rho sigma_z)` of a qubit operator.
    pub fn bloch_vector(rho: &ComplexMatrix) -> [f64; 3] {
        assert_eq!(rho.dim(), 2);
        [
            2.0 * rho[(0, 1)].re,
            -2.0 * rho[(0, 1)].im,
            (rho[(0, 0)] - rho[(1, 1)]).re,
        ]
    }
}
