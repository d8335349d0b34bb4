use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::{Error, Result};

pub type C64 = Complex64;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

/// Dense complex matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows >= 1 && cols >= 1, "matrix dimensions must be positive");
        Self { rows, cols, data: vec![ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.data[i * cols + j] = f(i, j);
            }
        }
        m
    }

    pub fn from_rows(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 || data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!("{} entries for a {rows}x{cols} matrix", data.len())));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_real_diag(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &v) in diag.iter().enumerate() {
            m[(i, i)] = C64::new(v, 0.0);
        }
        m
    }

    pub fn from_diag(diag: &[C64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &v) in diag.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    /// `|a⟩⟨b|`
    pub fn outer(a: &[C64], b: &[C64]) -> Self {
        Self::from_fn(a.len(), b.len(), |i, j| a[i] * b[j].conj())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&z| z * s).collect() }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    /// `self += s * other`
    pub fn add_scaled(&mut self, s: f64, other: &Self) {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += b * s;
        }
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entry of `|M - M†|`, or infinity for non-square input.
    pub fn hermiticity_error(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows;
        let mut err: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                err = err.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        err
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_error() <= tol
    }

    pub fn matvec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| self.data[i * self.cols..(i + 1) * self.cols].iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `⟨v|M|v⟩`, real part only; meaningful for Hermitian `M`.
    pub fn expectation(&self, v: &[C64]) -> f64 {
        let mv = self.matvec(v);
        inner(v, &mv).re
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other.data[k * other.cols + j];
                }
            }
        }
        Ok(out)
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs).expect("matrix product dimension mismatch")
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:+.6}{:+.6}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// `⟨a|b⟩`, conjugate-linear in the first argument.
pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn normalize(v: &mut [C64]) {
    let n = norm(v);
    if n > 0.0 {
        for z in v.iter_mut() {
            *z /= n;
        }
    }
}

/// Kronecker product: entry `(i*rows_b + k, j*cols_b + l)` is `a[i,j] * b[k,l]`.
pub fn tensor_product(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (rb, cb) = (b.rows, b.cols);
    ComplexMatrix::from_fn(a.rows * rb, a.cols * cb, |r, c| a[(r / rb, c / cb)] * b[(r % rb, c % cb)])
}

/// Kronecker product of vectors, same index convention as [`tensor_product`].
pub fn kron_vec(a: &[C64], b: &[C64]) -> Vec<C64> {
    a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect()
}

fn check_bipartite(m: &ComplexMatrix, dim_a: usize, dim_b: usize) -> Result<()> {
    let n = dim_a * dim_b;
    if dim_a == 0 || dim_b == 0 || m.rows != n || m.cols != n {
        return Err(Error::DimensionMismatch(format!(
            "partial transpose of a {}x{} matrix over {dim_a}x{dim_b}",
            m.rows, m.cols
        )));
    }
    Ok(())
}

/// Transposes the first tensor factor: `((i,k),(j,l)) -> ((j,k),(i,l))`.
pub fn partial_transpose(m: &ComplexMatrix, dim_a: usize, dim_b: usize) -> Result<ComplexMatrix> {
    check_bipartite(m, dim_a, dim_b)?;
    let n = dim_a * dim_b;
    let mut out = ComplexMatrix::zeros(n, n);
    for i in 0..dim_a {
        for k in 0..dim_b {
            for j in 0..dim_a {
                for l in 0..dim_b {
                    out[(j * dim_b + k, i * dim_b + l)] = m[(i * dim_b + k, j * dim_b + l)];
                }
            }
        }
    }
    Ok(out)
}

/// Transposes the second tensor factor: `((i,k),(j,l)) -> ((i,l),(j,k))`.
pub fn partial_transpose_second(m: &ComplexMatrix, dim_a: usize, dim_b: usize) -> Result<ComplexMatrix> {
    check_bipartite(m, dim_a, dim_b)?;
    let n = dim_a * dim_b;
    let mut out = ComplexMatrix::zeros(n, n);
    for i in 0..dim_a {
        for k in 0..dim_b {
            for j in 0..dim_a {
                for l in 0..dim_b {
                    out[(i * dim_b + l, j * dim_b + k)] = m[(i * dim_b + k, j * dim_b + l)];
                }
            }
        }
    }
    Ok(out)
}

/// Cofactor-expansion determinant of a 3x3 matrix.
pub fn determinant3(m: &ComplexMatrix) -> Result<C64> {
    if m.rows != 3 || m.cols != 3 {
        return Err(Error::DimensionMismatch(format!("determinant3 of a {}x{} matrix", m.rows, m.cols)));
    }
    let a = |i, j| m[(i, j)];
    Ok(a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)) - a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0))
        + a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn identity_tensor_identity() {
        let i4 = tensor_product(&ComplexMatrix::identity(2), &ComplexMatrix::identity(2));
        assert_eq!(i4, ComplexMatrix::identity(4));
    }

    #[test]
    fn clock_tensor_identity_is_blockwise_diagonal() {
        let w = C64::from_polar(1.0, 2.0 * std::f64::consts::PI / 3.0);
        let clock = ComplexMatrix::from_diag(&[ONE, w, w * w]);
        let big = tensor_product(&clock, &ComplexMatrix::identity(3));
        let expected = [ONE, ONE, ONE, w, w, w, w * w, w * w, w * w];
        for r in 0..9 {
            for s in 0..9 {
                let want = if r == s { expected[r] } else { ZERO };
                assert!((big[(r, s)] - want).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn tensor_dimensions_multiply() {
        let a = ComplexMatrix::zeros(2, 3);
        let b = ComplexMatrix::zeros(4, 5);
        let t = tensor_product(&a, &b);
        assert_eq!((t.rows(), t.cols()), (8, 15));
    }

    #[test]
    fn partial_transpose_fixes_identity_and_diagonals() {
        let id = ComplexMatrix::identity(9);
        assert_eq!(partial_transpose(&id, 3, 3).unwrap(), id);
        let diag = ComplexMatrix::from_real_diag(&[0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9]);
        assert_eq!(partial_transpose(&diag, 3, 3).unwrap(), diag);
    }

    #[test]
    fn partial_transpose_moves_the_right_entry() {
        // |0 1><1 0| on C^2 x C^3: first-factor transpose gives |1 1><0 0|.
        let mut m = ComplexMatrix::zeros(6, 6);
        m[(1, 3)] = c(2.0, 1.0);
        let pt = partial_transpose(&m, 2, 3).unwrap();
        assert_eq!(pt[(4, 0)], c(2.0, 1.0));
        assert_eq!(pt.as_slice().iter().filter(|z| **z != ZERO).count(), 1);
    }

    #[test]
    fn partial_transpose_rejects_bad_shapes() {
        assert!(partial_transpose(&ComplexMatrix::identity(8), 3, 3).is_err());
        assert!(partial_transpose(&ComplexMatrix::zeros(9, 8), 3, 3).is_err());
    }

    #[test]
    fn determinant3_basics() {
        assert!((determinant3(&ComplexMatrix::identity(3)).unwrap() - ONE).norm() < 1e-15);
        let sing = ComplexMatrix::from_real_diag(&[1.0, 2.0, 0.0]);
        assert_eq!(determinant3(&sing).unwrap(), ZERO);
        assert!(determinant3(&ComplexMatrix::identity(2)).is_err());
    }

    #[test]
    fn matmul_and_adjoint() {
        let a = ComplexMatrix::from_rows(2, 2, vec![c(1.0, 1.0), c(0.0, 2.0), c(3.0, 0.0), c(0.0, -1.0)]).unwrap();
        let p = &a * &a.adjoint();
        assert!(p.is_hermitian(1e-15));
        assert!((p.trace().re - a.frobenius_norm().powi(2)).abs() < 1e-12);
        assert!(a.matmul(&ComplexMatrix::zeros(3, 3)).is_err());
    }
}
