use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Index, IndexMut, Mul, Sub};

#[allow(unused_imports)]
use num_traits::Float;
use num_traits::Zero;

use super::{Complex, LinalgError};

/// Dense complex matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex::new(1.0, 0.0);
        }
        m
    }

    /// Builds a matrix from row-major entries, rejecting wrong lengths and
    /// non-finite values.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<Complex>) -> Result<Self, LinalgError> {
        if data.len() != rows * cols {
            return Err(LinalgError::LengthMismatch {
                expected: rows * cols,
                found: data.len(),
            });
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(LinalgError::NonFinite);
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_real_diag(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = Complex::new(d, 0.0);
        }
        m
    }

    pub fn from_diag(diag: &[Complex]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(rows: usize, columns: &[Vec<Complex>]) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), rows, "column length mismatch");
            for (i, &z) in col.iter().enumerate() {
                m[(i, j)] = z;
            }
        }
        m
    }

    /// Outer product `|a><b|`.
    pub fn outer(a: &[Complex], b: &[Complex]) -> Self {
        let mut m = Self::zeros(a.len(), b.len());
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                m[(i, j)] = x * y.conj();
            }
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[Complex] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<Complex> {
        self.data
    }

    /// Reinterprets the row-major storage under a new shape.
    pub fn reshape(self, rows: usize, cols: usize) -> Result<Self, LinalgError> {
        if rows * cols != self.data.len() {
            return Err(LinalgError::LengthMismatch {
                expected: rows * cols,
                found: self.data.len(),
            });
        }
        Ok(Self {
            rows,
            cols,
            data: self.data,
        })
    }

    pub fn column(&self, j: usize) -> Vec<Complex> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn set_column(&mut self, j: usize, col: &[Complex]) {
        for (i, &z) in col.iter().enumerate() {
            self[(i, j)] = z;
        }
    }

    pub fn dagger(&self) -> Self {
        let mut m = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(j, i)] = self[(i, j)].conj();
            }
        }
        m
    }

    pub fn transpose(&self) -> Self {
        let mut m = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(j, i)] = self[(i, j)];
            }
        }
        m
    }

    pub fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }

    pub fn map(&self, f: impl Fn(Complex) -> Complex) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| f(z)).collect(),
        }
    }

    pub fn scale(&self, k: Complex) -> Self {
        self.map(|z| z * k)
    }

    pub fn scale_real(&self, k: f64) -> Self {
        self.map(|z| z * k)
    }

    pub fn matmul(&self, rhs: &Self) -> Result<Self, LinalgError> {
        if self.cols != rhs.rows {
            return Err(LinalgError::ShapeMismatch {
                left: (self.rows, self.cols),
                right: (rhs.rows, rhs.cols),
            });
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a.is_zero() {
                    continue;
                }
                let row = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                let dst = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
                for (d, &b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Complex]) -> Vec<Complex> {
        assert_eq!(v.len(), self.cols, "vector length mismatch");
        (0..self.rows)
            .map(|i| {
                self.data[i * self.cols..(i + 1) * self.cols]
                    .iter()
                    .zip(v)
                    .map(|(&a, &b)| a * b)
                    .sum()
            })
            .collect()
    }

    pub fn kron(&self, rhs: &Self) -> Self {
        let rows = self.rows * rhs.rows;
        let cols = self.cols * rhs.cols;
        let mut out = Self::zeros(rows, cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self[(i, j)];
                for k in 0..rhs.rows {
                    for l in 0..rhs.cols {
                        out[(i * rhs.rows + k, j * rhs.cols + l)] = a * rhs[(k, l)];
                    }
                }
            }
        }
        out
    }

    pub fn trace(&self) -> Result<Complex, LinalgError> {
        self.require_square()?;
        Ok((0..self.rows).map(|i| self[(i, i)]).sum())
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `ab - ba`.
    pub fn commutator(a: &Self, b: &Self) -> Result<Self, LinalgError> {
        a.require_square()?;
        b.require_square()?;
        let ab = a.matmul(b)?;
        let ba = b.matmul(a)?;
        Ok(&ab - &ba)
    }

    /// Hermitian part `(m + m†)/2`.
    pub fn hermitian_part(&self) -> Result<Self, LinalgError> {
        self.require_square()?;
        Ok((self + &self.dagger()).scale_real(0.5))
    }

    /// `‖m − m†‖_F`.
    pub fn hermiticity_defect(&self) -> Result<f64, LinalgError> {
        self.require_square()?;
        Ok((self - &self.dagger()).frobenius_norm())
    }

    /// `‖m†m − I‖_F`.
    pub fn unitarity_defect(&self) -> f64 {
        let g = &self.dagger() * self;
        (&g - &Self::identity(self.cols)).frobenius_norm()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Copies the block of rows `r0..r1` and columns `c0..c1`.
    pub fn submatrix(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> Self {
        let mut m = Self::zeros(r1 - r0, c1 - c0);
        for i in r0..r1 {
            for j in c0..c1 {
                m[(i - r0, j - c0)] = self[(i, j)];
            }
        }
        m
    }

    pub(crate) fn require_square(&self) -> Result<(), LinalgError> {
        if self.rows != self.cols {
            return Err(LinalgError::NonSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        Ok(())
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

// Operator forms panic on shape mismatch; use `matmul` for the fallible path.
impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs).expect("matrix product shape mismatch")
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

/// Euclidean norm of a complex vector.
pub fn vec_norm(v: &[Complex]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `<a|b>` (conjugate-linear in the first argument).
pub fn inner(a: &[Complex], b: &[Complex]) -> Complex {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    #[test]
    fn rejects_non_finite_entries() {
        let err = ComplexMatrix::from_vec(1, 2, vec![c(1.0, 0.0), c(f64::NAN, 0.0)]).unwrap_err();
        assert_eq!(err, LinalgError::NonFinite);
        let err = ComplexMatrix::from_vec(2, 2, vec![c(1.0, 0.0)]).unwrap_err();
        assert!(matches!(err, LinalgError::LengthMismatch { expected: 4, found: 1 }));
    }

    #[test]
    fn commutator_of_diagonals_vanishes() {
        let a = ComplexMatrix::from_real_diag(&[1.0, 2.0]);
        let b = ComplexMatrix::from_diag(&[c(0.3, -1.0), c(7.0, 2.0)]);
        let k = ComplexMatrix::commutator(&a, &b).unwrap();
        assert_eq!(k.frobenius_norm(), 0.0);
    }

    #[test]
    fn commutator_requires_square() {
        let a = ComplexMatrix::zeros(2, 3);
        assert!(matches!(
            ComplexMatrix::commutator(&a, &a),
            Err(LinalgError::NonSquare { rows: 2, cols: 3 })
        ));
    }

    #[test]
    fn kron_matches_index_convention() {
        let a = ComplexMatrix::from_vec(2, 2, vec![c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0), c(4.0, 0.0)]).unwrap();
        let b = ComplexMatrix::identity(2);
        let k = a.kron(&b);
        assert_eq!(k[(0, 2)], c(2.0, 0.0));
        assert_eq!(k[(3, 1)], c(3.0, 0.0));
        assert_eq!(k[(1, 2)], c(0.0, 0.0));
    }

    #[test]
    fn matmul_shape_error() {
        let a = ComplexMatrix::zeros(2, 3);
        assert!(a.matmul(&a).is_err());
    }
}
