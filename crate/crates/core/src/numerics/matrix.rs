use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::real::{cone, czero, Real};

/// Dense row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix<R: Real> {
    rows: usize,
    cols: usize,
    data: Vec<Complex<R>>,
}

impl<R: Real> ComplexMatrix<R> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![czero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = cone();
        }
        m
    }

    pub fn from_fn(
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> Complex<R>,
    ) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from row-major entries, rejecting wrong lengths and
    /// non-finite values.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<Complex<R>>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::ShapeMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if data.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::InvalidArgument("non-finite matrix entry".into()));
        }
        Ok(Self { rows, cols, data })
    }

    /// Real-valued convenience constructor from nested rows.
    pub fn from_real_rows(rows: &[Vec<f64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        Self::from_fn(r, c, |i, j| Complex::new(R::of(rows[i][j]), R::zero()))
    }

    pub fn diag_real(values: &[R]) -> Self {
        let n = values.len();
        let mut m = Self::zeros(n, n);
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = Complex::new(v, R::zero());
        }
        m
    }

    /// Matrix whose columns are the given vectors (all of length `rows`).
    pub fn from_columns(rows: usize, columns: &[Vec<Complex<R>>]) -> Self {
        Self::from_fn(rows, columns.len(), |i, j| columns[j][i])
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

    pub fn as_slice(&self) -> &[Complex<R>] {
        &self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn column(&self, j: usize) -> Vec<Complex<R>> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn columns(&self) -> Vec<Vec<Complex<R>>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn set_column(&mut self, j: usize, v: &[Complex<R>]) {
        for (i, &z) in v.iter().enumerate() {
            self[(i, j)] = z;
        }
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, s: Complex<R>) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: R) -> Self {
        self.scale(Complex::new(s, R::zero()))
    }

    pub fn frobenius_norm(&self) -> R {
        self.data
            .iter()
            .fold(R::zero(), |acc, z| acc + z.norm_sqr())
            .sqrt()
    }

    pub fn trace(&self) -> Complex<R> {
        (0..self.rows.min(self.cols)).fold(czero(), |acc, i| acc + self[(i, i)])
    }

    /// ‖A − A*‖_F.
    pub fn hermitian_deviation(&self) -> R {
        if !self.is_square() {
            return R::infinity();
        }
        let mut acc = R::zero();
        for i in 0..self.rows {
            for j in 0..self.cols {
                acc = acc + (self[(i, j)] - self[(j, i)].conj()).norm_sqr();
            }
        }
        acc.sqrt()
    }

    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::ShapeMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.re.is_zero() && a.im.is_zero() {
                    continue;
                }
                let row = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                let dst = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
                for (d, &b) in dst.iter_mut().zip(row) {
                    *d = *d + a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Complex<R>]) -> Result<Vec<Complex<R>>> {
        if self.cols != v.len() {
            return Err(Error::ShapeMismatch(format!(
                "cannot apply {}x{} matrix to vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        Ok((0..self.rows)
            .map(|i| {
                self.data[i * self.cols..(i + 1) * self.cols]
                    .iter()
                    .zip(v)
                    .fold(czero(), |acc, (&a, &b)| acc + a * b)
            })
            .collect())
    }

    /// A* v without materializing the adjoint.
    pub fn adjoint_mul_vec(&self, v: &[Complex<R>]) -> Result<Vec<Complex<R>>> {
        if self.rows != v.len() {
            return Err(Error::ShapeMismatch(format!(
                "cannot apply adjoint of {}x{} matrix to vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        let mut out = vec![czero(); self.cols];
        for (i, &vi) in v.iter().enumerate() {
            for (j, o) in out.iter_mut().enumerate() {
                *o = *o + self[(i, j)].conj() * vi;
            }
        }
        Ok(out)
    }

    /// A A*.
    pub fn gram_rows(&self) -> Self {
        self.matmul(&self.adjoint()).expect("shapes agree")
    }

    /// A* A.
    pub fn gram_cols(&self) -> Self {
        self.adjoint().matmul(self).expect("shapes agree")
    }

    /// Kronecker product A ⊗ B.
    pub fn kron(&self, rhs: &Self) -> Self {
        Self::from_fn(self.rows * rhs.rows, self.cols * rhs.cols, |i, j| {
            self[(i / rhs.rows, j / rhs.cols)] * rhs[(i % rhs.rows, j % rhs.cols)]
        })
    }

    /// Stacks matrices with equal column counts on top of each other.
    pub fn vstack(blocks: &[Self]) -> Result<Self> {
        let cols = blocks.first().map_or(0, |b| b.cols);
        if blocks.iter().any(|b| b.cols != cols) {
            return Err(Error::ShapeMismatch("vstack column counts differ".into()));
        }
        let rows = blocks.iter().map(|b| b.rows).sum();
        let data = blocks.iter().flat_map(|b| b.data.iter().copied()).collect();
        Ok(Self { rows, cols, data })
    }

    /// Places matrices with equal row counts side by side.
    pub fn hstack(blocks: &[Self]) -> Result<Self> {
        let rows = blocks.first().map_or(0, |b| b.rows);
        if blocks.iter().any(|b| b.rows != rows) {
            return Err(Error::ShapeMismatch("hstack row counts differ".into()));
        }
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut out = Self::zeros(rows, cols);
        let mut offset = 0;
        for b in blocks {
            for i in 0..rows {
                for j in 0..b.cols {
                    out[(i, offset + j)] = b[(i, j)];
                }
            }
            offset += b.cols;
        }
        Ok(out)
    }

    pub fn submatrix(&self, row0: usize, col0: usize, rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |i, j| self[(row0 + i, col0 + j)])
    }

    /// Largest singular value, from the spectrum of the smaller Gram matrix.
    pub fn operator_norm(&self) -> R {
        if self.rows == 0 || self.cols == 0 {
            return R::zero();
        }
        let gram = if self.rows <= self.cols {
            self.gram_rows()
        } else {
            self.gram_cols()
        };
        let top = crate::numerics::hermitian_eig(&gram)
            .map(|d| d.max_eigenvalue())
            .unwrap_or_else(|_| gram.frobenius_norm());
        top.max(R::zero()).sqrt()
    }

    /// Returns the Hermitian part (A + A*)/2, used to scrub roundoff asymmetry.
    pub fn hermitian_part(&self) -> Self {
        let half = R::of(0.5);
        Self::from_fn(self.rows, self.cols, |i, j| {
            (self[(i, j)] + self[(j, i)].conj()).scale(half)
        })
    }
}

impl<R: Real> Index<(usize, usize)> for ComplexMatrix<R> {
    type Output = Complex<R>;

    fn index(&self, (i, j): (usize, usize)) -> &Complex<R> {
        &self.data[i * self.cols + j]
    }
}

impl<R: Real> IndexMut<(usize, usize)> for ComplexMatrix<R> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex<R> {
        &mut self.data[i * self.cols + j]
    }
}

fn zip_with<R: Real>(
    a: &ComplexMatrix<R>,
    b: &ComplexMatrix<R>,
    f: impl Fn(Complex<R>, Complex<R>) -> Complex<R>,
) -> ComplexMatrix<R> {
    assert_eq!(
        (a.rows, a.cols),
        (b.rows, b.cols),
        "elementwise operation on mismatched shapes"
    );
    ComplexMatrix {
        rows: a.rows,
        cols: a.cols,
        data: a.data.iter().zip(&b.data).map(|(&x, &y)| f(x, y)).collect(),
    }
}

impl<R: Real> Add for &ComplexMatrix<R> {
    type Output = ComplexMatrix<R>;

    fn add(self, rhs: Self) -> ComplexMatrix<R> {
        zip_with(self, rhs, |x, y| x + y)
    }
}

impl<R: Real> Sub for &ComplexMatrix<R> {
    type Output = ComplexMatrix<R>;

    fn sub(self, rhs: Self) -> ComplexMatrix<R> {
        zip_with(self, rhs, |x, y| x - y)
    }
}

/// Panicking product for internally consistent shapes; use
/// [`ComplexMatrix::matmul`] when shapes come from user input.
impl<R: Real> Mul for &ComplexMatrix<R> {
    type Output = ComplexMatrix<R>;

    fn mul(self, rhs: Self) -> ComplexMatrix<R> {
        self.matmul(rhs).expect("matrix product shapes")
    }
}

/// ⟨x, y⟩ = Σ xᵢ conj(yᵢ), linear in the first argument.
pub fn inner<R: Real>(x: &[Complex<R>], y: &[Complex<R>]) -> Complex<R> {
    x.iter()
        .zip(y)
        .fold(czero(), |acc, (&a, &b)| acc + a * b.conj())
}

pub fn norm_sq<R: Real>(x: &[Complex<R>]) -> R {
    x.iter().fold(R::zero(), |acc, z| acc + z.norm_sqr())
}

pub fn norm<R: Real>(x: &[Complex<R>]) -> R {
    norm_sq(x).sqrt()
}

pub fn sub_vec<R: Real>(x: &[Complex<R>], y: &[Complex<R>]) -> Vec<Complex<R>> {
    x.iter().zip(y).map(|(&a, &b)| a - b).collect()
}

pub fn add_vec<R: Real>(x: &[Complex<R>], y: &[Complex<R>]) -> Vec<Complex<R>> {
    x.iter().zip(y).map(|(&a, &b)| a + b).collect()
}

pub fn scale_vec<R: Real>(x: &[Complex<R>], s: Complex<R>) -> Vec<Complex<R>> {
    x.iter().map(|&a| a * s).collect()
}

pub fn basis_vector<R: Real>(dim: usize, k: usize) -> Vec<Complex<R>> {
    let mut v = vec![czero(); dim];
    v[k] = cone();
    v
}

pub fn real_vector<R: Real>(values: &[f64]) -> Vec<Complex<R>> {
    values
        .iter()
        .map(|&v| Complex::new(R::of(v), R::zero()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    type M = ComplexMatrix<f64>;

    #[test]
    fn rejects_bad_entries() {
        assert!(matches!(
            M::from_row_major(2, 2, vec![Complex::new(0.0, 0.0); 3]),
            Err(Error::ShapeMismatch(_))
        ));
        assert!(matches!(
            M::from_row_major(1, 1, vec![Complex::new(f64::NAN, 0.0)]),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn product_and_adjoint() {
        let a = M::from_fn(2, 3, |i, j| Complex::new(i as f64, j as f64));
        let b = a.adjoint();
        assert_eq!(b.rows(), 3);
        assert_eq!(b[(2, 1)], Complex::new(1.0, -2.0));
        let g = a.gram_rows();
        assert!(g.hermitian_deviation() < 1e-15);
        assert!(a.matmul(&a).is_err());
        let v = vec![Complex::new(1.0, 0.0); 3];
        assert_eq!(
            a.mul_vec(&v).unwrap(),
            a.adjoint().adjoint().mul_vec(&v).unwrap()
        );
        let w = vec![Complex::new(0.5, 1.0); 2];
        assert_eq!(a.adjoint_mul_vec(&w).unwrap(), b.mul_vec(&w).unwrap());
    }

    #[test]
    fn kron_of_identities() {
        let k = M::identity(2).kron(&M::identity(3));
        assert_eq!(k, M::identity(6));
    }

    #[test]
    fn stacking() {
        let a = M::identity(2);
        let v = M::vstack(&[a.clone(), a.clone()]).unwrap();
        assert_eq!((v.rows(), v.cols()), (4, 2));
        let h = M::hstack(&[a.clone(), a]).unwrap();
        assert_eq!((h.rows(), h.cols()), (2, 4));
        assert_eq!(h.submatrix(0, 2, 2, 2), M::identity(2));
    }

    #[test]
    fn operator_norm_of_diagonal() {
        let d = M::from_real_rows(&[vec![3.0, 0.0], vec![0.0, -4.0]]);
        assert!((d.operator_norm() - 4.0).abs() < 1e-12);
        let wide = M::from_real_rows(&[vec![1.0, 1.0]]);
        assert!((wide.operator_norm() - 2f64.sqrt()).abs() < 1e-12);
    }
}
