use num_complex::Complex;

use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};
use crate::real::{czero, Real};

/// Jacobi sweep budget.
pub const MAX_SWEEPS: usize = 30;

/// Eigenvalues (ascending) and unitary eigenvector matrix of a Hermitian
/// matrix. Column `i` of `eigenvectors` belongs to `eigenvalues[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDecomposition<R: Real> {
    eigenvalues: Vec<R>,
    eigenvectors: ComplexMatrix<R>,
}

impl<R: Real> SpectralDecomposition<R> {
    /// Assembles a decomposition from already-known parts. Eigenvalues are
    /// re-sorted ascending together with their columns.
    pub fn from_parts(eigenvalues: Vec<R>, eigenvectors: ComplexMatrix<R>) -> Result<Self> {
        let n = eigenvalues.len();
        if eigenvectors.rows() != n || eigenvectors.cols() != n {
            return Err(Error::ShapeMismatch(format!(
                "{n} eigenvalues with a {}x{} eigenvector matrix",
                eigenvectors.rows(),
                eigenvectors.cols()
            )));
        }
        Ok(sorted(eigenvalues, eigenvectors))
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[R] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &ComplexMatrix<R> {
        &self.eigenvectors
    }

    pub fn eigenvector(&self, i: usize) -> Vec<Complex<R>> {
        self.eigenvectors.column(i)
    }

    pub fn max_eigenvalue(&self) -> R {
        self.eigenvalues.last().copied().unwrap_or_else(R::zero)
    }

    pub fn min_eigenvalue(&self) -> R {
        self.eigenvalues.first().copied().unwrap_or_else(R::zero)
    }

    /// V Λ V*.
    pub fn reconstruct(&self) -> ComplexMatrix<R> {
        super::apply_spectral_function(self, |x| x)
    }

    /// Indices whose eigenvalue satisfies `keep`, in ascending order.
    pub fn select(&self, keep: impl Fn(R) -> bool) -> Vec<usize> {
        (0..self.dim())
            .filter(|&i| keep(self.eigenvalues[i]))
            .collect()
    }

    /// Columns of the eigenvector matrix at `indices`, as a `dim x k` matrix.
    pub fn eigenvector_block(&self, indices: &[usize]) -> ComplexMatrix<R> {
        let cols: Vec<_> = indices.iter().map(|&i| self.eigenvector(i)).collect();
        ComplexMatrix::from_columns(self.dim(), &cols)
    }
}

fn sorted<R: Real>(values: Vec<R>, vectors: ComplexMatrix<R>) -> SpectralDecomposition<R> {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        values[a]
            .partial_cmp(&values[b])
            .expect("finite eigenvalues")
    });
    let eigenvalues = order.iter().map(|&i| values[i]).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, n, |i, j| vectors[(i, order[j])]);
    SpectralDecomposition {
        eigenvalues,
        eigenvectors,
    }
}

/// Floor a tolerance at a few ulps of the working precision so that single
/// precision runs terminate.
pub(crate) fn precision_floor<R: Real>(tol: f64, ulps: f64) -> R {
    R::of(tol.max(ulps * R::epsilon().to64()))
}

fn off_diagonal_norm<R: Real>(a: &ComplexMatrix<R>) -> R {
    let n = a.rows();
    let mut acc = R::zero();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc = acc + a[(i, j)].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

/// Cyclic complex Jacobi diagonalization of a Hermitian matrix.
pub fn hermitian_eig<R: Real>(a: &ComplexMatrix<R>) -> Result<SpectralDecomposition<R>> {
    hermitian_eig_with(a, 1e-10)
}

/// As [`hermitian_eig`] with an explicit relative Hermitian-symmetry tolerance.
pub fn hermitian_eig_with<R: Real>(
    a: &ComplexMatrix<R>,
    hermitian_tol: f64,
) -> Result<SpectralDecomposition<R>> {
    if !a.is_square() {
        return Err(Error::ShapeMismatch(format!(
            "eigendecomposition of a {}x{} matrix",
            a.rows(),
            a.cols()
        )));
    }
    if !a.is_finite() {
        return Err(Error::InvalidArgument("non-finite matrix entry".into()));
    }
    let n = a.rows();
    let scale = a.frobenius_norm();
    let deviation = a.hermitian_deviation();
    let herm_tol: R = precision_floor(hermitian_tol, 16.0);
    if deviation > herm_tol * scale.max(R::one()) {
        return Err(Error::NotHermitian {
            deviation: deviation.to64(),
        });
    }

    let mut m = a.hermitian_part();
    for i in 0..n {
        m[(i, i)] = Complex::new(m[(i, i)].re, R::zero());
    }
    let mut v = ComplexMatrix::identity(n);
    let stop = precision_floor::<R>(1e-12, 4.0) * scale;

    let mut converged = off_diagonal_norm(&m) <= stop;
    let mut sweep = 0;
    while !converged {
        if sweep == MAX_SWEEPS {
            return Err(Error::NoConvergence { sweeps: MAX_SWEEPS });
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut m, &mut v, p, q);
            }
        }
        sweep += 1;
        converged = off_diagonal_norm(&m) <= stop;
    }

    let values = (0..n).map(|i| m[(i, i)].re).collect();
    Ok(sorted(values, v))
}

/// Annihilates m[p,q] with the unitary G = diag(1, e^{-iφ}) · [[c, s], [-s, c]]
/// acting on coordinates (p, q).
fn rotate<R: Real>(m: &mut ComplexMatrix<R>, v: &mut ComplexMatrix<R>, p: usize, q: usize) {
    let b = m[(p, q)];
    let mag = b.norm();
    if mag <= R::min_positive_value() {
        return;
    }
    let phase = b / mag;
    let app = m[(p, p)].re;
    let aqq = m[(q, q)].re;
    let theta = (aqq - app) / (mag + mag);
    let t = if theta.is_infinite() {
        R::zero()
    } else {
        let sign = if theta < R::zero() {
            -R::one()
        } else {
            R::one()
        };
        sign / (theta.abs() + (theta * theta + R::one()).sqrt())
    };
    let c = R::one() / (t * t + R::one()).sqrt();
    let s = t * c;
    let cc = Complex::new(c, R::zero());
    let ss = Complex::new(s, R::zero());
    let ph = phase.conj();
    let g_pp = cc;
    let g_pq = ss;
    let g_qp = -ss * ph;
    let g_qq = cc * ph;

    let n = m.rows();
    for k in 0..n {
        let akp = m[(k, p)];
        let akq = m[(k, q)];
        m[(k, p)] = akp * g_pp + akq * g_qp;
        m[(k, q)] = akp * g_pq + akq * g_qq;
    }
    for k in 0..n {
        let apk = m[(p, k)];
        let aqk = m[(q, k)];
        m[(p, k)] = g_pp.conj() * apk + g_qp.conj() * aqk;
        m[(q, k)] = g_pq.conj() * apk + g_qq.conj() * aqk;
    }
    m[(p, q)] = czero();
    m[(q, p)] = czero();
    m[(p, p)] = Complex::new(app - t * mag, R::zero());
    m[(q, q)] = Complex::new(aqq + t * mag, R::zero());

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * g_pp + vkq * g_qp;
        v[(k, q)] = vkp * g_pq + vkq * g_qq;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::testing::{random_hermitian, unitarity_defect};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    type M = ComplexMatrix<f64>;

    #[test]
    fn diagonal_input_sorted() {
        let d = hermitian_eig(&M::diag_real(&[2.0, 1.0])).unwrap();
        assert_eq!(d.eigenvalues(), &[1.0, 2.0]);
        let v = d.eigenvectors();
        assert_eq!(v[(1, 0)].norm(), 1.0);
        assert_eq!(v[(0, 1)].norm(), 1.0);
    }

    #[test]
    fn swap_matrix_spectrum() {
        let d = hermitian_eig(&M::from_real_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]])).unwrap();
        assert!((d.eigenvalues()[0] + 1.0).abs() < 1e-14);
        assert!((d.eigenvalues()[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn complex_two_by_two() {
        // [[2, i], [-i, 2]] has eigenvalues 1 and 3.
        let a = M::from_fn(2, 2, |i, j| match (i, j) {
            (0, 1) => Complex::new(0.0, 1.0),
            (1, 0) => Complex::new(0.0, -1.0),
            _ => Complex::new(2.0, 0.0),
        });
        let d = hermitian_eig(&a).unwrap();
        assert!((d.eigenvalues()[0] - 1.0).abs() < 1e-14);
        assert!((d.eigenvalues()[1] - 3.0).abs() < 1e-14);
        assert!((&d.reconstruct() - &a).frobenius_norm() < 1e-14);
    }

    #[test]
    fn random_six_by_six_reconstructs() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let a = random_hermitian(6, &mut rng);
        let d = hermitian_eig(&a).unwrap();
        let err = (&d.reconstruct() - &a).frobenius_norm();
        assert!(
            err <= 1e-10 * a.frobenius_norm(),
            "reconstruction error {err}"
        );
        assert!(unitarity_defect(d.eigenvectors()) <= 1e-10);
        assert!(d.eigenvalues().windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn rejects_non_hermitian_and_rectangular() {
        let a = M::from_real_rows(&[vec![0.0, 1.0], vec![0.0, 0.0]]);
        assert!(matches!(hermitian_eig(&a), Err(Error::NotHermitian { .. })));
        assert!(matches!(
            hermitian_eig(&M::zeros(2, 3)),
            Err(Error::ShapeMismatch(_))
        ));
    }

    #[test]
    fn zero_and_empty_matrices() {
        let d = hermitian_eig(&M::zeros(3, 3)).unwrap();
        assert_eq!(d.eigenvalues(), &[0.0; 3]);
        let e = hermitian_eig(&M::zeros(0, 0)).unwrap();
        assert_eq!(e.dim(), 0);
    }

    #[test]
    fn repeated_eigenvalues() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let q = hermitian_eig(&random_hermitian(5, &mut rng)).unwrap();
        let d = SpectralDecomposition::from_parts(
            vec![1.0, 1.0, 1.0, 2.0, 2.0],
            q.eigenvectors().clone(),
        )
        .unwrap();
        let a = d.reconstruct();
        let back = hermitian_eig(&a).unwrap();
        for (x, y) in back.eigenvalues().iter().zip([1.0, 1.0, 1.0, 2.0, 2.0]) {
            assert!((x - y).abs() < 1e-12);
        }
        assert!((&back.reconstruct() - &a).frobenius_norm() < 1e-12);
    }

    #[test]
    fn single_precision_converges() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a64 = random_hermitian(5, &mut rng);
        let a = ComplexMatrix::<f32>::from_fn(5, 5, |i, j| {
            Complex::new(a64[(i, j)].re as f32, a64[(i, j)].im as f32)
        });
        let d = hermitian_eig(&a).unwrap();
        let err = (&d.reconstruct() - &a).frobenius_norm();
        assert!(
            err <= 1e-5 * a.frobenius_norm(),
            "f32 reconstruction error {err}"
        );
    }
}
