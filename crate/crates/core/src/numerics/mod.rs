//! Dense complex linear algebra: matrices, Hermitian eigendecomposition and
//! the spectral calculus every other module is built on.

mod eig;
mod matrix;
mod spectral;

pub use eig::{hermitian_eig, hermitian_eig_with, SpectralDecomposition, MAX_SWEEPS};
pub use matrix::{
    add_vec, basis_vector, inner, norm, norm_sq, real_vector, scale_vec, sub_vec, ComplexMatrix,
};
pub use spectral::{
    apply_spectral_function, indices_above, pinv_psd, pinv_psd_with, psd_decomposition,
    spectral_projector, spectral_projector_with, sqrt_psd, sqrt_psd_with,
};

pub(crate) use eig::precision_floor;

use num_complex::Complex;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::real::{czero, Real};

/// Complex Gaussian with independent unit-variance real and imaginary parts.
pub fn gaussian<R: Real, G: Rng + ?Sized>(rng: &mut G) -> Complex<R> {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex::new(R::of(re), R::of(im))
}

pub fn gaussian_vector<R: Real, G: Rng + ?Sized>(len: usize, rng: &mut G) -> Vec<Complex<R>> {
    (0..len).map(|_| gaussian(rng)).collect()
}

pub fn gaussian_matrix<R: Real, G: Rng + ?Sized>(
    rows: usize,
    cols: usize,
    rng: &mut G,
) -> ComplexMatrix<R> {
    ComplexMatrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

/// Modified Gram–Schmidt with one re-orthogonalization pass.
///
/// Columns are normalized before projection, so the result depends only on
/// the column space. A column whose remainder drops below `drop_tol` (relative
/// to its normalized length 1) is discarded. Returns the orthonormal columns
/// and the indices of the input columns that survived.
pub fn orthonormalize<R: Real>(
    columns: &[Vec<Complex<R>>],
    drop_tol: R,
) -> (Vec<Vec<Complex<R>>>, Vec<usize>) {
    let mut basis: Vec<Vec<Complex<R>>> = Vec::new();
    let mut kept = Vec::new();
    for (idx, col) in columns.iter().enumerate() {
        let n0 = norm(col);
        if n0 <= R::min_positive_value() {
            continue;
        }
        let mut w = scale_vec(col, Complex::new(R::one() / n0, R::zero()));
        for _ in 0..2 {
            for q in &basis {
                let c = inner(&w, q);
                for (wi, &qi) in w.iter_mut().zip(q) {
                    *wi = *wi - c * qi;
                }
            }
        }
        let nw = norm(&w);
        if nw > drop_tol {
            basis.push(scale_vec(&w, Complex::new(R::one() / nw, R::zero())));
            kept.push(idx);
        }
    }
    (basis, kept)
}

/// ‖(I − QQ*) x‖ for orthonormal columns `q`.
pub fn projection_residual<R: Real>(q: &[Vec<Complex<R>>], x: &[Complex<R>]) -> R {
    let mut w = x.to_vec();
    for _ in 0..2 {
        for b in q {
            let c = inner(&w, b);
            for (wi, &bi) in w.iter_mut().zip(b) {
                *wi = *wi - c * bi;
            }
        }
    }
    norm(&w)
}

pub fn zero_vector<R: Real>(len: usize) -> Vec<Complex<R>> {
    vec![czero(); len]
}

#[cfg(test)]
pub(crate) mod testing {
    use super::*;

    pub fn random_hermitian<G: Rng>(n: usize, rng: &mut G) -> ComplexMatrix<f64> {
        gaussian_matrix::<f64, _>(n, n, rng).hermitian_part()
    }

    pub fn random_psd<G: Rng>(n: usize, rng: &mut G) -> ComplexMatrix<f64> {
        gaussian_matrix::<f64, _>(n, n, rng).gram_rows()
    }

    pub fn unitarity_defect(v: &ComplexMatrix<f64>) -> f64 {
        (&v.gram_cols() - &ComplexMatrix::identity(v.cols())).frobenius_norm()
    }
}
