//! Scalar functional calculus f(A) = Σ f(λᵢ) Pᵢ on Hermitian matrices.

use num_complex::Complex;

use super::eig::{hermitian_eig_with, SpectralDecomposition};
use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};
use crate::real::Real;
use crate::tolerance::Tolerances;

pub fn apply_spectral_function<R: Real>(
    d: &SpectralDecomposition<R>,
    f: impl Fn(R) -> R,
) -> ComplexMatrix<R> {
    let n = d.dim();
    let v = d.eigenvectors();
    let weights: Vec<R> = d.eigenvalues().iter().map(|&l| f(l)).collect();
    let mut out = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let mut acc = Complex::new(R::zero(), R::zero());
            for (k, &w) in weights.iter().enumerate() {
                if w.is_zero() {
                    continue;
                }
                acc = acc + v[(i, k)] * v[(j, k)].conj() * w;
            }
            out[(i, j)] = acc;
            out[(j, i)] = acc.conj();
        }
        out[(i, i)] = Complex::new(out[(i, i)].re, R::zero());
    }
    out
}

/// Decomposes a PSD matrix, clamping eigenvalues in (−psd, 0) to zero.
/// Eigenvalues at or below the rank cutoff are also set to zero so that the
/// kernel is exact downstream.
pub fn psd_decomposition<R: Real>(
    a: &ComplexMatrix<R>,
    tol: &Tolerances,
) -> Result<SpectralDecomposition<R>> {
    let d = hermitian_eig_with(a, tol.hermitian)?;
    let min = d.min_eigenvalue();
    if min < -R::of(tol.psd) {
        return Err(Error::NotPsd {
            min_eig: min.to64(),
        });
    }
    let cutoff = R::of(tol.rank_cutoff(d.max_eigenvalue().max(R::zero()).to64()));
    let values = d
        .eigenvalues()
        .iter()
        .map(|&l| if l <= cutoff { R::zero() } else { l })
        .collect();
    SpectralDecomposition::from_parts(values, d.eigenvectors().clone())
}

/// Principal square root of a PSD matrix.
pub fn sqrt_psd<R: Real>(a: &ComplexMatrix<R>) -> Result<ComplexMatrix<R>> {
    sqrt_psd_with(a, &Tolerances::default())
}

pub fn sqrt_psd_with<R: Real>(a: &ComplexMatrix<R>, tol: &Tolerances) -> Result<ComplexMatrix<R>> {
    let d = psd_decomposition(a, tol)?;
    Ok(apply_spectral_function(&d, |l| l.sqrt()))
}

/// Moore–Penrose inverse of a PSD matrix. Eigenvalues at or below `rank_tol`
/// (default: the relative cutoff from [`Tolerances`]) are treated as zero.
pub fn pinv_psd<R: Real>(a: &ComplexMatrix<R>, rank_tol: Option<R>) -> Result<ComplexMatrix<R>> {
    pinv_psd_with(a, rank_tol, &Tolerances::default())
}

pub fn pinv_psd_with<R: Real>(
    a: &ComplexMatrix<R>,
    rank_tol: Option<R>,
    tol: &Tolerances,
) -> Result<ComplexMatrix<R>> {
    let d = hermitian_eig_with(a, tol.hermitian)?;
    let min = d.min_eigenvalue();
    if min < -R::of(tol.psd) {
        return Err(Error::NotPsd {
            min_eig: min.to64(),
        });
    }
    let cutoff = rank_tol
        .unwrap_or_else(|| R::of(tol.rank_cutoff(d.max_eigenvalue().max(R::zero()).to64())));
    Ok(apply_spectral_function(&d, |l| {
        if l > cutoff {
            R::one() / l
        } else {
            R::zero()
        }
    }))
}

/// E_ε^⊥ = Σ_{λᵢ > ε} Pᵢ, with eigenvalues within `tie` of ε counted as ≤ ε.
pub fn spectral_projector<R: Real>(d: &SpectralDecomposition<R>, eps: R) -> ComplexMatrix<R> {
    spectral_projector_with(d, eps, &Tolerances::default())
}

pub fn spectral_projector_with<R: Real>(
    d: &SpectralDecomposition<R>,
    eps: R,
    tol: &Tolerances,
) -> ComplexMatrix<R> {
    let threshold = eps + R::of(tol.tie);
    apply_spectral_function(d, |l| if l > threshold { R::one() } else { R::zero() })
}

/// Indices of eigenvalues strictly above ε under the same tie rule.
pub fn indices_above<R: Real>(
    d: &SpectralDecomposition<R>,
    eps: R,
    tol: &Tolerances,
) -> Vec<usize> {
    let threshold = eps + R::of(tol.tie);
    d.select(|l| l > threshold)
}
