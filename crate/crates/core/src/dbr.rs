//! de Branges–Rovnyak spaces M(A): range membership, pull-back norms
//! ‖u‖_{M(A)} = min{‖y‖ : Ay = u} and the complement H(T) = M(√(I − TT*)).

use num_complex::Complex;
use rand::Rng;

use crate::error::{Error, Result};
use crate::numerics::{
    apply_spectral_function, gaussian_vector, hermitian_eig_with, inner, norm, pinv_psd_with,
    sqrt_psd_with, sub_vec, ComplexMatrix,
};
use crate::real::Real;
use crate::tolerance::Tolerances;

/// Moore–Penrose inverse. Hermitian inputs are inverted on their own
/// spectrum; otherwise through whichever Gram matrix (A*A or AA*) is smaller.
pub fn pseudo_inverse<R: Real>(a: &ComplexMatrix<R>, tol: &Tolerances) -> Result<ComplexMatrix<R>> {
    let scale = a.frobenius_norm();
    if a.is_square() && a.hermitian_deviation() <= R::of(tol.hermitian * 1e-2) * scale.max(R::one())
    {
        let d = hermitian_eig_with(a, tol.hermitian)?;
        let top = d
            .eigenvalues()
            .iter()
            .fold(R::zero(), |m, l| m.max(l.abs()));
        let cutoff = R::of(tol.rank_cutoff(top.to64()));
        return Ok(apply_spectral_function(&d, |l| {
            if l.abs() > cutoff {
                R::one() / l
            } else {
                R::zero()
            }
        }));
    }
    if a.rows() >= a.cols() {
        let g = pinv_psd_with(&a.gram_cols(), None, tol)?;
        Ok(&g * &a.adjoint())
    } else {
        let g = pinv_psd_with(&a.gram_rows(), None, tol)?;
        Ok(&a.adjoint() * &g)
    }
}

/// Minimal-norm solution of Ay ≈ u.
#[derive(Debug, Clone, PartialEq)]
pub struct Preimage<R: Real> {
    pub y: Vec<Complex<R>>,
    pub in_range: bool,
    /// ‖Ay − u‖.
    pub residual: R,
}

pub fn min_norm_preimage<R: Real>(a: &ComplexMatrix<R>, u: &[Complex<R>]) -> Result<Preimage<R>> {
    min_norm_preimage_with(a, u, &Tolerances::default())
}

pub fn min_norm_preimage_with<R: Real>(
    a: &ComplexMatrix<R>,
    u: &[Complex<R>],
    tol: &Tolerances,
) -> Result<Preimage<R>> {
    if u.len() != a.rows() {
        return Err(Error::ShapeMismatch(format!(
            "target of length {} for an operator with {} rows",
            u.len(),
            a.rows()
        )));
    }
    let pinv = pseudo_inverse(a, tol)?;
    let y = pinv.mul_vec(u)?;
    let residual = norm(&sub_vec(&a.mul_vec(&y)?, u));
    Ok(Preimage {
        y,
        in_range: residual <= R::of(tol.residual) * norm(u).max(R::one()),
        residual,
    })
}

/// ‖u‖_{M(A)}.
pub fn dbr_norm<R: Real>(a: &ComplexMatrix<R>, u: &[Complex<R>]) -> Result<R> {
    dbr_norm_with(a, u, &Tolerances::default())
}

pub fn dbr_norm_with<R: Real>(
    a: &ComplexMatrix<R>,
    u: &[Complex<R>],
    tol: &Tolerances,
) -> Result<R> {
    let p = min_norm_preimage_with(a, u, tol)?;
    if !p.in_range {
        return Err(Error::NotInRange {
            residual: p.residual.to64(),
        });
    }
    Ok(norm(&p.y))
}

/// Evidence that sup |⟨y, u⟩| / ‖A*y‖ is infinite.
#[derive(Debug, Clone, PartialEq)]
pub struct UnboundedWitness<R: Real> {
    /// Component of u orthogonal to ran A; A*y ≈ 0 while ⟨y, u⟩ = ‖y‖².
    pub y: Vec<Complex<R>>,
    pub inner_with_target: R,
    pub adjoint_norm: R,
    /// (t, ratio) along y_t = t·y + w for a fixed range direction w; the
    /// ratio grows without bound in t. Infinite when A = 0.
    pub ratios: Vec<(R, R)>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ShmulyanVerdict<R: Real> {
    InRange {
        /// γ = ‖A⁺u‖.
        gamma: R,
        /// Largest ratio over the random probes; never above γ.
        probe_max: R,
        /// Ratio at the maximizer y* = (A⁺)*A⁺u.
        attained: R,
    },
    NotInRange(UnboundedWitness<R>),
}

impl<R: Real> ShmulyanVerdict<R> {
    pub fn in_range(&self) -> bool {
        matches!(self, ShmulyanVerdict::InRange { .. })
    }

    pub fn gamma(&self) -> Option<R> {
        match self {
            ShmulyanVerdict::InRange { gamma, .. } => Some(*gamma),
            ShmulyanVerdict::NotInRange(_) => None,
        }
    }
}

fn ratio<R: Real>(a: &ComplexMatrix<R>, y: &[Complex<R>], u: &[Complex<R>]) -> R {
    let den = norm(&a.adjoint_mul_vec(y).expect("dimension"));
    let num = inner(y, u).norm();
    if den <= R::min_positive_value() {
        if num.is_zero() {
            R::zero()
        } else {
            R::infinity()
        }
    } else {
        num / den
    }
}

/// Shmul'yan's criterion: u ∈ ran A iff γ = sup_{A*y≠0} |⟨y,u⟩|/‖A*y‖ < ∞,
/// in which case γ = ‖u‖_{M(A)}.
///
/// γ is computed through the pseudo-inverse; `probes` random y only serve as
/// an independent lower-bound check.
pub fn shmulyan_gamma<R: Real, G: Rng + ?Sized>(
    a: &ComplexMatrix<R>,
    u: &[Complex<R>],
    probes: usize,
    rng: &mut G,
) -> Result<ShmulyanVerdict<R>> {
    shmulyan_gamma_with(a, u, probes, rng, &Tolerances::default())
}

pub fn shmulyan_gamma_with<R: Real, G: Rng + ?Sized>(
    a: &ComplexMatrix<R>,
    u: &[Complex<R>],
    probes: usize,
    rng: &mut G,
    tol: &Tolerances,
) -> Result<ShmulyanVerdict<R>> {
    if u.len() != a.rows() {
        return Err(Error::ShapeMismatch(format!(
            "target of length {} for an operator with {} rows",
            u.len(),
            a.rows()
        )));
    }
    let pinv = pseudo_inverse(a, tol)?;
    let x = pinv.mul_vec(u)?;
    let u_range = a.mul_vec(&x)?;
    let u_perp = sub_vec(u, &u_range);
    let off = norm(&u_perp);

    if off > R::of(tol.residual) * norm(u).max(R::one()) {
        let w = {
            let candidate = a.mul_vec(&a.adjoint_mul_vec(u)?)?;
            if norm(&candidate) > R::zero() {
                candidate
            } else {
                (0..a.cols())
                    .map(|j| a.column(j))
                    .find(|c| norm(c) > R::zero())
                    .unwrap_or_else(|| vec![Complex::new(R::zero(), R::zero()); a.rows()])
            }
        };
        let ratios = [1.0, 10.0, 100.0, 1000.0]
            .iter()
            .map(|&t| {
                let t = R::of(t);
                let y: Vec<_> = u_perp.iter().zip(&w).map(|(&p, &q)| p * t + q).collect();
                (t, ratio(a, &y, u))
            })
            .collect();
        return Ok(ShmulyanVerdict::NotInRange(UnboundedWitness {
            inner_with_target: inner(&u_perp, u).norm(),
            adjoint_norm: norm(&a.adjoint_mul_vec(&u_perp)?),
            y: u_perp,
            ratios,
        }));
    }

    let gamma = norm(&x);
    let y_star = pinv.adjoint_mul_vec(&x)?;
    let attained = if gamma.is_zero() {
        R::zero()
    } else {
        ratio(a, &y_star, u)
    };
    let mut probe_max = R::zero();
    for _ in 0..probes {
        let y = gaussian_vector::<R, _>(a.rows(), rng);
        let r = ratio(a, &y, u);
        if r.is_finite() {
            probe_max = probe_max.max(r);
        }
    }
    Ok(ShmulyanVerdict::InRange {
        gamma,
        probe_max,
        attained,
    })
}

/// S = (I − TT*)^{1/2}, the operator whose range space is the complement H(T).
pub fn complement_defect<R: Real>(t: &ComplexMatrix<R>) -> Result<ComplexMatrix<R>> {
    complement_defect_with(t, &Tolerances::default())
}

pub fn complement_defect_with<R: Real>(
    t: &ComplexMatrix<R>,
    tol: &Tolerances,
) -> Result<ComplexMatrix<R>> {
    if !t.is_square() {
        return Err(Error::ShapeMismatch(
            "complement of a non-square operator".into(),
        ));
    }
    let norm_t = t.operator_norm();
    if norm_t > R::one() + R::of(tol.residual) {
        return Err(Error::NotContraction {
            norm: norm_t.to64(),
        });
    }
    let gap = &ComplexMatrix::identity(t.rows()) - &t.gram_rows();
    sqrt_psd_with(&gap.hermitian_part(), tol)
}
