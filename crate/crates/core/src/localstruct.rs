//! Local structure of the range spaces: the subspaces
//! 𝔐_ε = {𝐓♯x : x ∈ E_ε^⊥H} of K, the restriction 𝐓|_{𝔐_ε} as an operator
//! between Hilbert spaces, and the equality of the pull-back norms of
//! T|_{E_ε^⊥H} and 𝐓|_{𝔐_ε}.

use num_complex::Complex;
use rand::Rng;

use crate::dbr::pseudo_inverse;
use crate::error::{Error, Result};
use crate::krein::Subspace;
use crate::numerics::{
    apply_spectral_function, gaussian_vector, hermitian_eig, norm, pinv_psd_with, sub_vec,
    ComplexMatrix, SpectralDecomposition,
};
use crate::real::Real;
use crate::tuples::SignedOperatorTuple;

/// Eigen-indices of T spanning E_ε^⊥H (eigenvalues strictly above ε and above
/// the kernel cutoff).
pub fn spectral_indices<R: Real>(tuple: &SignedOperatorTuple<R>, eps: R) -> Vec<usize> {
    let threshold = (eps + R::of(tuple.tolerances().tie)).max(tuple.rank_cutoff());
    tuple.spectrum().select(|l| l > threshold)
}

/// Basis 𝐓♯v₁, …, 𝐓♯v_k of 𝔐_ε for an orthonormal eigenbasis {vᵢ} of E_ε^⊥H.
pub fn m_eps_basis<R: Real>(tuple: &SignedOperatorTuple<R>, eps: R) -> Result<Subspace<R>> {
    if eps < R::zero() {
        return Err(Error::InvalidArgument("eps must be nonnegative".into()));
    }
    let idx = spectral_indices(tuple, eps);
    if idx.is_empty() {
        return Err(Error::EmptySubspace);
    }
    let b = &tuple.bt_sharp_matrix() * &tuple.spectrum().eigenvector_block(&idx);
    let gram = hermitian_eig(&b.gram_cols().hermitian_part())?;
    if gram.min_eigenvalue() <= R::of(tuple.tolerances().positivity) {
        return Err(Error::DegenerateBasis);
    }
    Subspace::new(b, tuple.signature().clone())
}

/// Precomputed data for one (tuple, ε): the orthonormal basis Q of E_ε^⊥H,
/// the basis B = 𝐓♯Q of 𝔐_ε, its Kreĭn Gram G = B*(J)B ≻ 0 and M = 𝐓B.
#[derive(Debug, Clone)]
pub struct LocalSpace<'a, R: Real> {
    tuple: &'a SignedOperatorTuple<R>,
    eps: R,
    q: ComplexMatrix<R>,
    subspace: Subspace<R>,
    krein_gram: ComplexMatrix<R>,
    gram: SpectralDecomposition<R>,
    image: ComplexMatrix<R>,
    /// T·Q, the restriction of T to E_ε^⊥H in basis coordinates.
    restricted: ComplexMatrix<R>,
    restricted_pinv: ComplexMatrix<R>,
    /// G⁻¹M*(MG⁻¹M*)⁺, mapping u to the Kreĭn-minimal coordinates c.
    krein_solver: ComplexMatrix<R>,
}

impl<'a, R: Real> LocalSpace<'a, R> {
    pub fn new(tuple: &'a SignedOperatorTuple<R>, eps: R) -> Result<Self> {
        let subspace = m_eps_basis(tuple, eps)?;
        let q = tuple
            .spectrum()
            .eigenvector_block(&spectral_indices(tuple, eps));
        let krein_gram = subspace.krein_gram();
        let gram = hermitian_eig(&krein_gram)?;
        if gram.min_eigenvalue() <= R::of(tuple.tolerances().positivity) {
            return Err(Error::NotUniformlyPositive {
                delta: gram.min_eigenvalue().to64(),
            });
        }
        let image = &tuple.bt_matrix() * subspace.basis();
        let tol = tuple.tolerances();
        let restricted = tuple.defect_sqrt() * &q;
        let restricted_pinv = pseudo_inverse(&restricted, tol)?;
        let g_inv = apply_spectral_function(&gram, |l| R::one() / l);
        let mg = &image * &g_inv;
        let schur = (&mg * &image.adjoint()).hermitian_part();
        let krein_solver = &mg.adjoint() * &pinv_psd_with(&schur, None, tol)?;
        Ok(Self {
            tuple,
            eps,
            q,
            subspace,
            krein_gram,
            gram,
            image,
            restricted,
            restricted_pinv,
            krein_solver,
        })
    }

    pub fn eps(&self) -> R {
        self.eps
    }

    pub fn subspace(&self) -> &Subspace<R> {
        &self.subspace
    }

    /// Orthonormal basis of E_ε^⊥H as columns.
    pub fn spectral_basis(&self) -> &ComplexMatrix<R> {
        &self.q
    }

    /// ‖𝐓|_{𝔐_ε}‖ from (𝔐_ε, [·,·]_K) to H: the square root of the largest
    /// eigenvalue of G^{-1/2} M*M G^{-1/2}.
    pub fn operator_norm(&self) -> R {
        let g_inv_half = apply_spectral_function(&self.gram, |l| R::one() / l.sqrt());
        let k = &(&g_inv_half * &self.image.gram_cols()) * &g_inv_half;
        hermitian_eig(&k.hermitian_part())
            .map(|d| d.max_eigenvalue().max(R::zero()).sqrt())
            .unwrap_or_else(|_| R::infinity())
    }

    /// min{‖y‖ : y ∈ E_ε^⊥H, Ty = u}, or `None` when u is not reachable.
    pub fn restricted_pullback_norm(&self, u: &[Complex<R>]) -> Result<Option<R>> {
        let y = self.restricted_pinv.mul_vec(u)?;
        let residual = norm(&sub_vec(&self.restricted.mul_vec(&y)?, u));
        Ok(self.reachable(residual, u).then(|| norm(&y)))
    }

    /// min{√[w, w]_K : w ∈ 𝔐_ε, 𝐓w = u}, or `None` when u is not reachable.
    ///
    /// In basis coordinates this minimizes c*Gc subject to Mc = u, solved by
    /// c = G⁻¹M*(MG⁻¹M*)⁺u.
    pub fn krein_pullback_norm(&self, u: &[Complex<R>]) -> Result<Option<R>> {
        let c = self.krein_solver.mul_vec(u)?;
        let residual = norm(&sub_vec(&self.image.mul_vec(&c)?, u));
        if !self.reachable(residual, u) {
            return Ok(None);
        }
        let gc = self.krein_gram.mul_vec(&c)?;
        let energy = crate::numerics::inner(&gc, &c).re;
        Ok(Some(energy.max(R::zero()).sqrt()))
    }

    fn reachable(&self, residual: R, u: &[Complex<R>]) -> bool {
        residual <= R::of(self.tuple.tolerances().residual) * norm(u).max(R::one())
    }
}

/// Operator norm of 𝐓 restricted to (𝔐_ε, [·,·]_K).
pub fn restricted_operator_norm<R: Real>(tuple: &SignedOperatorTuple<R>, eps: R) -> Result<R> {
    Ok(LocalSpace::new(tuple, eps)?.operator_norm())
}

/// Both pull-back norms of one target u.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormPair<R: Real> {
    /// Through T|_{E_ε^⊥H}.
    pub restricted: R,
    /// Through 𝐓|_{𝔐_ε} with the Kreĭn norm.
    pub krein: R,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NormEqualityReport<R: Real> {
    pub eps: R,
    pub pairs: Vec<NormPair<R>>,
    pub max_deviation: R,
    /// krein ≤ restricted on every sample (contractive embedding of
    /// M(T|_{E_ε^⊥H}) into M(𝐓|_{𝔐_ε})).
    pub embedding_ok: bool,
    /// restricted ≤ krein on every sample (the reverse embedding).
    pub reverse_ok: bool,
    pub passed: bool,
}

/// Draws `samples` random x ∈ E_ε^⊥H, sets u = Tx and compares the two
/// pull-back norms of u.
pub fn verify_norm_equality<R: Real, G: Rng + ?Sized>(
    tuple: &SignedOperatorTuple<R>,
    eps: R,
    samples: usize,
    rng: &mut G,
) -> Result<NormEqualityReport<R>> {
    let local = LocalSpace::new(tuple, eps)?;
    let k = local.spectral_basis().cols();
    let tol = R::of(tuple.tolerances().equality);
    let mut pairs = Vec::with_capacity(samples);
    let mut max_deviation = R::zero();
    let mut embedding_ok = true;
    let mut reverse_ok = true;
    let mut within = true;
    for _ in 0..samples {
        let x = local
            .spectral_basis()
            .mul_vec(&gaussian_vector::<R, _>(k, rng))?;
        let u = tuple.defect_sqrt().mul_vec(&x)?;
        let (Some(restricted), Some(krein)) = (
            local.restricted_pullback_norm(&u)?,
            local.krein_pullback_norm(&u)?,
        ) else {
            return Err(Error::NotInRange { residual: f64::NAN });
        };
        let slack = tol * restricted.max(R::one());
        let dev = (restricted - krein).abs();
        max_deviation = max_deviation.max(dev);
        embedding_ok &= krein <= restricted + slack;
        reverse_ok &= restricted <= krein + slack;
        within &= dev <= slack;
        pairs.push(NormPair { restricted, krein });
    }
    Ok(NormEqualityReport {
        eps,
        pairs,
        max_deviation,
        embedding_ok,
        reverse_ok,
        passed: embedding_ok && reverse_ok && within,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::krein::uniform_positivity_bound;
    use crate::numerics::{projection_residual, real_vector};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    type M = ComplexMatrix<f64>;

    fn diag_tuple() -> SignedOperatorTuple<f64> {
        SignedOperatorTuple::triplet(M::diag_real(&[1.0, 0.5]), M::zeros(2, 2), M::zeros(2, 2))
            .unwrap()
    }

    #[test]
    fn basis_examples() {
        let t = diag_tuple();
        let s = m_eps_basis(&t, 0.7).unwrap();
        assert_eq!(s.dim(), 1);
        let col = s.basis().column(0);
        let expected = real_vector::<f64>(&[1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        let sign: f64 = if col[0].re < 0.0 { -1.0 } else { 1.0 };
        for (a, b) in col.iter().zip(&expected) {
            assert!((a.re * sign - b.re).abs() < 1e-15 && a.im.abs() < 1e-15);
        }
        assert_eq!(m_eps_basis(&t, 0.0).unwrap().dim(), 2);
        assert_eq!(m_eps_basis(&t, 1.5).unwrap_err(), Error::EmptySubspace);
    }

    #[test]
    fn nested_subspaces() {
        let t = diag_tuple();
        let small = m_eps_basis(&t, 0.7).unwrap();
        let big = m_eps_basis(&t, 0.3).unwrap();
        let (q, _) = crate::numerics::orthonormalize(&big.basis().columns(), 1e-12);
        for c in small.basis().columns() {
            assert!(projection_residual(&q, &c) < 1e-9);
        }
        assert!(uniform_positivity_bound(&big).unwrap() > 0.0);
    }

    #[test]
    fn operator_norm_examples() {
        let t = diag_tuple();
        assert!((restricted_operator_norm(&t, 0.7).unwrap() - 1.0).abs() < 1e-12);
        // 𝐓|_{𝔐_ε} acts as T on E_ε^⊥H after identifying 𝔐_ε with it, so
        // halving every operator halves the norm.
        let half = t.scaled(0.5).unwrap();
        assert!((restricted_operator_norm(&half, 0.35).unwrap() - 0.5).abs() < 1e-12);
    }

    /// Dense scan of ‖𝐓w‖² / [w, w]_K over w = B c on the unit circle of a
    /// two-dimensional 𝔐_ε.
    #[test]
    fn operator_norm_matches_rayleigh_scan() {
        let t = diag_tuple();
        let local = LocalSpace::new(&t, 0.1).unwrap();
        let b = local.subspace().basis();
        let mut best: f64 = 0.0;
        for k in 0..2000 {
            let th = k as f64 * std::f64::consts::PI / 1000.0;
            let c = vec![Complex::new(th.cos(), 0.0), Complex::new(th.sin(), 0.0)];
            let w = crate::krein::KreinVector::from_stacked(
                &b.mul_vec(&c).unwrap(),
                t.signature().clone(),
            )
            .unwrap();
            let tw = t.bt_apply(&w).unwrap();
            best = best.max(crate::numerics::norm_sq(&tw) / crate::krein::krein_norm_sq(&w));
        }
        assert!((best.sqrt() - local.operator_norm()).abs() < 1e-6);
    }

    #[test]
    fn norm_pair_hand_example() {
        let t = diag_tuple();
        let local = LocalSpace::new(&t, 0.3).unwrap();
        let u = t.defect_sqrt().mul_vec(&real_vector(&[1.0, 1.0])).unwrap();
        let n1 = local.restricted_pullback_norm(&u).unwrap().unwrap();
        let n2 = local.krein_pullback_norm(&u).unwrap().unwrap();
        assert!((n1 - 2f64.sqrt()).abs() < 1e-12);
        assert!((n2 - 2f64.sqrt()).abs() < 1e-12);
        let zero = real_vector(&[0.0, 0.0]);
        assert_eq!(local.restricted_pullback_norm(&zero).unwrap(), Some(0.0));
        assert_eq!(local.krein_pullback_norm(&zero).unwrap(), Some(0.0));
    }

    #[test]
    fn unreachable_targets() {
        let t = diag_tuple();
        let local = LocalSpace::new(&t, 0.7).unwrap();
        let u = real_vector(&[0.0, 1.0]);
        assert_eq!(local.restricted_pullback_norm(&u).unwrap(), None);
        assert_eq!(local.krein_pullback_norm(&u).unwrap(), None);
    }

    #[test]
    fn equality_on_diagonal_tuple() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let r = verify_norm_equality(&diag_tuple(), 0.3, 20, &mut rng).unwrap();
        assert!(r.passed, "{r:?}");
        assert_eq!(r.pairs.len(), 20);
    }
}
