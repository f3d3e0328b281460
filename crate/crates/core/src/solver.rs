//! Constructive solutions of 𝐓z = u with [z, z]_K = ‖u‖²_{M(T)}.
//!
//! For u = Tx with x ∈ (ker T)^⊥ and ε > 0:
//!
//! ```text
//! x_ε = E_ε^⊥ x,   y_ε = f_ε(T) x_ε  with f_ε(λ) = 1/λ on (ε, ∞), 0 elsewhere,
//! z_ε = 𝐓♯ y_ε,    𝐓z_ε = T² y_ε = T x_ε,   [z_ε, z_ε]_K = ‖T y_ε‖² = ‖x_ε‖².
//! ```
//!
//! As ε decreases the residual ‖u − 𝐓z_ε‖ falls and [z_ε, z_ε]_K rises to
//! ‖x‖² = ‖u‖²_{M(T)}; once ε drops below the smallest nonzero eigenvalue of
//! T both are attained exactly.

use num_complex::Complex;

use crate::dbr::min_norm_preimage_with;
use crate::error::{Error, Result};
use crate::krein::{krein_norm_sq, KreinVector, Sign, Signature};
use crate::numerics::{norm, norm_sq, sub_vec, ComplexMatrix};
use crate::real::{czero, Real};
use crate::tuples::{SignedOperatorTuple, ValidityLevel};

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport<R: Real> {
    pub eps: R,
    pub z: KreinVector<R>,
    /// x_ε = E_ε^⊥ T⁺u.
    pub x_eps: Vec<Complex<R>>,
    /// ‖u − 𝐓z‖.
    pub residual: R,
    /// [z, z]_K, signed.
    pub krein_norm_sq: R,
    /// ‖u‖²_{M(T)}.
    pub target_norm_sq: R,
    pub x_eps_norm_sq: R,
}

impl<R: Real> SolveReport<R> {
    /// Residual and norm equality of the exact finite-dimensional solution.
    pub fn attains_target(&self, residual_tol: R, norm_tol: R, target_scale: R) -> bool {
        self.residual <= residual_tol * target_scale.max(R::one())
            && (self.krein_norm_sq - self.target_norm_sq).abs() <= norm_tol
    }
}

pub fn solve_eps<R: Real>(
    tuple: &SignedOperatorTuple<R>,
    u: &[Complex<R>],
    eps: R,
) -> Result<SolveReport<R>> {
    if eps.is_nan() || eps <= R::zero() {
        return Err(Error::InvalidArgument("eps must be positive".into()));
    }
    if u.len() != tuple.dim() {
        return Err(Error::ShapeMismatch(format!(
            "target of length {} for a tuple on dimension {}",
            u.len(),
            tuple.dim()
        )));
    }
    let tol = tuple.tolerances();
    let membership = min_norm_preimage_with(tuple.defect_sqrt(), u, tol)?;
    if !membership.in_range {
        return Err(Error::NotInRange {
            residual: membership.residual.to64(),
        });
    }

    // Work in the eigenbasis of T: u = Σ cᵢvᵢ, x = Σ_{λᵢ>0} (cᵢ/λᵢ)vᵢ.
    let spec = tuple.spectrum();
    let v = spec.eigenvectors();
    let coords = v.adjoint_mul_vec(u)?;
    let support = tuple.support_indices();
    let threshold = eps + R::of(tol.tie);
    let d = tuple.dim();
    let mut x_sq = R::zero();
    let mut x_eps_c = vec![czero(); d];
    let mut y_c = vec![czero(); d];
    for &i in &support {
        let lambda = spec.eigenvalues()[i];
        let xi = coords[i] / lambda;
        x_sq = x_sq + xi.norm_sqr();
        if lambda > threshold {
            x_eps_c[i] = xi;
            y_c[i] = xi / lambda;
        }
    }
    let x_eps = v.mul_vec(&x_eps_c)?;
    let y = v.mul_vec(&y_c)?;
    let z = tuple.bt_sharp(&y)?;
    let tz = tuple.bt_apply(&z)?;
    Ok(SolveReport {
        eps,
        residual: norm(&sub_vec(u, &tz)),
        krein_norm_sq: krein_norm_sq(&z),
        target_norm_sq: x_sq,
        x_eps_norm_sq: norm_sq(&x_eps),
        x_eps,
        z,
    })
}

/// ε used by [`solve_exact`]: half the smallest nonzero eigenvalue of T.
pub fn exact_eps<R: Real>(tuple: &SignedOperatorTuple<R>) -> Option<R> {
    tuple.lambda_min_plus().map(|l| l * R::of(0.5))
}

/// Exact solution: 𝐓z = u and [z, z]_K = ‖u‖²_{M(T)}.
pub fn solve_exact<R: Real>(
    tuple: &SignedOperatorTuple<R>,
    u: &[Complex<R>],
) -> Result<SolveReport<R>> {
    match exact_eps(tuple) {
        Some(eps) => solve_eps(tuple, u, eps),
        None => {
            if u.len() != tuple.dim() {
                return Err(Error::ShapeMismatch("target length".into()));
            }
            if norm(u) > R::of(tuple.tolerances().residual) {
                return Err(Error::ZeroDefect);
            }
            // T = 0: every spectral projector vanishes and any ε works.
            Ok(SolveReport {
                eps: R::one(),
                z: KreinVector::zeros(tuple.signature().clone(), tuple.dim()),
                x_eps: vec![czero(); tuple.dim()],
                residual: norm(u),
                krein_norm_sq: R::zero(),
                target_norm_sq: R::zero(),
                x_eps_norm_sq: R::zero(),
            })
        }
    }
}

/// The (n+1)-tuple (I, T₁, …, Tₙ) with signature (+, −s₁, …, −sₙ); its
/// defect is I − D, whose square root S spans the complement H(T).
pub fn complement_tuple<R: Real>(tuple: &SignedOperatorTuple<R>) -> Result<SignedOperatorTuple<R>> {
    if tuple.level() != ValidityLevel::Full {
        return Err(Error::NotFullValidity);
    }
    let mut ops = Vec::with_capacity(tuple.len() + 1);
    ops.push(ComplexMatrix::identity(tuple.dim()));
    ops.extend(tuple.ops().iter().cloned());
    let mut signs = vec![Sign::Plus];
    signs.extend(tuple.signature().signs().iter().map(|s| s.flip()));
    SignedOperatorTuple::with_tolerances(ops, Signature::new(signs)?, *tuple.tolerances())
}

/// Solves w₀ − Σ sⱼTⱼwⱼ = v with [w, w] = ‖w₀‖² − Σ sⱼ‖wⱼ‖² → ‖v‖²_{H(T)}.
pub fn solve_complement<R: Real>(
    tuple: &SignedOperatorTuple<R>,
    v: &[Complex<R>],
    eps: R,
) -> Result<SolveReport<R>> {
    solve_eps(&complement_tuple(tuple)?, v, eps)
}

pub fn solve_complement_exact<R: Real>(
    tuple: &SignedOperatorTuple<R>,
    v: &[Complex<R>],
) -> Result<SolveReport<R>> {
    solve_exact(&complement_tuple(tuple)?, v)
}

/// Reports over a decreasing ε schedule plus the convergence checks.
#[derive(Debug, Clone, PartialEq)]
pub struct Sweep<R: Real> {
    pub reports: Vec<SolveReport<R>>,
    pub lambda_min_plus: Option<R>,
    /// [z_ε, z_ε]_K nondecreasing as ε decreases, within the slack.
    pub monotone_ok: bool,
    /// Residuals nonincreasing, and within tolerance once ε < λ_min⁺.
    pub residual_ok: bool,
    /// Last [z, z]_K equals ‖u‖²_{M(T)}.
    pub final_equality_ok: bool,
    /// |[z_ε − z_δ, z_ε − z_δ]_K − ‖x_ε − x_δ‖²| for consecutive pairs.
    pub cauchy_deviations: Vec<R>,
    pub cauchy_ok: bool,
}

impl<R: Real> Sweep<R> {
    pub fn passed(&self) -> bool {
        self.monotone_ok && self.residual_ok && self.final_equality_ok && self.cauchy_ok
    }

    /// Per-row running monotonicity flag (true while no violation so far).
    pub fn monotone_flags(&self, slack: R) -> Vec<bool> {
        let mut ok = true;
        let mut out = Vec::with_capacity(self.reports.len());
        for (k, r) in self.reports.iter().enumerate() {
            if k > 0 && r.krein_norm_sq < self.reports[k - 1].krein_norm_sq - slack {
                ok = false;
            }
            out.push(ok);
        }
        out
    }
}

/// ε-schedule x_k = start · ratio^k, k = 0..count.
pub fn geometric_schedule<R: Real>(start: R, ratio: R, count: usize) -> Vec<R> {
    let mut out = Vec::with_capacity(count);
    let mut e = start;
    for _ in 0..count {
        out.push(e);
        e = e * ratio;
    }
    out
}

pub fn convergence_sweep<R: Real>(
    tuple: &SignedOperatorTuple<R>,
    u: &[Complex<R>],
    schedule: &[R],
) -> Result<Sweep<R>> {
    if schedule.is_empty() {
        return Err(Error::InvalidArgument("empty eps schedule".into()));
    }
    if schedule.iter().any(|&e| e.is_nan() || e <= R::zero())
        || schedule.windows(2).any(|w| w[1] >= w[0])
    {
        return Err(Error::InvalidArgument(
            "eps schedule must be positive and strictly decreasing".into(),
        ));
    }
    let reports = schedule
        .iter()
        .map(|&e| solve_eps(tuple, u, e))
        .collect::<Result<Vec<_>>>()?;

    let tol = tuple.tolerances();
    let slack = R::of(tol.monotone);
    let scale = norm(u).max(R::one());
    let res_tol = R::of(tol.residual) * scale;
    let lambda_min_plus = tuple.lambda_min_plus();

    let monotone_ok = reports
        .windows(2)
        .all(|w| w[1].krein_norm_sq >= w[0].krein_norm_sq - slack)
        && reports.iter().all(|r| r.krein_norm_sq >= -slack);
    let residual_ok = reports
        .windows(2)
        .all(|w| w[1].residual <= w[0].residual + slack * scale)
        && reports.iter().all(|r| match lambda_min_plus {
            Some(l) if r.eps + R::of(tol.tie) < l => r.residual <= res_tol,
            None => r.residual <= res_tol,
            _ => true,
        });
    let last = reports.last().expect("nonempty");
    let final_equality_ok = (last.krein_norm_sq - last.target_norm_sq).abs() <= R::of(tol.norm)
        && last.residual <= res_tol;

    let mut cauchy_deviations = Vec::with_capacity(reports.len().saturating_sub(1));
    let mut cauchy_ok = true;
    for w in reports.windows(2) {
        let dz = w[0].z.sub(&w[1].z)?;
        let signed = krein_norm_sq(&dz);
        let dx = norm_sq(&sub_vec(&w[0].x_eps, &w[1].x_eps));
        let dev = (signed - dx).abs();
        if signed < -R::of(tol.norm) || dev > R::of(tol.norm) {
            cauchy_ok = false;
        }
        cauchy_deviations.push(dev);
    }

    Ok(Sweep {
        reports,
        lambda_min_plus,
        monotone_ok,
        residual_ok,
        final_equality_ok,
        cauchy_deviations,
        cauchy_ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::real_vector;

    type M = ComplexMatrix<f64>;

    fn diag_tuple() -> SignedOperatorTuple<f64> {
        SignedOperatorTuple::triplet(M::diag_real(&[1.0, 0.5]), M::zeros(2, 2), M::zeros(2, 2))
            .unwrap()
    }

    #[test]
    fn diagonal_hand_example() {
        let t = diag_tuple();
        let u = real_vector(&[1.0, 0.5]);
        let coarse = solve_eps(&t, &u, 0.7).unwrap();
        assert_eq!(coarse.x_eps, real_vector(&[1.0, 0.0]));
        assert!((coarse.residual - 0.5).abs() < 1e-12);
        assert!((coarse.krein_norm_sq - 1.0).abs() < 1e-12);
        assert!((coarse.target_norm_sq - 2.0).abs() < 1e-12);
        let fine = solve_eps(&t, &u, 0.3).unwrap();
        assert!(fine.residual < 1e-12);
        assert!((fine.krein_norm_sq - 2.0).abs() < 1e-12);
    }

    #[test]
    fn scalar_triplet_hand_example() {
        let one = M::identity(1);
        let t = SignedOperatorTuple::triplet(one.clone(), one.clone(), one).unwrap();
        let r = solve_eps(&t, &real_vector(&[1.0]), 0.5).unwrap();
        for j in 0..3 {
            assert!((r.z.block(j)[0].re - 1.0).abs() < 1e-15);
        }
        assert!(r.residual < 1e-15);
        assert!((r.krein_norm_sq - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_inputs() {
        let t = diag_tuple();
        assert!(matches!(
            solve_eps(&t, &real_vector(&[1.0, 0.5]), 0.0),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            solve_eps(&t, &real_vector(&[1.0]), 0.3),
            Err(Error::ShapeMismatch(_))
        ));
        let k =
            SignedOperatorTuple::triplet(M::diag_real(&[1.0, 0.0]), M::zeros(2, 2), M::zeros(2, 2))
                .unwrap();
        assert!(matches!(
            solve_eps(&k, &real_vector(&[0.0, 1.0]), 0.3),
            Err(Error::NotInRange { .. })
        ));
    }

    #[test]
    fn exact_solution_and_zero_target() {
        let t = diag_tuple();
        let r = solve_exact(&t, &real_vector(&[1.0, 0.5])).unwrap();
        assert_eq!(r.eps, 0.25);
        assert!(r.attains_target(1e-8, 1e-8, 1.0));
        let z = solve_exact(&t, &real_vector(&[0.0, 0.0])).unwrap();
        assert_eq!(z.krein_norm_sq, 0.0);
        assert_eq!(z.residual, 0.0);
    }

    #[test]
    fn zero_defect() {
        let z = M::zeros(2, 2);
        let t = SignedOperatorTuple::triplet(z.clone(), z.clone(), z).unwrap();
        assert_eq!(
            solve_exact(&t, &real_vector(&[1.0, 0.0])),
            Err(Error::ZeroDefect)
        );
        let r = solve_exact(&t, &real_vector(&[0.0, 0.0])).unwrap();
        assert_eq!(r.krein_norm_sq, 0.0);
    }

    #[test]
    fn complement_of_zero_tuple() {
        let z = M::zeros(2, 2);
        let t = SignedOperatorTuple::triplet(z.clone(), z.clone(), z).unwrap();
        let v = real_vector(&[0.3, -1.2]);
        let r = solve_complement_exact(&t, &v).unwrap();
        assert_eq!(r.z.block(0), v.as_slice());
        for j in 1..4 {
            assert_eq!(norm_sq(r.z.block(j)), 0.0);
        }
        assert!((r.krein_norm_sq - norm_sq(&v)).abs() < 1e-14);
    }

    #[test]
    fn complement_requires_full_validity() {
        let t = SignedOperatorTuple::triplet(
            M::identity(2).scale_real(2.0),
            M::zeros(2, 2),
            M::zeros(2, 2),
        )
        .unwrap();
        assert_eq!(t.level(), ValidityLevel::Lower);
        assert_eq!(
            solve_complement(&t, &real_vector(&[1.0, 0.0]), 0.1),
            Err(Error::NotFullValidity)
        );
        // D = diag(1, 0.25) ⇒ S = diag(0, √0.75): e₁ is outside ran S
        let f = diag_tuple();
        assert!(matches!(
            solve_complement(&f, &real_vector(&[1.0, 0.0]), 0.1),
            Err(Error::NotInRange { .. })
        ));
    }

    #[test]
    fn sweep_diagonal_schedule() {
        let t = diag_tuple();
        let s = convergence_sweep(&t, &real_vector(&[1.0, 0.5]), &[0.7, 0.3, 0.1]).unwrap();
        let k: Vec<f64> = s.reports.iter().map(|r| r.krein_norm_sq).collect();
        let res: Vec<f64> = s.reports.iter().map(|r| r.residual).collect();
        for (a, b) in k.iter().zip([1.0, 2.0, 2.0]) {
            assert!((a - b).abs() < 1e-12);
        }
        for (a, b) in res.iter().zip([0.5, 0.0, 0.0]) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!(s.passed(), "{s:?}");
        assert_eq!(s.monotone_flags(1e-10), vec![true; 3]);
    }

    #[test]
    fn sweep_single_entry_matches_solve() {
        let t = diag_tuple();
        let u = real_vector(&[1.0, 0.5]);
        let s = convergence_sweep(&t, &u, &[0.3]).unwrap();
        assert_eq!(s.reports, vec![solve_eps(&t, &u, 0.3).unwrap()]);
        assert!(s.cauchy_deviations.is_empty());
    }

    #[test]
    fn sweep_rejects_bad_schedules() {
        let t = diag_tuple();
        let u = real_vector(&[1.0, 0.5]);
        assert!(convergence_sweep(&t, &u, &[]).is_err());
        assert!(convergence_sweep(&t, &u, &[0.3, 0.7]).is_err());
        assert!(convergence_sweep(&t, &u, &[0.3, 0.3]).is_err());
        assert!(convergence_sweep(&t, &u, &[0.3, -0.1]).is_err());
    }

    #[test]
    fn sweep_final_equality_fails_above_spectrum_gap() {
        let t = diag_tuple();
        let s = convergence_sweep(&t, &real_vector(&[1.0, 0.5]), &[0.9, 0.7]).unwrap();
        assert!(s.monotone_ok);
        assert!(!s.final_equality_ok);
        assert!(!s.passed());
    }

    #[test]
    fn geometric_schedule_values() {
        assert_eq!(geometric_schedule(0.7, 0.5, 3), vec![0.7, 0.35, 0.175]);
    }
}
