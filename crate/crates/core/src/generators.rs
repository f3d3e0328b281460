//! Concrete tuples: truncated analytic Toeplitz operators, the corona-type
//! triplet (T_{φ₁}, T_{φ₂}, T_{φ₁ψ₁+φ₂ψ₂}), the bidisk shift triplet
//! (T_z, T_w, T_{zw}) and seeded random tuples.
//!
//! Symbols are polynomials given by their Taylor coefficients. For an analytic
//! polynomial φ the compression of T_φ to span{1, z, …, z^{n−1}} is the lower
//! triangular Toeplitz matrix of its coefficients, and T_φ* leaves that span
//! invariant, so P T_φT_φ* P = (PT_φP)(PT_φP)* holds exactly.

use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::krein::{Sign, Signature};
use crate::numerics::{gaussian_matrix, ComplexMatrix};
use crate::real::{czero, Real};
use crate::tuples::{SignedOperatorTuple, ValidityLevel};

/// Resolution of the circle sampling used to screen multiplier norms.
pub const CIRCLE_SAMPLES: usize = 4096;

/// n×n lower triangular Toeplitz matrix with (i, j) entry coeffs[i − j].
pub fn toeplitz_analytic<R: Real>(coeffs: &[Complex<R>], n: usize) -> ComplexMatrix<R> {
    ComplexMatrix::from_fn(n, n, |i, j| {
        if i >= j {
            coeffs.get(i - j).copied().unwrap_or_else(czero)
        } else {
            czero()
        }
    })
}

/// Coefficients of the product of two polynomials.
pub fn poly_mul<R: Real>(a: &[Complex<R>], b: &[Complex<R>]) -> Vec<Complex<R>> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![czero(); a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = out[i + j] + x * y;
        }
    }
    out
}

pub fn poly_add<R: Real>(a: &[Complex<R>], b: &[Complex<R>]) -> Vec<Complex<R>> {
    (0..a.len().max(b.len()))
        .map(|k| a.get(k).copied().unwrap_or_else(czero) + b.get(k).copied().unwrap_or_else(czero))
        .collect()
}

fn poly_eval<R: Real>(coeffs: &[Complex<R>], z: Complex<R>) -> Complex<R> {
    coeffs.iter().rev().fold(czero(), |acc, &c| acc * z + c)
}

/// max over `m` roots of unity ζ of Σₖ |φₖ(ζ)|².
pub fn circle_sup<R: Real>(symbols: &[&[Complex<R>]], m: usize) -> R {
    let mut best = R::zero();
    for k in 0..m {
        let theta = 2.0 * std::f64::consts::PI * k as f64 / m as f64;
        let z = Complex::new(R::of(theta.cos()), R::of(theta.sin()));
        let s = symbols
            .iter()
            .fold(R::zero(), |acc, p| acc + poly_eval(p, z).norm_sqr());
        best = best.max(s);
    }
    best
}

#[derive(Debug, Clone)]
pub struct CoronaTriplet<R: Real> {
    pub tuple: SignedOperatorTuple<R>,
    /// Coefficients of φ₃ = φ₁ψ₁ + φ₂ψ₂.
    pub phi3: Vec<Complex<R>>,
    /// Sampled sup of |φ₁|² + |φ₂|².
    pub row_sup: R,
    /// Sampled sup of |ψ₁|² + |ψ₂|².
    pub col_sup: R,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct CoronaScreen<R: Real> {
    pub row_sup: R,
    pub col_sup: R,
    pub warnings: Vec<String>,
}

/// Samples the row and column conditions on the circle. Diagnostic only.
pub fn corona_screen<R: Real>(
    phi1: &[Complex<R>],
    phi2: &[Complex<R>],
    psi1: &[Complex<R>],
    psi2: &[Complex<R>],
) -> CoronaScreen<R> {
    let row_sup = circle_sup(&[phi1, phi2], CIRCLE_SAMPLES);
    let col_sup = circle_sup(&[psi1, psi2], CIRCLE_SAMPLES);
    let margin = R::one() + R::of(1e-9);
    let mut warnings = Vec::new();
    if row_sup > margin {
        warnings.push(format!("sup |φ₁|² + |φ₂|² ≈ {row_sup} exceeds 1"));
    }
    if col_sup > margin {
        warnings.push(format!("sup |ψ₁|² + |ψ₂|² ≈ {col_sup} exceeds 1"));
    }
    CoronaScreen {
        row_sup,
        col_sup,
        warnings,
    }
}

/// (T_{φ₁}, T_{φ₂}, T_{φ₃}) truncated to dimension n with signature (+, +, −).
///
/// The circle screening only produces warnings; the returned tuple is
/// required to validate at the full level.
pub fn corona_triplet<R: Real>(
    phi1: &[Complex<R>],
    phi2: &[Complex<R>],
    psi1: &[Complex<R>],
    psi2: &[Complex<R>],
    n: usize,
) -> Result<CoronaTriplet<R>> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "truncation size must be at least 1".into(),
        ));
    }
    let phi3 = poly_add(&poly_mul(phi1, psi1), &poly_mul(phi2, psi2));
    let CoronaScreen {
        row_sup,
        col_sup,
        warnings,
    } = corona_screen(phi1, phi2, psi1, psi2);
    let tuple = SignedOperatorTuple::triplet(
        toeplitz_analytic(phi1, n),
        toeplitz_analytic(phi2, n),
        toeplitz_analytic(&phi3, n),
    )?;
    if tuple.level() != ValidityLevel::Full {
        return Err(Error::InvalidTuple {
            level: tuple.level(),
        });
    }
    Ok(CoronaTriplet {
        tuple,
        phi3,
        row_sup,
        col_sup,
        warnings,
    })
}

/// n×n shift: e_k ↦ e_{k+1}, e_{n−1} ↦ 0.
pub fn shift<R: Real>(n: usize) -> ComplexMatrix<R> {
    toeplitz_analytic(&[czero(), Complex::new(R::one(), R::zero())], n)
}

/// (S⊗I, I⊗S, S⊗S) on ℂⁿ⊗ℂⁿ, the truncation of (T_z, T_w, T_{zw}) on the
/// bidisk Hardy space. Basis vector i·n + j is z^i w^j.
pub fn bidisk_triplet<R: Real>(n: usize) -> Result<SignedOperatorTuple<R>> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "truncation size must be at least 1".into(),
        ));
    }
    let s = shift::<R>(n);
    let i = ComplexMatrix::identity(n);
    SignedOperatorTuple::triplet(s.kron(&i), i.kron(&s), s.kron(&s))
}

/// I − P₀⊗P₀ on ℂⁿ⊗ℂⁿ: the projection annihilating the constants.
pub fn bidisk_expected_defect<R: Real>(n: usize) -> ComplexMatrix<R> {
    let mut d = ComplexMatrix::identity(n * n);
    d[(0, 0)] = czero();
    d
}

/// Random tuple with `positives` plus-signed and `negatives` minus-signed
/// operators on ℂ^dim, built so that 0 ⪯ D ⪯ I.
///
/// The positive row R = [G₁ … G_p] is scaled to norm 1 − margin, the block
/// column contraction C to norm 1 − margin, and the negatives are the blocks
/// of RC. Then D = R(I − CC*)R* lies between 0 and RR* ⪯ (1 − margin)² I.
pub fn random_tuple<R: Real>(
    positives: usize,
    negatives: usize,
    dim: usize,
    seed: u64,
    margin: f64,
) -> Result<SignedOperatorTuple<R>> {
    if !(margin > 0.0 && margin < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "margin {margin} outside (0, 1)"
        )));
    }
    if dim == 0 || positives + negatives == 0 {
        return Err(Error::InvalidArgument(
            "need dim ≥ 1 and at least one operator".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let target = R::of(1.0 - margin);
    let normalize = |m: ComplexMatrix<R>| {
        let n = m.operator_norm();
        if n > R::zero() {
            m.scale_real(target / n)
        } else {
            m
        }
    };
    let row = normalize(gaussian_matrix(dim, positives * dim, &mut rng));
    let column = normalize(gaussian_matrix(positives * dim, negatives * dim, &mut rng));
    let neg = row.matmul(&column)?;

    let mut ops = Vec::with_capacity(positives + negatives);
    let mut signs = Vec::with_capacity(positives + negatives);
    for k in 0..positives {
        ops.push(row.submatrix(0, k * dim, dim, dim));
        signs.push(Sign::Plus);
    }
    for k in 0..negatives {
        ops.push(neg.submatrix(0, k * dim, dim, dim));
        signs.push(Sign::Minus);
    }
    SignedOperatorTuple::new(ops, Signature::new(signs)?)
}
