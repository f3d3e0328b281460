//! Signed operator tuples, their defect D = Σ sⱼTⱼTⱼ*, and the maps
//! 𝐓: K → H, 𝐓♯: H → K.

use num_complex::Complex;
use rand::Rng;

use crate::error::{Error, Result};
use crate::krein::{krein_norm_sq, KreinVector, Signature};
use crate::numerics::{
    self, apply_spectral_function, gaussian_vector, hermitian_eig_with, norm, norm_sq,
    orthonormalize, projection_residual, psd_decomposition, scale_vec, ComplexMatrix,
    SpectralDecomposition,
};
use crate::real::{czero, Real};
use crate::tolerance::Tolerances;

/// Which half of 0 ⪯ D ⪯ I holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ValidityLevel {
    Invalid,
    /// D ⪰ 0 only.
    Lower,
    /// 0 ⪯ D ⪯ I.
    Full,
}

impl ValidityLevel {
    pub fn as_str(self) -> &'static str {
        match self {
            ValidityLevel::Invalid => "invalid",
            ValidityLevel::Lower => "lower",
            ValidityLevel::Full => "full",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport<R: Real> {
    pub level: ValidityLevel,
    pub min_eig_d: R,
    pub max_eig_d: R,
    /// Unit eigenvectors of D violating the failed inequality.
    pub witnesses: Vec<Vec<Complex<R>>>,
}

fn check_shapes<R: Real>(ops: &[ComplexMatrix<R>], signature: &Signature) -> Result<usize> {
    if ops.len() != signature.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} operators for a signature of length {}",
            ops.len(),
            signature.len()
        )));
    }
    let d = ops[0].rows();
    for (j, op) in ops.iter().enumerate() {
        if op.rows() != d || op.cols() != d {
            return Err(Error::ShapeMismatch(format!(
                "operator {j} is {}x{}, expected {d}x{d}",
                op.rows(),
                op.cols()
            )));
        }
    }
    Ok(d)
}

/// D = Σ sⱼ TⱼTⱼ*.
pub fn defect<R: Real>(
    ops: &[ComplexMatrix<R>],
    signature: &Signature,
) -> Result<ComplexMatrix<R>> {
    let d = check_shapes(ops, signature)?;
    let mut acc = ComplexMatrix::zeros(d, d);
    for (op, s) in ops.iter().zip(signature.signs()) {
        let g = op.gram_rows().scale_real(s.factor::<R>());
        acc = &acc + &g;
    }
    Ok(acc.hermitian_part())
}

/// Classifies a tuple as full, lower or invalid.
pub fn validate<R: Real>(
    ops: &[ComplexMatrix<R>],
    signature: &Signature,
) -> Result<ValidationReport<R>> {
    validate_with(ops, signature, &Tolerances::default())
}

pub fn validate_with<R: Real>(
    ops: &[ComplexMatrix<R>],
    signature: &Signature,
    tol: &Tolerances,
) -> Result<ValidationReport<R>> {
    let d = defect(ops, signature)?;
    let spec = hermitian_eig_with(&d, tol.hermitian)?;
    Ok(classify(&spec, tol))
}

fn classify<R: Real>(spec: &SpectralDecomposition<R>, tol: &Tolerances) -> ValidationReport<R> {
    let psd = R::of(tol.psd);
    let min = spec.min_eigenvalue();
    let max = spec.max_eigenvalue();
    let (level, bad) = if min < -psd {
        (ValidityLevel::Invalid, spec.select(|l| l < -psd))
    } else if max > R::one() + psd {
        (ValidityLevel::Lower, spec.select(|l| l > R::one() + psd))
    } else {
        (ValidityLevel::Full, Vec::new())
    };
    ValidationReport {
        level,
        min_eig_d: min,
        max_eig_d: max,
        witnesses: bad.iter().map(|&i| spec.eigenvector(i)).collect(),
    }
}

/// Operators (T₁, …, Tₙ) on a common space with signs, satisfying D ⪰ 0.
/// The defect, its square root T and the spectrum of T are computed once at
/// construction.
#[derive(Debug, Clone)]
pub struct SignedOperatorTuple<R: Real> {
    ops: Vec<ComplexMatrix<R>>,
    signature: Signature,
    dim: usize,
    defect: ComplexMatrix<R>,
    defect_sqrt: ComplexMatrix<R>,
    spectrum: SpectralDecomposition<R>,
    validation: ValidationReport<R>,
    tol: Tolerances,
}

impl<R: Real> SignedOperatorTuple<R> {
    pub fn new(ops: Vec<ComplexMatrix<R>>, signature: Signature) -> Result<Self> {
        Self::with_tolerances(ops, signature, Tolerances::default())
    }

    /// Triplet (T₁, T₂, T₃) with signature (+, +, −).
    pub fn triplet(
        t1: ComplexMatrix<R>,
        t2: ComplexMatrix<R>,
        t3: ComplexMatrix<R>,
    ) -> Result<Self> {
        Self::new(vec![t1, t2, t3], Signature::triplet())
    }

    pub fn with_tolerances(
        ops: Vec<ComplexMatrix<R>>,
        signature: Signature,
        tol: Tolerances,
    ) -> Result<Self> {
        let dim = check_shapes(&ops, &signature)?;
        let d = defect(&ops, &signature)?;
        let raw = hermitian_eig_with(&d, tol.hermitian)?;
        let validation = classify(&raw, &tol);
        if validation.level == ValidityLevel::Invalid {
            return Err(Error::InvalidTuple {
                level: ValidityLevel::Invalid,
            });
        }
        let d_spec = psd_decomposition(&d, &tol)?;
        let spectrum = SpectralDecomposition::from_parts(
            d_spec.eigenvalues().iter().map(|l| l.sqrt()).collect(),
            d_spec.eigenvectors().clone(),
        )?;
        let defect_sqrt = apply_spectral_function(&spectrum, |l| l);
        Ok(Self {
            ops,
            signature,
            dim,
            defect: d,
            defect_sqrt,
            spectrum,
            validation,
            tol,
        })
    }

    pub fn ops(&self) -> &[ComplexMatrix<R>] {
        &self.ops
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    /// Number of operators n.
    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    /// Dimension d of the underlying space H.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn defect(&self) -> &ComplexMatrix<R> {
        &self.defect
    }

    /// T = D^{1/2}.
    pub fn defect_sqrt(&self) -> &ComplexMatrix<R> {
        &self.defect_sqrt
    }

    /// Spectral decomposition of T (ascending).
    pub fn spectrum(&self) -> &SpectralDecomposition<R> {
        &self.spectrum
    }

    pub fn validation(&self) -> &ValidationReport<R> {
        &self.validation
    }

    pub fn level(&self) -> ValidityLevel {
        self.validation.level
    }

    pub fn tolerances(&self) -> &Tolerances {
        &self.tol
    }

    /// Eigenvalues of T at or below this are the kernel.
    pub fn rank_cutoff(&self) -> R {
        R::of(self.tol.rank_cutoff(self.spectrum.max_eigenvalue().to64()))
    }

    /// Indices of eigenvalues of T spanning (ker T)^⊥.
    pub fn support_indices(&self) -> Vec<usize> {
        let cutoff = self.rank_cutoff();
        self.spectrum.select(|l| l > cutoff)
    }

    /// Smallest eigenvalue of T above the rank cutoff; `None` if T = 0.
    pub fn lambda_min_plus(&self) -> Option<R> {
        self.support_indices()
            .first()
            .map(|&i| self.spectrum.eigenvalues()[i])
    }

    /// 𝐓z = Σ sⱼTⱼzⱼ.
    pub fn bt_apply(&self, z: &KreinVector<R>) -> Result<Vec<Complex<R>>> {
        if z.signature() != &self.signature || z.block_dim() != self.dim {
            return Err(Error::ShapeMismatch(
                "Kreĭn vector does not match tuple".into(),
            ));
        }
        let mut out = vec![czero(); self.dim];
        for ((op, s), zj) in self.ops.iter().zip(self.signature.signs()).zip(z.blocks()) {
            let tz = op.mul_vec(zj)?;
            let f = s.factor::<R>();
            for (o, t) in out.iter_mut().zip(tz) {
                *o = *o + t * f;
            }
        }
        Ok(out)
    }

    /// 𝐓♯x = (T₁*x, …, Tₙ*x).
    pub fn bt_sharp(&self, x: &[Complex<R>]) -> Result<KreinVector<R>> {
        let blocks = self
            .ops
            .iter()
            .map(|op| op.adjoint_mul_vec(x))
            .collect::<Result<Vec<_>>>()?;
        KreinVector::new(blocks, self.signature.clone())
    }

    /// 𝐓 as a d × n·d matrix [s₁T₁ … sₙTₙ].
    pub fn bt_matrix(&self) -> ComplexMatrix<R> {
        let blocks: Vec<_> = self
            .ops
            .iter()
            .zip(self.signature.signs())
            .map(|(op, s)| op.scale_real(s.factor::<R>()))
            .collect();
        ComplexMatrix::hstack(&blocks).expect("equal row counts")
    }

    /// 𝐓♯ as an n·d × d matrix stacking T₁*, …, Tₙ*.
    pub fn bt_sharp_matrix(&self) -> ComplexMatrix<R> {
        let blocks: Vec<_> = self.ops.iter().map(ComplexMatrix::adjoint).collect();
        ComplexMatrix::vstack(&blocks).expect("equal column counts")
    }

    /// Every operator multiplied by `c`.
    pub fn scaled(&self, c: R) -> Result<Self> {
        Self::with_tolerances(
            self.ops.iter().map(|op| op.scale_real(c)).collect(),
            self.signature.clone(),
            self.tol,
        )
    }
}

/// T = (Σ sⱼTⱼTⱼ*)^{1/2}.
pub fn defect_sqrt<R: Real>(tuple: &SignedOperatorTuple<R>) -> &ComplexMatrix<R> {
    tuple.defect_sqrt()
}

/// Largest deviation |‖Tx‖² − [𝐓♯x, 𝐓♯x]_K| over `samples` random unit vectors.
pub fn isometry_check<R: Real, G: Rng + ?Sized>(
    tuple: &SignedOperatorTuple<R>,
    samples: usize,
    rng: &mut G,
) -> R {
    let mut worst = R::zero();
    for _ in 0..samples {
        let g = gaussian_vector::<R, _>(tuple.dim(), rng);
        let n = norm(&g);
        if n.is_zero() {
            continue;
        }
        let x = scale_vec(&g, Complex::new(R::one() / n, R::zero()));
        worst = worst.max(isometry_deviation(tuple, &x));
    }
    worst
}

/// |‖Tx‖² − [𝐓♯x, 𝐓♯x]_K| for one vector.
pub fn isometry_deviation<R: Real>(tuple: &SignedOperatorTuple<R>, x: &[Complex<R>]) -> R {
    let tx = tuple.defect_sqrt().mul_vec(x).expect("dimension");
    let sharp = tuple.bt_sharp(x).expect("dimension");
    (norm_sq(&tx) - krein_norm_sq(&sharp)).abs()
}

/// Finite-dimensional checks on 𝐓̃, the extension of 𝐓 from 𝐓♯L where
/// L = (ker T)^⊥.
#[derive(Debug, Clone, PartialEq)]
pub struct TtildeReport<R: Real> {
    pub l_dim: usize,
    /// (i): 𝐓 has trivial kernel on 𝐓♯L.
    pub injective: bool,
    /// Rank of 𝐓(𝐓♯L).
    pub image_rank: usize,
    /// (iii): largest mutual projection residual between 𝐓(𝐓♯L) and ran T.
    pub range_residual: R,
    /// (ii) holds by construction; this is max ‖𝐓𝐓♯v − Dv‖ over a basis of L.
    pub extension_gap: R,
    pub vacuous: bool,
    pub passed: bool,
}

pub fn ttilde_properties<R: Real>(tuple: &SignedOperatorTuple<R>) -> Result<TtildeReport<R>> {
    let support = tuple.support_indices();
    if support.is_empty() {
        return Ok(TtildeReport {
            l_dim: 0,
            injective: true,
            image_rank: 0,
            range_residual: R::zero(),
            extension_gap: R::zero(),
            vacuous: true,
            passed: true,
        });
    }
    let spec = tuple.spectrum();
    let l_basis: Vec<_> = support.iter().map(|&i| spec.eigenvector(i)).collect();
    let sharp: Vec<_> = l_basis
        .iter()
        .map(|v| tuple.bt_sharp(v).map(|z| z.stacked()))
        .collect::<Result<_>>()?;
    let drop: R = numerics::precision_floor(1e-8, 64.0);
    let (_, sharp_kept) = orthonormalize(&sharp, drop);

    let mut image = Vec::with_capacity(sharp.len());
    let mut gap = R::zero();
    for (v, col) in l_basis.iter().zip(&sharp) {
        let z = KreinVector::from_stacked(col, tuple.signature().clone())?;
        let tz = tuple.bt_apply(&z)?;
        let dv = tuple.defect().mul_vec(v)?;
        gap = gap.max(norm(&numerics::sub_vec(&tz, &dv)));
        image.push(tz);
    }
    let (q_image, image_kept) = orthonormalize(&image, drop);
    let injective = sharp_kept.len() == l_basis.len() && image_kept.len() == l_basis.len();

    let forward = l_basis
        .iter()
        .map(|v| projection_residual(&q_image, v))
        .fold(R::zero(), R::max);
    let backward = q_image
        .iter()
        .map(|q| projection_residual(&l_basis, q))
        .fold(R::zero(), R::max);
    let range_residual = forward.max(backward);
    let ok = R::of(tuple.tolerances().residual);
    Ok(TtildeReport {
        l_dim: l_basis.len(),
        injective,
        image_rank: q_image.len(),
        range_residual,
        extension_gap: gap,
        vacuous: false,
        passed: injective && q_image.len() == l_basis.len() && range_residual <= ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{gaussian_matrix, inner, real_vector};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    type M = ComplexMatrix<f64>;

    fn diag_tuple() -> SignedOperatorTuple<f64> {
        SignedOperatorTuple::triplet(M::diag_real(&[1.0, 0.5]), M::zeros(2, 2), M::zeros(2, 2))
            .unwrap()
    }

    fn scalar_triplet() -> SignedOperatorTuple<f64> {
        let one = M::identity(1);
        SignedOperatorTuple::triplet(one.clone(), one.clone(), one).unwrap()
    }

    #[test]
    fn validation_levels() {
        let i = M::identity(3);
        let z = M::zeros(3, 3);
        let sig = Signature::triplet();
        let full = validate(&[i.clone(), z.clone(), z.clone()], &sig).unwrap();
        assert_eq!(full.level, ValidityLevel::Full);
        let lower = validate(&[i.scale_real(2.0), z.clone(), z.clone()], &sig).unwrap();
        assert_eq!(lower.level, ValidityLevel::Lower);
        assert_eq!(lower.witnesses.len(), 3);
        let bad = validate(&[z.clone(), z.clone(), i.clone()], &sig).unwrap();
        assert_eq!(bad.level, ValidityLevel::Invalid);
        assert!(!bad.witnesses.is_empty());
        for w in &bad.witnesses {
            assert!((norm(w) - 1.0).abs() < 1e-12);
        }
        assert!(matches!(
            SignedOperatorTuple::new(vec![z.clone(), z.clone(), i], sig.clone()),
            Err(Error::InvalidTuple { .. })
        ));
        assert!(matches!(
            validate(&[z.clone(), M::zeros(2, 2), z], &sig),
            Err(Error::ShapeMismatch(_))
        ));
    }

    #[test]
    fn defect_sqrt_examples() {
        let t = diag_tuple();
        assert!((t.defect_sqrt() - &M::diag_real(&[1.0, 0.5])).frobenius_norm() < 1e-15);
        let s = scalar_triplet();
        assert!((s.defect_sqrt()[(0, 0)].re - 1.0).abs() < 1e-15);
        assert_eq!(t.lambda_min_plus(), Some(0.5));
    }

    #[test]
    fn bt_examples() {
        let s = scalar_triplet();
        let z = KreinVector::new(vec![real_vector(&[1.0]); 3], Signature::triplet()).unwrap();
        assert!((s.bt_apply(&z).unwrap()[0].re - 1.0).abs() < 1e-15);
        let zero = KreinVector::zeros(Signature::triplet(), 1);
        assert_eq!(s.bt_apply(&zero).unwrap()[0].norm(), 0.0);
        let sharp = diag_tuple().bt_sharp(&real_vector(&[1.0, 1.0])).unwrap();
        assert_eq!(norm_sq(sharp.block(2)), 0.0);
        assert_eq!(
            norm_sq(
                diag_tuple()
                    .bt_sharp(&real_vector(&[0.0, 0.0]))
                    .unwrap()
                    .block(0)
            ),
            0.0
        );
    }

    #[test]
    fn bt_bt_sharp_is_defect() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let ops: Vec<M> = (0..3)
            .map(|_| gaussian_matrix(4, 4, &mut rng).scale_real(0.3))
            .collect();
        let t = SignedOperatorTuple::new(ops, Signature::from_ints(&[1, 1, 1]).unwrap()).unwrap();
        let prod = &t.bt_matrix() * &t.bt_sharp_matrix();
        assert!((&prod - t.defect()).frobenius_norm() < 1e-12);
        for _ in 0..20 {
            let x: Vec<Complex<f64>> = gaussian_vector(4, &mut rng);
            let z = KreinVector::from_stacked(
                &gaussian_vector::<f64, _>(12, &mut rng),
                t.signature().clone(),
            )
            .unwrap();
            let lhs = inner(&x, &t.bt_apply(&z).unwrap());
            let rhs = crate::krein::krein_inner(&t.bt_sharp(&x).unwrap(), &z).unwrap();
            assert!((lhs - rhs).norm() < 1e-12);
        }
    }

    #[test]
    fn isometry_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        assert!(isometry_check(&diag_tuple(), 100, &mut rng) <= 1e-9);
        let s = scalar_triplet();
        assert!(isometry_deviation(&s, &real_vector(&[1.0])) < 1e-15);
    }

    #[test]
    fn isometry_vanishes_on_kernel() {
        let t =
            SignedOperatorTuple::triplet(M::diag_real(&[1.0, 0.0]), M::zeros(2, 2), M::zeros(2, 2))
                .unwrap();
        let k = real_vector(&[0.0, 1.0]);
        assert_eq!(krein_norm_sq(&t.bt_sharp(&k).unwrap()), 0.0);
        assert_eq!(isometry_deviation(&t, &k), 0.0);
    }

    #[test]
    fn ttilde_examples() {
        let r = ttilde_properties(&diag_tuple()).unwrap();
        assert_eq!(r.l_dim, 2);
        assert!(r.injective && r.passed);
        assert_eq!(r.image_rank, 2);
        let z = M::zeros(2, 2);
        let zero = SignedOperatorTuple::triplet(z.clone(), z.clone(), z).unwrap();
        let v = ttilde_properties(&zero).unwrap();
        assert!(v.vacuous && v.passed);
    }

    #[test]
    fn scaling_rescales_defect_spectrum() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let ops: Vec<M> = (0..2)
            .map(|_| gaussian_matrix(3, 3, &mut rng).scale_real(0.4))
            .collect();
        let t = SignedOperatorTuple::new(ops, Signature::from_ints(&[1, 1]).unwrap()).unwrap();
        let half = t.scaled(0.5).unwrap();
        let a = hermitian_eig_with(t.defect(), 1e-10).unwrap();
        let b = hermitian_eig_with(half.defect(), 1e-10).unwrap();
        for (x, y) in a.eigenvalues().iter().zip(b.eigenvalues()) {
            assert!((0.25 * x - y).abs() < 1e-12);
        }
    }
}
