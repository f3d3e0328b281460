//! The Kreĭn space K = (H ⊕ … ⊕ H, J) with J = diag(s₁, …, sₙ), block
//! vectors, and uniform positivity of subspaces.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::localstruct::m_eps_basis;
use crate::numerics::{hermitian_eig, inner, norm_sq, orthonormalize, ComplexMatrix};
use crate::real::{czero, Real};
use crate::tuples::SignedOperatorTuple;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn as_i8(self) -> i8 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn factor<R: Real>(self) -> R {
        match self {
            Sign::Plus => R::one(),
            Sign::Minus => -R::one(),
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

/// Diagonal of J. Never empty.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Signature(Vec<Sign>);

impl Signature {
    pub fn new(signs: Vec<Sign>) -> Result<Self> {
        if signs.is_empty() {
            return Err(Error::InvalidArgument(
                "signature must have at least one entry".into(),
            ));
        }
        Ok(Self(signs))
    }

    /// Parses a ±1 integer list.
    pub fn from_ints(values: &[i64]) -> Result<Self> {
        let signs = values
            .iter()
            .map(|&v| match v {
                1 => Ok(Sign::Plus),
                -1 => Ok(Sign::Minus),
                other => Err(Error::InvalidArgument(format!(
                    "signature entry {other} is not ±1"
                ))),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(signs)
    }

    /// (+, +, −).
    pub fn triplet() -> Self {
        Self(vec![Sign::Plus, Sign::Plus, Sign::Minus])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn signs(&self) -> &[Sign] {
        &self.0
    }

    pub fn as_ints(&self) -> Vec<i64> {
        self.0.iter().map(|s| i64::from(s.as_i8())).collect()
    }
}

/// Block column vector (x₁, …, xₙ) in K.
#[derive(Debug, Clone, PartialEq)]
pub struct KreinVector<R: Real> {
    blocks: Vec<Vec<Complex<R>>>,
    signature: Signature,
}

impl<R: Real> KreinVector<R> {
    pub fn new(blocks: Vec<Vec<Complex<R>>>, signature: Signature) -> Result<Self> {
        if blocks.len() != signature.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} blocks for a signature of length {}",
                blocks.len(),
                signature.len()
            )));
        }
        let d = blocks[0].len();
        if blocks.iter().any(|b| b.len() != d) {
            return Err(Error::ShapeMismatch(
                "blocks have different dimensions".into(),
            ));
        }
        Ok(Self { blocks, signature })
    }

    pub fn zeros(signature: Signature, dim: usize) -> Self {
        Self {
            blocks: vec![vec![czero(); dim]; signature.len()],
            signature,
        }
    }

    /// Splits a stacked n·d column into n blocks of length d.
    pub fn from_stacked(stacked: &[Complex<R>], signature: Signature) -> Result<Self> {
        let n = signature.len();
        if !stacked.len().is_multiple_of(n) {
            return Err(Error::ShapeMismatch(format!(
                "stacked length {} is not a multiple of {n}",
                stacked.len()
            )));
        }
        let d = stacked.len() / n;
        let blocks = stacked
            .chunks(d.max(1))
            .take(n)
            .map(<[_]>::to_vec)
            .collect();
        if d == 0 {
            return Ok(Self::zeros(signature, 0));
        }
        Self::new(blocks, signature)
    }

    pub fn blocks(&self) -> &[Vec<Complex<R>>] {
        &self.blocks
    }

    pub fn block(&self, j: usize) -> &[Complex<R>] {
        &self.blocks[j]
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn block_dim(&self) -> usize {
        self.blocks[0].len()
    }

    pub fn stacked(&self) -> Vec<Complex<R>> {
        self.blocks.iter().flatten().copied().collect()
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        check_compatible(self, other)?;
        let blocks = self
            .blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| a.iter().zip(b).map(|(&x, &y)| x - y).collect())
            .collect();
        Ok(Self {
            blocks,
            signature: self.signature.clone(),
        })
    }

    /// Hilbert norm Σ‖xⱼ‖² of the block vector.
    pub fn hilbert_norm_sq(&self) -> R {
        j_norm_squared(self)
    }
}

fn check_compatible<R: Real>(x: &KreinVector<R>, y: &KreinVector<R>) -> Result<()> {
    if x.signature != y.signature {
        return Err(Error::ShapeMismatch("signatures differ".into()));
    }
    if x.block_dim() != y.block_dim() {
        return Err(Error::ShapeMismatch(format!(
            "block dimensions differ: {} vs {}",
            x.block_dim(),
            y.block_dim()
        )));
    }
    Ok(())
}

/// [x, y]_K = Σ sⱼ⟨xⱼ, yⱼ⟩.
pub fn krein_inner<R: Real>(x: &KreinVector<R>, y: &KreinVector<R>) -> Result<Complex<R>> {
    check_compatible(x, y)?;
    Ok(x.blocks
        .iter()
        .zip(&y.blocks)
        .zip(x.signature.signs())
        .fold(czero(), |acc, ((a, b), s)| {
            acc + inner(a, b) * s.factor::<R>()
        }))
}

/// Signed square norm [x, x]_K as a real number.
pub fn krein_norm_sq<R: Real>(x: &KreinVector<R>) -> R {
    x.blocks
        .iter()
        .zip(x.signature.signs())
        .fold(R::zero(), |acc, (b, s)| acc + norm_sq(b) * s.factor::<R>())
}

/// ⟨Jx, x⟩_K = Σ‖xⱼ‖².
pub fn j_norm_squared<R: Real>(x: &KreinVector<R>) -> R {
    x.blocks.iter().fold(R::zero(), |acc, b| acc + norm_sq(b))
}

/// Multiplies each block of a stacked vector by its sign.
pub fn apply_j<R: Real>(stacked: &[Complex<R>], signature: &Signature) -> Vec<Complex<R>> {
    let d = stacked.len() / signature.len();
    stacked
        .iter()
        .enumerate()
        .map(|(i, &z)| z * signature.signs()[i / d.max(1)].factor::<R>())
        .collect()
}

/// A subspace of K given by a spanning basis in stacked coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Subspace<R: Real> {
    basis: ComplexMatrix<R>,
    signature: Signature,
    block_dim: usize,
}

impl<R: Real> Subspace<R> {
    pub fn new(basis: ComplexMatrix<R>, signature: Signature) -> Result<Self> {
        let n = signature.len();
        if !basis.rows().is_multiple_of(n) {
            return Err(Error::ShapeMismatch(format!(
                "basis rows {} not divisible by {n} blocks",
                basis.rows()
            )));
        }
        let block_dim = basis.rows() / n;
        Ok(Self {
            basis,
            signature,
            block_dim,
        })
    }

    pub fn basis(&self) -> &ComplexMatrix<R> {
        &self.basis
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn block_dim(&self) -> usize {
        self.block_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.cols()
    }

    /// B*(J)B.
    pub fn krein_gram(&self) -> ComplexMatrix<R> {
        let jb = ComplexMatrix::from_columns(
            self.basis.rows(),
            &self
                .basis
                .columns()
                .iter()
                .map(|c| apply_j(c, &self.signature))
                .collect::<Vec<_>>(),
        );
        (&self.basis.adjoint() * &jb).hermitian_part()
    }

    /// Basis columns as Kreĭn vectors.
    pub fn vectors(&self) -> Vec<KreinVector<R>> {
        self.basis
            .columns()
            .iter()
            .map(|c| {
                KreinVector::from_stacked(c, self.signature.clone()).expect("consistent shape")
            })
            .collect()
    }
}

/// δ* = min over nonzero x in the span of [x, x]_K / Σ‖xⱼ‖².
///
/// The basis is orthonormalized by modified Gram–Schmidt first; δ* is then
/// the smallest eigenvalue of Q*(J)Q.
pub fn uniform_positivity_bound<R: Real>(m: &Subspace<R>) -> Result<R> {
    positivity_with(m, 1e-12)
}

pub(crate) fn positivity_with<R: Real>(m: &Subspace<R>, threshold: f64) -> Result<R> {
    if m.dim() == 0 {
        return Err(Error::EmptySubspace);
    }
    let columns = m.basis.columns();
    let (q, kept) = orthonormalize(&columns, crate::numerics::precision_floor(1e-10, 64.0));
    if kept.len() != columns.len() {
        return Err(Error::DegenerateBasis);
    }
    let qm = ComplexMatrix::from_columns(m.ambient_dim(), &q);
    let jq = ComplexMatrix::from_columns(
        m.ambient_dim(),
        &q.iter()
            .map(|c| apply_j(c, &m.signature))
            .collect::<Vec<_>>(),
    );
    let h = (&qm.adjoint() * &jq).hermitian_part();
    let delta = hermitian_eig(&h)?.min_eigenvalue();
    if delta <= R::of(threshold) {
        return Err(Error::NotUniformlyPositive {
            delta: delta.to64(),
        });
    }
    Ok(delta)
}

/// Outcome of checking the uniform-positivity lower bound of 𝔐_ε.
#[derive(Debug, Clone, PartialEq)]
pub struct LemmaReport<R: Real> {
    pub eps: R,
    /// `None` when the check is vacuous.
    pub delta_star: Option<R>,
    /// ε² / (n · maxⱼ‖Tⱼ‖²).
    pub bound: R,
    pub subspace_dim: usize,
    pub vacuous: bool,
    pub passed: bool,
}

/// Builds 𝔐_ε = 𝐓♯(E_ε^⊥H), computes δ* and compares it with
/// ε² / (n · maxⱼ‖Tⱼ‖²). The check is vacuous when E_ε^⊥ = 0 or every
/// operator vanishes.
pub fn check_lemma_bound<R: Real>(
    tuple: &SignedOperatorTuple<R>,
    eps: R,
) -> Result<LemmaReport<R>> {
    if eps <= R::zero() {
        return Err(Error::InvalidArgument("eps must be positive".into()));
    }
    let n = R::of(tuple.len() as f64);
    let max_norm = tuple
        .ops()
        .iter()
        .map(ComplexMatrix::operator_norm)
        .fold(R::zero(), R::max);
    let vacuous = |bound| LemmaReport {
        eps,
        delta_star: None,
        bound,
        subspace_dim: 0,
        vacuous: true,
        passed: true,
    };
    if max_norm.is_zero() {
        return Ok(vacuous(R::zero()));
    }
    let bound = eps * eps / (n * max_norm * max_norm);
    let subspace = match m_eps_basis(tuple, eps) {
        Ok(s) => s,
        Err(Error::EmptySubspace) => return Ok(vacuous(bound)),
        Err(e) => return Err(e),
    };
    let tol = tuple.tolerances();
    let delta = match positivity_with(&subspace, tol.positivity) {
        Ok(d) => d,
        Err(Error::NotUniformlyPositive { delta }) => R::of(delta),
        Err(e) => return Err(e),
    };
    Ok(LemmaReport {
        eps,
        delta_star: Some(delta),
        bound,
        subspace_dim: subspace.dim(),
        vacuous: false,
        passed: delta >= bound - R::of(tol.lemma),
    })
}
