//! Indefinite range inclusion for signed operator tuples.
//!
//! A signed tuple (T₁, …, Tₙ; s₁, …, sₙ) of square matrices with
//! D = Σ sⱼTⱼTⱼ* ⪰ 0 defines the row map 𝐓z = Σ sⱼTⱼzⱼ on the Kreĭn space
//! K = (Hⁿ, J). Every u in the range of T = D^{1/2} is reached as 𝐓z with
//! ⟨z, z⟩_K equal to the de Branges–Rovnyak norm ‖u‖²_{M(T)}; the crate
//! constructs those solutions through spectral truncation of T and checks
//! the surrounding identities numerically.
//!
//! All math is generic over [`Real`] (`f32` or `f64`); the aliases at the
//! crate root fix `f64`, which the documented tolerances assume.

pub mod dbr;
pub mod error;
pub mod generators;
pub mod krein;
pub mod localstruct;
pub mod numerics;
mod real;
pub mod solver;
pub mod tolerance;
pub mod tuples;

pub use error::{Error, Result};
pub use real::{Real, Scalar};
pub use tolerance::Tolerances;

pub use krein::{KreinVector, Sign, Signature, Subspace};
pub use numerics::{ComplexMatrix, SpectralDecomposition};
pub use solver::{SolveReport, Sweep};
pub use tuples::{SignedOperatorTuple, ValidationReport, ValidityLevel};

pub type C64 = num_complex::Complex<f64>;
pub type Matrix = ComplexMatrix<f64>;
pub type Matrix32 = ComplexMatrix<f32>;
pub type Spectrum = SpectralDecomposition<f64>;
pub type Tuple = SignedOperatorTuple<f64>;
pub type Tuple32 = SignedOperatorTuple<f32>;
pub type Vector = Vec<C64>;
pub type KVector = KreinVector<f64>;
pub type Report = SolveReport<f64>;
