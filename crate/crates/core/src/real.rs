use std::fmt::{Debug, Display, LowerExp};

use num_complex::Complex;
use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Real scalar backing every matrix in the crate: `f32` or `f64`.
pub trait Real:
    Float + FromPrimitive + ToPrimitive + Debug + Display + LowerExp + Default + Send + Sync + 'static
{
    /// Lossy conversion from an `f64` constant (tolerances, literals).
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("f64 constant representable")
    }

    fn to64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

pub type Scalar<R> = Complex<R>;

pub(crate) fn czero<R: Real>() -> Complex<R> {
    Complex::new(R::zero(), R::zero())
}

pub(crate) fn cone<R: Real>() -> Complex<R> {
    Complex::new(R::one(), R::zero())
}
