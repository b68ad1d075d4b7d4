use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};

/// Floating point scalar used by every trainer and model container.
///
/// Implemented for `f32` (the storage type of the interchange formats) and
/// `f64` (used by the gradient checks).
pub trait Real:
    Float
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Debug
    + Display
    + LowerExp
    + Default
    + Send
    + Sync
    + 'static
{
    /// Lossy conversion from `f64`; trainer hyperparameters are kept as `f64`.
    #[inline]
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("f64 is representable in every Real")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("Real converts to f64")
    }

    /// Logistic function `1 / (1 + e^-x)`.
    #[inline]
    fn sigmoid(self) -> Self {
        if self >= Self::zero() {
            Self::one() / (Self::one() + (-self).exp())
        } else {
            let e = self.exp();
            e / (Self::one() + e)
        }
    }

    /// `-ln σ(x) = ln(1 + e^-x)`, evaluated without overflow.
    #[inline]
    fn neg_log_sigmoid(self) -> Self {
        if self >= Self::zero() {
            (-self).exp().ln_1p()
        } else {
            -self + self.exp().ln_1p()
        }
    }
}

impl Real for f32 {}
impl Real for f64 {}

#[inline]
pub(crate) fn dot<F: Real>(a: &[F], b: &[F]) -> F {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).fold(F::zero(), |acc, (&x, &y)| acc + x * y)
}

/// `y += a * x`
#[inline]
pub(crate) fn axpy<F: Real>(a: F, x: &[F], y: &mut [F]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, &xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}
