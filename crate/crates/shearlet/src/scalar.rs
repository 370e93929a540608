//! Floating-point scalar abstraction shared by every numerical kernel.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, Signed, ToPrimitive};

/// Scalar type the library is generic over. Implemented for `f32` and `f64`;
/// all tolerance-critical paths are exercised at `f64`.
pub trait Scalar:
    Float
    + FloatConst
    + NumAssign
    + Signed
    + FromPrimitive
    + ToPrimitive
    + Sum<Self>
    + rustfft::FftNum
    + Debug
    + Display
    + LowerExp
    + Send
    + Sync
    + 'static
{
    /// Lossless-enough conversion for report types, which are always `f64`.
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().expect("finite scalar")
    }

    /// Conversion from an `f64` constant; panics only for non-finite input.
    fn from_f64_lossy(x: f64) -> Self {
        Self::from_f64(x).expect("representable constant")
    }

    /// Conversion from usize counters.
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("representable count")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
