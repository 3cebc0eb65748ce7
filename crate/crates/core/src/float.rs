//! Scalar abstraction for the classical and semiclassical numerics.
//!
//! Everything except the quantum reference module is generic over [`Float`],
//! which is implemented for `f32` and `f64`. The random streams always draw
//! in `f64` and narrow afterwards, so a given seed produces the same sample
//! trajectory in both precisions (up to rounding of the narrowed values).

use num_traits::{FloatConst, FromPrimitive, NumAssign, ToPrimitive};

pub trait Float:
    num_traits::Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + std::iter::Sum<Self>
    + std::fmt::Debug
    + std::fmt::Display
    + std::fmt::LowerExp
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal; panics only on values unrepresentable even
    /// approximately (never happens for the finite constants used here).
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite f64 literal")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar convertible to f64")
    }

    #[inline]
    fn from_usize_exact(n: usize) -> Self {
        Self::from_usize(n).expect("usize representable in scalar")
    }
}

impl Float for f32 {}
impl Float for f64 {}
