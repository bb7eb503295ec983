//! Floating-point abstraction shared by the solver modules.

use std::fmt::Debug;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// f32 or f64.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal. Lossy for `f32`.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl<T> Scalar for T where
    T: Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Default + Send + Sync + 'static
{
}

/// `log2(1 + x)` without the cancellation of `(1 + x).log2()` for small `x`.
#[inline]
pub(crate) fn log2_1p<T: Scalar>(x: T) -> T {
    x.ln_1p() / T::LN_2()
}

/// `2^x - 1`, accurate near zero.
#[inline]
pub(crate) fn exp2_m1<T: Scalar>(x: T) -> T {
    (x * T::LN_2()).exp_m1()
}

/// Neumaier-compensated sum.
pub(crate) fn compensated_sum<T: Scalar>(values: impl IntoIterator<Item = T>) -> T {
    let mut sum = T::zero();
    let mut carry = T::zero();
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            carry = carry + ((sum - t) + v);
        } else {
            carry = carry + ((v - t) + sum);
        }
        sum = t;
    }
    sum + carry
}
