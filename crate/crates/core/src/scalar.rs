//! Floating-point scalar abstraction shared by the Gram-Schmidt engine,
//! enumeration and the regression fitters.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumCast, ToPrimitive};

/// Real scalar usable by the numeric kernels (`f32` or `f64`).
pub trait Real:
    Float + FromPrimitive + ToPrimitive + NumCast + Sum + Debug + Display + Send + Sync + 'static
{
    fn of(x: f64) -> Self {
        <Self as NumCast>::from(x).expect("finite conversion")
    }

    fn of_int(x: i64) -> Self {
        <Self as NumCast>::from(x).expect("integer conversion")
    }

    fn of_wide(x: i128) -> Self {
        Self::of(x as f64)
    }

    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}
