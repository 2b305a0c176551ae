//! Scalar abstraction shared by every numeric routine.

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use std::fmt::{Debug, Display};

/// Real field the library is generic over (`f32`, `f64`).
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
}

impl<T> Real for T where
    T: Float
        + FloatConst
        + FromPrimitive
        + ToPrimitive
        + Debug
        + Display
        + Default
        + Send
        + Sync
        + 'static
{
}

/// Converts an `f64` literal into `T`.
#[inline]
pub fn lit<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("literal representable in scalar type")
}

#[inline]
pub fn to_f64<T: Real>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

#[inline]
pub fn cre<T: Real>(x: T) -> Complex<T> {
    Complex::new(x, T::zero())
}

#[inline]
pub fn one<T: Real>() -> Complex<T> {
    Complex::new(T::one(), T::zero())
}

#[inline]
pub fn zero<T: Real>() -> Complex<T> {
    Complex::new(T::zero(), T::zero())
}

/// `base^e` for a positive real base, via `exp(e ln base)`.
#[inline]
pub fn rpow<T: Real>(base: T, e: Complex<T>) -> Complex<T> {
    (e * base.ln()).exp()
}

/// Principal square root, with a vanishing imaginary part read as `+0`.
///
/// Values that are real up to rounding are snapped onto the real axis first, so
/// a negative real always maps to `+i·sqrt|x|` regardless of the sign of a
/// stray `-0.0` or `1e-17` imaginary part.
pub fn psqrt<T: Real>(z: Complex<T>) -> Complex<T> {
    let snap = lit::<T>(1e-11);
    if z.im.abs() <= snap * z.re.abs() {
        if z.re >= T::zero() {
            Complex::new(z.re.sqrt(), T::zero())
        } else {
            Complex::new(T::zero(), (-z.re).sqrt())
        }
    } else {
        z.sqrt()
    }
}
