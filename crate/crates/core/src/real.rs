//! Scalar abstraction shared by every numerical routine in the crate.
//!
//! All math is written against [`Real`], so the same code runs on `f32` or
//! `f64`. Tolerances quoted in the docs assume `f64`.

use std::fmt::{Debug, Display, LowerExp};

use num_traits::{Float, FromPrimitive, NumAssign};
use serde::de::DeserializeOwned;
use serde::Serialize;

pub trait Real:
    'static
    + Float
    + FromPrimitive
    + NumAssign
    + Default
    + Debug
    + Display
    + LowerExp
    + Send
    + Sync
    + Serialize
    + DeserializeOwned
{
    /// Converts an `f64` literal into this scalar type.
    #[inline]
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        num_traits::ToPrimitive::to_f64(&self).unwrap_or(f64::NAN)
    }

    /// Base step for central finite differences.
    fn fd_step() -> Self;

    /// Threshold below which a quantity counts as zero in interior and
    /// sign tests.
    fn interior_threshold() -> Self;
}

impl Real for f64 {
    #[inline]
    fn fd_step() -> Self {
        1e-6
    }

    #[inline]
    fn interior_threshold() -> Self {
        1e-12
    }
}

impl Real for f32 {
    #[inline]
    fn fd_step() -> Self {
        5e-3
    }

    #[inline]
    fn interior_threshold() -> Self {
        1e-6
    }
}

/// Euclidean norm.
pub fn norm2<T: Real>(v: &[T]) -> T {
    v.iter().fold(T::zero(), |acc, &x| acc + x * x).sqrt()
}

/// Max norm.
pub fn norm_inf<T: Real>(v: &[T]) -> T {
    v.iter().fold(T::zero(), |acc, &x| acc.max(x.abs()))
}

pub fn dist2<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter()
        .zip(b)
        .fold(T::zero(), |acc, (&x, &y)| acc + (x - y) * (x - y))
        .sqrt()
}

pub fn all_finite<T: Real>(v: &[T]) -> bool {
    v.iter().all(|x| x.is_finite())
}
