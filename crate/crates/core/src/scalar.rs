//! Scalar abstraction shared by every numeric routine in the crate.
//!
//! Distances are kilometres, speeds km/h, times hours. All of the solver math
//! is written against [`Scalar`], so it runs unchanged on `f32` and `f64`.
//! The crate root exposes `f64` aliases for the common case.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Floating-point type usable for distances and times.
pub trait Scalar:
    Float
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + Serialize
    + DeserializeOwned
    + 'static
{
    /// Absolute tolerance used for every distance (km) and time (h) comparison.
    const TOLERANCE: f64;

    /// Converts an `f64` literal. Panics only for values the type cannot hold.
    #[inline]
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("literal representable in scalar type")
    }

    #[inline]
    fn tol() -> Self {
        Self::lit(Self::TOLERANCE)
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// `self <= other` up to the absolute tolerance.
    #[inline]
    fn le_tol(self, other: Self) -> bool {
        self <= other + Self::tol()
    }

    /// `|self - other| <= tolerance`.
    #[inline]
    fn approx_eq(self, other: Self) -> bool {
        if self.is_infinite() || other.is_infinite() {
            return self == other;
        }
        (self - other).abs() <= Self::tol()
    }
}

impl Scalar for f64 {
    const TOLERANCE: f64 = 1e-9;
}

// Single precision cannot resolve 1e-9 on values of order one.
impl Scalar for f32 {
    const TOLERANCE: f64 = 1e-4;
}

/// Total order over non-NaN scalars, for heaps and sorts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Ordered<S>(pub S);

impl<S: Scalar> Eq for Ordered<S> {}

impl<S: Scalar> PartialOrd for Ordered<S> {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl<S: Scalar> Ord for Ordered<S> {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.partial_cmp(&other.0).unwrap_or(std::cmp::Ordering::Equal)
    }
}
