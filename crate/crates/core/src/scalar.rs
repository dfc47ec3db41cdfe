//! Scalar abstraction for the whole simulator.
//!
//! Everything numeric is generic over [`Real`] so the same code runs in
//! `f32` or `f64`. The crate root re-exports `f64` aliases for the common
//! types; `f64` is what the CLI and the reference tolerances assume.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssignOps, ToPrimitive};

/// Floating-point scalar the simulator runs on.
pub trait Real:
    Float
    + FloatConst
    + NumAssignOps
    + FromPrimitive
    + ToPrimitive
    + Sum<Self>
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + 'static
{
    /// Lift an `f64` constant into this scalar type.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("constant not representable")
    }

    /// Lossy conversion back to `f64` (exact for `f32`/`f64`).
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().expect("scalar convertible to f64")
    }

    /// Tolerance used when checking that a state is normalized.
    fn norm_tolerance() -> Self;
}

impl Real for f32 {
    fn norm_tolerance() -> Self {
        1e-4
    }
}

impl Real for f64 {
    fn norm_tolerance() -> Self {
        1e-10
    }
}

/// Complex number over the simulator scalar.
pub type C<T> = num_complex::Complex<T>;
