//! Floating-point scalar abstraction shared by every solver in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign};

/// Real scalar type the allocation solvers are generic over (`f32` or `f64`).
///
/// Tolerances are part of the scalar because single precision cannot hold the
/// double-precision thresholds used by the simplex pivoting and feasibility tests.
pub trait Scalar:
    Float + FromPrimitive + NumAssign + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Smallest pivot magnitude the simplex accepts.
    fn pivot_tol() -> Self;
    /// Primal feasibility tolerance.
    fn feas_tol() -> Self;
    /// Reduced-cost threshold for choosing an entering column.
    fn opt_tol() -> Self;
    /// Allocation entries below this are treated as simplex dust.
    fn dust_tol() -> Self;

    /// Converts an `f64` literal. Panics only for values the type cannot represent at all.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal out of range for scalar type")
    }
}

impl Scalar for f64 {
    fn pivot_tol() -> Self {
        1e-10
    }
    fn feas_tol() -> Self {
        1e-9
    }
    fn opt_tol() -> Self {
        1e-10
    }
    fn dust_tol() -> Self {
        1e-12
    }
}

impl Scalar for f32 {
    fn pivot_tol() -> Self {
        1e-5
    }
    fn feas_tol() -> Self {
        1e-4
    }
    fn opt_tol() -> Self {
        1e-5
    }
    fn dust_tol() -> Self {
        1e-6
    }
}
