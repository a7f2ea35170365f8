//! Scalar abstraction and the central tolerance table.
//!
//! All numerical code is generic over [`Real`], which is any IEEE float
//! providing the operations we need (in practice `f32` or `f64`). The
//! tolerances below are stated as `f64` literals and converted at use sites;
//! the verification suites run with `f64`.

use std::fmt;
use std::iter::Sum;
use std::ops::{AddAssign, MulAssign, SubAssign};

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating-point scalar used throughout: `f32` or `f64`.
pub trait Real:
    Float
    + FromPrimitive
    + ToPrimitive
    + AddAssign
    + SubAssign
    + MulAssign
    + Sum
    + fmt::Debug
    + fmt::Display
    + Send
    + Sync
    + 'static
{
}

impl Real for f32 {}
impl Real for f64 {}

/// Coefficient pruning tolerance for symbolic Pauli sums.
pub const PRUNE_TOL: f64 = 1e-12;

/// Tolerance for exact construction-level identities (norms, orthogonality,
/// symbolic contraction residuals).
pub const CONSTRUCTION_TOL: f64 = 1e-12;

/// Tolerance for dense verification identities (eigen residuals, operator
/// equalities routed through the dense oracle).
pub const VERIFY_TOL: f64 = 1e-9;

/// Tolerance for algebraic side conditions (Hermiticity, POVM completeness,
/// projector products).
pub const ALGEBRA_TOL: f64 = 1e-10;

/// Jacobi sweep target: off-diagonal Frobenius mass relative to the total.
pub const JACOBI_OFF_TOL: f64 = 1e-22;

/// Default dense-backend limit on the number of sites (dim `2^10 = 1024`
/// would exceed the `dim <= 512` oracle contract, so the limit is 10 sites
/// on the *input* register, i.e. `n <= 10`).
pub const DEFAULT_DENSE_LIMIT: usize = 10;

/// Convert an `f64` constant into the working scalar type.
pub fn real<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("f64 constant must be representable")
}

/// `x` as a scalar, from an integer count.
pub fn from_usize<T: Real>(x: usize) -> T {
    T::from_usize(x).expect("usize must be representable")
}
