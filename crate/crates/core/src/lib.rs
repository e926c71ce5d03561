//! Spin^T(n) groups, twisted spinor calculus on Riemannian charts, and
//! numerical checks of the associated Weitzenböck-type identities.
//!
//! `clifford` and `spin_groups` cover the algebra, `jets` and `expr` the
//! differentiable evaluation of chart data, `geometry` the Levi-Civita
//! quantities in an orthonormal frame, and `spinor_bundle` the twisted
//! spinor operators. `cli` drives the verification suites.

#![allow(clippy::needless_range_loop)]
// Negated comparisons deliberately reject NaN; jet division is multiplication by the reciprocal.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::suspicious_arithmetic_impl)]

pub mod cli;
pub mod clifford;
pub mod error;
pub mod expr;
pub mod geometry;
pub mod jets;
pub mod spin_groups;
pub mod spinor_bundle;

pub use error::{Error, Result};
