//! Interpolation of linear subspaces on the Grassmann manifold, with the
//! POD/ROM machinery needed to evaluate interpolated bases on parametric
//! problems.
//!
//! * [`manifold`]: points, tangent vectors, principal angles, geodesics,
//!   exponential and logarithm maps;
//! * [`interp`]: geodesic Neville–Aitken, tangent-space (reference point)
//!   and entrywise baseline interpolation;
//! * [`pod`]: method-of-snapshots POD and the error metrics;
//! * [`testbed`]: analytic families, the Burgers HDM and its Galerkin ROM;
//! * [`io`]: the `GRSM1`/CSV matrix exchange formats.

// `!(a > b)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod interp;
pub mod io;
pub mod linalg;
pub mod manifold;
pub mod pod;
pub mod sampling;
pub mod testbed;

pub use error::{Error, Result};
pub use manifold::{GrassmannPoint, TangentVector};
