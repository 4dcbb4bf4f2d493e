//! The generalized Boole transform `F(x) = alpha (x - 1/x)`, the exact
//! reduction of its Perron–Frobenius equation on Cauchy densities to a map of
//! the parameters `(nu, gamma)`, and the information geometry of that
//! parameter space. Each closed form is paired with a brute-force oracle.

// `!(x > 0.0)` is used on purpose throughout: it also rejects NaN. Tensor
// code indexes components the way the formulas do.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod cauchy;
pub mod diff;
pub mod error;
pub mod geometry;
pub mod orbit;
pub mod params;
pub mod pf;
pub mod quadrature;
pub mod report;
pub mod runner;
