// `!(x > 0.0)` guards re: NaN must fail validation, which the negated
// comparison does and `x <= 0.0` does not.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

//! Numerical laboratory for the p-Laplace problem with Robin exterior and
//! constant-on-holes interior boundary conditions on multiply connected
//! planar domains: P1 finite elements on tagged triangulations, exact
//! rearrangement machinery, a semi-analytic radial solver for the
//! measure-matched annulus, and comparison checks between the two.

pub mod comparison;
pub mod error;
pub mod fem;
pub mod geometry;
pub mod linalg;
pub mod quadrature;
pub mod radial;
pub mod rearrangement;

pub use error::{Error, Result};

#[cfg(test)]
pub(crate) mod testsupport;
