//! Arbitrary-precision evaluation of convergent infinite products of rational
//! functions in closed form, as finite quotients of gamma values.
//!
//! The central fact: if `a(k) = num(k)/den(k)` with both polynomials monic of
//! the same degree and equal next-to-leading coefficients, then
//! `prod_{k >= k0} a(k)` converges and equals a finite product of gamma values
//! at arguments determined by the roots. [`ratprod`] implements that engine;
//! [`accel`] wraps it with Padé tail folding so slowly convergent products and
//! series (Kepler-Bouwkamp, odd zeta values) come out to hundreds of digits;
//! [`gammaid`] and [`thuemorse`] use both to certify a catalog of gamma-value
//! identities numerically.
//!
//! All arithmetic is MPFR/MPC-backed (`rug`) at explicit precision. Functions
//! that return certified values recompute at two precisions and report the
//! agreed digit count.

pub mod accel;
pub mod error;
pub mod gammaid;
pub mod mp;
pub mod ratprod;
pub mod report;
pub mod thuemorse;

pub use error::{Error, Result};
pub use report::CheckReport;
