//! k-continued fractions, their approximation coefficients, and the space
//! of Jager pairs.
//!
//! For a real parameter `k > 0`, every `x0` in `(0, 1)` expands as
//!
//! ```text
//! x0 = k / (k + a_1 + k / (k + a_2 + ...)),    a_n >= 0
//! ```
//!
//! The crate computes digits, convergents, and the future/past pairs
//! `(x_n, y_n)` of the expansion ([`cf`]). It computes the approximation
//! coefficients `theta_n` ([`jager`]) and the map `psi_k` that sends
//! `(x_n, y_n)` to `(theta_{n-1}, theta_n)` ([`geometry`]). It also
//! provides region predicates and a seeded Monte Carlo harness that
//! checks the image regions ([`experiments`]).
//!
//! Arithmetic is generic over [`scalar::Real`]. `f64`, the
//! arbitrary-precision [`scalar::BigFloat`] and exact
//! `num_rational::BigRational` share the same code paths.

// `!(a <= b)` is used on purpose: a NaN must fail a bound, not pass it.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cf;
pub mod cli;
pub mod error;
pub mod experiments;
pub mod geometry;
pub mod jager;
pub mod scalar;

pub use cf::{Digit, KParameter};
pub use error::{Error, Result};
pub use geometry::{GammaMode, Membership, Point2};
pub use jager::Evaluator;
pub use scalar::{BigFloat, Number, PrecisionMode, TolerancePolicy};
