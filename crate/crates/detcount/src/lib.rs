//! Exact counting and density toolkit for the determinant equation
//! `x1*x2 - x3*x4 = h` over the integer box `[-N, N]^4`.
//!
//! The crate is organised around three layers:
//!
//! * exact integer counting of `T(h, N)` by several independent algorithms
//!   ([`counting`]), backed by elementary number theory ([`arith`]) and
//!   exponential-sum primitives ([`expsums`]);
//! * the continuous side: the real density `sigma_inf(lambda) = 4*J + 8*K`
//!   evaluated by closed forms, 2D quadrature, 1D reductions and mollified
//!   volumes ([`density`]), and the local densities / singular series
//!   ([`singular`]);
//! * an experiment harness ([`harness`]) that predicts main terms, measures
//!   error terms `E(h, N)`, runs deterministic grid scans and fits growth
//!   exponents.
//!
//! The binary `detcount` exposes all of this as a CLI; see the README.

pub mod arith;
pub mod counting;
pub mod density;
pub mod expsums;
pub mod harness;
pub mod quad;
pub mod rat;
pub mod singular;

/// `zeta(2) = pi^2 / 6`, compiled in to full double precision.
pub const ZETA_2: f64 = core::f64::consts::PI * core::f64::consts::PI / 6.0;

/// `1 / zeta(2) = 6 / pi^2`.
pub const INV_ZETA_2: f64 = 6.0 / (core::f64::consts::PI * core::f64::consts::PI);

pub use rat::Rat;
