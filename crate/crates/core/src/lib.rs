//! Exact q-series toolkit for the Eisenstein-type series `f_k` and `g_ℓ`
//! attached to partition rank moments, together with the crank moments,
//! partition traces, and a catalog of mechanically checked identities.
//!
//! The series algebra ([`qseries::Series`], [`wgraded::WSeries`]) is generic
//! over a [`Scalar`] coefficient field; everything number-theoretic works over
//! the exact [`Rational`] instantiation exported here as [`QSeries`] and
//! [`QWSeries`].

pub mod arith;
pub mod eisenstein;
pub mod partitions;
pub mod qseries;
pub mod relations;
pub mod verify;
pub mod wgraded;

pub use arith::{Rational, Scalar};
pub use qseries::{Exponent, QSeries, Series, SeriesError};
pub use wgraded::WSeries;

/// Exact w-graded series with q-series coefficients.
pub type QWSeries = wgraded::WSeries<Rational>;
