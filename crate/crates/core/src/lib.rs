//! Partition numbers and Hodge numbers of Hilbert schemes of surfaces.
//!
//! Two independent routes are implemented side by side: exact expansion of
//! the infinite products with big-integer coefficients, and circle-method
//! exact formulas (Kloosterman sums times Bessel functions) evaluated at
//! arbitrary precision. The exact route is the oracle for the analytic one.

pub mod error;
pub mod real;
pub mod series;
pub mod dedekind;
pub mod partitions;
pub mod goettsche;
pub mod exact_formula;
pub mod equidist;
pub mod maass_trace;
pub mod cli;

pub use error::{Error, Result};
pub use real::{Cx, MpFloat, Real};
pub use series::{ComplexQSeries, IntQSeries, LaurentPoly, LaurentQSeries, QSeries, Q};

/// Default multi-precision scalar.
pub type Mp = MpFloat;
/// Complex numbers over [`Mp`].
pub type MpComplex = Cx<MpFloat>;
/// Complex q-series over [`Mp`].
pub type MpQSeries = ComplexQSeries<MpFloat>;
