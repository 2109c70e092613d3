//! A short-rate model for negative interest rates built as the difference
//! of two independent CIR processes, `r(t) = x(t) - y(t)`.
//!
//! Both legs stay strictly positive under their Feller conditions, yet the
//! difference moves freely through zero, so the model prices negative-rate
//! curves without shifting market data. Zero-coupon bonds keep a closed
//! affine form, which makes curve calibration a cheap least-squares problem.
//!
//! The crate covers the full working loop:
//!
//! * [`model`] — bond-price factors, parameter maps, conditional moments,
//!   forward rates and Riccati residual checks;
//! * [`market`] — quote ingestion, curve bootstrapping and interpolation;
//! * [`calibration`] — constrained least-squares fit of the 8-parameter
//!   vector to a discount curve;
//! * [`simulation`] — truncated Euler-Maruyama paths with reproducible
//!   per-path random substreams;
//! * [`pricing`] — forward zero-coupon diagnostics and swaption pricing
//!   (model Monte Carlo vs Bachelier market prices);
//! * [`cli`] — the `cirdiff` command-line pipeline.

pub mod calibration;
pub mod cli;
pub mod error;
pub mod market;
pub mod model;
pub mod pricing;
pub mod simulation;

pub use error::{CirError, Result};
pub use model::{
    feller_check, spot_rate, BondFactors, CirCoeffs, CirParams, DiffModel, FellerCheck, Leg,
    PhiTriple,
};
