//! Analysis toolkit for piecewise continuous interval maps.
//!
//! A map here is a partition 0 = x_0 < ... < x_{d+1} = 1 of the unit
//! interval with one continuous branch per piece and a declared side at
//! every interior breakpoint. The crate answers three families of
//! questions about such maps:
//!
//! - **Connections**: do the forward orbits of the critical set and of the
//!   lateral limits ever return to an interior breakpoint
//!   ([`connection::check_no_connections`])? Maps without such returns
//!   admit invariant Borel probability measures.
//! - **Empirical invariant measures**: Birkhoff averages of Dirac masses
//!   along an orbit ([`measure`]), with CDF evaluation, Wasserstein-1
//!   convergence diagnostics, non-atomicity probes, and the exact
//!   telescoping invariance residual.
//! - **Interval-exchange factors**: for injective maps, the monotone factor
//!   h(x) = mu([0,x]) transports the dynamics onto an interval exchange
//!   transformation, possibly with flips ([`semiconj`]).
//!
//! Every map fixes a numeric backend: exact rational arithmetic (affine
//! branches only, decidable equality) or f64 (with explicit tolerances).
//! The [`sweep`] module estimates how generic the no-connections property
//! is across partition parameters, and [`fixtures`] bundles the standard
//! example maps used by the test suite and CLI.

pub mod branch;
pub mod connection;
pub mod error;
pub mod exact;
pub mod expr;
pub mod fixtures;
pub mod map;
pub mod measure;
pub mod orbit;
pub mod scalar;
pub mod semiconj;
pub mod spec_format;
pub mod sweep;

pub use branch::Branch;
pub use error::{Error, Result};
pub use exact::ExactRational;
pub use map::{validate_map, LateralLimit, PiecewiseMap, Side, ValidationReport};
pub use scalar::{Backend, Scalar};
