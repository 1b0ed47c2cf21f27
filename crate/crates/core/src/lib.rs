//! Desk-scale laboratory for ultradifferentiable growth analysis.
//!
//! The crate implements, end to end, the computable side of the theory of
//! function classes defined by weight functions and by iterates of a linear
//! partial differential operator:
//!
//! - [`weights`] — weight functions, Young conjugates, the associated
//!   sequence `a_{j,λ} = e^{λφ*(j/λ)}/j!` and its inequality suite;
//! - [`symbolic`] — a small exact-differentiation expression engine with a
//!   parser, used for operator coefficients, test functions and integrands;
//! - [`pdo`] — variable-coefficient linear partial differential operators:
//!   application, Leibniz composition, iteration, principal symbol and a
//!   sampled ellipticity check;
//! - [`analysis`] — L² norms, derivative seminorms, shrinking-domain
//!   seminorms and Roumieu/Beurling growth fitting;
//! - [`metivier`] — an explicit oscillatory-integral function that lies in
//!   the iterate class of a non-elliptic operator but not in the matching
//!   derivative class, demonstrating that ellipticity is necessary for the
//!   two classes to coincide;
//! - [`cli`] — the experiment driver behind the `ultradiff` binary, plus
//!   JSON/CSV report emission.
//!
//! Run `cargo run --example <name>` for worked demonstrations of each
//! capability; see the `examples/` directory.

pub mod analysis;
pub mod cli;
pub mod config;
pub mod error;
pub mod metivier;
pub mod pdo;
pub mod report;
pub mod symbolic;
pub mod weights;

pub use error::Error;
