//! Equality forms of uncertainty relations, verified numerically.
//!
//! The crate is layered bottom-up:
//!
//! * [`complex_space`]: scalar products, the complex sign function and the
//!   Cauchy–Schwarz equalities with their extremizer classification.
//! * [`forms`]: commutator and anticommutator forms of a symmetric operator
//!   pair, evaluated through the vectors `Aφ` and `Bφ`.
//! * [`grid`] and [`radial`]: discretized `L^2(R^n)` and the concrete operators.
//! * [`gaussian`] and [`states`]: closed-form extremizers and random test states.
//! * [`identities`]: verifiers for the position–momentum, dilation, Hardy,
//!   dilation–Laplacian and radial–Coulomb identities.
//! * [`search`]: variational recovery of the extremizers and the
//!   non-attainment probe.
//! * [`suite`]: suite runner, refinement studies and report serialization.

pub mod complex_space;
pub mod error;
pub mod forms;
pub mod gaussian;
pub mod grid;
pub mod identities;
pub mod radial;
pub mod report;
pub mod search;
pub mod states;
pub mod suite;

pub use complex_space::{sgn, ComplexVector, Metric};
pub use error::{Error, Result};
pub use grid::{GridSpec, OperatorHandle, OperatorKind, Quadrature, Scheme, StateField, VectorField};
pub use report::EqualityReport;
