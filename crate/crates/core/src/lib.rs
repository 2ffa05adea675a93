//! Certification of genuine multipartite entanglement from correlations
//! measured in mutually unbiased bases (MUBs).
//!
//! The crate is layered bottom-up:
//!
//! - [`qla`]: dense complex linear algebra for states of at most a few qudits.
//! - [`mub`]: orthonormal bases and families of mutually unbiased bases.
//! - [`states`]: the GHZ/W/canonical state families plus seeded random states.
//! - [`correlations`]: joint probabilities, mutual predictability, local-bases
//!   product-state (LBPS) pattern sets and the `I_2`, `I_3`, `I_4` criteria.
//! - [`measures`]: the triangle measure and the global entanglement measure.
//! - [`locc`]: two-outcome local POVM sweeps probing monotonicity of `I_2`.
//! - [`campaign`]: seeded random campaigns against the biseparability bounds.

pub mod campaign;
pub mod correlations;
pub mod error;
pub mod locc;
pub mod measures;
pub mod mub;
pub mod qla;
pub mod states;

pub use correlations::{BasisAssignment, CertificationReport, Criterion, IndexPattern, LbpsPatternSet};
pub use error::{Error, Result};
pub use locc::{AxisSpec, PovmParams, PovmSweepResult, SweepGrid};
pub use mub::{Basis, MubFamily};
pub use num_complex::Complex64;
pub use qla::{DensityMatrix, Operator, StateVector};
pub use states::Bipartition;

/// Tolerance for construction invariants (normalization, Hermiticity, trace).
pub const CONSTRUCTION_TOL: f64 = 1e-10;
/// Tolerance for equality assertions between computed quantities.
pub const EQUALITY_TOL: f64 = 1e-9;
/// Tolerance for completeness and unitarity checks.
pub const UNITARITY_TOL: f64 = 1e-12;
/// Slack added to a bound before a value counts as a violation.
pub const VIOLATION_SLACK: f64 = 1e-9;
