//! Detailed balance for finite-dimensional quantum dynamics.
//!
//! Density matrices, linear maps on `M_n` in the column-stacking
//! representation, the modular operator and the dual maps built from it, and
//! decision procedures for detailed balance II and Θ-sqdb in their definitional,
//! modular, entangled-state and thermofield forms.

pub mod balance;
pub mod cli;
pub mod duals;
pub mod error;
pub mod generators;
pub mod linalg;
pub mod states;
pub mod superop;
pub mod thermofield;

pub use balance::{run_report, run_report_with, BalanceReport, CheckOptions, CheckResult, ClassicalChain, PositivityMode};
pub use duals::{hat_map, hs_adjoint, kms_dual, make_reversing, modular, modular_power, rho_dual, trace_dual, ReversingOperation};
pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, Tolerance, C64};
pub use states::{make_density, DensityMatrix};
pub use superop::{from_kraus, KrausChannel, SuperOperator};
