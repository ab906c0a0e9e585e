//! Construction and verification of tetrahedral blow-up solutions of the
//! mean field equation `Δ_g u + ρ(e^u/∫e^u − 1/4π) = 0` on the unit sphere
//! as `ρ ↓ 32π`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod ansatz;
pub mod cli;
pub mod diagnostics;
pub mod error;
pub mod field;
pub mod geometry;
pub mod harmonics;
pub mod newton;
pub mod optimizer;
pub mod quadrature;
pub mod symmetry;

pub use error::{Error, Result};
