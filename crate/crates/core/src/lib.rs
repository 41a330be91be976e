//! Self-consistent Bogoliubov–de Gennes simulation of a classical magnetic
//! impurity in a two-dimensional s-wave superconductor, with quantum
//! fidelity diagnostics on one- and two-site reduced states.
//!
//! The pipeline runs [`bdg`] (gap self-consistency) → [`wick`] (two-point
//! correlators and pairing sums) → [`rdm`] (reduced density matrices) →
//! [`metrics`] (F, H, classical fidelity, C₂). [`sweep`] drives it over the
//! exchange coupling and locates the level-crossing transition; [`fock`] is
//! an exact many-body reference for small clusters.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bdg;
pub mod calibration;
pub mod config;
pub mod error;
pub mod fock;
pub mod lattice;
pub mod linalg;
pub mod metrics;
pub mod model;
pub mod output;
pub mod rdm;
pub mod sweep;
pub mod verify;
pub mod wick;

pub use error::{Error, Result};
