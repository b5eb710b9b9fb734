//! Return-map laboratory for a symmetric heteroclinic connection between a
//! saddle-center and a saddle periodic orbit of a reversible two degree of
//! freedom Hamiltonian system.
//!
//! Models are given directly in normal-form coordinates: a Hamiltonian jet
//! near the saddle-center, a multiplier function for the saddle map, and an
//! affine jet of the global maps. Everything downstream is a pure function of
//! a validated [`Model`].

// Negated comparisons are used on purpose so NaN inputs are rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod geometry;
pub mod global;
pub mod model;
pub mod poincare;
pub mod points;
pub mod roots;
pub mod saddle;
pub mod scenarios;
pub mod tolerances;
pub mod transit;

pub use error::{HetError, Result};
pub use global::GlobalJet;
pub use model::{InvolutionCase, Model, SystemSpec, ValidationReport};
pub use points::{DiskPoint, SigmaPoint};
pub use tolerances::Tolerances;
