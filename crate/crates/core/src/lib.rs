//! Numerics for strongly confined bosons in three dimensions and their effective
//! one-dimensional Gross–Pitaevskii dynamics.
//!
//! Units throughout are ħ = 1 and m = ½, so the one-body kinetic operator is `-Δ`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod confined3d;
pub mod error;
pub mod fft;
pub mod gpe1d;
pub mod grid;
pub mod ground;
pub mod harness;
pub mod manybody;
pub mod potential;
pub mod quadrature;
pub mod scattering;
pub mod transverse;

pub use error::{Error, Result};
