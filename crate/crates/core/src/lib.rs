//! Entanglement between two dipole emitters mediated by the surface plasmons
//! of a DC-current-biased graphene sheet.
//!
//! The crate computes the layered-medium Green's function `G_zz` by
//! Sommerfeld integration, extracts dissipative (`Γ_αβ`) and coherent
//! (`g_αβ`) qubit coupling rates, evolves the driven two-qubit master
//! equation, and reports Wootters concurrence over angle, distance, time and
//! drive sweeps. A drift current tilts the graphene conductivity in momentum
//! space, which makes the plasmon propagation one-way and lets the DC bias
//! polarity steer which qubit pair becomes entangled.

// validations use `!(x > 0.0)` so that NaN fails them
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod dispersion;
pub mod dynamics;
pub mod entanglement;
pub mod error;
pub mod greens;
pub mod linalg;
pub mod material;
pub mod pipeline;
pub mod quad;
pub mod report;
pub mod units;

pub use error::{Error, Result};
