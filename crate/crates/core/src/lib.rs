//! Sufficient-condition toolkit for complete synchronization of nonlinearly
//! coupled oscillator networks.
//!
//! The crate computes graph-dependent coupling-strength thresholds through
//! pseudometrics with a relaxed triangle inequality, audits the hypotheses
//! behind those thresholds by seeded sampling, and verifies synchronization
//! numerically by integrating the coupled system and monitoring a weighted
//! Lyapunov function.
//!
//! Modules:
//! - [`graph`]: interaction graphs, diameter, path choices, and the generic
//!   and connection-graph bounds for the pair-sum/edge-sum constant.
//! - [`rho`] / [`domain`] / [`pseudometric`]: chain constants, validity
//!   regions, and the shipped pseudometric constructions.
//! - [`dynamics`]: oscillator vector fields and coupling functions
//!   (FitzHugh-Nagumo, Chua, and user-supplied).
//! - [`stability`]: threshold formulas and the five sampling audits.
//! - [`simulator`]: fixed-step integration, pairwise-difference series, the
//!   Lyapunov function, synchronization verdicts, and ball containment.

// Validation guards are written `!(x > 0.0)` so NaN parameters fail them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod domain;
pub mod dynamics;
pub mod error;
pub mod graph;
pub mod pseudometric;
pub mod rho;
pub mod simulator;
pub mod stability;

pub use error::{Error, Result};
