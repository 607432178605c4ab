//! Scenario schema and command implementations behind the `syncnet` binary.

// Validation guards are written `!(x > 0.0)` so NaN parameters fail them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod exec;
pub mod scenario;
