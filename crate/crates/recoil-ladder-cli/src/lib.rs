//! Command-line front end for the recoil-ladder simulation library: config
//! parsing, parameter sweeps with deterministic parallelism, and CSV/JSON
//! artifact output.

// negated comparisons are deliberate: they route NaN inputs onto the error path
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod csvio;
pub mod error;
pub mod manifest;
pub mod sweep;
