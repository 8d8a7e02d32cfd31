//! File formats, configuration and command implementations for the
//! `rmapl` tool.

// Domain checks are written `!(x > 0.0)` so NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod app;
pub mod config;
pub mod dataset;
pub mod export;
pub mod format;
pub mod runner;
