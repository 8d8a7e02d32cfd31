//! Rural macrocell (RMa) large-scale path loss modeling.
//!
//! This crate is `no_std` (it needs `alloc`) and contains the pure numerical
//! parts of the toolkit:
//!
//! - [`models`]: closed-form path loss formulas. These are the 3GPP/ITU-R RMa LOS
//!   and NLOS models, the Sakagami model and Hata mobile-height correction they
//!   descend from, free space, and the close-in (CI) and height-dependent
//!   close-in (CIH) models.
//! - [`simulation`]: seedable Monte Carlo generation of 3GPP path loss samples.
//! - [`fitting`]: closed-form least-squares estimation of CI/CIH parameters.
//! - [`analysis`]: breakpoint feasibility grids, base station height-gain
//!   curves and model comparison tables.
//!
//! File formats, the command-line tool and parallel execution live in the
//! `rmapl` crate.
#![cfg_attr(not(feature = "std"), no_std)]
// Domain checks are written `!(x > 0.0)` so NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod analysis;
pub mod error;
pub mod fitting;
mod math;
pub mod models;
pub mod reference;
pub mod simulation;

pub use error::{Error, Result};
pub use fitting::{FitResult, ModelKind};
pub use models::{CiParams, CihParams, Environment, GeometryParams, RangeCheck};
pub use simulation::{PathLossSample, SampleSource, ScenarioConfig};
