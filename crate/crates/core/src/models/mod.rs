//! Closed-form large-scale path loss models.
//!
//! All functions here are pure. Frequencies are in GHz and distances and
//! heights in meters unless a name says otherwise; the historical Sakagami
//! model keeps its original MHz/km units.

mod applicability;
mod close_in;
mod rma;
mod sakagami;

use core::fmt;

pub use applicability::{
    validate_applicability, ApplicabilityRange, Interval, Parameter, Violation, ViolationReport,
};
pub use close_in::{ci_path_loss, cih_path_loss, effective_ple, fspl, CiParams, CihParams};
pub use rma::{
    breakpoint_distance, rma_los_path_loss, rma_nlos_base_path_loss, rma_nlos_path_loss,
    LosSegment, RmaLos, RmaLosOutput, RmaNlos, RmaNlosOutput,
};
pub use sakagami::{hata_mobile_correction, sakagami_path_loss, SakagamiParams};

use crate::math;

/// Speed of light used throughout, m/s. The round value keeps the breakpoint
/// boundaries at exactly the frequencies quoted for the 3GPP model.
pub const SPEED_OF_LIGHT: f64 = 3.0e8;

/// Free space path loss at 1 m and 1 GHz, dB.
pub const FSPL_1M_1GHZ_DB: f64 = 32.4;

/// Close-in reference distance, m.
pub const CLOSE_IN_REFERENCE_M: f64 = 1.0;

/// Propagation condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Environment {
    #[cfg_attr(feature = "serde", serde(rename = "LOS"))]
    Los,
    #[cfg_attr(feature = "serde", serde(rename = "NLOS"))]
    Nlos,
}

impl Environment {
    pub const ALL: [Environment; 2] = [Environment::Los, Environment::Nlos];

    /// Lowercase token used on the command line and in CSV files.
    pub fn token(self) -> &'static str {
        match self {
            Environment::Los => "los",
            Environment::Nlos => "nlos",
        }
    }

    pub fn from_token(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "los" => Some(Environment::Los),
            "nlos" => Some(Environment::Nlos),
            _ => None,
        }
    }
}

impl fmt::Display for Environment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Environment::Los => "LOS",
            Environment::Nlos => "NLOS",
        })
    }
}

/// Whether evaluation outside the applicability ranges is an error or allowed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RangeCheck {
    /// Out-of-range geometry yields [`Error::OutOfRange`](crate::Error::OutOfRange).
    #[default]
    Strict,
    /// Evaluate the formula anyway; callers report violations themselves.
    Force,
}

/// 3GPP RMa geometry: T-R separation along the ground plus the heights and
/// street width the standard's formulas take.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GeometryParams {
    /// Ground (2D) T-R separation, m.
    pub d_2d: f64,
    /// Base station height, m.
    pub h_bs: f64,
    /// User terminal height, m.
    pub h_ut: f64,
    /// Average building height, m.
    pub h: f64,
    /// Street width, m.
    pub w: f64,
}

impl GeometryParams {
    pub const DEFAULT_H_BS: f64 = 35.0;
    pub const DEFAULT_H_UT: f64 = 1.5;
    pub const DEFAULT_W: f64 = 20.0;
    pub const DEFAULT_H: f64 = 5.0;

    /// Table default heights and street width at the given ground distance.
    pub fn with_defaults(d_2d: f64) -> Self {
        GeometryParams {
            d_2d,
            h_bs: Self::DEFAULT_H_BS,
            h_ut: Self::DEFAULT_H_UT,
            h: Self::DEFAULT_H,
            w: Self::DEFAULT_W,
        }
    }

    pub fn d_3d(&self) -> f64 {
        math::hypot(self.d_2d, self.h_bs - self.h_ut)
    }

    pub(crate) fn ensure_positive(&self) -> crate::Result<()> {
        use crate::error::ensure_positive;
        ensure_positive("d_2d", self.d_2d)?;
        ensure_positive("h_bs", self.h_bs)?;
        ensure_positive("h_ut", self.h_ut)?;
        ensure_positive("h", self.h)?;
        ensure_positive("w", self.w)
    }
}
