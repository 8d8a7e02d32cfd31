//! Published parameters from the 73 GHz rural measurement campaign (single
//! 110 m transmitter, 14 LOS and 17 NLOS locations). The raw measurements are
//! not public, so these values stand in for the measured rows of comparisons.

use crate::fitting::{FitResult, ModelKind};
use crate::models::{CiParams, CihParams, Environment};

pub const MEASUREMENT_FREQUENCY_GHZ: f64 = 73.0;
pub const MEASUREMENT_TX_HEIGHT_M: f64 = 110.0;
/// Reference base station height of the CIH models.
pub const CIH_REFERENCE_HEIGHT_M: f64 = 35.0;

pub const MEASURED_LOS_LOCATIONS: u64 = 14;
pub const MEASURED_NLOS_LOCATIONS: u64 = 17;

/// Transmit EIRP of the sounder, dBm.
pub const SOUNDER_EIRP_DBM: f64 = 41.7;
pub const SOUNDER_MAX_PATH_LOSS_DB: f64 = 190.0;

pub const MEASURED_CI_LOS: CiParams = CiParams {
    n: 2.16,
    sigma: 1.7,
};
pub const MEASURED_CI_NLOS: CiParams = CiParams {
    n: 2.75,
    sigma: 6.7,
};

pub const MEASURED_CIH_LOS: CihParams = CihParams {
    n: 2.31,
    b_tx: -0.03,
    h_b0: CIH_REFERENCE_HEIGHT_M,
    sigma: 1.7,
};

pub const MEASURED_CIH_NLOS: CihParams = CihParams {
    n: 3.07,
    b_tx: -0.049,
    h_b0: CIH_REFERENCE_HEIGHT_M,
    sigma: 6.7,
};

/// The measured CI model of `env` as a fit result.
pub fn measured_ci_fit(env: Environment) -> FitResult {
    let (p, count) = match env {
        Environment::Los => (MEASURED_CI_LOS, MEASURED_LOS_LOCATIONS),
        Environment::Nlos => (MEASURED_CI_NLOS, MEASURED_NLOS_LOCATIONS),
    };
    FitResult {
        model_kind: ModelKind::CI,
        n: p.n,
        b_tx: None,
        h_b0: None,
        sigma: p.sigma,
        sample_count: count,
    }
}
