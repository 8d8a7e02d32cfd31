use crate::error::{ensure_positive, Error, Result};
use crate::math::log10;

/// Inputs of the Sakagami-Kuboi urban NLOS model. Heights and widths in
/// meters, `theta` in degrees, `f` in MHz and `d` in kilometers.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SakagamiParams {
    /// Street width.
    pub w: f64,
    /// Street angle, degrees in `[0, 90]`.
    pub theta: f64,
    /// Height of buildings along the street.
    pub h_s: f64,
    /// Average building height.
    pub h_avg: f64,
    /// Building height near the base station.
    pub h_near: f64,
    /// Base station antenna height.
    pub h_b0: f64,
    /// Base station antenna height above the mobile.
    pub h_b: f64,
    /// Frequency, MHz.
    pub f: f64,
    /// T-R separation, km.
    pub d: f64,
    /// Mobile antenna height, used by the Hata correction.
    pub h_m: f64,
}

impl SakagamiParams {
    pub fn validate(&self) -> Result<()> {
        ensure_positive("W", self.w)?;
        ensure_positive("h_s", self.h_s)?;
        ensure_positive("<H>", self.h_avg)?;
        ensure_positive("H", self.h_near)?;
        ensure_positive("h_b0", self.h_b0)?;
        ensure_positive("h_b", self.h_b)?;
        ensure_positive("f", self.f)?;
        ensure_positive("d", self.d)?;
        ensure_positive("h_m", self.h_m)?;
        if !(0.0..=90.0).contains(&self.theta) {
            return Err(Error::domain(
                "theta",
                self.theta,
                "0 <= theta <= 90 degrees",
            ));
        }
        Ok(())
    }
}

/// Sakagami-Kuboi path loss, dB, without the 450-2200 MHz frequency
/// extension and without the mobile-height correction.
pub fn sakagami_path_loss(p: &SakagamiParams) -> Result<f64> {
    p.validate()?;
    let log_h_b = log10(p.h_b);
    let ratio = p.h_near / p.h_b0;
    Ok(
        100.0 - 7.1 * log10(p.w) + 0.023 * p.theta + 1.4 * log10(p.h_s) + 6.1 * log10(p.h_avg)
            - (24.37 - 3.7 * ratio * ratio) * log_h_b
            + (43.42 - 3.1 * log_h_b) * log10(p.d)
            + 20.4 * log10(p.f),
    )
}

/// Okumura-Hata mobile antenna height correction `a(h_m)`, dB. It is
/// subtracted from Sakagami-family path loss.
pub fn hata_mobile_correction(h_m: f64) -> Result<f64> {
    ensure_positive("h_m", h_m)?;
    let l = log10(11.75 * h_m);
    Ok(3.2 * l * l - 4.97)
}
