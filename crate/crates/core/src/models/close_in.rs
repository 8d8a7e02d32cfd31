use crate::error::{ensure_close_in_distance, ensure_positive, Error, Result};
use crate::math::log10;

use super::FSPL_1M_1GHZ_DB;

/// Free space path loss (Friis) in dB at `f_c` GHz and `d` meters, `d >= 1`.
pub fn fspl(f_c: f64, d: f64) -> Result<f64> {
    ensure_positive("f_c", f_c)?;
    ensure_close_in_distance(d)?;
    Ok(FSPL_1M_1GHZ_DB + 20.0 * log10(f_c) + 20.0 * log10(d))
}

/// Close-in free space reference distance model with a 1 m reference.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CiParams {
    /// Path loss exponent.
    pub n: f64,
    /// Shadow fading standard deviation, dB.
    pub sigma: f64,
}

impl CiParams {
    pub fn new(n: f64, sigma: f64) -> Result<Self> {
        let p = CiParams { n, sigma };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        ensure_positive("n", self.n)?;
        if !(self.sigma >= 0.0 && self.sigma.is_finite()) {
            return Err(Error::domain("sigma", self.sigma, "sigma >= 0"));
        }
        Ok(())
    }

    /// Mean path loss, dB (shadow fading excluded).
    pub fn mean_db(&self, f_c: f64, d: f64) -> Result<f64> {
        ci_path_loss(self, f_c, d)
    }
}

/// CI model whose exponent scales linearly with base station height around
/// a reference height `h_b0`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CihParams {
    /// Distance-dependence coefficient.
    pub n: f64,
    /// Height weighting factor.
    pub b_tx: f64,
    /// Reference base station height, m.
    pub h_b0: f64,
    /// Shadow fading standard deviation, dB.
    pub sigma: f64,
}

impl CihParams {
    /// Heights over which the effective exponent must stay positive.
    pub const HEIGHT_RANGE_M: (f64, f64) = (10.0, 150.0);

    pub fn new(n: f64, b_tx: f64, h_b0: f64, sigma: f64) -> Result<Self> {
        let p = CihParams {
            n,
            b_tx,
            h_b0,
            sigma,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        ensure_positive("n", self.n)?;
        ensure_positive("h_b0", self.h_b0)?;
        if !self.b_tx.is_finite() {
            return Err(Error::domain("b_tx", self.b_tx, "a finite value"));
        }
        if !(self.sigma >= 0.0 && self.sigma.is_finite()) {
            return Err(Error::domain("sigma", self.sigma, "sigma >= 0"));
        }
        // Linear in h_BS, so the endpoints bound the whole range.
        let (lo, hi) = Self::HEIGHT_RANGE_M;
        for h in [lo, hi] {
            let ple = self.effective_ple_unchecked(h);
            if ple <= 0.0 {
                return Err(Error::domain(
                    "effective PLE",
                    ple,
                    "a positive effective PLE over h_BS in [10, 150] m",
                ));
            }
        }
        Ok(())
    }

    /// The CI model this reduces to at base station height `h_bs`.
    pub fn at_height(&self, h_bs: f64) -> Result<CiParams> {
        Ok(CiParams {
            n: effective_ple(self, h_bs)?,
            sigma: self.sigma,
        })
    }

    #[inline]
    pub(crate) fn effective_ple_unchecked(&self, h_bs: f64) -> f64 {
        self.n * (1.0 + self.b_tx * (h_bs - self.h_b0) / self.h_b0)
    }

    pub fn mean_db(&self, f_c: f64, d: f64, h_bs: f64) -> Result<f64> {
        cih_path_loss(self, f_c, d, h_bs)
    }
}

/// CI mean path loss, dB: `32.4 + 20 log10(f_c) + 10 n log10(d)`. Summed in
/// the same order as [`fspl`] and [`cih_path_loss`] so the reductions are exact.
pub fn ci_path_loss(p: &CiParams, f_c: f64, d: f64) -> Result<f64> {
    ensure_positive("f_c", f_c)?;
    ensure_close_in_distance(d)?;
    Ok(FSPL_1M_1GHZ_DB + 20.0 * log10(f_c) + 10.0 * p.n * log10(d))
}

/// `n (1 + b_tx (h_bs - h_b0) / h_b0)`.
pub fn effective_ple(p: &CihParams, h_bs: f64) -> Result<f64> {
    ensure_positive("h_bs", h_bs)?;
    ensure_positive("h_b0", p.h_b0)?;
    Ok(p.effective_ple_unchecked(h_bs))
}

/// CIH mean path loss, dB.
pub fn cih_path_loss(p: &CihParams, f_c: f64, d: f64, h_bs: f64) -> Result<f64> {
    ensure_positive("f_c", f_c)?;
    ensure_close_in_distance(d)?;
    let ple = effective_ple(p, h_bs)?;
    Ok(FSPL_1M_1GHZ_DB + 20.0 * log10(f_c) + 10.0 * ple * log10(d))
}
