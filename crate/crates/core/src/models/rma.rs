//! 3GPP TR 38.900 / ITU-R M.2135 rural macrocell models.

use core::f64::consts::PI;

use crate::error::{ensure_positive, Error, Result};
use crate::math::{hypot, log10, powf};

use super::{
    hata_mobile_correction, validate_applicability, Environment, GeometryParams, RangeCheck,
    SPEED_OF_LIGHT,
};

/// Shadow fading standard deviations, dB.
pub const LOS_SIGMA_PL1_DB: f64 = 4.0;
pub const LOS_SIGMA_PL2_DB: f64 = 6.0;
pub const NLOS_SIGMA_DB: f64 = 8.0;

/// Two-ray breakpoint distance `2 pi h_bs h_ut f / c`, meters. `f_hz` is in Hz.
pub fn breakpoint_distance(h_bs: f64, h_ut: f64, f_hz: f64) -> Result<f64> {
    ensure_positive("h_bs", h_bs)?;
    ensure_positive("h_ut", h_ut)?;
    ensure_positive("f_c", f_hz)?;
    Ok(2.0 * PI * h_bs * h_ut * f_hz / SPEED_OF_LIGHT)
}

/// Which side of the breakpoint a LOS evaluation fell on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum LosSegment {
    Pl1,
    Pl2,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RmaLosOutput {
    pub mean_db: f64,
    pub sigma_db: f64,
    pub segment: LosSegment,
}

/// RMa LOS model with every distance-independent term evaluated once.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RmaLos {
    d_bp: f64,
    // PL1(d) = offset + log_slope * log10(d) + linear * d
    offset: f64,
    log_slope: f64,
    linear: f64,
    pl1_at_bp: f64,
    h_bs: f64,
    h_ut: f64,
}

impl RmaLos {
    pub fn new(h_bs: f64, h_ut: f64, h: f64, f_c: f64) -> Result<Self> {
        ensure_positive("h", h)?;
        ensure_positive("f_c", f_c)?;
        let d_bp = breakpoint_distance(h_bs, h_ut, f_c * 1e9)?;
        let h_pow = powf(h, 1.72);
        let first = f64::min(0.03 * h_pow, 10.0);
        let second = f64::min(0.044 * h_pow, 14.77);
        let mut model = RmaLos {
            d_bp,
            offset: 20.0 * log10(40.0 * PI * f_c / 3.0) - second,
            log_slope: 20.0 + first,
            linear: 0.002 * log10(h),
            pl1_at_bp: 0.0,
            h_bs,
            h_ut,
        };
        model.pl1_at_bp = model.pl1(d_bp);
        Ok(model)
    }

    pub fn from_geometry(g: &GeometryParams, f_c: f64) -> Result<Self> {
        Self::new(g.h_bs, g.h_ut, g.h, f_c)
    }

    /// Breakpoint distance, m.
    pub fn breakpoint(&self) -> f64 {
        self.d_bp
    }

    /// Pre-breakpoint formula at distance `d`, dB.
    #[inline]
    pub fn pl1(&self, d: f64) -> f64 {
        self.offset + self.log_slope * log10(d) + self.linear * d
    }

    /// Post-breakpoint formula at 3D distance `d_3d`, dB.
    #[inline]
    pub fn pl2(&self, d_3d: f64) -> f64 {
        self.pl1_at_bp + 40.0 * log10(d_3d / self.d_bp)
    }

    /// Selects the segment on the ground distance and evaluates at `d_3d`.
    #[inline]
    pub fn evaluate_with(&self, d_2d: f64, d_3d: f64) -> RmaLosOutput {
        if d_2d <= self.d_bp {
            RmaLosOutput {
                mean_db: self.pl1(d_3d),
                sigma_db: LOS_SIGMA_PL1_DB,
                segment: LosSegment::Pl1,
            }
        } else {
            RmaLosOutput {
                mean_db: self.pl2(d_3d),
                sigma_db: LOS_SIGMA_PL2_DB,
                segment: LosSegment::Pl2,
            }
        }
    }

    #[inline]
    pub fn evaluate(&self, d_2d: f64) -> RmaLosOutput {
        self.evaluate_with(d_2d, hypot(d_2d, self.h_bs - self.h_ut))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RmaNlosOutput {
    /// `max(LOS mean, NLOS formula)`, dB.
    pub mean_db: f64,
    pub sigma_db: f64,
    /// The NLOS formula before the max with LOS, dB.
    pub base_db: f64,
    /// LOS mean at the same geometry, dB.
    pub los_db: f64,
}

/// RMa NLOS model: the extended Sakagami formula, floored by the LOS mean.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RmaNlos {
    los: RmaLos,
    // base(d_3d) = offset + slope * log10(d_3d)
    offset: f64,
    slope: f64,
}

impl RmaNlos {
    pub fn new(h_bs: f64, h_ut: f64, h: f64, w: f64, f_c: f64) -> Result<Self> {
        ensure_positive("w", w)?;
        let los = RmaLos::new(h_bs, h_ut, h, f_c)?;
        let log_h_bs = log10(h_bs);
        let slope = 43.42 - 3.1 * log_h_bs;
        let ratio = h / h_bs;
        let offset = 161.04 - 7.1 * log10(w) + 7.5 * log10(h)
            - (24.37 - 3.7 * ratio * ratio) * log_h_bs
            - 3.0 * slope
            + 20.0 * log10(f_c)
            - hata_mobile_correction(h_ut)?;
        Ok(RmaNlos { los, offset, slope })
    }

    pub fn from_geometry(g: &GeometryParams, f_c: f64) -> Result<Self> {
        Self::new(g.h_bs, g.h_ut, g.h, g.w, f_c)
    }

    pub fn los(&self) -> &RmaLos {
        &self.los
    }

    /// NLOS formula at 3D distance `d_3d` without the LOS floor, dB.
    #[inline]
    pub fn base(&self, d_3d: f64) -> f64 {
        self.offset + self.slope * log10(d_3d)
    }

    #[inline]
    pub fn evaluate_with(&self, d_2d: f64, d_3d: f64) -> RmaNlosOutput {
        let los_db = self.los.evaluate_with(d_2d, d_3d).mean_db;
        let base_db = self.base(d_3d);
        RmaNlosOutput {
            mean_db: f64::max(los_db, base_db),
            sigma_db: NLOS_SIGMA_DB,
            base_db,
            los_db,
        }
    }

    #[inline]
    pub fn evaluate(&self, d_2d: f64) -> RmaNlosOutput {
        self.evaluate_with(d_2d, hypot(d_2d, self.los.h_bs - self.los.h_ut))
    }
}

fn check_geometry(g: &GeometryParams, env: Environment, check: RangeCheck) -> Result<()> {
    g.ensure_positive()?;
    if check == RangeCheck::Strict {
        let report = validate_applicability(g, env);
        if !report.is_empty() {
            return Err(Error::OutOfRange(report));
        }
    }
    Ok(())
}

/// RMa LOS mean path loss and shadow fading sigma at `f_c` GHz.
pub fn rma_los_path_loss(g: &GeometryParams, f_c: f64, check: RangeCheck) -> Result<RmaLosOutput> {
    check_geometry(g, Environment::Los, check)?;
    Ok(RmaLos::from_geometry(g, f_c)?.evaluate(g.d_2d))
}

/// RMa NLOS mean path loss (after the max with LOS) at `f_c` GHz.
pub fn rma_nlos_path_loss(
    g: &GeometryParams,
    f_c: f64,
    check: RangeCheck,
) -> Result<RmaNlosOutput> {
    check_geometry(g, Environment::Nlos, check)?;
    Ok(RmaNlos::from_geometry(g, f_c)?.evaluate(g.d_2d))
}

/// The NLOS formula alone, before the max with the LOS mean.
pub fn rma_nlos_base_path_loss(g: &GeometryParams, f_c: f64, check: RangeCheck) -> Result<f64> {
    check_geometry(g, Environment::Nlos, check)?;
    Ok(RmaNlos::from_geometry(g, f_c)?.base(g.d_3d()))
}
