//! Least-squares estimation of CI and CIH parameters.
//!
//! Both models are linear once the 1 m free space term is subtracted from
//! each observation, so the fits are exact closed-form solutions:
//!
//! - CI: `pl - FSPL(f, 1 m) = n * 10 log10(d)`
//! - CIH: `pl - FSPL(f, 1 m) = a * 10 log10(d) + b * 10 ((h_bs - h_b0) / h_b0) log10(d)`
//!   with `n = a` and `b_tx = b / a`.
//!
//! The accumulators keep only sufficient statistics, so arbitrarily large
//! sample streams can be fitted without holding them in memory, and partial
//! accumulators from parallel workers can be merged.

use crate::error::{ensure_close_in_distance, ensure_positive, Error, Result};
use crate::math::{log10, sqrt, CompensatedSum};
use crate::models::{
    ci_path_loss, cih_path_loss, CiParams, CihParams, Environment, RmaLos, RmaNlos, FSPL_1M_1GHZ_DB,
};
use crate::simulation::PathLossSample;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum ModelKind {
    CI,
    CIH,
}

/// Fitted parameters with the RMSE of the fit as shadow fading sigma.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FitResult {
    pub model_kind: ModelKind,
    pub n: f64,
    #[cfg_attr(
        feature = "serde",
        serde(default, skip_serializing_if = "Option::is_none")
    )]
    pub b_tx: Option<f64>,
    #[cfg_attr(
        feature = "serde",
        serde(default, skip_serializing_if = "Option::is_none")
    )]
    pub h_b0: Option<f64>,
    /// Root mean squared residual (divide by N), dB.
    pub sigma: f64,
    pub sample_count: u64,
}

impl FitResult {
    pub fn ci_params(&self) -> CiParams {
        CiParams {
            n: self.n,
            sigma: self.sigma,
        }
    }

    /// CIH parameters; a CI fit maps to `b_tx = 0`.
    pub fn cih_params(&self, default_h_b0: f64) -> CihParams {
        CihParams {
            n: self.n,
            b_tx: self.b_tx.unwrap_or(0.0),
            h_b0: self.h_b0.unwrap_or(default_h_b0),
            sigma: self.sigma,
        }
    }
}

/// Anything that predicts a mean path loss for a sample.
pub trait MeanPathLoss {
    fn mean_path_loss(&self, sample: &PathLossSample) -> Result<f64>;
}

impl MeanPathLoss for CiParams {
    fn mean_path_loss(&self, s: &PathLossSample) -> Result<f64> {
        ci_path_loss(self, s.f_c, s.d_3d)
    }
}

impl MeanPathLoss for CihParams {
    fn mean_path_loss(&self, s: &PathLossSample) -> Result<f64> {
        cih_path_loss(self, s.f_c, s.d_3d, s.h_bs)
    }
}

impl MeanPathLoss for FitResult {
    fn mean_path_loss(&self, s: &PathLossSample) -> Result<f64> {
        match self.model_kind {
            ModelKind::CI => self.ci_params().mean_path_loss(s),
            ModelKind::CIH => self.cih_params(1.0).mean_path_loss(s),
        }
    }
}

impl<F> MeanPathLoss for F
where
    F: Fn(&PathLossSample) -> f64,
{
    fn mean_path_loss(&self, s: &PathLossSample) -> Result<f64> {
        Ok(self(s))
    }
}

/// The 3GPP RMa model in the sample's own environment, with the given
/// building height and street width. Evaluated without applicability checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rma3gpp {
    pub h: f64,
    pub w: f64,
}

impl Default for Rma3gpp {
    fn default() -> Self {
        Rma3gpp {
            h: crate::models::GeometryParams::DEFAULT_H,
            w: crate::models::GeometryParams::DEFAULT_W,
        }
    }
}

impl MeanPathLoss for Rma3gpp {
    fn mean_path_loss(&self, s: &PathLossSample) -> Result<f64> {
        Ok(match s.environment {
            Environment::Los => {
                RmaLos::new(s.h_bs, s.h_ut, self.h, s.f_c)?
                    .evaluate_with(s.d_2d, s.d_3d)
                    .mean_db
            }
            Environment::Nlos => {
                RmaNlos::new(s.h_bs, s.h_ut, self.h, self.w, s.f_c)?
                    .evaluate_with(s.d_2d, s.d_3d)
                    .mean_db
            }
        })
    }
}

/// Root mean squared difference between sample path loss and model mean.
pub fn rmse<M: MeanPathLoss + ?Sized>(samples: &[PathLossSample], model: &M) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::Empty);
    }
    let mut sse = CompensatedSum::default();
    for s in samples {
        let r = s.pl - model.mean_path_loss(s)?;
        sse.add(r * r);
    }
    Ok(sqrt(sse.value() / samples.len() as f64))
}

/// Path loss in excess of free space at 1 m, and `10 log10(d)`.
#[inline]
fn excess_and_log_distance(s: &PathLossSample) -> Result<(f64, f64)> {
    ensure_positive("f_c", s.f_c)?;
    ensure_close_in_distance(s.d_3d)?;
    if !s.pl.is_finite() {
        return Err(Error::domain("pl", s.pl, "a finite path loss"));
    }
    Ok((
        s.pl - FSPL_1M_1GHZ_DB - 20.0 * log10(s.f_c),
        10.0 * log10(s.d_3d),
    ))
}

/// Streaming CI fit.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CiAccumulator {
    ab: CompensatedSum,
    bb: CompensatedSum,
    aa: CompensatedSum,
    count: u64,
}

impl CiAccumulator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, s: &PathLossSample) -> Result<()> {
        let (a, b) = excess_and_log_distance(s)?;
        self.ab.add(a * b);
        self.bb.add(b * b);
        self.aa.add(a * a);
        self.count += 1;
        Ok(())
    }

    pub fn merge(&mut self, other: &CiAccumulator) {
        self.ab.merge(&other.ab);
        self.bb.merge(&other.bb);
        self.aa.merge(&other.aa);
        self.count += other.count;
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    /// Least-squares path loss exponent.
    pub fn ple(&self) -> Result<f64> {
        if self.count == 0 {
            return Err(Error::Empty);
        }
        let bb = self.bb.value();
        if bb <= 0.0 {
            return Err(Error::Degenerate(
                "every sample is at the 1 m reference distance",
            ));
        }
        Ok(self.ab.value() / bb)
    }

    /// Fit with sigma from the sufficient statistics.
    pub fn finish(&self) -> Result<FitResult> {
        let n = self.ple()?;
        let sse = self.aa.value() - n * self.ab.value();
        Ok(FitResult {
            model_kind: ModelKind::CI,
            n,
            b_tx: None,
            h_b0: None,
            sigma: sqrt(f64::max(sse, 0.0) / self.count as f64),
            sample_count: self.count,
        })
    }
}

/// Streaming CIH fit at a fixed reference height.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CihAccumulator {
    h_b0: f64,
    x1x1: CompensatedSum,
    x1x2: CompensatedSum,
    x2x2: CompensatedSum,
    ax1: CompensatedSum,
    ax2: CompensatedSum,
    aa: CompensatedSum,
    count: u64,
    first_h_bs: Option<f64>,
    distinct_heights: bool,
}

impl CihAccumulator {
    pub fn new(h_b0: f64) -> Result<Self> {
        ensure_positive("h_b0", h_b0)?;
        Ok(CihAccumulator {
            h_b0,
            x1x1: CompensatedSum::default(),
            x1x2: CompensatedSum::default(),
            x2x2: CompensatedSum::default(),
            ax1: CompensatedSum::default(),
            ax2: CompensatedSum::default(),
            aa: CompensatedSum::default(),
            count: 0,
            first_h_bs: None,
            distinct_heights: false,
        })
    }

    pub fn h_b0(&self) -> f64 {
        self.h_b0
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn push(&mut self, s: &PathLossSample) -> Result<()> {
        ensure_positive("h_bs", s.h_bs)?;
        let (a, x1) = excess_and_log_distance(s)?;
        let x2 = x1 * (s.h_bs - self.h_b0) / self.h_b0;
        self.x1x1.add(x1 * x1);
        self.x1x2.add(x1 * x2);
        self.x2x2.add(x2 * x2);
        self.ax1.add(a * x1);
        self.ax2.add(a * x2);
        self.aa.add(a * a);
        self.count += 1;
        self.note_height(s.h_bs);
        Ok(())
    }

    fn note_height(&mut self, h_bs: f64) {
        match self.first_h_bs {
            None => self.first_h_bs = Some(h_bs),
            Some(h) if h != h_bs => self.distinct_heights = true,
            Some(_) => {}
        }
    }

    pub fn merge(&mut self, other: &CihAccumulator) -> Result<()> {
        if other.h_b0 != self.h_b0 {
            return Err(Error::Config(alloc::format!(
                "cannot merge CIH fits with h_b0 {} and {}",
                self.h_b0,
                other.h_b0
            )));
        }
        self.x1x1.merge(&other.x1x1);
        self.x1x2.merge(&other.x1x2);
        self.x2x2.merge(&other.x2x2);
        self.ax1.merge(&other.ax1);
        self.ax2.merge(&other.ax2);
        self.aa.merge(&other.aa);
        self.count += other.count;
        self.distinct_heights |= other.distinct_heights;
        if let Some(h) = other.first_h_bs {
            self.note_height(h);
        }
        Ok(())
    }

    /// Least-squares `(n, n * b_tx)`.
    pub fn coefficients(&self) -> Result<(f64, f64)> {
        if self.count == 0 {
            return Err(Error::Empty);
        }
        if !self.distinct_heights {
            return Err(Error::Singular(
                "CIH needs at least two distinct base station heights; fit CI instead",
            ));
        }
        let (s11, s12, s22) = (self.x1x1.value(), self.x1x2.value(), self.x2x2.value());
        let (r1, r2) = (self.ax1.value(), self.ax2.value());
        let det = s11 * s22 - s12 * s12;
        if !(det > 1e-12 * s11 * s22) {
            return Err(Error::Singular(
                "distance and height regressors are collinear",
            ));
        }
        let alpha = (r1 * s22 - r2 * s12) / det;
        let beta = (s11 * r2 - s12 * r1) / det;
        Ok((alpha, beta))
    }

    pub fn finish(&self) -> Result<FitResult> {
        let (alpha, beta) = self.coefficients()?;
        if alpha == 0.0 {
            return Err(Error::Degenerate("fitted distance coefficient is zero"));
        }
        let sse = self.aa.value() - alpha * self.ax1.value() - beta * self.ax2.value();
        Ok(FitResult {
            model_kind: ModelKind::CIH,
            n: alpha,
            b_tx: Some(beta / alpha),
            h_b0: Some(self.h_b0),
            sigma: sqrt(f64::max(sse, 0.0) / self.count as f64),
            sample_count: self.count,
        })
    }
}

/// Minimum-RMSE CI fit over `samples` (jointly across frequencies).
pub fn fit_ci(samples: &[PathLossSample]) -> Result<FitResult> {
    let mut acc = CiAccumulator::new();
    for s in samples {
        acc.push(s)?;
    }
    let mut fit = acc.finish()?;
    fit.sigma = rmse(samples, &fit.ci_params())?;
    Ok(fit)
}

/// Minimum-RMSE CIH fit with reference height `h_b0`.
pub fn fit_cih(samples: &[PathLossSample], h_b0: f64) -> Result<FitResult> {
    let mut acc = CihAccumulator::new(h_b0)?;
    for s in samples {
        acc.push(s)?;
    }
    let mut fit = acc.finish()?;
    fit.sigma = rmse(samples, &fit.cih_params(h_b0))?;
    Ok(fit)
}

/// The `b_tx` that makes a CIH model with exponent `n_cih` reproduce a CI
/// exponent `ple_ci` at base station height `h_bs`.
pub fn solve_btx_from_ci(ple_ci: f64, n_cih: f64, h_bs: f64, h_b0: f64) -> Result<f64> {
    ensure_positive("n_cih", n_cih)?;
    ensure_positive("h_bs", h_bs)?;
    ensure_positive("h_b0", h_b0)?;
    if !ple_ci.is_finite() {
        return Err(Error::domain("ple_ci", ple_ci, "a finite exponent"));
    }
    if h_bs == h_b0 {
        return Err(Error::domain(
            "h_bs",
            h_bs,
            "h_bs != h_b0 (every b_tx matches at the reference height)",
        ));
    }
    Ok((ple_ci / n_cih - 1.0) * h_b0 / (h_bs - h_b0))
}
