//! Derived outputs: where the LOS breakpoint falls off the map, how much
//! raising the base station buys in each model, and side-by-side tables of
//! fitted models.

use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

use crate::error::{ensure_close_in_distance, ensure_positive, Error, Result};
use crate::fitting::{rmse, solve_btx_from_ci, FitResult, ModelKind};
use crate::math::sqrt;
use crate::models::{
    breakpoint_distance, cih_path_loss, ApplicabilityRange, CihParams, Environment, RmaNlos,
    SPEED_OF_LIGHT,
};
use crate::simulation::PathLossSample;

/// 3D distances at which height-gain curves are reported, m.
pub const HEIGHT_GAIN_DISTANCES_M: [f64; 5] = [150.0, 500.0, 1000.0, 2500.0, 5000.0];

/// Base station height that height gains are measured against, m.
pub const HEIGHT_GAIN_REFERENCE_M: f64 = 10.0;

/// Inclusive axis `start, start + step, ...` up to `stop` (within 1e-9 steps).
pub fn axis(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    ensure_positive("step", step)?;
    if !(stop >= start) || !start.is_finite() || !stop.is_finite() {
        return Err(Error::Config(alloc::format!("empty axis {start}..{stop}")));
    }
    let count = ((stop - start) / step + 1e-9) as usize + 1;
    Ok((0..count).map(|i| start + step * i as f64).collect())
}

/// Frequency (GHz) above which the breakpoint lies beyond `d_max`.
pub fn boundary_frequency_ghz(h_bs: f64, h_ut: f64, d_max: f64) -> Result<f64> {
    ensure_positive("h_bs", h_bs)?;
    ensure_positive("h_ut", h_ut)?;
    ensure_positive("d_max", d_max)?;
    Ok(d_max * SPEED_OF_LIGHT / (2.0 * PI * h_bs * h_ut) / 1e9)
}

/// Raster of (frequency, base station height) pairs for which the LOS model
/// has no second slope inside `d_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityGrid {
    pub frequencies_ghz: Vec<f64>,
    pub heights_m: Vec<f64>,
    pub d_max: f64,
    pub h_ut: f64,
    /// Boundary frequency for each height, GHz.
    pub boundary_ghz: Vec<f64>,
    // Height-major: cells[h * frequencies + f].
    cells: Vec<bool>,
}

impl FeasibilityGrid {
    /// True when the breakpoint exceeds `d_max`.
    pub fn single_slope(&self, freq_index: usize, height_index: usize) -> bool {
        self.cells[height_index * self.frequencies_ghz.len() + freq_index]
    }

    /// `(frequency, height, single_slope)` in height-major order.
    pub fn iter(&self) -> impl Iterator<Item = (f64, f64, bool)> + '_ {
        let nf = self.frequencies_ghz.len();
        self.cells
            .iter()
            .enumerate()
            .map(move |(i, &c)| (self.frequencies_ghz[i % nf], self.heights_m[i / nf], c))
    }
}

pub fn breakpoint_feasibility(
    frequencies_ghz: &[f64],
    heights_m: &[f64],
    h_ut: f64,
    d_max: f64,
) -> Result<FeasibilityGrid> {
    if frequencies_ghz.is_empty() || heights_m.is_empty() {
        return Err(Error::Empty);
    }
    ensure_positive("d_max", d_max)?;
    let mut cells = Vec::with_capacity(frequencies_ghz.len() * heights_m.len());
    let mut boundary = Vec::with_capacity(heights_m.len());
    for &h in heights_m {
        boundary.push(boundary_frequency_ghz(h, h_ut, d_max)?);
        for &f in frequencies_ghz {
            cells.push(breakpoint_distance(h, h_ut, f * 1e9)? > d_max);
        }
    }
    Ok(FeasibilityGrid {
        frequencies_ghz: frequencies_ghz.to_vec(),
        heights_m: heights_m.to_vec(),
        d_max,
        h_ut,
        boundary_ghz: boundary,
        cells,
    })
}

/// Model whose base station height dependence is charted.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HeightGainModel {
    /// The 3GPP NLOS formula, before its max with the LOS mean.
    RmaNlos {
        h: f64,
        w: f64,
        f_c: f64,
    },
    /// The 3GPP NLOS mean including the max with the LOS mean.
    RmaNlosFloored {
        h: f64,
        w: f64,
        f_c: f64,
    },
    Cih(CihParams),
}

impl HeightGainModel {
    pub fn rma_nlos_defaults(f_c: f64) -> Self {
        HeightGainModel::RmaNlos {
            h: crate::models::GeometryParams::DEFAULT_H,
            w: crate::models::GeometryParams::DEFAULT_W,
            f_c,
        }
    }

    pub fn id(&self) -> &'static str {
        match self {
            HeightGainModel::RmaNlos { .. } => "3gpp-nlos",
            HeightGainModel::RmaNlosFloored { .. } => "3gpp-nlos-floored",
            HeightGainModel::Cih(_) => "cih",
        }
    }

    fn check_distance(&self, d_3d: f64) -> Result<()> {
        match self {
            HeightGainModel::Cih(_) => ensure_close_in_distance(d_3d),
            _ => {
                let range = ApplicabilityRange::NLOS.d_2d;
                if range.contains(d_3d) {
                    Ok(())
                } else {
                    Err(Error::domain("d", d_3d, "10 m <= d <= 5000 m"))
                }
            }
        }
    }

    /// Mean path loss at 3D distance `d_3d`, dB.
    fn mean(&self, h_bs: f64, h_ut: f64, d_3d: f64) -> Result<f64> {
        match *self {
            HeightGainModel::RmaNlos { h, w, f_c } => {
                ensure_positive("f_c", f_c)?;
                // 20 log10 f_c cancels in every reduction; dropping it keeps
                // the curves bit-identical across frequencies.
                Ok(RmaNlos::new(h_bs, h_ut, h, w, 1.0)?.base(d_3d))
            }
            HeightGainModel::RmaNlosFloored { h, w, f_c } => {
                let dh = h_bs - h_ut;
                let d_2d = sqrt(d_3d * d_3d - dh * dh);
                if !(d_2d > 0.0) {
                    return Err(Error::domain("d", d_3d, "d_3d > |h_bs - h_ut|"));
                }
                Ok(RmaNlos::new(h_bs, h_ut, h, w, f_c)?
                    .evaluate_with(d_2d, d_3d)
                    .mean_db)
            }
            HeightGainModel::Cih(p) => cih_path_loss(&p, 1.0, d_3d, h_bs),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CurveDistance {
    At(f64),
    Average,
}

impl fmt::Display for CurveDistance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CurveDistance::At(d) => write!(f, "{d}"),
            CurveDistance::Average => f.write_str("average"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeightGainPoint {
    pub h_bs: f64,
    /// Path loss at 10 m minus path loss at `h_bs`, dB.
    pub reduction_db: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HeightGainCurve {
    pub model: &'static str,
    pub distance: CurveDistance,
    pub points: Vec<HeightGainPoint>,
}

impl HeightGainCurve {
    pub fn reduction_at(&self, h_bs: f64) -> Option<f64> {
        self.points
            .iter()
            .find(|p| p.h_bs == h_bs)
            .map(|p| p.reduction_db)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HeightGainSet {
    pub curves: Vec<HeightGainCurve>,
    /// Pointwise unweighted mean of `curves`.
    pub average: HeightGainCurve,
}

/// Reduction in mean path loss from raising the base station above 10 m, per
/// 3D distance, plus the average over the distances.
pub fn height_gain_curves(
    model: &HeightGainModel,
    distances: &[f64],
    heights: &[f64],
    h_ut: f64,
) -> Result<HeightGainSet> {
    if distances.is_empty() || heights.is_empty() {
        return Err(Error::Empty);
    }
    ensure_positive("h_ut", h_ut)?;
    let (lo, hi) = CihParams::HEIGHT_RANGE_M;
    let mut sorted: Vec<f64> = heights.to_vec();
    for &h in &sorted {
        if !(lo..=hi).contains(&h) {
            return Err(Error::domain("h_bs", h, "10 m <= h_bs <= 150 m"));
        }
    }
    sorted.sort_by(f64::total_cmp);

    let mut curves = Vec::with_capacity(distances.len());
    for &d in distances {
        model.check_distance(d)?;
        let reference = model.mean(HEIGHT_GAIN_REFERENCE_M, h_ut, d)?;
        let points = sorted
            .iter()
            .map(|&h_bs| {
                Ok(HeightGainPoint {
                    h_bs,
                    reduction_db: reference - model.mean(h_bs, h_ut, d)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        curves.push(HeightGainCurve {
            model: model.id(),
            distance: CurveDistance::At(d),
            points,
        });
    }

    let count = curves.len() as f64;
    let average_points = sorted
        .iter()
        .enumerate()
        .map(|(i, &h_bs)| HeightGainPoint {
            h_bs,
            reduction_db: curves.iter().map(|c| c.points[i].reduction_db).sum::<f64>() / count,
        })
        .collect();
    Ok(HeightGainSet {
        average: HeightGainCurve {
            model: model.id(),
            distance: CurveDistance::Average,
            points: average_points,
        },
        curves,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum DataSource {
    #[cfg_attr(feature = "serde", serde(rename = "Sim."))]
    Simulated,
    #[cfg_attr(feature = "serde", serde(rename = "Meas."))]
    Measured,
}

impl fmt::Display for DataSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DataSource::Simulated => "Sim.",
            DataSource::Measured => "Meas.",
        })
    }
}

/// One fitted model to tabulate, optionally with the samples it came from.
#[derive(Debug, Clone, Copy)]
pub struct ComparisonInput<'a> {
    pub data: DataSource,
    pub environment: Environment,
    pub fit: FitResult,
    pub samples: Option<&'a [PathLossSample]>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ComparisonRow {
    pub model_kind: ModelKind,
    pub data: DataSource,
    pub environment: Environment,
    pub n: f64,
    pub b_tx: Option<f64>,
    pub h_b0: Option<f64>,
    pub sigma: f64,
    pub sample_count: u64,
    /// RMSE of the fitted model against the attached samples, dB.
    pub rmse_db: Option<f64>,
}

/// Rows in table order: CI before CIH, LOS before NLOS, simulated before
/// measured.
pub fn compare_models(inputs: &[ComparisonInput<'_>]) -> Result<Vec<ComparisonRow>> {
    let mut rows = Vec::with_capacity(inputs.len());
    for input in inputs {
        let rmse_db = match input.samples {
            Some(samples) if !samples.is_empty() => {
                if let Some(bad) = samples.iter().find(|s| s.environment != input.environment) {
                    return Err(Error::EnvironmentMismatch {
                        expected: input.environment,
                        found: bad.environment,
                    });
                }
                Some(rmse(samples, &input.fit)?)
            }
            _ => None,
        };
        rows.push(ComparisonRow {
            model_kind: input.fit.model_kind,
            data: input.data,
            environment: input.environment,
            n: input.fit.n,
            b_tx: input.fit.b_tx,
            h_b0: input.fit.h_b0,
            sigma: input.fit.sigma,
            sample_count: input.fit.sample_count,
            rmse_db,
        });
    }
    rows.sort_by_key(|r| (r.model_kind, r.environment, r.data));
    Ok(rows)
}

/// CIH model for single-height measurements: keep the distance coefficient
/// and reference height of a multi-height CIH fit and pick `b_tx` so the
/// model reproduces the measured CI exponent at the measurement height.
pub fn cih_from_single_height_ci(
    measured_ci: &FitResult,
    multi_height_cih: &FitResult,
    measurement_h_bs: f64,
) -> Result<FitResult> {
    let h_b0 = multi_height_cih.h_b0.ok_or(Error::Degenerate(
        "multi-height fit has no reference height",
    ))?;
    let b_tx = solve_btx_from_ci(measured_ci.n, multi_height_cih.n, measurement_h_bs, h_b0)?;
    Ok(FitResult {
        model_kind: ModelKind::CIH,
        n: multi_height_cih.n,
        b_tx: Some(b_tx),
        h_b0: Some(h_b0),
        sigma: measured_ci.sigma,
        sample_count: measured_ci.sample_count,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reference;
    use approx::assert_abs_diff_eq;

    #[test]
    fn axis_is_inclusive() {
        let a = axis(0.5, 100.0, 0.1).unwrap();
        assert_eq!(a.len(), 996);
        assert_abs_diff_eq!(*a.last().unwrap(), 100.0, epsilon = 1e-9);
        assert_eq!(axis(10.0, 150.0, 5.0).unwrap().len(), 29);
        assert!(axis(10.0, 5.0, 1.0).is_err());
    }

    #[test]
    fn boundary_frequencies() {
        assert_abs_diff_eq!(
            boundary_frequency_ghz(35.0, 1.5, 10_000.0).unwrap(),
            9.0946,
            epsilon = 1e-4
        );
        assert_abs_diff_eq!(
            boundary_frequency_ghz(10.0, 1.5, 10_000.0).unwrap(),
            31.831,
            epsilon = 1e-3
        );
        let f = boundary_frequency_ghz(35.0, 1.5, 10_000.0).unwrap();
        assert_eq!(
            boundary_frequency_ghz(35.0, 1.5, 20_000.0).unwrap(),
            2.0 * f
        );
    }

    #[test]
    fn grid_matches_breakpoint() {
        let g = breakpoint_feasibility(&[6.0, 9.0, 9.2, 40.0], &[10.0, 35.0, 150.0], 1.5, 10_000.0)
            .unwrap();
        // 35 m: boundary near 9.09 GHz.
        assert!(!g.single_slope(1, 1));
        assert!(g.single_slope(2, 1));
        // Everything above 32 GHz is single slope.
        for h in 0..3 {
            assert!(g.single_slope(3, h));
        }
        assert_eq!(g.iter().count(), 12);
        assert!(breakpoint_feasibility(&[], &[10.0], 1.5, 1e4).is_err());
        assert!(breakpoint_feasibility(&[1.0], &[10.0], 1.5, 0.0).is_err());
    }

    #[test]
    fn reference_height_has_zero_gain() {
        let heights = axis(10.0, 150.0, 5.0).unwrap();
        for model in [
            HeightGainModel::rma_nlos_defaults(6.0),
            HeightGainModel::Cih(reference::MEASURED_CIH_NLOS),
        ] {
            let set = height_gain_curves(&model, &HEIGHT_GAIN_DISTANCES_M, &heights, 1.5).unwrap();
            assert_eq!(set.curves.len(), 5);
            for c in set.curves.iter().chain(core::iter::once(&set.average)) {
                assert_eq!(c.points[0].h_bs, 10.0);
                assert_eq!(c.points[0].reduction_db, 0.0);
            }
        }
    }

    #[test]
    fn nlos_height_gain_is_frequency_independent() {
        let heights = axis(10.0, 150.0, 5.0).unwrap();
        let at = |f| {
            height_gain_curves(
                &HeightGainModel::rma_nlos_defaults(f),
                &HEIGHT_GAIN_DISTANCES_M,
                &heights,
                1.5,
            )
            .unwrap()
        };
        let reference = at(1.0);
        for f in [0.5, 6.0, 28.0, 73.0, 100.0] {
            assert_eq!(at(f), reference);
        }
        assert!(height_gain_curves(
            &HeightGainModel::rma_nlos_defaults(0.0),
            &[150.0],
            &[20.0],
            1.5
        )
        .is_err());
    }

    #[test]
    fn height_gain_domain() {
        let m = HeightGainModel::rma_nlos_defaults(6.0);
        assert!(height_gain_curves(&m, &[150.0], &[200.0], 1.5).is_err());
        assert!(height_gain_curves(&m, &[6000.0], &[20.0], 1.5).is_err());
        assert!(height_gain_curves(&m, &[], &[20.0], 1.5).is_err());
        let cih = HeightGainModel::Cih(reference::MEASURED_CIH_NLOS);
        assert!(height_gain_curves(&cih, &[6000.0], &[20.0], 1.5).is_ok());
    }

    #[test]
    fn floored_variant_differs_close_in() {
        let raw = height_gain_curves(
            &HeightGainModel::rma_nlos_defaults(6.0),
            &[150.0],
            &[150.0],
            1.5,
        )
        .unwrap();
        let floored = height_gain_curves(
            &HeightGainModel::RmaNlosFloored {
                h: 5.0,
                w: 20.0,
                f_c: 6.0,
            },
            &[150.0],
            &[150.0],
            1.5,
        )
        .unwrap();
        assert_abs_diff_eq!(raw.curves[0].points[0].reduction_db, 26.57, epsilon = 0.01);
        assert!(floored.curves[0].points[0].reduction_db < 25.0);
    }

    #[test]
    fn measured_cih_rows_from_published_ci() {
        let sim = |n| FitResult {
            model_kind: ModelKind::CIH,
            n,
            b_tx: Some(-0.01),
            h_b0: Some(35.0),
            sigma: 5.0,
            sample_count: 100,
        };
        let los = cih_from_single_height_ci(
            &reference::measured_ci_fit(Environment::Los),
            &sim(2.31),
            110.0,
        )
        .unwrap();
        assert_abs_diff_eq!(los.b_tx.unwrap(), -0.030, epsilon = 1e-3);
        assert_eq!((los.n, los.sigma, los.sample_count), (2.31, 1.7, 14));
        let nlos = cih_from_single_height_ci(
            &reference::measured_ci_fit(Environment::Nlos),
            &sim(3.07),
            110.0,
        )
        .unwrap();
        assert_abs_diff_eq!(nlos.b_tx.unwrap(), -0.049, epsilon = 1e-3);
    }

    #[test]
    fn empty_comparison_is_empty() {
        assert!(compare_models(&[]).unwrap().is_empty());
    }
}
