//! Monte Carlo generation of 3GPP RMa path loss samples.
//!
//! A scenario is a grid of cells, one per (frequency, base station height)
//! pair. Every cell draws its samples from its own ChaCha8 stream, keyed by
//! the scenario seed and the cell index, so cells can be generated in any
//! order or on any number of workers and still reproduce the same
//! collection. Output order is (frequency index, height index, sample index).

use alloc::vec::Vec;
use core::fmt;

use rand_chacha::ChaCha8Rng;
use rand_core::SeedableRng;
use rand_distr::{Distribution, StandardNormal, StandardUniform};

use crate::error::{ensure_positive, Error, Result};
use crate::math::{hypot, powf, sqrt};
use crate::models::{
    ApplicabilityRange, Environment, GeometryParams, Interval, Parameter, RangeCheck, RmaLos,
    RmaNlos, Violation, ViolationReport,
};

/// Frequencies of both Monte Carlo cases, GHz.
pub const CASE_FREQUENCIES_GHZ: [f64; 9] = [1.0, 2.0, 6.0, 15.0, 28.0, 38.0, 60.0, 73.0, 100.0];

/// Samples per (frequency, height) cell in the reference runs.
pub const REFERENCE_SAMPLES_PER_CELL: usize = 50_000;

/// Base station heights of the height sweep: 10 m to 150 m in 5 m steps.
pub fn case_two_heights() -> Vec<f64> {
    (0..29).map(|i| 10.0 + 5.0 * i as f64).collect()
}

/// Whether a sample came out of the generator or a measurement file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum SampleSource {
    Simulated,
    Measured,
}

/// One path loss observation.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PathLossSample {
    /// Carrier frequency, GHz.
    pub f_c: f64,
    pub d_2d: f64,
    pub d_3d: f64,
    pub h_bs: f64,
    pub h_ut: f64,
    pub environment: Environment,
    /// Path loss including shadow fading, dB.
    pub pl: f64,
    pub source: SampleSource,
}

/// How ground distances are drawn over the configured range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum DistanceSampling {
    /// Users spread uniformly over the annulus around the base station
    /// (density proportional to `d`).
    #[default]
    Area,
    /// Uniform in `d`.
    Linear,
    /// Uniform in `log10(d)`.
    Log,
}

impl DistanceSampling {
    pub fn token(self) -> &'static str {
        match self {
            DistanceSampling::Area => "area",
            DistanceSampling::Linear => "linear",
            DistanceSampling::Log => "log",
        }
    }

    pub fn from_token(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "area" => Some(DistanceSampling::Area),
            "linear" => Some(DistanceSampling::Linear),
            "log" => Some(DistanceSampling::Log),
            _ => None,
        }
    }

    /// Maps a uniform draw `u` in `[0, 1)` onto `[min, max]`.
    #[inline]
    fn map(self, u: f64, range: &Interval) -> f64 {
        let (lo, hi) = (range.min, range.max);
        let d = match self {
            DistanceSampling::Area => sqrt(lo * lo + u * (hi * hi - lo * lo)),
            DistanceSampling::Linear => lo + u * (hi - lo),
            DistanceSampling::Log => lo * powf(hi / lo, u),
        };
        d.clamp(lo, hi)
    }
}

impl fmt::Display for DistanceSampling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

/// Full description of one Monte Carlo experiment.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ScenarioConfig {
    /// Carrier frequencies, GHz.
    pub frequencies: Vec<f64>,
    /// Ground distance range, m.
    pub d2d_range: Interval,
    pub environment: Environment,
    pub samples_per_cell: usize,
    /// Base station heights, m. A single entry for a fixed-height run.
    pub h_bs_sweep: Vec<f64>,
    pub h_ut: f64,
    pub h: f64,
    pub w: f64,
    pub seed: u64,
    pub sampling: DistanceSampling,
    /// `Force` allows ranges outside the 3GPP applicability table.
    pub force: bool,
}

impl ScenarioConfig {
    /// Default-geometry run over the nine reference frequencies at 35 m.
    pub fn case_one(environment: Environment, seed: u64) -> Self {
        ScenarioConfig {
            frequencies: CASE_FREQUENCIES_GHZ.to_vec(),
            d2d_range: ApplicabilityRange::for_environment(environment).d_2d,
            environment,
            samples_per_cell: REFERENCE_SAMPLES_PER_CELL,
            h_bs_sweep: alloc::vec![GeometryParams::DEFAULT_H_BS],
            h_ut: GeometryParams::DEFAULT_H_UT,
            h: GeometryParams::DEFAULT_H,
            w: GeometryParams::DEFAULT_W,
            seed,
            sampling: DistanceSampling::default(),
            force: false,
        }
    }

    /// Case one repeated over the 29 heights from 10 m to 150 m.
    pub fn case_two(environment: Environment, seed: u64) -> Self {
        ScenarioConfig {
            h_bs_sweep: case_two_heights(),
            ..Self::case_one(environment, seed)
        }
    }

    pub fn range_check(&self) -> RangeCheck {
        if self.force {
            RangeCheck::Force
        } else {
            RangeCheck::Strict
        }
    }

    pub fn cell_count(&self) -> usize {
        self.frequencies.len() * self.h_bs_sweep.len()
    }

    pub fn sample_count(&self) -> u64 {
        self.cell_count() as u64 * self.samples_per_cell as u64
    }

    /// Cells in output order.
    pub fn cells(&self) -> impl Iterator<Item = Cell> + '_ {
        let heights = self.h_bs_sweep.len();
        self.frequencies
            .iter()
            .enumerate()
            .flat_map(move |(fi, &f_c)| {
                self.h_bs_sweep
                    .iter()
                    .enumerate()
                    .map(move |(hi, &h_bs)| Cell {
                        index: fi * heights + hi,
                        f_c,
                        h_bs,
                    })
            })
    }

    /// Checks the configuration. Inputs no formula accepts are errors. Table
    /// violations are errors unless `force` is set, in which case they are
    /// returned for the caller to report.
    pub fn validate(&self) -> Result<ViolationReport> {
        for &f in &self.frequencies {
            ensure_positive("f_c", f)?;
        }
        for &h in &self.h_bs_sweep {
            ensure_positive("h_bs", h)?;
        }
        ensure_positive("h_ut", self.h_ut)?;
        ensure_positive("h", self.h)?;
        ensure_positive("w", self.w)?;
        ensure_positive("d_2d", self.d2d_range.min)?;
        if !(self.d2d_range.max >= self.d2d_range.min) || !self.d2d_range.max.is_finite() {
            return Err(Error::Config(alloc::format!(
                "d2d range {} is empty",
                self.d2d_range
            )));
        }

        let table = ApplicabilityRange::for_environment(self.environment);
        let mut violations = Vec::new();
        let mut check = |parameter, value: f64, interval: Interval| {
            if !interval.contains(value)
                && !violations
                    .iter()
                    .any(|v: &Violation| v.parameter == parameter && v.value == value)
            {
                violations.push(Violation {
                    parameter,
                    value,
                    interval,
                });
            }
        };
        check(Parameter::D2d, self.d2d_range.min, table.d_2d);
        check(Parameter::D2d, self.d2d_range.max, table.d_2d);
        for &h_bs in &self.h_bs_sweep {
            check(Parameter::HBs, h_bs, table.h_bs);
        }
        check(Parameter::HUt, self.h_ut, table.h_ut);
        check(Parameter::H, self.h, table.h);
        check(Parameter::W, self.w, table.w);

        let report = ViolationReport {
            environment: Some(self.environment),
            violations,
        };
        if !report.is_empty() && !self.force {
            return Err(Error::OutOfRange(report));
        }
        Ok(report)
    }
}

/// One (frequency, base station height) block of a scenario.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cell {
    /// Position in output order; also selects the random stream.
    pub index: usize,
    pub f_c: f64,
    pub h_bs: f64,
}

#[derive(Debug, Clone)]
enum CellModel {
    Los(RmaLos),
    Nlos(RmaNlos),
}

/// Iterator over the samples of one cell.
#[derive(Debug, Clone)]
pub struct CellSamples {
    rng: ChaCha8Rng,
    model: CellModel,
    cell: Cell,
    h_ut: f64,
    range: Interval,
    sampling: DistanceSampling,
    environment: Environment,
    remaining: usize,
}

impl CellSamples {
    /// Sample and model mean (before shadow fading) together.
    pub fn next_with_mean(&mut self) -> Option<(PathLossSample, f64)> {
        if self.remaining == 0 {
            return None;
        }
        self.remaining -= 1;
        let u: f64 = StandardUniform.sample(&mut self.rng);
        let d_2d = self.sampling.map(u, &self.range);
        let d_3d = hypot(d_2d, self.cell.h_bs - self.h_ut);
        let (mean, sigma) = match &self.model {
            CellModel::Los(m) => {
                let out = m.evaluate_with(d_2d, d_3d);
                (out.mean_db, out.sigma_db)
            }
            CellModel::Nlos(m) => {
                let out = m.evaluate_with(d_2d, d_3d);
                (out.mean_db, out.sigma_db)
            }
        };
        let z: f64 = StandardNormal.sample(&mut self.rng);
        let sample = PathLossSample {
            f_c: self.cell.f_c,
            d_2d,
            d_3d,
            h_bs: self.cell.h_bs,
            h_ut: self.h_ut,
            environment: self.environment,
            pl: mean + sigma * z,
            source: SampleSource::Simulated,
        };
        Some((sample, mean))
    }
}

impl Iterator for CellSamples {
    type Item = PathLossSample;

    fn next(&mut self) -> Option<PathLossSample> {
        self.next_with_mean().map(|(s, _)| s)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        (self.remaining, Some(self.remaining))
    }
}

impl ExactSizeIterator for CellSamples {}

/// Random stream for a cell: ChaCha8 keyed by the seed, stream = cell index.
pub fn cell_rng(seed: u64, cell_index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(cell_index as u64);
    rng
}

/// Samples of one cell. Does not re-validate `cfg`.
pub fn generate_cell(cfg: &ScenarioConfig, cell: Cell) -> Result<CellSamples> {
    let model = match cfg.environment {
        Environment::Los => CellModel::Los(RmaLos::new(cell.h_bs, cfg.h_ut, cfg.h, cell.f_c)?),
        Environment::Nlos => {
            CellModel::Nlos(RmaNlos::new(cell.h_bs, cfg.h_ut, cfg.h, cfg.w, cell.f_c)?)
        }
    };
    Ok(CellSamples {
        rng: cell_rng(cfg.seed, cell.index),
        model,
        cell,
        h_ut: cfg.h_ut,
        range: cfg.d2d_range,
        sampling: cfg.sampling,
        environment: cfg.environment,
        remaining: cfg.samples_per_cell,
    })
}

/// Every sample of the scenario, in (frequency, height, sample) order.
pub fn generate_samples(cfg: &ScenarioConfig) -> Result<Vec<PathLossSample>> {
    cfg.validate()?;
    let mut out = Vec::with_capacity(cfg.sample_count() as usize);
    for cell in cfg.cells() {
        out.extend(generate_cell(cfg, cell)?);
    }
    Ok(out)
}

/// `sqrt(d_2d^2 + (h_bs - h_ut)^2)`.
pub fn derive_3d_distance(d_2d: f64, h_bs: f64, h_ut: f64) -> Result<f64> {
    ensure_positive("d_2d", d_2d)?;
    ensure_positive("h_bs", h_bs)?;
    ensure_positive("h_ut", h_ut)?;
    Ok(hypot(d_2d, h_bs - h_ut))
}
