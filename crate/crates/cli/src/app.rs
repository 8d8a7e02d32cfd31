//! Command-line front end. `run` is the whole program minus process exit,
//! so tests can drive it in-process.

use std::fs::File;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rmapl_core::analysis::{
    axis, breakpoint_feasibility, cih_from_single_height_ci, compare_models, height_gain_curves,
    ComparisonInput, DataSource, HeightGainModel, HEIGHT_GAIN_DISTANCES_M,
};
use rmapl_core::fitting::{fit_ci, fit_cih};
use rmapl_core::models::{
    ci_path_loss, cih_path_loss, fspl, hata_mobile_correction, rma_los_path_loss,
    rma_nlos_path_loss, sakagami_path_loss, validate_applicability, CiParams, CihParams,
    SakagamiParams,
};
use rmapl_core::simulation::DistanceSampling;
use rmapl_core::{
    reference, Environment, GeometryParams, ModelKind, PathLossSample, RangeCheck, SampleSource,
    ScenarioConfig,
};

use crate::config::{Config, ConfigError};
use crate::dataset::{self, DatasetError, LoadOptions};
use crate::export::{self, FitRecord, Format};
use crate::{format, runner};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_IO: i32 = 2;

#[derive(Debug, thiserror::Error)]
pub enum AppError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Io(String),
}

impl AppError {
    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::Validation(_) => EXIT_VALIDATION,
            AppError::Io(_) => EXIT_IO,
        }
    }
}

impl From<rmapl_core::Error> for AppError {
    fn from(e: rmapl_core::Error) -> Self {
        AppError::Validation(e.to_string())
    }
}

impl From<ConfigError> for AppError {
    fn from(e: ConfigError) -> Self {
        AppError::Validation(e.to_string())
    }
}

impl From<DatasetError> for AppError {
    fn from(e: DatasetError) -> Self {
        if e.is_io() {
            AppError::Io(e.to_string())
        } else {
            AppError::Validation(e.to_string())
        }
    }
}

impl From<std::io::Error> for AppError {
    fn from(e: std::io::Error) -> Self {
        AppError::Io(e.to_string())
    }
}

type AppResult<T> = Result<T, AppError>;

#[derive(Debug, Parser)]
#[command(
    name = "rmapl",
    version,
    about = "Rural macrocell path loss models: evaluate, simulate, fit, analyze"
)]
pub struct Cli {
    /// key = value file supplying defaults for any flag
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate a model, one line per (frequency, distance) pair
    Compute(ComputeArgs),
    /// Run a Monte Carlo scenario and write the samples
    Simulate(SimulateArgs),
    /// Fit CI or CIH to a sample file or a streamed scenario
    Fit(FitArgs),
    /// Figure and table data
    Analyze(AnalyzeArgs),
    /// Convert sample and fit files between CSV and JSON
    Export(ExportArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    Fspl,
    Ci,
    Cih,
    RmaLos,
    RmaNlos,
    Sakagami,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CaseArg {
    One,
    Two,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EnvArg {
    Los,
    Nlos,
}

impl From<EnvArg> for Environment {
    fn from(e: EnvArg) -> Self {
        match e {
            EnvArg::Los => Environment::Los,
            EnvArg::Nlos => Environment::Nlos,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SamplingArg {
    Area,
    Linear,
    Log,
}

impl From<SamplingArg> for DistanceSampling {
    fn from(s: SamplingArg) -> Self {
        match s {
            SamplingArg::Area => DistanceSampling::Area,
            SamplingArg::Linear => DistanceSampling::Linear,
            SamplingArg::Log => DistanceSampling::Log,
        }
    }
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct ComputeArgs {
    #[arg(long, value_enum)]
    pub model: Option<ModelArg>,
    /// Carrier frequencies, GHz (comma separated)
    #[arg(long, value_delimiter = ',')]
    pub f: Vec<f64>,
    /// Ground distances, m (comma separated). Close-in models use this as
    /// the separation d.
    #[arg(long, value_delimiter = ',')]
    pub d2d: Vec<f64>,
    #[arg(long)]
    pub hbs: Option<f64>,
    #[arg(long)]
    pub hut: Option<f64>,
    /// Average building height, m
    #[arg(long)]
    pub h: Option<f64>,
    /// Average street width, m
    #[arg(long)]
    pub w: Option<f64>,
    #[arg(long)]
    pub n: Option<f64>,
    #[arg(long)]
    pub btx: Option<f64>,
    #[arg(long)]
    pub hb0: Option<f64>,
    /// Sakagami street angle, degrees
    #[arg(long)]
    pub theta: Option<f64>,
    /// Fill unset geometry with the 3GPP defaults
    #[arg(long)]
    pub defaults: bool,
    /// Evaluate outside the 3GPP applicability ranges
    #[arg(long)]
    pub force: bool,
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
}

#[derive(Debug, Args)]
pub struct ScenarioArgs {
    #[arg(long, value_enum)]
    pub case: Option<CaseArg>,
    /// Both environments when omitted
    #[arg(long, value_enum)]
    pub env: Option<EnvArg>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Samples per (frequency, height) cell
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long, value_enum)]
    pub sampling: Option<SamplingArg>,
    /// Override the scenario frequencies, GHz
    #[arg(long, value_delimiter = ',')]
    pub f: Vec<f64>,
    /// Override the scenario base station heights, m
    #[arg(long, value_delimiter = ',')]
    pub hbs: Vec<f64>,
    #[arg(long)]
    pub hut: Option<f64>,
    #[arg(long)]
    pub h: Option<f64>,
    #[arg(long)]
    pub w: Option<f64>,
    #[arg(long)]
    pub force: bool,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub scenario: ScenarioArgs,
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[arg(long, value_enum)]
    pub model: Option<ModelArg>,
    /// Sample file (CSV or JSON); omit to stream a --case scenario
    #[arg(long = "in", value_name = "PATH")]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub hb0: Option<f64>,
    #[command(flatten)]
    pub scenario: ScenarioArgs,
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct AnalyzeArgs {
    /// 1: breakpoint boundary, 2: 3GPP NLOS height gain, 4: CIH height gain
    #[arg(long)]
    pub figure: Option<u8>,
    /// 2: model comparison from fit files
    #[arg(long)]
    pub table: Option<u8>,
    /// Fit files for --table (comma separated)
    #[arg(long = "in", value_name = "PATH", value_delimiter = ',')]
    pub input: Vec<PathBuf>,
    /// Largest link distance, m
    #[arg(long)]
    pub dmax: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    pub f: Vec<f64>,
    #[arg(long)]
    pub hut: Option<f64>,
    #[arg(long)]
    pub h: Option<f64>,
    #[arg(long)]
    pub w: Option<f64>,
    #[arg(long)]
    pub n: Option<f64>,
    #[arg(long)]
    pub btx: Option<f64>,
    #[arg(long)]
    pub hb0: Option<f64>,
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
}

#[derive(Debug, Args)]
pub struct ExportArgs {
    #[arg(long = "in", value_name = "PATH")]
    pub input: Option<PathBuf>,
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
}

const CONFIG_KEYS: &[&str] = &[
    "model", "f", "d2d", "hbs", "hut", "h", "w", "n", "btx", "hb0", "theta", "case", "env", "seed",
    "samples", "sampling", "in", "out", "format", "force", "defaults", "dmax", "figure", "table",
];

fn pick<T: ValueEnum>(cfg: &Config, key: &str, flag: Option<T>) -> AppResult<Option<T>> {
    if flag.is_some() {
        return Ok(flag);
    }
    cfg.raw(key)
        .map(|v| {
            T::from_str(v, true).map_err(|reason| {
                AppError::Validation(
                    ConfigError::Invalid {
                        key: key.to_string(),
                        value: v.to_string(),
                        reason,
                    }
                    .to_string(),
                )
            })
        })
        .transpose()
}

fn required<T>(value: Option<T>, flag: &str) -> AppResult<T> {
    value.ok_or_else(|| AppError::Validation(format!("missing required --{flag}")))
}

fn force_warning(err: &mut dyn Write) -> AppResult<()> {
    writeln!(
        err,
        "warning: --force: evaluating outside the 3GPP applicability ranges is permitted"
    )?;
    Ok(())
}

/// Parses `argv` (including the program name) and runs it, returning the
/// exit status.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{}", e.render());
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{}", e.render());
                    EXIT_VALIDATION
                }
            };
        }
    };
    match execute(cli, out, err) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn load_config(path: Option<&Path>) -> AppResult<Config> {
    let Some(path) = path else {
        return Ok(Config::default());
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| AppError::Io(format!("{}: {e}", path.display())))?;
    let cfg = Config::parse(&text)?;
    cfg.check_keys(CONFIG_KEYS)?;
    Ok(cfg)
}

pub fn execute(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> AppResult<()> {
    let cfg = load_config(cli.config.as_deref())?;
    match cli.command {
        Command::Compute(a) => compute(&cfg, a, out, err),
        Command::Simulate(a) => simulate(&cfg, a, out, err),
        Command::Fit(a) => fit(&cfg, a, out, err),
        Command::Analyze(a) => analyze(&cfg, a, out, err),
        Command::Export(a) => export_cmd(&cfg, a, out, err),
    }
}

/// Output format: flag, config, output extension, then `default`.
fn output_format(
    cfg: &Config,
    flag: Option<FormatArg>,
    path: Option<&Path>,
    default: Format,
) -> AppResult<Format> {
    if let Some(f) = pick(cfg, "format", flag)? {
        return Ok(f.into());
    }
    Ok(path.and_then(Format::from_path).unwrap_or(default))
}

fn out_path(cfg: &Config, flag: Option<PathBuf>) -> Option<PathBuf> {
    flag.or_else(|| cfg.raw("out").map(PathBuf::from))
}

/// Sends output to `path` atomically, or to `out`.
fn emit<F>(path: Option<&Path>, out: &mut dyn Write, write: F) -> AppResult<()>
where
    F: Fn(&mut dyn Write) -> Result<(), DatasetError>,
{
    match path {
        Some(p) => export::write_atomic(p, |w| write(w)).map_err(|e| match e {
            DatasetError::Io(io) => AppError::Io(format!("{}: {io}", p.display())),
            other => other.into(),
        }),
        None => Ok(write(out)?),
    }
}

fn open(path: &Path) -> AppResult<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| AppError::Io(format!("{}: {e}", path.display())))
}

// ---- compute

struct ComputeRow {
    f_c: f64,
    d: f64,
    pl: f64,
}

fn compute(
    cfg: &Config,
    a: ComputeArgs,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> AppResult<()> {
    let model = required(pick(cfg, "model", a.model)?, "model")?;
    let freqs = cfg.resolve_list("f", a.f)?;
    let dists = cfg.resolve_list("d2d", a.d2d)?;
    if freqs.is_empty() {
        return Err(AppError::Validation("missing required --f".into()));
    }
    if dists.is_empty() {
        return Err(AppError::Validation("missing required --d2d".into()));
    }
    let defaults = cfg.resolve_switch("defaults", a.defaults)?;
    let force = cfg.resolve_switch("force", a.force)?;
    let geo = |key: &str, flag: Option<f64>, default: f64| -> AppResult<f64> {
        match cfg.resolve(key, flag)? {
            Some(v) => Ok(v),
            None if defaults => Ok(default),
            None => Err(AppError::Validation(format!(
                "missing required --{key} (or pass --defaults)"
            ))),
        }
    };
    let number =
        |key: &str, flag: Option<f64>| -> AppResult<f64> { required(cfg.resolve(key, flag)?, key) };
    let check = if force {
        RangeCheck::Force
    } else {
        RangeCheck::Strict
    };

    let mut rows = Vec::with_capacity(freqs.len() * dists.len());
    match model {
        ModelArg::Fspl | ModelArg::Ci | ModelArg::Cih => {
            let eval: Box<dyn Fn(f64, f64) -> rmapl_core::Result<f64>> = match model {
                ModelArg::Fspl => Box::new(fspl),
                ModelArg::Ci => {
                    let p = CiParams::new(number("n", a.n)?, 0.0)?;
                    Box::new(move |f, d| ci_path_loss(&p, f, d))
                }
                _ => {
                    let p = CihParams {
                        n: number("n", a.n)?,
                        b_tx: number("btx", a.btx)?,
                        h_b0: geo("hb0", a.hb0, reference::CIH_REFERENCE_HEIGHT_M)?,
                        sigma: 0.0,
                    };
                    p.validate()?;
                    let h_bs = geo("hbs", a.hbs, GeometryParams::DEFAULT_H_BS)?;
                    Box::new(move |f, d| cih_path_loss(&p, f, d, h_bs))
                }
            };
            for &f in &freqs {
                for &d in &dists {
                    rows.push(ComputeRow {
                        f_c: f,
                        d,
                        pl: eval(f, d)?,
                    });
                }
            }
        }
        ModelArg::RmaLos | ModelArg::RmaNlos => {
            let env = if model == ModelArg::RmaLos {
                Environment::Los
            } else {
                Environment::Nlos
            };
            let template = GeometryParams {
                d_2d: dists[0],
                h_bs: geo("hbs", a.hbs, GeometryParams::DEFAULT_H_BS)?,
                h_ut: geo("hut", a.hut, GeometryParams::DEFAULT_H_UT)?,
                h: geo("h", a.h, GeometryParams::DEFAULT_H)?,
                w: geo("w", a.w, GeometryParams::DEFAULT_W)?,
            };
            if force {
                force_warning(err)?;
            }
            for &f in &freqs {
                for &d in &dists {
                    let g = GeometryParams {
                        d_2d: d,
                        ..template
                    };
                    if force {
                        let report = validate_applicability(&g, env);
                        if !report.is_empty() {
                            writeln!(err, "warning: {report}")?;
                        }
                    }
                    let pl = match env {
                        Environment::Los => rma_los_path_loss(&g, f, check)?.mean_db,
                        Environment::Nlos => rma_nlos_path_loss(&g, f, check)?.mean_db,
                    };
                    rows.push(ComputeRow { f_c: f, d, pl });
                }
            }
        }
        ModelArg::Sakagami => {
            let h_bs = geo("hbs", a.hbs, GeometryParams::DEFAULT_H_BS)?;
            let h_ut = geo("hut", a.hut, GeometryParams::DEFAULT_H_UT)?;
            let h = geo("h", a.h, GeometryParams::DEFAULT_H)?;
            let w = geo("w", a.w, GeometryParams::DEFAULT_W)?;
            let theta = cfg.resolve("theta", a.theta)?.unwrap_or(0.0);
            for &f in &freqs {
                for &d in &dists {
                    let p = SakagamiParams {
                        w,
                        theta,
                        h_s: h,
                        h_avg: h,
                        h_near: h,
                        h_b0: h_bs,
                        h_b: h_bs - h_ut,
                        f: f * 1000.0,
                        d: d / 1000.0,
                        h_m: h_ut,
                    };
                    rows.push(ComputeRow {
                        f_c: f,
                        d,
                        pl: sakagami_path_loss(&p)?,
                    });
                }
            }
            // Keeps the mobile-height correction visible to users comparing
            // against the 3GPP form.
            log::debug!("hata a(h_ut) = {}", hata_mobile_correction(h_ut)?);
        }
    }

    let name = model
        .to_possible_value()
        .map(|v| v.get_name().to_string())
        .unwrap_or_default();
    match pick(cfg, "format", a.format)?.map(Format::from) {
        None => {
            for r in &rows {
                writeln!(
                    out,
                    "{name} f={} GHz d={} m pl={} dB",
                    format::ghz(r.f_c),
                    format::meters(r.d),
                    format::db(r.pl)
                )?;
            }
        }
        Some(Format::Csv) => {
            writeln!(out, "model,f_c_ghz,d_m,pl_db")?;
            for r in &rows {
                writeln!(
                    out,
                    "{name},{},{},{}",
                    format::ghz(r.f_c),
                    format::meters(r.d),
                    format::db(r.pl)
                )?;
            }
        }
        Some(Format::Json) => {
            let v: Vec<serde_json::Value> = rows
                .iter()
                .map(|r| {
                    serde_json::json!({
                        "model": name,
                        "f_c_ghz": format::round_to(r.f_c, 4),
                        "d_m": format::round_to(r.d, 3),
                        "pl_db": format::round_to(r.pl, 4),
                    })
                })
                .collect();
            writeln!(
                out,
                "{}",
                serde_json::to_string_pretty(&v).expect("json values serialize")
            )?;
        }
    }
    Ok(())
}

// ---- scenarios

fn environments(cfg: &Config, flag: Option<EnvArg>) -> AppResult<Vec<Environment>> {
    Ok(match pick(cfg, "env", flag)? {
        Some(e) => vec![e.into()],
        None => vec![Environment::Los, Environment::Nlos],
    })
}

fn scenario(
    cfg: &Config,
    s: &ScenarioArgs,
    env: Environment,
    err: &mut dyn Write,
) -> AppResult<ScenarioConfig> {
    let case = required(pick(cfg, "case", s.case)?, "case")?;
    let seed = cfg.resolve("seed", s.seed)?.unwrap_or(0);
    let mut sc = match case {
        CaseArg::One => ScenarioConfig::case_one(env, seed),
        CaseArg::Two => ScenarioConfig::case_two(env, seed),
    };
    if let Some(n) = cfg.resolve("samples", s.samples)? {
        sc.samples_per_cell = n;
    }
    if let Some(m) = pick(cfg, "sampling", s.sampling)? {
        sc.sampling = m.into();
    }
    let f = cfg.resolve_list("f", s.f.clone())?;
    if !f.is_empty() {
        sc.frequencies = f;
    }
    let hbs = cfg.resolve_list("hbs", s.hbs.clone())?;
    if !hbs.is_empty() {
        sc.h_bs_sweep = hbs;
    }
    if let Some(v) = cfg.resolve("hut", s.hut)? {
        sc.h_ut = v;
    }
    if let Some(v) = cfg.resolve("h", s.h)? {
        sc.h = v;
    }
    if let Some(v) = cfg.resolve("w", s.w)? {
        sc.w = v;
    }
    sc.force = cfg.resolve_switch("force", s.force)?;
    let report = sc.validate()?;
    if sc.force {
        force_warning(err)?;
        if !report.is_empty() {
            writeln!(err, "warning: {report}")?;
        }
    }
    Ok(sc)
}

fn simulate(
    cfg: &Config,
    a: SimulateArgs,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> AppResult<()> {
    let path = out_path(cfg, a.out);
    let fmt = output_format(cfg, a.format, path.as_deref(), Format::Csv)?;
    let mut samples = Vec::new();
    for env in environments(cfg, a.scenario.env)? {
        let sc = scenario(cfg, &a.scenario, env, err)?;
        let started = std::time::Instant::now();
        samples.extend(runner::simulate(&sc)?);
        log::info!(
            "{env}: {} samples in {:.2?}",
            sc.sample_count(),
            started.elapsed()
        );
    }
    emit(path.as_deref(), out, |w| match fmt {
        Format::Csv => dataset::export_samples_csv(&samples, w),
        Format::Json => dataset::export_samples_json(&samples, w),
    })
}

// ---- fit

/// Reads a sample file. CSV rows written by `simulate` (location `sim-*`)
/// load as simulated samples, anything else as measured.
pub fn load_samples(path: &Path, err: &mut dyn Write) -> AppResult<Vec<PathLossSample>> {
    match Format::from_path(path) {
        Some(Format::Json) => Ok(dataset::load_samples_json(open(path)?)?),
        _ => {
            let simulated = {
                let mut rdr = csv::Reader::from_reader(open(path)?);
                let mut records = rdr.records();
                match records.next() {
                    Some(Ok(r)) => r.get(0).is_some_and(|l| l.starts_with("sim-")),
                    _ => false,
                }
            };
            let options = LoadOptions {
                source: if simulated {
                    SampleSource::Simulated
                } else {
                    SampleSource::Measured
                },
                ..LoadOptions::default()
            };
            let report = dataset::load_measurements(open(path)?, &options)?;
            for w in &report.warnings {
                writeln!(err, "warning: {w}")?;
            }
            Ok(report.samples)
        }
    }
}

fn data_source(samples: &[PathLossSample]) -> DataSource {
    if samples.iter().all(|s| s.source == SampleSource::Simulated) {
        DataSource::Simulated
    } else {
        DataSource::Measured
    }
}

fn fit(cfg: &Config, a: FitArgs, out: &mut dyn Write, err: &mut dyn Write) -> AppResult<()> {
    let model = match required(pick(cfg, "model", a.model)?, "model")? {
        ModelArg::Ci => ModelKind::CI,
        ModelArg::Cih => ModelKind::CIH,
        other => {
            return Err(AppError::Validation(format!(
                "--model {other:?} cannot be fitted; use ci or cih"
            )))
        }
    };
    let h_b0 = cfg
        .resolve("hb0", a.hb0)?
        .unwrap_or(reference::CIH_REFERENCE_HEIGHT_M);
    let input = a.input.or_else(|| cfg.raw("in").map(PathBuf::from));
    let case_given = pick(cfg, "case", a.scenario.case)?.is_some();

    let mut records = Vec::new();
    match (input, case_given) {
        (Some(_), true) => {
            return Err(AppError::Validation(
                "give either --in or --case, not both".into(),
            ))
        }
        (None, false) => {
            return Err(AppError::Validation(
                "missing required --in or --case".into(),
            ))
        }
        (Some(path), false) => {
            let samples = load_samples(&path, err)?;
            let wanted = pick(cfg, "env", a.scenario.env)?.map(Environment::from);
            for env in [Environment::Los, Environment::Nlos] {
                if wanted.is_some_and(|w| w != env) {
                    continue;
                }
                let subset: Vec<PathLossSample> = samples
                    .iter()
                    .filter(|s| s.environment == env)
                    .copied()
                    .collect();
                if subset.is_empty() {
                    continue;
                }
                let fit = match model {
                    ModelKind::CI => fit_ci(&subset)?,
                    ModelKind::CIH => fit_cih(&subset, h_b0)?,
                };
                records.push(FitRecord {
                    environment: env,
                    data: data_source(&subset),
                    fit,
                });
            }
            if records.is_empty() {
                return Err(AppError::Validation(format!(
                    "{}: no samples to fit",
                    path.display()
                )));
            }
        }
        (None, true) => {
            for env in environments(cfg, a.scenario.env)? {
                let sc = scenario(cfg, &a.scenario, env, err)?;
                let started = std::time::Instant::now();
                let fit = match model {
                    ModelKind::CI => runner::simulate_fit_ci(&sc)?,
                    ModelKind::CIH => runner::simulate_fit_cih(&sc, h_b0)?,
                };
                log::info!(
                    "{env}: fitted {} samples in {:.2?}",
                    fit.sample_count,
                    started.elapsed()
                );
                records.push(FitRecord {
                    environment: env,
                    data: DataSource::Simulated,
                    fit,
                });
            }
        }
    }

    for r in &records {
        let btx = r
            .fit
            .b_tx
            .map(|b| format!(", b_tx = {}", format::coefficient(b)))
            .unwrap_or_default();
        writeln!(
            err,
            "{:?} {} {}: n = {}{btx}, sigma = {} dB ({} samples)",
            r.fit.model_kind,
            r.environment,
            r.data,
            format::coefficient(r.fit.n),
            format::db(r.fit.sigma),
            r.fit.sample_count
        )?;
    }
    let path = out_path(cfg, a.out);
    let fmt = output_format(cfg, a.format, path.as_deref(), Format::Json)?;
    emit(path.as_deref(), out, |w| {
        export::export_fit(&records, fmt, w)
    })
}

// ---- analyze

/// `<stem>_grid.<ext>` beside the boundary file.
fn grid_path(path: &Path) -> PathBuf {
    let stem = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("figure1");
    let name = match path.extension().and_then(|e| e.to_str()) {
        Some(ext) => format!("{stem}_grid.{ext}"),
        None => format!("{stem}_grid"),
    };
    path.with_file_name(name)
}

fn analyze(
    cfg: &Config,
    a: AnalyzeArgs,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> AppResult<()> {
    let figure = cfg.resolve("figure", a.figure)?;
    let table = cfg.resolve("table", a.table)?;
    let path = out_path(cfg, a.out);
    let fmt = output_format(cfg, a.format, path.as_deref(), Format::Csv)?;
    let h_ut = cfg
        .resolve("hut", a.hut)?
        .unwrap_or(GeometryParams::DEFAULT_H_UT);
    let heights = axis(10.0, 150.0, 5.0)?;

    match (figure, table) {
        (Some(1), None) => {
            let d_max = cfg.resolve("dmax", a.dmax)?.unwrap_or(10_000.0);
            let freqs = axis(0.5, 100.0, 0.5)?;
            let grid = breakpoint_feasibility(&freqs, &heights, h_ut, d_max)?;
            emit(path.as_deref(), out, |w| {
                export::export_boundary(&grid, fmt, w)
            })?;
            if let Some(p) = &path {
                let gp = grid_path(p);
                emit(Some(&gp), out, |w| export::export_grid(&grid, fmt, w))?;
            }
            Ok(())
        }
        (Some(2), None) => {
            let f_c = cfg.resolve_list("f", a.f)?.first().copied().unwrap_or(6.0);
            let model = HeightGainModel::RmaNlos {
                h: cfg.resolve("h", a.h)?.unwrap_or(GeometryParams::DEFAULT_H),
                w: cfg.resolve("w", a.w)?.unwrap_or(GeometryParams::DEFAULT_W),
                f_c,
            };
            let set = height_gain_curves(&model, &HEIGHT_GAIN_DISTANCES_M, &heights, h_ut)?;
            emit(path.as_deref(), out, |w| {
                export::export_height_gain(&set, fmt, w)
            })
        }
        (Some(4), None) => {
            let d = reference::MEASURED_CIH_NLOS;
            let params = CihParams {
                n: cfg.resolve("n", a.n)?.unwrap_or(d.n),
                b_tx: cfg.resolve("btx", a.btx)?.unwrap_or(d.b_tx),
                h_b0: cfg.resolve("hb0", a.hb0)?.unwrap_or(d.h_b0),
                sigma: d.sigma,
            };
            params.validate()?;
            let set = height_gain_curves(
                &HeightGainModel::Cih(params),
                &HEIGHT_GAIN_DISTANCES_M,
                &heights,
                h_ut,
            )?;
            emit(path.as_deref(), out, |w| {
                export::export_height_gain(&set, fmt, w)
            })
        }
        (None, Some(2)) => {
            let inputs: Vec<PathBuf> = if a.input.is_empty() {
                cfg.raw("in")
                    .map(|v| v.split(',').map(|s| PathBuf::from(s.trim())).collect())
                    .unwrap_or_default()
            } else {
                a.input
            };
            if inputs.is_empty() {
                return Err(AppError::Validation(
                    "--table 2 needs fit files via --in".into(),
                ));
            }
            let mut fits = Vec::new();
            for p in &inputs {
                fits.extend(export::load_fits_json(open(p)?)?);
            }
            let rows = compare_models(&table_two_inputs(&fits, err)?)?;
            emit(path.as_deref(), out, |w| {
                export::export_table(&rows, fmt, w)
            })
        }
        (None, None) => Err(AppError::Validation(
            "give --figure {1|2|4} or --table 2".into(),
        )),
        (Some(_), Some(_)) => Err(AppError::Validation(
            "give --figure or --table, not both".into(),
        )),
        (Some(f), None) => Err(AppError::Validation(format!(
            "unknown figure {f}; use 1, 2 or 4"
        ))),
        (None, Some(t)) => Err(AppError::Validation(format!("unknown table {t}; use 2"))),
    }
}

/// Simulated fits from the files plus the measured rows: CI from the
/// published 73 GHz fits, CIH by matching that CI exponent at the 110 m
/// measurement height with the simulated CIH distance exponent.
fn table_two_inputs(
    fits: &[FitRecord],
    err: &mut dyn Write,
) -> AppResult<Vec<ComparisonInput<'static>>> {
    let mut inputs: Vec<ComparisonInput<'static>> = fits
        .iter()
        .map(|r| ComparisonInput {
            data: r.data,
            environment: r.environment,
            fit: r.fit,
            samples: None,
        })
        .collect();
    for env in [Environment::Los, Environment::Nlos] {
        let measured_ci = reference::measured_ci_fit(env);
        inputs.push(ComparisonInput {
            data: DataSource::Measured,
            environment: env,
            fit: measured_ci,
            samples: None,
        });
        let sim_cih = fits.iter().find(|r| {
            r.environment == env
                && r.data == DataSource::Simulated
                && r.fit.model_kind == ModelKind::CIH
        });
        let cih = match sim_cih {
            Some(sim) => cih_from_single_height_ci(
                &measured_ci,
                &sim.fit,
                reference::MEASUREMENT_TX_HEIGHT_M,
            )?,
            None => {
                writeln!(
                    err,
                    "warning: no simulated CIH fit for {env}; using the published measured CIH row"
                )?;
                let p = match env {
                    Environment::Los => reference::MEASURED_CIH_LOS,
                    Environment::Nlos => reference::MEASURED_CIH_NLOS,
                };
                rmapl_core::FitResult {
                    model_kind: ModelKind::CIH,
                    n: p.n,
                    b_tx: Some(p.b_tx),
                    h_b0: Some(p.h_b0),
                    sigma: p.sigma,
                    sample_count: measured_ci.sample_count,
                }
            }
        };
        inputs.push(ComparisonInput {
            data: DataSource::Measured,
            environment: env,
            fit: cih,
            samples: None,
        });
    }
    Ok(inputs)
}

// ---- export

fn export_cmd(
    cfg: &Config,
    a: ExportArgs,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> AppResult<()> {
    let input = required(a.input.or_else(|| cfg.raw("in").map(PathBuf::from)), "in")?;
    let path = out_path(cfg, a.out);
    let source_format = Format::from_path(&input).unwrap_or(Format::Csv);
    let default = match source_format {
        Format::Csv => Format::Json,
        Format::Json => Format::Csv,
    };
    let fmt = output_format(cfg, a.format, path.as_deref(), default)?;

    if source_format == Format::Json {
        let value: serde_json::Value = serde_json::from_reader(open(&input)?)
            .map_err(|e| AppError::Validation(format!("{}: {e}", input.display())))?;
        let is_fit = value
            .as_array()
            .and_then(|a| a.first())
            .is_some_and(|v| v.get("model_kind").is_some());
        if is_fit {
            let fits: Vec<FitRecord> = serde_json::from_value(value)
                .map_err(|e| AppError::Validation(format!("{}: {e}", input.display())))?;
            return emit(path.as_deref(), out, |w| export::export_fit(&fits, fmt, w));
        }
    }
    let samples = load_samples(&input, err)?;
    emit(path.as_deref(), out, |w| match fmt {
        Format::Csv => dataset::export_samples_csv(&samples, w),
        Format::Json => dataset::export_samples_json(&samples, w),
    })
}
