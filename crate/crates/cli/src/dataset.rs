//! Measurement ingestion and sample files.
//!
//! CSV schema (UTF-8, comma separated, `.` decimal point):
//!
//! ```text
//! location,f_c_ghz,d_2d_m,h_bs_m,h_ut_m,env,pl_db,p_rx_dbm,censored
//! ```
//!
//! `env` is one of `los`, `nlos`, `los-diffraction`. Each uncensored row
//! carries exactly one of `pl_db` or `p_rx_dbm`; the other is left empty.

use std::io::{Read, Write};

use rmapl_core::models::{validate_applicability, Environment, GeometryParams};
use rmapl_core::simulation::derive_3d_distance;
use rmapl_core::{PathLossSample, SampleSource};
use serde::{Deserialize, Serialize};

use crate::format;

pub const CSV_HEADER: [&str; 9] = [
    "location", "f_c_ghz", "d_2d_m", "h_bs_m", "h_ut_m", "env", "pl_db", "p_rx_dbm", "censored",
];

#[derive(Debug, thiserror::Error)]
pub enum DatasetError {
    #[error("line {line}: {message}")]
    Schema { line: u64, message: String },
    #[error("line {line}: {field} = {value} must be positive")]
    Unit {
        line: u64,
        field: &'static str,
        value: f64,
    },
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl DatasetError {
    /// True for failures of the underlying reader or writer.
    pub fn is_io(&self) -> bool {
        match self {
            DatasetError::Io(_) => true,
            DatasetError::Csv(e) => e.is_io_error(),
            DatasetError::Json(e) => e.is_io(),
            _ => false,
        }
    }
}

/// Propagation condition of a measured location. Diffraction-affected LOS
/// links are kept apart from clean LOS.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RecordEnvironment {
    #[serde(rename = "los")]
    Los,
    #[serde(rename = "nlos")]
    Nlos,
    #[serde(rename = "los-diffraction")]
    LosDiffraction,
}

impl RecordEnvironment {
    pub fn token(self) -> &'static str {
        match self {
            RecordEnvironment::Los => "los",
            RecordEnvironment::Nlos => "nlos",
            RecordEnvironment::LosDiffraction => "los-diffraction",
        }
    }

    pub fn from_token(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "los" => Some(RecordEnvironment::Los),
            "nlos" => Some(RecordEnvironment::Nlos),
            "los-diffraction" => Some(RecordEnvironment::LosDiffraction),
            _ => None,
        }
    }

    fn model_environment(self) -> Environment {
        match self {
            RecordEnvironment::Nlos => Environment::Nlos,
            _ => Environment::Los,
        }
    }
}

impl From<Environment> for RecordEnvironment {
    fn from(env: Environment) -> Self {
        match env {
            Environment::Los => RecordEnvironment::Los,
            Environment::Nlos => RecordEnvironment::Nlos,
        }
    }
}

/// One row of a measurement file.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementRecord {
    pub location: String,
    pub f_c: f64,
    pub d_2d: f64,
    pub h_bs: f64,
    pub h_ut: f64,
    pub environment: RecordEnvironment,
    pub pl: Option<f64>,
    pub p_rx: Option<f64>,
    pub censored: bool,
}

/// Transmit and receive side of a sounder.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkBudget {
    pub eirp_dbm: f64,
    pub rx_gain_dbi: f64,
    /// Largest path loss the receiver can still detect, dB.
    pub max_path_loss_db: f64,
}

impl Default for LinkBudget {
    fn default() -> Self {
        LinkBudget {
            eirp_dbm: rmapl_core::reference::SOUNDER_EIRP_DBM,
            rx_gain_dbi: 0.0,
            max_path_loss_db: rmapl_core::reference::SOUNDER_MAX_PATH_LOSS_DB,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkBudgetOutcome {
    pub path_loss_db: f64,
    /// Path loss beyond what the sounder can measure.
    pub censored: bool,
}

/// `eirp + rx_gain - p_rx`, flagged when above the measurable ceiling.
pub fn path_loss_from_link_budget(
    budget: &LinkBudget,
    p_rx_dbm: f64,
) -> Result<LinkBudgetOutcome, DatasetError> {
    if !p_rx_dbm.is_finite() {
        return Err(DatasetError::Invalid(format!(
            "received power {p_rx_dbm} dBm is not finite"
        )));
    }
    if !(budget.max_path_loss_db > 0.0) {
        return Err(DatasetError::Invalid(format!(
            "max measurable path loss {} dB must be positive",
            budget.max_path_loss_db
        )));
    }
    let path_loss_db = budget.eirp_dbm + budget.rx_gain_dbi - p_rx_dbm;
    Ok(LinkBudgetOutcome {
        path_loss_db,
        censored: path_loss_db > budget.max_path_loss_db,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoadOptions {
    pub link_budget: LinkBudget,
    /// Keep diffraction-affected LOS rows (as LOS) instead of dropping them.
    pub include_diffraction: bool,
    /// Tag put on every loaded sample.
    pub source: SampleSource,
}

impl Default for LoadOptions {
    fn default() -> Self {
        LoadOptions {
            link_budget: LinkBudget::default(),
            include_diffraction: false,
            source: SampleSource::Measured,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct LoadReport {
    pub samples: Vec<PathLossSample>,
    pub warnings: Vec<String>,
}

fn parse_number(line: u64, field: &'static str, raw: &str) -> Result<Option<f64>, DatasetError> {
    let raw = raw.trim();
    if raw.is_empty() {
        return Ok(None);
    }
    raw.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .map(Some)
        .ok_or_else(|| DatasetError::Schema {
            line,
            message: format!("{field}: '{raw}' is not a number"),
        })
}

fn required(line: u64, field: &'static str, raw: &str) -> Result<f64, DatasetError> {
    parse_number(line, field, raw)?.ok_or_else(|| DatasetError::Schema {
        line,
        message: format!("{field} is required"),
    })
}

fn positive(line: u64, field: &'static str, raw: &str) -> Result<f64, DatasetError> {
    let value = required(line, field, raw)?;
    if value > 0.0 {
        Ok(value)
    } else {
        Err(DatasetError::Unit { line, field, value })
    }
}

fn parse_bool(line: u64, raw: &str) -> Result<bool, DatasetError> {
    match raw.trim().to_ascii_lowercase().as_str() {
        "true" | "1" => Ok(true),
        "false" | "0" | "" => Ok(false),
        other => Err(DatasetError::Schema {
            line,
            message: format!("censored: '{other}' is not true/false"),
        }),
    }
}

/// Parses and validates every row. `max_path_loss_db`, when set, bounds
/// given path losses.
pub fn read_records<R: Read>(
    reader: R,
    max_path_loss_db: Option<f64>,
) -> Result<Vec<(u64, MeasurementRecord)>, DatasetError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr.headers()?.clone();
    if headers.iter().ne(CSV_HEADER.iter().copied()) {
        return Err(DatasetError::Schema {
            line: 1,
            message: format!(
                "header must be '{}', found '{}'",
                CSV_HEADER.join(","),
                headers.iter().collect::<Vec<_>>().join(",")
            ),
        });
    }

    let mut out = Vec::new();
    for row in rdr.records() {
        let row = row?;
        let line = row.position().map_or(0, |p| p.line());
        if row.len() != CSV_HEADER.len() {
            return Err(DatasetError::Schema {
                line,
                message: format!("expected {} fields, found {}", CSV_HEADER.len(), row.len()),
            });
        }
        let environment =
            RecordEnvironment::from_token(&row[5]).ok_or_else(|| DatasetError::Schema {
                line,
                message: format!("env: '{}' is not los, nlos or los-diffraction", &row[5]),
            })?;
        let record = MeasurementRecord {
            location: row[0].to_string(),
            f_c: positive(line, "f_c_ghz", &row[1])?,
            d_2d: positive(line, "d_2d_m", &row[2])?,
            h_bs: positive(line, "h_bs_m", &row[3])?,
            h_ut: positive(line, "h_ut_m", &row[4])?,
            environment,
            pl: parse_number(line, "pl_db", &row[6])?,
            p_rx: parse_number(line, "p_rx_dbm", &row[7])?,
            censored: parse_bool(line, &row[8])?,
        };
        if !record.censored && record.pl.is_some() == record.p_rx.is_some() {
            return Err(DatasetError::Schema {
                line,
                message: format!(
                    "row '{}' must carry exactly one of pl_db and p_rx_dbm",
                    record.location
                ),
            });
        }
        if let (Some(pl), Some(max_path_loss_db)) = (record.pl, max_path_loss_db) {
            if pl > max_path_loss_db {
                return Err(DatasetError::Schema {
                    line,
                    message: format!(
                        "pl_db {pl} exceeds the maximum measurable path loss {max_path_loss_db} dB"
                    ),
                });
            }
        }
        out.push((line, record));
    }
    Ok(out)
}

/// Loads a measurement file into samples. Censored rows and, unless
/// requested, diffraction rows are dropped with a warning; geometry outside
/// the 3GPP tables is kept unchanged with a warning. The sounder ceiling
/// only bounds measured files.
pub fn load_measurements<R: Read>(
    reader: R,
    options: &LoadOptions,
) -> Result<LoadReport, DatasetError> {
    let mut report = LoadReport::default();
    let ceiling = match options.source {
        SampleSource::Measured => Some(options.link_budget.max_path_loss_db),
        SampleSource::Simulated => None,
    };
    for (line, rec) in read_records(reader, ceiling)? {
        if rec.censored {
            report.warnings.push(format!(
                "line {line}: '{}' is censored; dropped",
                rec.location
            ));
            continue;
        }
        if rec.environment == RecordEnvironment::LosDiffraction && !options.include_diffraction {
            report.warnings.push(format!(
                "line {line}: '{}' is LOS with diffraction; dropped",
                rec.location
            ));
            continue;
        }
        let pl = match (rec.pl, rec.p_rx) {
            (Some(pl), _) => pl,
            (None, Some(p_rx)) => {
                let outcome = path_loss_from_link_budget(&options.link_budget, p_rx)?;
                if outcome.censored {
                    report.warnings.push(format!(
                        "line {line}: '{}' path loss {} dB is above the measurable ceiling; dropped",
                        rec.location,
                        format::db(outcome.path_loss_db)
                    ));
                    continue;
                }
                outcome.path_loss_db
            }
            (None, None) => unreachable!("validated in read_records"),
        };
        let environment = rec.environment.model_environment();
        let geometry = GeometryParams {
            d_2d: rec.d_2d,
            h_bs: rec.h_bs,
            h_ut: rec.h_ut,
            ..GeometryParams::with_defaults(rec.d_2d)
        };
        let violations = validate_applicability(&geometry, environment);
        if !violations.is_empty() {
            report.warnings.push(format!(
                "line {line}: '{}' outside 3GPP ranges ({violations}); kept as is",
                rec.location
            ));
        }
        let d_3d = derive_3d_distance(rec.d_2d, rec.h_bs, rec.h_ut)
            .map_err(|e| DatasetError::Invalid(format!("line {line}: {e}")))?;
        report.samples.push(PathLossSample {
            f_c: rec.f_c,
            d_2d: rec.d_2d,
            d_3d,
            h_bs: rec.h_bs,
            h_ut: rec.h_ut,
            environment,
            pl,
            source: options.source,
        });
    }
    Ok(report)
}

fn location_of(index: usize, s: &PathLossSample) -> String {
    match s.source {
        SampleSource::Simulated => format!("sim-{index}"),
        SampleSource::Measured => format!("meas-{index}"),
    }
}

/// Writes samples in the measurement CSV schema.
pub fn export_samples_csv<W: Write>(
    samples: &[PathLossSample],
    sink: W,
) -> Result<(), DatasetError> {
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(CSV_HEADER)?;
    for (i, s) in samples.iter().enumerate() {
        w.write_record([
            location_of(i, s),
            format::ghz(s.f_c),
            format::meters(s.d_2d),
            format::meters(s.h_bs),
            format::meters(s.h_ut),
            s.environment.token().to_string(),
            format::db(s.pl),
            String::new(),
            "false".to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// JSON form of a sample, at the same precision as the CSV columns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleJson {
    pub f_c_ghz: f64,
    pub d_2d_m: f64,
    pub d_3d_m: f64,
    pub h_bs_m: f64,
    pub h_ut_m: f64,
    pub env: Environment,
    pub pl_db: f64,
    pub source: SampleSource,
}

impl From<&PathLossSample> for SampleJson {
    fn from(s: &PathLossSample) -> Self {
        SampleJson {
            f_c_ghz: format::round_to(s.f_c, 4),
            d_2d_m: format::round_to(s.d_2d, 3),
            d_3d_m: format::round_to(s.d_3d, 3),
            h_bs_m: format::round_to(s.h_bs, 3),
            h_ut_m: format::round_to(s.h_ut, 3),
            env: s.environment,
            pl_db: format::round_to(s.pl, 4),
            source: s.source,
        }
    }
}

impl From<&SampleJson> for PathLossSample {
    fn from(s: &SampleJson) -> Self {
        PathLossSample {
            f_c: s.f_c_ghz,
            d_2d: s.d_2d_m,
            d_3d: s.d_3d_m,
            h_bs: s.h_bs_m,
            h_ut: s.h_ut_m,
            environment: s.env,
            pl: s.pl_db,
            source: s.source,
        }
    }
}

pub fn export_samples_json<W: Write>(
    samples: &[PathLossSample],
    mut sink: W,
) -> Result<(), DatasetError> {
    let rows: Vec<SampleJson> = samples.iter().map(SampleJson::from).collect();
    serde_json::to_writer_pretty(&mut sink, &rows)?;
    sink.write_all(b"\n")?;
    Ok(())
}

pub fn load_samples_json<R: Read>(reader: R) -> Result<Vec<PathLossSample>, DatasetError> {
    let rows: Vec<SampleJson> = serde_json::from_reader(reader)?;
    Ok(rows.iter().map(PathLossSample::from).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEADER: &str = "location,f_c_ghz,d_2d_m,h_bs_m,h_ut_m,env,pl_db,p_rx_dbm,censored\n";

    #[test]
    fn link_budget_examples() {
        let b = LinkBudget {
            eirp_dbm: 41.7,
            rx_gain_dbi: 0.0,
            max_path_loss_db: 190.0,
        };
        let out = path_loss_from_link_budget(&b, -100.0).unwrap();
        assert!((out.path_loss_db - 141.7).abs() < 1e-12);
        assert!(!out.censored);
        assert!(
            path_loss_from_link_budget(&b, 41.7 - 191.0)
                .unwrap()
                .censored
        );
        assert!(
            !path_loss_from_link_budget(&b, 41.7 - 190.0)
                .unwrap()
                .censored
        );
        assert_eq!(
            path_loss_from_link_budget(&b, 41.7).unwrap().path_loss_db,
            0.0
        );
        assert!(path_loss_from_link_budget(&b, f64::NAN).is_err());
    }

    #[test]
    fn header_only_is_empty() {
        let r = load_measurements(HEADER.as_bytes(), &LoadOptions::default()).unwrap();
        assert!(r.samples.is_empty());
        assert!(r.warnings.is_empty());
    }

    #[test]
    fn both_pl_and_prx_is_a_schema_error_naming_the_row() {
        let text = format!(
            "{HEADER}a,73,100,110,1.8,los,120.0,,false\nb,73,200,110,1.8,los,130.0,-90,false\n"
        );
        match load_measurements(text.as_bytes(), &LoadOptions::default()) {
            Err(DatasetError::Schema { line, message }) => {
                assert_eq!(line, 3);
                assert!(message.contains("'b'"), "{message}");
            }
            other => panic!("expected schema error, got {other:?}"),
        }
    }

    #[test]
    fn bad_header_and_units() {
        let bad = "loc,f,d\n";
        assert!(matches!(
            load_measurements(bad.as_bytes(), &LoadOptions::default()),
            Err(DatasetError::Schema { line: 1, .. })
        ));
        let text = format!("{HEADER}a,73,0,110,1.8,los,120.0,,false\n");
        assert!(matches!(
            load_measurements(text.as_bytes(), &LoadOptions::default()),
            Err(DatasetError::Unit {
                field: "d_2d_m",
                ..
            })
        ));
        let text = format!("{HEADER}a,73,100,110,1.8,urban,120.0,,false\n");
        assert!(load_measurements(text.as_bytes(), &LoadOptions::default()).is_err());
        let text = format!("{HEADER}a,73,100,110,1.8,los,195.0,,false\n");
        assert!(load_measurements(text.as_bytes(), &LoadOptions::default()).is_err());
    }

    #[test]
    fn censored_diffraction_and_link_budget_rows() {
        let text = format!(
            "{HEADER}\
             a,73,100,110,1.8,los,,-80,false\n\
             b,73,9000,110,1.8,nlos,,,true\n\
             c,73,3000,110,1.8,los-diffraction,160.0,,false\n\
             d,73,4000,110,1.8,nlos,,-155,false\n"
        );
        let r = load_measurements(text.as_bytes(), &LoadOptions::default()).unwrap();
        assert_eq!(r.samples.len(), 1);
        assert!((r.samples[0].pl - 121.7).abs() < 1e-9);
        assert_eq!(r.samples[0].source, SampleSource::Measured);
        assert_eq!(r.warnings.len(), 3);

        let keep = LoadOptions {
            include_diffraction: true,
            ..LoadOptions::default()
        };
        let r = load_measurements(text.as_bytes(), &keep).unwrap();
        assert_eq!(r.samples.len(), 2);
        assert_eq!(r.samples[1].environment, Environment::Los);
    }

    #[test]
    fn ceiling_applies_to_measured_files_only() {
        let text = format!("{HEADER}sim-0,100,9000,35,1.5,nlos,201.5,,false\n");
        assert!(load_measurements(text.as_bytes(), &LoadOptions::default()).is_err());
        let sim = LoadOptions {
            source: SampleSource::Simulated,
            ..LoadOptions::default()
        };
        let r = load_measurements(text.as_bytes(), &sim).unwrap();
        assert_eq!(r.samples[0].pl, 201.5);
    }

    #[test]
    fn out_of_table_rows_are_kept_with_a_warning() {
        let text = format!("{HEADER}far,73,10800,110,1.8,los,170.5,,false\n");
        let r = load_measurements(text.as_bytes(), &LoadOptions::default()).unwrap();
        assert_eq!(r.samples.len(), 1);
        assert_eq!(r.samples[0].d_2d, 10_800.0);
        assert_eq!(r.samples[0].pl, 170.5);
        assert_eq!(r.warnings.len(), 1);
    }

    #[test]
    fn raising_the_ceiling_never_censors_more() {
        for p_rx in [-160.0, -148.3, -120.0, -60.0] {
            let mut prev = true;
            for ceiling in [150.0, 180.0, 190.0, 200.0, 250.0] {
                let b = LinkBudget {
                    max_path_loss_db: ceiling,
                    ..LinkBudget::default()
                };
                let censored = path_loss_from_link_budget(&b, p_rx).unwrap().censored;
                assert!(prev || !censored);
                prev = censored;
            }
        }
    }
}
