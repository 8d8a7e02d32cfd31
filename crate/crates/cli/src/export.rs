//! Fit files, comparison tables and figure data.

use std::io::{Read, Write};
use std::path::Path;

use rmapl_core::analysis::{
    ComparisonRow, DataSource, FeasibilityGrid, HeightGainCurve, HeightGainSet,
};
use rmapl_core::{Environment, FitResult};
use serde::{Deserialize, Serialize};

use crate::dataset::DatasetError;
use crate::format;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn from_token(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Some(Format::Csv),
            "json" => Some(Format::Json),
            _ => None,
        }
    }

    /// Guess from a file extension.
    pub fn from_path(path: &Path) -> Option<Self> {
        path.extension()
            .and_then(|e| e.to_str())
            .and_then(Format::from_token)
    }
}

/// A fit together with the data it describes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitRecord {
    pub environment: Environment,
    pub data: DataSource,
    #[serde(flatten)]
    pub fit: FitResult,
}

const FIT_HEADER: [&str; 8] = [
    "model_kind",
    "environment",
    "data",
    "n",
    "b_tx",
    "h_b0_m",
    "sigma_db",
    "sample_count",
];

fn opt(x: Option<f64>, f: fn(f64) -> String) -> String {
    x.map(f).unwrap_or_default()
}

fn quantize(fit: &FitResult) -> FitResult {
    FitResult {
        n: format::round_to(fit.n, 6),
        b_tx: fit.b_tx.map(|b| format::round_to(b, 6)),
        h_b0: fit.h_b0.map(|h| format::round_to(h, 3)),
        sigma: format::round_to(fit.sigma, 4),
        ..*fit
    }
}

fn model_name(fit: &FitResult) -> &'static str {
    match fit.model_kind {
        rmapl_core::ModelKind::CI => "CI",
        rmapl_core::ModelKind::CIH => "CIH",
    }
}

pub fn export_fit<W: Write>(
    records: &[FitRecord],
    format: Format,
    mut sink: W,
) -> Result<(), DatasetError> {
    match format {
        Format::Json => {
            let rows: Vec<FitRecord> = records
                .iter()
                .map(|r| FitRecord {
                    fit: quantize(&r.fit),
                    ..*r
                })
                .collect();
            serde_json::to_writer_pretty(&mut sink, &rows)?;
            sink.write_all(b"\n")?;
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(sink);
            w.write_record(FIT_HEADER)?;
            for r in records {
                w.write_record([
                    model_name(&r.fit).to_string(),
                    r.environment.token().to_string(),
                    r.data.to_string(),
                    format::coefficient(r.fit.n),
                    opt(r.fit.b_tx, format::coefficient),
                    opt(r.fit.h_b0, format::meters),
                    format::db(r.fit.sigma),
                    r.fit.sample_count.to_string(),
                ])?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

pub fn load_fits_json<R: Read>(reader: R) -> Result<Vec<FitRecord>, DatasetError> {
    Ok(serde_json::from_reader(reader)?)
}

const TABLE_HEADER: [&str; 9] = [
    "model",
    "data",
    "environment",
    "n",
    "b_tx",
    "h_b0_m",
    "sigma_db",
    "rmse_db",
    "sample_count",
];

pub fn export_table<W: Write>(
    rows: &[ComparisonRow],
    format: Format,
    mut sink: W,
) -> Result<(), DatasetError> {
    match format {
        Format::Json => {
            let rows: Vec<ComparisonRow> = rows
                .iter()
                .map(|r| ComparisonRow {
                    n: format::round_to(r.n, 6),
                    b_tx: r.b_tx.map(|b| format::round_to(b, 6)),
                    h_b0: r.h_b0.map(|h| format::round_to(h, 3)),
                    sigma: format::round_to(r.sigma, 4),
                    rmse_db: r.rmse_db.map(|e| format::round_to(e, 4)),
                    ..*r
                })
                .collect();
            serde_json::to_writer_pretty(&mut sink, &rows)?;
            sink.write_all(b"\n")?;
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(sink);
            w.write_record(TABLE_HEADER)?;
            for r in rows {
                w.write_record([
                    format!("{:?}", r.model_kind),
                    r.data.to_string(),
                    r.environment.to_string(),
                    format::coefficient(r.n),
                    opt(r.b_tx, format::coefficient),
                    opt(r.h_b0, format::meters),
                    format::db(r.sigma),
                    opt(r.rmse_db, format::db),
                    r.sample_count.to_string(),
                ])?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct BoundaryRow {
    h_bs_m: f64,
    boundary_ghz: f64,
}

/// Breakpoint boundary frequency, one row per base station height.
pub fn export_boundary<W: Write>(
    grid: &FeasibilityGrid,
    format: Format,
    mut sink: W,
) -> Result<(), DatasetError> {
    match format {
        Format::Json => {
            let rows: Vec<BoundaryRow> = grid
                .heights_m
                .iter()
                .zip(&grid.boundary_ghz)
                .map(|(&h, &f)| BoundaryRow {
                    h_bs_m: format::round_to(h, 3),
                    boundary_ghz: format::round_to(f, 4),
                })
                .collect();
            serde_json::to_writer_pretty(&mut sink, &rows)?;
            sink.write_all(b"\n")?;
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(sink);
            w.write_record(["h_bs_m", "boundary_ghz"])?;
            for (&h, &f) in grid.heights_m.iter().zip(&grid.boundary_ghz) {
                w.write_record([format::meters(h), format::ghz(f)])?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct GridRow {
    f_c_ghz: f64,
    h_bs_m: f64,
    single_slope: bool,
}

/// Which (frequency, height) cells stay single slope.
pub fn export_grid<W: Write>(
    grid: &FeasibilityGrid,
    format: Format,
    mut sink: W,
) -> Result<(), DatasetError> {
    match format {
        Format::Json => {
            let rows: Vec<GridRow> = grid
                .iter()
                .map(|(f, h, single_slope)| GridRow {
                    f_c_ghz: format::round_to(f, 4),
                    h_bs_m: format::round_to(h, 3),
                    single_slope,
                })
                .collect();
            serde_json::to_writer_pretty(&mut sink, &rows)?;
            sink.write_all(b"\n")?;
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(sink);
            w.write_record(["f_c_ghz", "h_bs_m", "single_slope"])?;
            for (f, h, single) in grid.iter() {
                w.write_record([format::ghz(f), format::meters(h), single.to_string()])?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct CurveRow<'a> {
    model: &'a str,
    distance_m: String,
    h_bs_m: f64,
    reduction_db: f64,
}

fn curve_rows(set: &HeightGainSet) -> impl Iterator<Item = (&HeightGainCurve, f64, f64)> {
    set.curves
        .iter()
        .chain(std::iter::once(&set.average))
        .flat_map(|c| c.points.iter().map(move |p| (c, p.h_bs, p.reduction_db)))
}

/// Height-gain curves in long form; the averaged curve has distance
/// `average`.
pub fn export_height_gain<W: Write>(
    set: &HeightGainSet,
    format: Format,
    mut sink: W,
) -> Result<(), DatasetError> {
    match format {
        Format::Json => {
            let rows: Vec<CurveRow<'_>> = curve_rows(set)
                .map(|(c, h, r)| CurveRow {
                    model: c.model,
                    distance_m: c.distance.to_string(),
                    h_bs_m: format::round_to(h, 3),
                    reduction_db: format::round_to(r, 4),
                })
                .collect();
            serde_json::to_writer_pretty(&mut sink, &rows)?;
            sink.write_all(b"\n")?;
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(sink);
            w.write_record(["model", "distance_m", "h_bs_m", "reduction_db"])?;
            for (c, h, r) in curve_rows(set) {
                w.write_record([
                    c.model.to_string(),
                    c.distance.to_string(),
                    format::meters(h),
                    format::db(r),
                ])?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

/// Writes through a temporary file in the target directory, then renames it
/// into place so readers never see a partial file.
pub fn write_atomic<F>(path: &Path, write: F) -> Result<(), DatasetError>
where
    F: FnOnce(&mut std::io::BufWriter<&mut tempfile::NamedTempFile>) -> Result<(), DatasetError>,
{
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    {
        let mut buf = std::io::BufWriter::new(&mut tmp);
        write(&mut buf)?;
        buf.flush()?;
    }
    // Temp files are created owner-only; published outputs are not.
    #[cfg(unix)]
    {
        use std::os::unix::fs::PermissionsExt;
        tmp.as_file()
            .set_permissions(std::fs::Permissions::from_mode(0o644))?;
    }
    tmp.persist(path).map_err(|e| DatasetError::Io(e.error))?;
    Ok(())
}
