//! Parallel execution of a scenario. Cells run on the rayon pool; results
//! are combined in cell order so output does not depend on thread count.

use rayon::prelude::*;
use rmapl_core::fitting::{CiAccumulator, CihAccumulator};
use rmapl_core::simulation::{generate_cell, Cell};
use rmapl_core::{FitResult, PathLossSample, ScenarioConfig};

fn cells(cfg: &ScenarioConfig) -> Vec<Cell> {
    cfg.cells().collect()
}

/// Same samples, in the same order, as `generate_samples`.
pub fn simulate(cfg: &ScenarioConfig) -> rmapl_core::Result<Vec<PathLossSample>> {
    cfg.validate()?;
    let parts = cells(cfg)
        .into_par_iter()
        .map(|cell| generate_cell(cfg, cell).map(Iterator::collect::<Vec<_>>))
        .collect::<rmapl_core::Result<Vec<_>>>()?;
    Ok(parts.into_iter().flatten().collect())
}

/// CI fit of a scenario without materialising the samples.
pub fn simulate_fit_ci(cfg: &ScenarioConfig) -> rmapl_core::Result<FitResult> {
    cfg.validate()?;
    let parts = cells(cfg)
        .into_par_iter()
        .map(|cell| {
            let mut acc = CiAccumulator::new();
            for s in generate_cell(cfg, cell)? {
                acc.push(&s)?;
            }
            Ok(acc)
        })
        .collect::<rmapl_core::Result<Vec<_>>>()?;
    let mut total = CiAccumulator::new();
    for p in &parts {
        total.merge(p);
    }
    total.finish()
}

/// CIH fit of a scenario without materialising the samples.
pub fn simulate_fit_cih(cfg: &ScenarioConfig, h_b0: f64) -> rmapl_core::Result<FitResult> {
    cfg.validate()?;
    let parts = cells(cfg)
        .into_par_iter()
        .map(|cell| {
            let mut acc = CihAccumulator::new(h_b0)?;
            for s in generate_cell(cfg, cell)? {
                acc.push(&s)?;
            }
            Ok(acc)
        })
        .collect::<rmapl_core::Result<Vec<_>>>()?;
    let mut total = CihAccumulator::new(h_b0)?;
    for p in &parts {
        total.merge(p)?;
    }
    total.finish()
}
