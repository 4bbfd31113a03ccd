//! The simulate, dressed and sweep commands.

use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use stirap_core::{
    dressed_frame, find_avoided_crossings, propagate_with, CrossingOptions, CrossingReport, DressedFrame, SweepResult,
    Trajectory,
};

use crate::config::RunConfig;
use crate::error::RunError;
use crate::executor::run_sweep;
use crate::output::{crossings_json, dressed_table, sweep_table, trajectory_table, write_json, Format, Table};

pub fn simulate(cfg: &RunConfig) -> Result<Trajectory, RunError> {
    Ok(propagate_with(&cfg.scenario, &cfg.options)?)
}

pub struct DressedRun {
    pub trajectory: Trajectory,
    pub frame: DressedFrame,
    pub crossings: Vec<CrossingReport>,
}

pub fn dressed(cfg: &RunConfig) -> Result<DressedRun, RunError> {
    let trajectory = simulate(cfg)?;
    let frame = dressed_frame(&cfg.scenario, &trajectory)?;
    let crossings = find_avoided_crossings(&frame, &CrossingOptions::default());
    Ok(DressedRun {
        trajectory,
        frame,
        crossings,
    })
}

pub fn sweep(cfg: &RunConfig) -> Result<SweepResult, RunError> {
    run_sweep(&cfg.sweep_plan()?, cfg.workers)
}

/// `path` with `suffix` appended to its file name.
pub fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let mut name = path.as_os_str().to_owned();
    name.push(suffix);
    PathBuf::from(name)
}

fn create(path: &Path) -> Result<BufWriter<fs::File>, RunError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| RunError::io(dir, e))?;
    }
    Ok(BufWriter::new(
        fs::File::create(path).map_err(|e| RunError::io(path, e))?,
    ))
}

pub fn write_table_to(table: &Table, format: Format, path: &Path) -> Result<(), RunError> {
    let mut w = create(path)?;
    table
        .write(&mut w, format)
        .and_then(|_| w.flush())
        .map_err(|e| RunError::io(path, e))
}

pub fn write_json_to(value: &serde_json::Value, path: &Path) -> Result<(), RunError> {
    let mut w = create(path)?;
    write_json(&mut w, value)
        .and_then(|_| w.flush())
        .map_err(|e| RunError::io(path, e))
}

fn emit(table: &Table, format: Format, output: Option<&Path>) -> Result<(), RunError> {
    match output {
        Some(p) => write_table_to(table, format, p),
        None => {
            let mut out = io::stdout().lock();
            table.write(&mut out, format).map_err(|e| RunError::io("<stdout>", e))
        }
    }
}

/// Runs `simulate` and writes the trajectory.
pub fn simulate_command(cfg: &RunConfig) -> Result<(), RunError> {
    let tr = simulate(cfg)?;
    emit(&trajectory_table(&tr), cfg.format, cfg.output.as_deref())
}

/// Runs `dressed` and writes the frame; with an output file the crossing
/// reports go next to it as `<output>.crossings.json`.
pub fn dressed_command(cfg: &RunConfig) -> Result<(), RunError> {
    let run = dressed(cfg)?;
    emit(&dressed_table(&run.frame), cfg.format, cfg.output.as_deref())?;
    if let Some(p) = &cfg.output {
        write_json_to(&crossings_json(&run.crossings), &sibling(p, ".crossings.json"))?;
    }
    Ok(())
}

/// Runs `sweep` and writes the grid. Failed cells are reported on stderr but
/// do not fail the run. CSV output gets the axis names, constraint lines and
/// failures in `<output>.meta.json`.
pub fn sweep_command(cfg: &RunConfig) -> Result<SweepResult, RunError> {
    let r = sweep(cfg)?;
    let table = sweep_table(&r);
    emit(&table, cfg.format, cfg.output.as_deref())?;
    if let (Some(p), Format::Csv) = (&cfg.output, cfg.format) {
        let meta: serde_json::Map<_, _> = table.meta.iter().cloned().collect();
        write_json_to(&meta.into(), &sibling(p, ".meta.json"))?;
    }
    for (ix, iy, e) in &r.failures {
        eprintln!("cell ({ix}, {iy}) failed: {e}");
    }
    Ok(r)
}
