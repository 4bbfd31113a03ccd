//! Multi-threaded evaluation of sweep cells and one-parameter scans.
//!
//! Results are gathered by index, so the output does not depend on the
//! number of workers or on scheduling.

use rayon::prelude::*;
use stirap_core::{
    final_observables, propagate_with, FinalObservables, PropagateOptions, Result, ScenarioSpec, SweepAxis, SweepPlan,
    SweepResult,
};

use crate::error::RunError;

fn pool(workers: Option<usize>) -> Result<rayon::ThreadPool, RunError> {
    Ok(rayon::ThreadPoolBuilder::new()
        .num_threads(workers.unwrap_or(0))
        .build()?)
}

/// Runs every cell of `plan` on `workers` threads (all cores when `None`).
/// Cell failures become NaN entries listed in [`SweepResult::failures`].
pub fn run_sweep(plan: &SweepPlan, workers: Option<usize>) -> Result<SweepResult, RunError> {
    plan.validate()?;
    let cells = pool(workers)?.install(|| (0..plan.len()).into_par_iter().map(|i| plan.eval_cell(i)).collect());
    Ok(plan.assemble(cells))
}

/// Final observables of `base` with `axis.param` set to each axis value.
pub fn run_scan(
    base: &ScenarioSpec,
    axis: &SweepAxis,
    options: &PropagateOptions,
    workers: Option<usize>,
) -> Result<Vec<Result<FinalObservables>>, RunError> {
    axis.validate("scan")?;
    let values = axis.values();
    let out = pool(workers)?.install(|| {
        values
            .par_iter()
            .map(|&v| {
                let mut s = base.clone();
                axis.param.apply(&mut s, v, true)?;
                final_observables(&propagate_with(&s, options)?)
            })
            .collect()
    });
    Ok(out)
}
