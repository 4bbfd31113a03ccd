//! Two-dimensional parameter scans: axis definitions, per-cell scenario
//! construction and analytic constraint lines.
//!
//! The cells are independent, so executors are free to evaluate them in any
//! order; [`SweepPlan::assemble`] puts the results back in row-major order
//! (`grid[iy * nx + ix]`).

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};
use crate::hamiltonian::{ScenarioSpec, Scheme};
use crate::propagator::{final_observables, propagate_with, Observable, PropagateOptions};

/// A scenario parameter that a sweep axis can drive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SweepParam {
    /// Two-photon detuning δ (δ′) [ω].
    Delta,
    /// τ·δ with τ the first Stokes width; the cell uses δ = value/τ.
    TauDelta,
    /// Common chirp rate: pump α and every Stokes chirp set to the value [ω²].
    Alpha,
    /// One-photon detuning Δ [ω].
    OnePhoton,
    /// Pump center minus first Stokes center [ω⁻¹].
    Delay,
    /// Pump area Ω_p·τ_p, varied through τ_p at fixed Ω_p.
    PumpArea,
    /// Constant mixing angle A [rad].
    MixingAngle,
}

impl SweepParam {
    pub const ALL: [SweepParam; 7] = [
        SweepParam::Delta,
        SweepParam::TauDelta,
        SweepParam::Alpha,
        SweepParam::OnePhoton,
        SweepParam::Delay,
        SweepParam::PumpArea,
        SweepParam::MixingAngle,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SweepParam::Delta => "delta",
            SweepParam::TauDelta => "tau_delta",
            SweepParam::Alpha => "alpha",
            SweepParam::OnePhoton => "Delta",
            SweepParam::Delay => "delay",
            SweepParam::PumpArea => "pump_area",
            SweepParam::MixingAngle => "mixing_angle",
        }
    }

    fn check(self, s: &ScenarioSpec) -> Result<()> {
        let ok = match self {
            SweepParam::Alpha => s.scheme.chirped(),
            SweepParam::MixingAngle => s.scheme.two_component_stokes(),
            _ => true,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::SchemeMismatch {
                scheme: s.scheme,
                operation: self.name(),
            })
        }
    }

    /// Writes `value` into `s`. `tie_splitting` moves the |3⟩–|4⟩ splitting
    /// together with δ′.
    pub fn apply(self, s: &mut ScenarioSpec, value: f64, tie_splitting: bool) -> Result<()> {
        self.check(s)?;
        match self {
            SweepParam::Delta | SweepParam::TauDelta => {
                let d = if self == SweepParam::TauDelta {
                    value / s.stokes1.width
                } else {
                    value
                };
                s.detunings.two_photon = d;
                if tie_splitting {
                    s.detunings.level4_splitting = d;
                }
            }
            SweepParam::Alpha => {
                s.pump.chirp = value;
                s.stokes1.chirp = value;
                if let Some(s2) = s.stokes2.as_mut() {
                    s2.chirp = value;
                }
            }
            SweepParam::OnePhoton => s.detunings.one_photon = value,
            SweepParam::Delay => {
                s.pump.center = s.stokes1.center + value;
                s.reset_window();
            }
            SweepParam::PumpArea => {
                if s.pump.amplitude <= 0.0 {
                    return Err(Error::invalid("pump_area", "pump amplitude must be > 0"));
                }
                s.pump.width = value / s.pump.amplitude;
                s.reset_window();
            }
            SweepParam::MixingAngle => {
                s.mixing_angle = value;
                s.apply_mixing_angle();
            }
        }
        Ok(())
    }
}

impl fmt::Display for SweepParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepParam {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        SweepParam::ALL
            .iter()
            .copied()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::UnknownSweepParam(s.to_string()))
    }
}

/// `count` uniformly spaced values from `start` to `end` inclusive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepAxis {
    pub param: SweepParam,
    pub start: f64,
    pub end: f64,
    pub count: usize,
}

impl SweepAxis {
    pub fn new(param: SweepParam, start: f64, end: f64, count: usize) -> Self {
        Self {
            param,
            start,
            end,
            count,
        }
    }

    pub fn value(&self, k: usize) -> f64 {
        if self.count <= 1 {
            self.start
        } else if k + 1 == self.count {
            self.end
        } else {
            self.start + (self.end - self.start) * k as f64 / (self.count - 1) as f64
        }
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.count).map(|k| self.value(k)).collect()
    }

    pub fn validate(&self, field: &'static str) -> Result<()> {
        if self.count == 0 {
            return Err(Error::invalid(field, "axis needs at least one point"));
        }
        if !(self.start.is_finite() && self.end.is_finite()) {
            return Err(Error::invalid(field, "axis bounds must be finite"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConstraintKind {
    /// δ(t) ≡ 0: α = δ/(t_p − t_s), or α = δ/(2t_p) in the chirped fractional schemes.
    DarkLine,
    /// Four-level chirped STIRAP selecting |4⟩: α = δ′/(t_p − t_s).
    DetunedState,
    /// Four-level chirped STIRAP selecting |3⟩: α = −δ′/(t_p − t_s).
    ResonantState,
}

impl ConstraintKind {
    pub fn name(self) -> &'static str {
        match self {
            ConstraintKind::DarkLine => "dark-line",
            ConstraintKind::DetunedState => "detuned-state",
            ConstraintKind::ResonantState => "resonant-state",
        }
    }
}

impl FromStr for ConstraintKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        [
            ConstraintKind::DarkLine,
            ConstraintKind::DetunedState,
            ConstraintKind::ResonantState,
        ]
        .into_iter()
        .find(|k| k.name() == s)
        .ok_or_else(|| Error::UnknownConstraint(s.to_string()))
    }
}

/// A straight line `α = slope·δ + intercept` in (δ [ω], α [ω²]).
#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintLine {
    pub label: String,
    pub slope: f64,
    pub intercept: f64,
}

impl ConstraintLine {
    pub fn alpha_at(&self, delta: f64) -> f64 {
        self.slope * delta + self.intercept
    }
}

/// The analytic α(δ) line of `kind` for the pulse timing of `s`.
pub fn constraint_line(s: &ScenarioSpec, kind: ConstraintKind) -> Result<ConstraintLine> {
    let sep = s.pump.center - s.stokes1.center;
    let slope = match (s.scheme, kind) {
        (Scheme::Cstirap3, ConstraintKind::DarkLine)
        | (Scheme::Cstirap4, ConstraintKind::DarkLine | ConstraintKind::DetunedState) => 1.0 / sep,
        (Scheme::Cstirap4, ConstraintKind::ResonantState) => -1.0 / sep,
        (Scheme::Cfstirap3, ConstraintKind::DarkLine)
        | (Scheme::Cfstirap4, ConstraintKind::DarkLine | ConstraintKind::DetunedState) => 1.0 / (2.0 * s.pump.center),
        _ => {
            return Err(Error::SchemeMismatch {
                scheme: s.scheme,
                operation: kind.name(),
            })
        }
    };
    if !slope.is_finite() {
        return Err(Error::invalid(
            "t_p",
            "pulse timing gives an unbounded constraint slope",
        ));
    }
    Ok(ConstraintLine {
        label: kind.name().to_string(),
        slope,
        intercept: 0.0,
    })
}

/// Result of a two-dimensional scan.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub x: SweepAxis,
    pub y: SweepAxis,
    pub observable: Observable,
    /// Row-major values, `grid[iy * nx + ix]`; NaN marks failed cells.
    pub grid: Vec<f64>,
    /// Constraint lines drawn in the axis units of this sweep as `y = slope·x + intercept`.
    pub constraint_lines: Vec<ConstraintLine>,
    /// Failed cells as `(ix, iy, error)`.
    pub failures: Vec<(usize, usize, Error)>,
}

impl SweepResult {
    pub fn nx(&self) -> usize {
        self.x.count
    }

    pub fn ny(&self) -> usize {
        self.y.count
    }

    pub fn at(&self, ix: usize, iy: usize) -> f64 {
        self.grid[iy * self.x.count + ix]
    }

    /// Connected regions (8-neighbour) of cells with value ≥ `threshold`,
    /// each as a list of `(ix, iy)`, largest first.
    pub fn regions_at_least(&self, threshold: f64) -> Vec<Vec<(usize, usize)>> {
        let (nx, ny) = (self.nx(), self.ny());
        let mut seen = vec![false; self.grid.len()];
        let mut regions = Vec::new();
        for start in 0..self.grid.len() {
            // Failed (NaN) cells never qualify.
            if seen[start] || self.grid[start].is_nan() || self.grid[start] < threshold {
                continue;
            }
            seen[start] = true;
            let mut stack = vec![start];
            let mut cells = Vec::new();
            while let Some(i) = stack.pop() {
                let (ix, iy) = (i % nx, i / nx);
                cells.push((ix, iy));
                for jy in iy.saturating_sub(1)..=(iy + 1).min(ny - 1) {
                    for jx in ix.saturating_sub(1)..=(ix + 1).min(nx - 1) {
                        let j = jy * nx + jx;
                        if !seen[j] && self.grid[j] >= threshold {
                            seen[j] = true;
                            stack.push(j);
                        }
                    }
                }
            }
            cells.sort_unstable_by_key(|&(x, y)| (y, x));
            regions.push(cells);
        }
        regions.sort_by_key(|r| core::cmp::Reverse(r.len()));
        regions
    }
}

/// A fully specified scan, ready for any executor.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPlan {
    pub base: ScenarioSpec,
    pub x: SweepAxis,
    pub y: SweepAxis,
    pub observable: Observable,
    pub options: PropagateOptions,
    /// δ′ sweeps also move the |3⟩–|4⟩ splitting.
    pub tie_level_splitting: bool,
}

impl SweepPlan {
    pub fn new(base: ScenarioSpec, x: SweepAxis, y: SweepAxis, observable: Observable) -> Self {
        Self {
            base,
            x,
            y,
            observable,
            options: PropagateOptions::default(),
            tie_level_splitting: true,
        }
    }

    pub fn len(&self) -> usize {
        self.x.count * self.y.count
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn validate(&self) -> Result<()> {
        self.base.validate()?;
        self.options.validate()?;
        self.x.validate("sweep.x")?;
        self.y.validate("sweep.y")?;
        if self.x.param == self.y.param {
            return Err(Error::invalid("sweep.y", "axes must drive different parameters"));
        }
        self.x.param.check(&self.base)?;
        self.y.param.check(&self.base)?;
        if self.observable.max_level() >= self.base.dim() {
            return Err(Error::UnknownObservable(self.observable.to_string()));
        }
        Ok(())
    }

    /// Scenario of cell `index` (row-major).
    pub fn cell_scenario(&self, index: usize) -> Result<ScenarioSpec> {
        let (ix, iy) = (index % self.x.count, index / self.x.count);
        let mut s = self.base.clone();
        self.x.param.apply(&mut s, self.x.value(ix), self.tie_level_splitting)?;
        self.y.param.apply(&mut s, self.y.value(iy), self.tie_level_splitting)?;
        Ok(s)
    }

    pub fn eval_cell(&self, index: usize) -> Result<f64> {
        let s = self.cell_scenario(index)?;
        let tr = propagate_with(&s, &self.options)?;
        Ok(self.observable.evaluate(&final_observables(&tr)?))
    }

    /// Constraint lines of the base scheme expressed in this sweep's axes,
    /// when the axes are δ-like against α.
    pub fn constraint_lines(&self) -> Vec<ConstraintLine> {
        let kinds: &[ConstraintKind] = match self.base.scheme {
            Scheme::Cstirap3 | Scheme::Cfstirap3 => &[ConstraintKind::DarkLine],
            Scheme::Cstirap4 => &[ConstraintKind::DetunedState, ConstraintKind::ResonantState],
            Scheme::Cfstirap4 => &[ConstraintKind::DetunedState],
            _ => &[],
        };
        let delta_scale = |p: SweepParam| match p {
            SweepParam::Delta => Some(1.0),
            SweepParam::TauDelta => Some(1.0 / self.base.stokes1.width),
            _ => None,
        };
        let mut out = Vec::new();
        for &k in kinds {
            let Ok(line) = constraint_line(&self.base, k) else {
                continue;
            };
            let converted = match (self.x.param, self.y.param) {
                (xp, SweepParam::Alpha) => delta_scale(xp).map(|c| line.slope * c),
                (SweepParam::Alpha, yp) => delta_scale(yp).map(|c| 1.0 / (line.slope * c)),
                _ => None,
            };
            if let Some(slope) = converted {
                out.push(ConstraintLine {
                    label: line.label,
                    slope,
                    intercept: 0.0,
                });
            }
        }
        out
    }

    /// Builds the result from per-cell outcomes given in row-major order.
    pub fn assemble(&self, cells: Vec<Result<f64>>) -> SweepResult {
        let nx = self.x.count;
        let mut grid = Vec::with_capacity(cells.len());
        let mut failures = Vec::new();
        for (index, c) in cells.into_iter().enumerate() {
            match c {
                Ok(v) => grid.push(v),
                Err(e) => {
                    grid.push(f64::NAN);
                    failures.push((index % nx, index / nx, e));
                }
            }
        }
        SweepResult {
            x: self.x,
            y: self.y,
            observable: self.observable,
            grid,
            constraint_lines: self.constraint_lines(),
            failures,
        }
    }

    /// Evaluates every cell on the calling thread.
    pub fn run_serial(&self) -> Result<SweepResult> {
        self.validate()?;
        let cells = (0..self.len()).map(|i| self.eval_cell(i)).collect();
        Ok(self.assemble(cells))
    }
}
