//! Reference runs for every figure of the chirped and fractional STIRAP
//! study, each written to a directory together with a JSON manifest.
//!
//! Sweep ranges and anything else read off a plot rather than stated as a
//! number are flagged `reconstructed` in the manifest.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use stirap_core::{
    final_observables, propagate_with, FinalObservables, Observable, SweepAxis, SweepParam, SweepResult, Trajectory,
};

use crate::config::{from_file, AxisFile, ConfigFile, RunConfig, SweepFile};
use crate::error::RunError;
use crate::executor::run_scan;
use crate::output::{crossings_json, dressed_table, sweep_table, trajectory_table, Format, Table};
use crate::run::{dressed, sweep, write_json_to, write_table_to};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Preset {
    pub id: &'static str,
    pub title: &'static str,
    pub reconstructed: bool,
}

const fn p(id: &'static str, title: &'static str, reconstructed: bool) -> Preset {
    Preset {
        id,
        title,
        reconstructed,
    }
}

pub const PRESETS: &[Preset] = &[
    p("fig2", "STIRAP populations versus tau*delta without chirp", true),
    p(
        "fig3ab",
        "C-STIRAP dressed dynamics, delta = 0.14, alpha = beta = 1e-3",
        false,
    ),
    p(
        "fig3cd",
        "C-STIRAP dressed dynamics, delta = -0.14, alpha = beta = -1e-3",
        false,
    ),
    p("fig4", "C-STIRAP rho33 over delta x alpha", true),
    p("fig6b", "four-level C-STIRAP, alpha = +1e-3 populates |4>", false),
    p("fig6c", "four-level C-STIRAP, alpha = -1e-3 populates |3>", false),
    p("fig7a", "four-level C-STIRAP rho44 over delta' x alpha", true),
    p("fig7b", "four-level C-STIRAP rho33 over delta' x alpha", true),
    p(
        "fig8-9",
        "four-level C-STIRAP dressed analysis, both chirp signs and the delayed Stokes chirp",
        true,
    ),
    p(
        "fig10",
        "four-level C-STIRAP rho33 over tau*delta' x alpha with Stokes chirp delay t_p - t_s",
        true,
    ),
    p("fig11", "F-STIRAP with A = pi/4", false),
    p("fig12", "F-STIRAP coherence and populations versus tau*delta", true),
    p("fig13", "F-STIRAP with a single Gaussian Stokes pulse", false),
    p("fig14", "single-Stokes F-STIRAP |rho13| over delay x pump area", true),
    p("fig15", "C-F-STIRAP dressed dynamics for both detuning signs", true),
    p("fig16", "C-F-STIRAP |rho13| over delta x alpha", true),
    p(
        "fig17b",
        "four-level C-F-STIRAP, t_d1 = 0, t_d2 = -2 t_p maximizes |rho14|",
        false,
    ),
    p(
        "fig17c",
        "four-level C-F-STIRAP, t_d1 = 2 t_p, t_d2 = 0 maximizes |rho13|",
        false,
    ),
    p(
        "fig18a",
        "four-level C-F-STIRAP |rho14| over delta' x alpha, t_d1 = 0, t_d2 = -2 t_p",
        true,
    ),
    p(
        "fig18b",
        "four-level C-F-STIRAP |rho13| over delta' x alpha, t_d1 = 2 t_p, t_d2 = 0",
        true,
    ),
    p(
        "fig19",
        "four-level C-F-STIRAP dressed analysis for both delay choices",
        false,
    ),
];

pub fn preset(id: &str) -> Option<&'static Preset> {
    PRESETS.iter().find(|p| p.id == id)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PresetOptions {
    /// Points per sweep axis.
    pub resolution: usize,
    pub workers: Option<usize>,
    pub format: Format,
    pub tol: Option<f64>,
}

impl Default for PresetOptions {
    fn default() -> Self {
        Self {
            resolution: 81,
            workers: None,
            format: Format::Csv,
            tol: None,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct JobRecord {
    pub name: String,
    pub kind: &'static str,
    pub config: ConfigFile,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scan: Option<AxisFile>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub id: String,
    pub title: String,
    pub version: String,
    pub reconstructed: bool,
    pub resolution: usize,
    pub wall_time_s: f64,
    pub parameters: Vec<JobRecord>,
    pub files: Vec<String>,
    pub observables: BTreeMap<String, f64>,
}

enum Kind {
    Trajectory,
    Dressed,
    Sweep,
    /// One-parameter scan with direct evaluations of `focus` at `checkpoints`.
    Scan {
        axis: SweepAxis,
        checkpoints: Vec<f64>,
        focus: Observable,
    },
}

struct Job {
    name: &'static str,
    file: ConfigFile,
    kind: Kind,
}

fn base(scheme: &str) -> ConfigFile {
    ConfigFile {
        scheme: scheme.into(),
        ..ConfigFile::default()
    }
}

fn chirped(scheme: &str, delta: f64, alpha: f64) -> ConfigFile {
    ConfigFile {
        delta: Some(delta),
        alpha: Some(alpha),
        beta: Some(alpha),
        ..base(scheme)
    }
}

fn fractional(scheme: &str, delta: f64, alpha: f64, t_d1: f64, t_d2: f64) -> ConfigFile {
    ConfigFile {
        delta: Some(delta),
        alpha: Some(alpha),
        beta1: Some(alpha),
        beta2: Some(alpha),
        t_d1: Some(t_d1),
        t_d2: Some(t_d2),
        ..base(scheme)
    }
}

fn with_sweep(mut f: ConfigFile, x: (&str, f64, f64), y: (&str, f64, f64), obs: &str, n: usize) -> ConfigFile {
    let axis = |(param, start, end): (&str, f64, f64)| AxisFile {
        param: param.into(),
        start,
        end,
        count: n,
    };
    f.sweep = Some(SweepFile {
        x: axis(x),
        y: axis(y),
        observable: obs.into(),
        tie_level_splitting: None,
    });
    f
}

const DELTA_RANGE: (f64, f64) = (-0.2, 0.2);
const ALPHA_RANGE: (f64, f64) = (-2e-3, 2e-3);

fn delta_alpha(f: ConfigFile, obs: &str, n: usize) -> ConfigFile {
    with_sweep(
        f,
        ("delta", DELTA_RANGE.0, DELTA_RANGE.1),
        ("alpha", ALPHA_RANGE.0, ALPHA_RANGE.1),
        obs,
        n,
    )
}

fn job(name: &'static str, file: ConfigFile, kind: Kind) -> Job {
    Job { name, file, kind }
}

fn tau_delta_scan(n: usize, focus: Observable) -> Kind {
    Kind::Scan {
        axis: SweepAxis::new(SweepParam::TauDelta, -6.0, 6.0, 2 * (n - 1) + 1),
        checkpoints: vec![0.0, 5.0],
        focus,
    }
}

fn jobs(id: &str, n: usize) -> Option<Vec<Job>> {
    use Kind::*;
    const TP2: f64 = 140.0;
    let jobs = match id {
        "fig2" => vec![job(
            "scan",
            base("STIRAP3"),
            tau_delta_scan(n, Observable::Population(2)),
        )],
        "fig3ab" => vec![job("main", chirped("CSTIRAP3", 0.14, 1e-3), Dressed)],
        "fig3cd" => vec![job("main", chirped("CSTIRAP3", -0.14, -1e-3), Dressed)],
        "fig4" => vec![job(
            "main",
            delta_alpha(chirped("CSTIRAP3", 0.0, 0.0), "rho33", n),
            Sweep,
        )],
        "fig6b" => vec![job("main", chirped("CSTIRAP4", 0.14, 1e-3), Trajectory)],
        "fig6c" => vec![job("main", chirped("CSTIRAP4", 0.14, -1e-3), Trajectory)],
        "fig7a" => vec![job(
            "main",
            delta_alpha(chirped("CSTIRAP4", 0.0, 0.0), "rho44", n),
            Sweep,
        )],
        "fig7b" => vec![job(
            "main",
            delta_alpha(chirped("CSTIRAP4", 0.0, 0.0), "rho33", n),
            Sweep,
        )],
        "fig8-9" => vec![
            job("positive", chirped("CSTIRAP4", 0.14, 1e-3), Dressed),
            job("negative", chirped("CSTIRAP4", 0.14, -1e-3), Dressed),
            job(
                "delayed",
                ConfigFile {
                    t_d: Some(TP2),
                    ..chirped("CSTIRAP4", 0.14, 1e-3)
                },
                Dressed,
            ),
        ],
        "fig10" => {
            let f = ConfigFile {
                t_d: Some(TP2),
                ..chirped("CSTIRAP4", 0.0, 0.0)
            };
            let f = with_sweep(
                f,
                ("tau_delta", -20.0, 20.0),
                ("alpha", ALPHA_RANGE.0, ALPHA_RANGE.1),
                "rho33",
                n,
            );
            vec![job("main", f, Sweep)]
        }
        "fig11" => vec![job("main", base("FSTIRAP3"), Trajectory)],
        "fig12" => vec![job(
            "scan",
            base("FSTIRAP3"),
            tau_delta_scan(n, Observable::Coherence(0, 2)),
        )],
        "fig13" => vec![job("main", base("FSTIRAP3_SINGLE_STOKES"), Trajectory)],
        "fig14" => {
            let f = with_sweep(
                base("FSTIRAP3_SINGLE_STOKES"),
                ("delay", 0.0, 40.0),
                ("pump_area", 2.0, 14.0),
                "abs_rho13",
                n,
            );
            vec![job("main", f, Sweep)]
        }
        "fig15" => vec![
            job("negative", fractional("CFSTIRAP3", -0.14, -1e-3, 0.0, -TP2), Dressed),
            job("positive", fractional("CFSTIRAP3", 0.14, 1e-3, 0.0, -TP2), Dressed),
        ],
        "fig16" => vec![job(
            "main",
            delta_alpha(fractional("CFSTIRAP3", 0.0, 0.0, 0.0, -TP2), "abs_rho13", n),
            Sweep,
        )],
        "fig17b" => vec![job("main", fractional("CFSTIRAP4", 0.14, 1e-3, 0.0, -TP2), Trajectory)],
        "fig17c" => vec![job("main", fractional("CFSTIRAP4", 0.14, 1e-3, TP2, 0.0), Trajectory)],
        "fig18a" => vec![job(
            "main",
            delta_alpha(fractional("CFSTIRAP4", 0.0, 0.0, 0.0, -TP2), "abs_rho14", n),
            Sweep,
        )],
        "fig18b" => vec![job(
            "main",
            delta_alpha(fractional("CFSTIRAP4", 0.0, 0.0, TP2, 0.0), "abs_rho13", n),
            Sweep,
        )],
        "fig19" => vec![
            job("rho14", fractional("CFSTIRAP4", 0.14, 1e-3, 0.0, -TP2), Dressed),
            job("rho13", fractional("CFSTIRAP4", 0.14, 1e-3, TP2, 0.0), Dressed),
        ],
        _ => return None,
    };
    Some(jobs)
}

/// The validated configs of preset `id`, by job name.
pub fn preset_configs(id: &str, opts: &PresetOptions) -> Result<Vec<(&'static str, RunConfig)>, RunError> {
    let list = jobs(id, opts.resolution.max(2)).ok_or_else(|| RunError::UnknownPreset(id.into()))?;
    list.into_iter()
        .map(|j| Ok((j.name, configure(&j.file, opts)?)))
        .collect()
}

fn configure(file: &ConfigFile, opts: &PresetOptions) -> Result<RunConfig, RunError> {
    let mut file = file.clone();
    file.tol = opts.tol.or(file.tol);
    file.workers = opts.workers;
    file.format = Some(opts.format);
    Ok(from_file(&file)?)
}

struct Recorder<'a> {
    dir: &'a Path,
    stem: String,
    format: Format,
    files: Vec<String>,
    observables: BTreeMap<String, f64>,
}

impl Recorder<'_> {
    fn table(&mut self, job: &str, kind: &str, table: &Table) -> Result<(), RunError> {
        let name = format!("{}.{job}.{kind}.{}", self.stem, self.format.extension());
        write_table_to(table, self.format, &self.dir.join(&name))?;
        self.files.push(name);
        Ok(())
    }

    fn json(&mut self, job: &str, kind: &str, value: &serde_json::Value) -> Result<(), RunError> {
        let name = format!("{}.{job}.{kind}.json", self.stem);
        write_json_to(value, &self.dir.join(&name))?;
        self.files.push(name);
        Ok(())
    }

    fn put(&mut self, key: String, value: f64) {
        self.observables.insert(key, value);
    }

    fn finals(&mut self, job: &str, fo: &FinalObservables) {
        for i in 0..fo.dim {
            self.put(format!("{job}.{}", Observable::Population(i)), fo.populations[i]);
            for j in i + 1..fo.dim {
                self.put(format!("{job}.{}", Observable::Coherence(i, j)), fo.coherences[i][j]);
            }
        }
        self.put(format!("{job}.norm"), fo.norm);
    }

    fn trajectory(&mut self, job: &str, tr: &Trajectory) -> Result<(), RunError> {
        self.table(job, "trajectory", &trajectory_table(tr))?;
        self.finals(job, &final_observables(tr)?);
        self.put(format!("{job}.max_norm_drift"), tr.max_norm_drift());
        Ok(())
    }

    fn sweep(&mut self, job: &str, r: &SweepResult) -> Result<(), RunError> {
        self.table(job, "sweep", &sweep_table(r))?;
        let ok: Vec<f64> = r.grid.iter().copied().filter(|v| v.is_finite()).collect();
        let mean = ok.iter().sum::<f64>() / ok.len().max(1) as f64;
        self.put(format!("{job}.min"), ok.iter().copied().fold(f64::INFINITY, f64::min));
        self.put(
            format!("{job}.max"),
            ok.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        );
        self.put(format!("{job}.mean"), mean);
        self.put(format!("{job}.failed_cells"), r.failures.len() as f64);
        Ok(())
    }
}

/// Runs preset `id` into `out_dir` and writes `<id>.manifest.json` there.
pub fn run_preset(id: &str, out_dir: &Path, opts: &PresetOptions) -> Result<Manifest, RunError> {
    let started = Instant::now();
    let info = preset(id).ok_or_else(|| RunError::UnknownPreset(id.into()))?;
    let list = jobs(id, opts.resolution.max(2)).expect("registered preset has jobs");
    let mut rec = Recorder {
        dir: out_dir,
        stem: id.to_string(),
        format: opts.format,
        files: Vec::new(),
        observables: BTreeMap::new(),
    };
    let mut records = Vec::new();
    for j in &list {
        let cfg = configure(&j.file, opts)?;
        let mut scan_axis = None;
        match &j.kind {
            Kind::Trajectory => {
                let tr = crate::run::simulate(&cfg)?;
                rec.trajectory(j.name, &tr)?;
            }
            Kind::Dressed => {
                let run = dressed(&cfg)?;
                rec.trajectory(j.name, &run.trajectory)?;
                rec.table(j.name, "dressed", &dressed_table(&run.frame))?;
                rec.json(j.name, "crossings", &crossings_json(&run.crossings))?;
                let df = &run.frame;
                let worst_max = df
                    .dressed_populations
                    .iter()
                    .map(|p| p[..df.dim].iter().copied().fold(0.0, f64::max))
                    .fold(f64::INFINITY, f64::min);
                rec.put(format!("{}.min_max_dressed_population", j.name), worst_max);
                rec.put(format!("{}.crossings", j.name), run.crossings.len() as f64);
            }
            Kind::Sweep => {
                let r = sweep(&cfg)?;
                rec.sweep(j.name, &r)?;
                if id == "fig14" {
                    region_summary(&mut rec, j.name, &r, 0.45);
                }
            }
            Kind::Scan {
                axis,
                checkpoints,
                focus,
            } => {
                let rows = run_scan(&cfg.scenario, axis, &cfg.options, cfg.workers)?;
                rec.table(j.name, "scan", &scan_table(axis, cfg.scenario.dim(), &rows))?;
                let mut at = Vec::new();
                for &v in checkpoints {
                    let mut s = cfg.scenario.clone();
                    axis.param.apply(&mut s, v, true)?;
                    let val = focus.evaluate(&final_observables(&propagate_with(&s, &cfg.options)?)?);
                    rec.put(format!("{}.{focus}@{}={v}", j.name, axis.param), val);
                    at.push(val);
                }
                if let [a, b] = at[..] {
                    rec.put(format!("{}.{focus}_ratio", j.name), b / a);
                }
                scan_axis = Some(AxisFile {
                    param: axis.param.name().into(),
                    start: axis.start,
                    end: axis.end,
                    count: axis.count,
                });
            }
        }
        records.push(JobRecord {
            name: j.name.into(),
            kind: match j.kind {
                Kind::Trajectory => "simulate",
                Kind::Dressed => "dressed",
                Kind::Sweep => "sweep",
                Kind::Scan { .. } => "scan",
            },
            config: cfg.to_file(),
            scan: scan_axis,
        });
    }
    let manifest = Manifest {
        id: id.into(),
        title: info.title.into(),
        version: env!("CARGO_PKG_VERSION").into(),
        reconstructed: info.reconstructed,
        resolution: opts.resolution,
        wall_time_s: started.elapsed().as_secs_f64(),
        parameters: records,
        files: rec.files,
        observables: rec.observables,
    };
    let value = serde_json::to_value(&manifest).expect("manifest serializes");
    write_json_to(&value, &manifest_path(out_dir, id))?;
    Ok(manifest)
}

pub fn manifest_path(out_dir: &Path, id: &str) -> PathBuf {
    out_dir.join(format!("{id}.manifest.json"))
}

fn region_summary(rec: &mut Recorder, job: &str, r: &SweepResult, threshold: f64) {
    let regions = r.regions_at_least(threshold);
    let Some(best) = regions.first() else {
        rec.put(format!("{job}.region_cells"), 0.0);
        return;
    };
    let xs = r.x.values();
    let lo = best.iter().map(|&(ix, _)| xs[ix]).fold(f64::INFINITY, f64::min);
    let hi = best.iter().map(|&(ix, _)| xs[ix]).fold(f64::NEG_INFINITY, f64::max);
    rec.put(format!("{job}.region_cells"), best.len() as f64);
    rec.put(format!("{job}.region_min_{}", r.x.param), lo);
    rec.put(format!("{job}.region_max_{}", r.x.param), hi);
}

/// Scan rows: the axis value followed by every population and coherence
/// magnitude; failed points are NaN.
pub fn scan_table(axis: &SweepAxis, dim: usize, rows: &[stirap_core::Result<FinalObservables>]) -> Table {
    let mut t = Table::default();
    t.push(axis.param.name(), axis.values());
    let pick = |f: &dyn Fn(&FinalObservables) -> f64| -> Vec<f64> {
        rows.iter().map(|r| r.as_ref().map_or(f64::NAN, f)).collect()
    };
    for i in 0..dim {
        t.push(Observable::Population(i).to_string(), pick(&|fo| fo.populations[i]));
    }
    for i in 0..dim {
        for j in i + 1..dim {
            t.push(Observable::Coherence(i, j).to_string(), pick(&|fo| fo.coherences[i][j]));
        }
    }
    t
}
