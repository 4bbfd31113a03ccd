//! JSON run configuration.
//!
//! A config names a scheme and overrides any of its reference parameters;
//! everything omitted keeps the value of [`ScenarioSpec::standard`]. Unknown
//! keys are rejected. [`RunConfig::to_json`] prints every effective value, so
//! parsing the printed text gives back the same config.

use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use stirap_core::{
    CVec, Observable, PropagateOptions, PulseSpec, ScenarioSpec, Scheme, SweepAxis, SweepParam, SweepPlan, C64,
};

use crate::output::Format;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("{path}: {message}")]
    Schema { path: String, message: String },
    #[error("{0}")]
    Invalid(#[from] stirap_core::Error),
    #[error("`{field}`: {reason}")]
    Field { field: &'static str, reason: String },
}

fn field(field: &'static str, reason: impl Into<String>) -> ConfigError {
    ConfigError::Field {
        field,
        reason: reason.into(),
    }
}

/// The on-disk document. Every key is optional except `scheme`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub scheme: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega_p: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega_s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau_p: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau_s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_p: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_s: Option<f64>,
    #[serde(rename = "Delta", skip_serializing_if = "Option::is_none")]
    pub one_photon: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub level_splitting: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_d: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_d1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_d2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mixing_angle: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phi: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_start: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_end: Option<f64>,
    /// Amplitudes as `[re, im]` pairs.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub initial_state: Option<Vec<[f64; 2]>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepFile>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisFile {
    pub param: String,
    pub start: f64,
    pub end: f64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepFile {
    pub x: AxisFile,
    pub y: AxisFile,
    pub observable: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tie_level_splitting: Option<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepConfig {
    pub x: SweepAxis,
    pub y: SweepAxis,
    pub observable: Observable,
    pub tie_level_splitting: bool,
}

/// A validated configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub scenario: ScenarioSpec,
    pub options: PropagateOptions,
    /// Sweep worker threads; `None` uses every core.
    pub workers: Option<usize>,
    pub format: Format,
    pub output: Option<PathBuf>,
    pub sweep: Option<SweepConfig>,
}

impl RunConfig {
    /// Default config of `scheme`.
    pub fn standard(scheme: Scheme) -> Self {
        Self {
            scenario: ScenarioSpec::standard(scheme),
            options: PropagateOptions::default(),
            workers: None,
            format: Format::Csv,
            output: None,
            sweep: None,
        }
    }

    pub fn sweep_plan(&self) -> Result<SweepPlan, ConfigError> {
        let sw = self
            .sweep
            .ok_or_else(|| field("sweep", "the sweep command needs a `sweep` section"))?;
        let mut plan = SweepPlan::new(self.scenario.clone(), sw.x, sw.y, sw.observable);
        plan.options = self.options;
        plan.tie_level_splitting = sw.tie_level_splitting;
        plan.validate()?;
        Ok(plan)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.scenario.validate()?;
        self.options.validate()?;
        if self.workers == Some(0) {
            return Err(field("workers", "must be at least 1"));
        }
        if self.sweep.is_some() {
            self.sweep_plan()?;
        }
        Ok(())
    }

    /// The fully explicit document for this config.
    pub fn to_file(&self) -> ConfigFile {
        let s = &self.scenario;
        let cf = s.scheme.two_component_stokes() && s.scheme.chirped();
        let cs = s.scheme.chirped() && !cf;
        let s2 = s.stokes2.as_ref();
        ConfigFile {
            scheme: s.scheme.name().to_string(),
            omega_p: Some(s.pump.amplitude),
            omega_s: Some(s.stokes1.amplitude),
            tau_p: Some(s.pump.width),
            tau_s: Some(s.stokes1.width),
            t_p: Some(s.pump.center),
            t_s: Some(s.stokes1.center),
            one_photon: Some(s.detunings.one_photon),
            delta: Some(s.detunings.two_photon),
            level_splitting: (s.dim() == 4).then_some(s.detunings.level4_splitting),
            alpha: s.scheme.chirped().then_some(s.pump.chirp),
            beta: cs.then_some(s.stokes1.chirp),
            t_d: cs.then_some(s.stokes1.chirp_delay),
            beta1: cf.then_some(s.stokes1.chirp),
            beta2: s2.filter(|_| cf).map(|p| p.chirp),
            t_d1: cf.then_some(s.stokes1.chirp_delay),
            t_d2: s2.filter(|_| cf).map(|p| p.chirp_delay),
            mixing_angle: s.scheme.two_component_stokes().then_some(s.mixing_angle),
            phi: s.scheme.two_component_stokes().then_some(s.phase),
            t_start: Some(s.t_start),
            t_end: Some(s.t_end),
            initial_state: Some(s.initial_state.as_slice().iter().map(|c| [c.re, c.im]).collect()),
            tol: Some(self.options.rtol),
            samples: Some(self.options.samples),
            workers: self.workers,
            format: Some(self.format),
            output: self.output.clone(),
            sweep: self.sweep.map(|sw| SweepFile {
                x: axis_file(&sw.x),
                y: axis_file(&sw.y),
                observable: sw.observable.to_string(),
                tie_level_splitting: Some(sw.tie_level_splitting),
            }),
            ..ConfigFile::default()
        }
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(&self.to_file()).expect("config serializes");
        text.push('\n');
        text
    }
}

fn stokes_all(s: &mut ScenarioSpec, f: &dyn Fn(&mut PulseSpec)) {
    f(&mut s.stokes1);
    if let Some(p) = s.stokes2.as_mut() {
        f(p);
    }
}

fn axis_file(a: &SweepAxis) -> AxisFile {
    AxisFile {
        param: a.param.name().to_string(),
        start: a.start,
        end: a.end,
        count: a.count,
    }
}

fn axis(a: &AxisFile) -> Result<SweepAxis, ConfigError> {
    Ok(SweepAxis::new(SweepParam::from_str(&a.param)?, a.start, a.end, a.count))
}

/// Parses and validates a JSON config.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    from_file(&read_config_file(text)?)
}

/// Reads the document without applying it; schema errors carry the JSON path.
pub fn read_config_file(text: &str) -> Result<ConfigFile, ConfigError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| ConfigError::Schema {
        path: e.path().to_string(),
        message: e.inner().to_string(),
    })
}

/// Applies the overrides of `file` to the reference scenario of its scheme.
pub fn from_file(file: &ConfigFile) -> Result<RunConfig, ConfigError> {
    let scheme = Scheme::from_str(&file.scheme)?;
    let mut cfg = RunConfig::standard(scheme);
    let s = &mut cfg.scenario;
    let two = scheme.two_component_stokes();
    let cf = two && scheme.chirped();

    if let Some(v) = file.omega0 {
        s.pump.amplitude = v;
        stokes_all(s, &|p| p.amplitude = v);
    }
    if let Some(v) = file.omega_p {
        s.pump.amplitude = v;
    }
    if let Some(v) = file.omega_s {
        stokes_all(s, &|p| p.amplitude = v);
    }
    if let Some(v) = file.tau {
        s.pump.width = v;
        stokes_all(s, &|p| p.width = v);
    }
    if let Some(v) = file.tau_p {
        s.pump.width = v;
    }
    if let Some(v) = file.tau_s {
        stokes_all(s, &|p| p.width = v);
    }
    if let Some(v) = file.t_p {
        s.pump.center = v;
        if let Some(p) = s.stokes2.as_mut() {
            // The second Stokes component rides on the pump.
            p.center = v;
            s.stokes1.center = -v;
        }
    }
    if let Some(v) = file.t_s {
        s.stokes1.center = v;
    }

    let two_photon = file.delta.unwrap_or(0.0);
    s.detunings.one_photon = file.one_photon.unwrap_or(0.0);
    s.detunings.two_photon = two_photon;
    s.detunings.level4_splitting = file.level_splitting.unwrap_or(two_photon);
    if file.level_splitting.is_some() && scheme.dim() != 4 {
        return Err(field(
            "level_splitting",
            "only four-level schemes have a second final state",
        ));
    }

    if !cf && (file.beta1.is_some() || file.beta2.is_some() || file.t_d1.is_some() || file.t_d2.is_some()) {
        return Err(field(
            "beta1",
            "per-component Stokes chirps belong to the CFSTIRAP schemes",
        ));
    }
    if cf && file.t_d.is_some() {
        return Err(field("t_d", "use t_d1 and t_d2 for the two Stokes components"));
    }
    let alpha = file.alpha.unwrap_or(0.0);
    let beta = file.beta.unwrap_or(alpha);
    s.pump.chirp = alpha;
    if cf {
        s.stokes1.chirp = file.beta1.unwrap_or(beta);
        s.stokes1.chirp_delay = file.t_d1.unwrap_or(0.0);
        if let Some(p) = s.stokes2.as_mut() {
            p.chirp = file.beta2.unwrap_or(beta);
            p.chirp_delay = file.t_d2.unwrap_or(0.0);
        }
    } else {
        s.stokes1.chirp = beta;
        s.stokes1.chirp_delay = file.t_d.unwrap_or(0.0);
    }

    if !two && (file.mixing_angle.is_some() || file.phi.is_some()) {
        return Err(field(
            "mixing_angle",
            "only the two-component Stokes schemes take a mixing angle or phase",
        ));
    }
    if let Some(a) = file.mixing_angle {
        s.mixing_angle = a;
    }
    s.apply_mixing_angle();
    s.phase = file.phi.unwrap_or(0.0);

    s.reset_window();
    if let Some(v) = file.t_start {
        s.t_start = v;
    }
    if let Some(v) = file.t_end {
        s.t_end = v;
    }
    if let Some(amps) = &file.initial_state {
        if amps.len() != scheme.dim() {
            return Err(field(
                "initial_state",
                format!("expected {} amplitudes, found {}", scheme.dim(), amps.len()),
            ));
        }
        let v: Vec<C64> = amps.iter().map(|&[re, im]| C64::new(re, im)).collect();
        s.initial_state = CVec::from_slice(&v);
    }

    if let Some(t) = file.tol {
        cfg.options.rtol = t;
    }
    if let Some(n) = file.samples {
        cfg.options.samples = n;
    }
    cfg.workers = file.workers;
    cfg.format = file.format.unwrap_or(Format::Csv);
    cfg.output = file.output.clone();
    if let Some(sw) = &file.sweep {
        cfg.sweep = Some(SweepConfig {
            x: axis(&sw.x)?,
            y: axis(&sw.y)?,
            observable: Observable::from_str(&sw.observable)?,
            tie_level_splitting: sw.tie_level_splitting.unwrap_or(true),
        });
    }
    cfg.validate()?;
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_takes_reference_values() {
        let c = parse_config(r#"{"scheme": "STIRAP3"}"#).unwrap();
        assert_eq!(c, RunConfig::standard(Scheme::Stirap3));
        assert_eq!(c.options.rtol, 1e-9);
        assert_eq!(c.scenario.pump.amplitude, 1.0);
        assert_eq!(c.scenario.stokes1.width, 100.0);
        assert_eq!((c.scenario.pump.center, c.scenario.stokes1.center), (70.0, -70.0));
    }

    #[test]
    fn fractional_t_p_moves_both_stokes_components() {
        let c = parse_config(r#"{"scheme": "FSTIRAP3", "t_p": 50}"#).unwrap();
        assert_eq!(c.scenario.stokes1.center, -50.0);
        assert_eq!(c.scenario.stokes2.unwrap().center, 50.0);
    }

    #[test]
    fn beta_defaults_to_alpha() {
        let c = parse_config(r#"{"scheme": "CSTIRAP4", "delta": 0.14, "alpha": -1e-3}"#).unwrap();
        assert_eq!(c.scenario.stokes1.chirp, -1e-3);
        assert_eq!(c.scenario.detunings.level4_splitting, 0.14);
    }
}
