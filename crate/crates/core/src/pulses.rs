//! Chirped Gaussian pulses, instantaneous detunings and the two-component
//! effective Stokes field.
//!
//! A pulse contributes `weight·Ω0·exp(−(t−t_c)²/τ²)` to the Rabi frequency and
//! the chirp phase `(chirp/2)·(t − t_c − t_d)²`, whose derivative
//! `chirp·(t − t_c − t_d)` is the instantaneous frequency offset.

use core::fmt;

use crate::error::{Error, Result};
use crate::linalg::C64;
use crate::math;

/// Which field a pulse plays in the Λ scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PulseRole {
    Pump,
    Stokes1,
    Stokes2,
}

impl fmt::Display for PulseRole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PulseRole::Pump => "pump",
            PulseRole::Stokes1 => "stokes1",
            PulseRole::Stokes2 => "stokes2",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseSpec {
    pub role: PulseRole,
    /// Peak Rabi frequency Ω0 [ω].
    pub amplitude: f64,
    /// Center time t_c [ω⁻¹].
    pub center: f64,
    /// Gaussian width τ [ω⁻¹].
    pub width: f64,
    /// Linear chirp rate [ω²].
    pub chirp: f64,
    /// Shift of the chirp's zero-frequency point relative to the center [ω⁻¹].
    pub chirp_delay: f64,
    /// Dimensionless scale in [0, 1] (sin A, cos A or 1).
    pub weight: f64,
}

impl PulseSpec {
    pub fn new(role: PulseRole, amplitude: f64, center: f64, width: f64) -> Self {
        Self {
            role,
            amplitude,
            center,
            width,
            chirp: 0.0,
            chirp_delay: 0.0,
            weight: 1.0,
        }
    }

    pub fn with_chirp(mut self, chirp: f64, chirp_delay: f64) -> Self {
        self.chirp = chirp;
        self.chirp_delay = chirp_delay;
        self
    }

    pub fn with_weight(mut self, weight: f64) -> Self {
        self.weight = weight;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let field = match self.role {
            PulseRole::Pump => [
                "pump.amplitude",
                "pump.center",
                "pump.width",
                "pump.chirp",
                "pump.weight",
            ],
            PulseRole::Stokes1 => [
                "stokes1.amplitude",
                "stokes1.center",
                "stokes1.width",
                "stokes1.chirp",
                "stokes1.weight",
            ],
            PulseRole::Stokes2 => [
                "stokes2.amplitude",
                "stokes2.center",
                "stokes2.width",
                "stokes2.chirp",
                "stokes2.weight",
            ],
        };
        if !(self.amplitude.is_finite() && self.amplitude >= 0.0) {
            return Err(Error::invalid(field[0], "must be finite and ≥ 0"));
        }
        if !self.center.is_finite() {
            return Err(Error::invalid(field[1], "must be finite"));
        }
        if !(self.width.is_finite() && self.width > 0.0) {
            return Err(Error::invalid(field[2], "must be finite and > 0"));
        }
        if !(self.chirp.is_finite() && self.chirp_delay.is_finite()) {
            return Err(Error::invalid(field[3], "chirp rate and delay must be finite"));
        }
        if !(0.0..=1.0).contains(&self.weight) {
            return Err(Error::invalid(field[4], "must lie in [0, 1]"));
        }
        Ok(())
    }

    /// Peak value including the weight.
    pub fn peak(&self) -> f64 {
        self.weight * self.amplitude
    }

    pub fn envelope(&self, t: f64) -> f64 {
        let x = (t - self.center) / self.width;
        self.peak() * math::exp(-x * x)
    }

    /// d/dt of [`envelope`](Self::envelope).
    pub fn envelope_rate(&self, t: f64) -> f64 {
        let x = t - self.center;
        -2.0 * x / (self.width * self.width) * self.envelope(t)
    }

    /// Accumulated chirp phase `(chirp/2)(t − t_c − t_d)²` [rad].
    pub fn chirp_phase(&self, t: f64) -> f64 {
        let x = t - self.center - self.chirp_delay;
        0.5 * self.chirp * x * x
    }

    /// Instantaneous frequency offset `chirp·(t − t_c − t_d)` [ω].
    pub fn inst_chirp(&self, t: f64) -> f64 {
        self.chirp * (t - self.center - self.chirp_delay)
    }
}

/// Free-function form of [`PulseSpec::envelope`].
pub fn envelope(p: &PulseSpec, t: f64) -> f64 {
    p.envelope(t)
}

/// One- and two-photon detunings, plus the |3⟩–|4⟩ splitting used by the
/// four-level schemes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetuningSpec {
    /// One-photon detuning Δ [ω].
    pub one_photon: f64,
    /// Two-photon detuning δ (δ′ in four-level schemes) [ω].
    pub two_photon: f64,
    /// Energy of |3⟩ above |4⟩ [ω]; conventionally equal to δ′.
    pub level4_splitting: f64,
}

impl DetuningSpec {
    pub fn new(one_photon: f64, two_photon: f64) -> Self {
        Self {
            one_photon,
            two_photon,
            level4_splitting: two_photon,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.one_photon.is_finite() {
            return Err(Error::invalid("Delta", "must be finite"));
        }
        if !self.two_photon.is_finite() {
            return Err(Error::invalid("delta", "must be finite"));
        }
        if !self.level4_splitting.is_finite() {
            return Err(Error::invalid("level_splitting", "must be finite"));
        }
        Ok(())
    }
}

/// Δ(t) = Δ − α(t − t_p − t_d,p).
pub fn one_photon_detuning(d: &DetuningSpec, pump: &PulseSpec, t: f64) -> f64 {
    d.one_photon - pump.inst_chirp(t)
}

/// δ(t) = −δ + β(t − t_s − t_d) − α(t − t_p).
pub fn two_photon_detuning(d: &DetuningSpec, pump: &PulseSpec, stokes: &PulseSpec, t: f64) -> f64 {
    -d.two_photon + stokes.inst_chirp(t) - pump.inst_chirp(t)
}

/// Amplitude, phase and instantaneous chirp of `Ω_s1(t)e^{iφ1(t)} + Ω_s2(t)e^{iφ2(t)}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveStokes {
    pub amplitude: f64,
    /// Phase θ_s(t). From [`effective_stokes`] it is the principal value;
    /// [`StokesPhaseTracker`] returns the unwrapped branch.
    pub phase: f64,
    /// g(t) = dθ_s/dt [ω].
    pub chirp: f64,
    /// Amplitude below 1e−12: phase and chirp are not defined and `phase`
    /// carries the last defined value (0 for a single evaluation), `chirp` is 0.
    pub indeterminate: bool,
}

pub(crate) const INDETERMINATE_AMPLITUDE: f64 = 1e-12;

/// Effective Stokes field of two chirped pulses with an extra constant phase
/// offset `offset` applied to the second component.
pub(crate) fn effective_stokes_offset(s1: &PulseSpec, s2: &PulseSpec, offset: f64, t: f64) -> EffectiveStokes {
    let a1 = s1.envelope(t);
    let a2 = s2.envelope(t);
    let p1 = s1.chirp_phase(t);
    let p2 = s2.chirp_phase(t) + offset;
    let field = C64::from_polar(a1, p1) + C64::from_polar(a2, p2);
    let amplitude = field.norm();
    if amplitude < INDETERMINATE_AMPLITUDE {
        return EffectiveStokes {
            amplitude,
            phase: 0.0,
            chirp: 0.0,
            indeterminate: true,
        };
    }
    let (w1, w2) = (s1.inst_chirp(t), s2.inst_chirp(t));
    let (r1, r2) = (s1.envelope_rate(t), s2.envelope_rate(t));
    let rel = p2 - p1;
    let num = a1 * a1 * w1 + a2 * a2 * w2 + a1 * a2 * (w1 + w2) * math::cos(rel) + (a1 * r2 - a2 * r1) * math::sin(rel);
    EffectiveStokes {
        amplitude,
        phase: math::atan2(field.im, field.re),
        chirp: num / (amplitude * amplitude),
        indeterminate: false,
    }
}

/// Effective Stokes amplitude, principal phase and chirp g(t) at `t`.
pub fn effective_stokes(s1: &PulseSpec, s2: &PulseSpec, t: f64) -> EffectiveStokes {
    effective_stokes_offset(s1, s2, 0.0, t)
}

/// Follows the effective Stokes phase along increasing times, unwrapping it
/// with internal substeps of at most 0.05 ω⁻¹.
#[derive(Debug, Clone)]
pub struct StokesPhaseTracker {
    s1: PulseSpec,
    s2: PulseSpec,
    offset: f64,
    last: Option<(f64, f64)>,
}

/// Largest time step between phase samples used for unwrapping.
pub const UNWRAP_STEP: f64 = 0.05;

impl StokesPhaseTracker {
    pub fn new(s1: PulseSpec, s2: PulseSpec) -> Self {
        Self::with_offset(s1, s2, 0.0)
    }

    pub(crate) fn with_offset(s1: PulseSpec, s2: PulseSpec, offset: f64) -> Self {
        Self {
            s1,
            s2,
            offset,
            last: None,
        }
    }

    /// Effective Stokes field at `t` with the phase on a continuous branch.
    /// Times must not decrease between calls.
    pub fn advance(&mut self, t: f64) -> Result<EffectiveStokes> {
        let (t0, mut phase) = match self.last {
            None => {
                let e = effective_stokes_offset(&self.s1, &self.s2, self.offset, t);
                self.last = Some((t, e.phase));
                return Ok(e);
            }
            Some(last) => last,
        };
        if t < t0 {
            return Err(Error::NonMonotoneTime { t, previous: t0 });
        }
        let n = libm::ceil((t - t0) / UNWRAP_STEP).max(1.0) as usize;
        let mut out = effective_stokes_offset(&self.s1, &self.s2, self.offset, t);
        for k in 1..=n {
            let tk = if k == n { t } else { t0 + (t - t0) * k as f64 / n as f64 };
            let e = effective_stokes_offset(&self.s1, &self.s2, self.offset, tk);
            if !e.indeterminate {
                phase += math::wrap_angle(e.phase - phase);
            }
            out = e;
        }
        self.last = Some((t, phase));
        out.phase = phase;
        if out.indeterminate {
            out.chirp = 0.0;
        }
        Ok(out)
    }

    /// Like [`advance`](Self::advance) but reports an indeterminate phase as an error.
    pub fn advance_strict(&mut self, t: f64) -> Result<EffectiveStokes> {
        let e = self.advance(t)?;
        if e.indeterminate {
            return Err(Error::IndeterminatePhase { t });
        }
        Ok(e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pump() -> PulseSpec {
        PulseSpec::new(PulseRole::Pump, 1.0, 70.0, 100.0)
    }

    fn stokes() -> PulseSpec {
        PulseSpec::new(PulseRole::Stokes1, 1.0, -70.0, 100.0)
    }

    #[test]
    fn envelope_peak_and_one_width_point() {
        let p = pump();
        assert_eq!(p.envelope(70.0), 1.0);
        let q = p.with_weight(0.5);
        assert!((q.envelope(170.0) - 0.5 * libm::exp(-1.0)).abs() < 1e-16);
        let z = PulseSpec::new(PulseRole::Pump, 0.0, 0.0, 10.0);
        assert_eq!(z.envelope(3.0), 0.0);
    }

    #[test]
    fn envelope_rate_matches_central_difference() {
        let p = pump().with_weight(0.8);
        for &t in &[-100.0, 0.0, 33.3, 70.0, 250.0] {
            let h = 1e-4;
            let fd = (p.envelope(t + h) - p.envelope(t - h)) / (2.0 * h);
            assert!((fd - p.envelope_rate(t)).abs() < 1e-10);
        }
    }

    #[test]
    fn detunings_linear_forms() {
        let d = DetuningSpec::new(0.0, 0.14);
        let p = pump().with_chirp(1e-3, 0.0);
        let s = stokes().with_chirp(1e-3, 0.0);
        for &t in &[-300.0, 0.0, 123.0] {
            assert!(two_photon_detuning(&d, &p, &s, t).abs() < 1e-15);
        }
        let s_delayed = stokes().with_chirp(1e-3, 140.0);
        let v = two_photon_detuning(&d, &p, &s_delayed, 0.0);
        assert!((v + 0.14).abs() < 1e-15);
        assert!((one_photon_detuning(&DetuningSpec::new(0.0, 0.0), &p, 170.0) + 0.1).abs() < 1e-15);
        assert_eq!(one_photon_detuning(&DetuningSpec::new(0.2, 0.0), &pump(), 5.0), 0.2);
    }

    #[test]
    fn single_component_limit() {
        let s1 = stokes().with_chirp(2e-3, 10.0);
        let s2 = PulseSpec::new(PulseRole::Stokes2, 0.0, 70.0, 100.0);
        let t = 40.0;
        let e = effective_stokes(&s1, &s2, t);
        assert!((e.amplitude - s1.envelope(t)).abs() < 1e-15);
        assert!((e.chirp - s1.inst_chirp(t)).abs() < 1e-15);
        assert!((e.phase - math::wrap_angle(s1.chirp_phase(t))).abs() < 1e-12);
    }

    #[test]
    fn tracker_flags_vanishing_field_and_holds_phase() {
        let s1 = PulseSpec::new(PulseRole::Stokes1, 1.0, -70.0, 1.0).with_chirp(1e-2, 0.0);
        let s2 = PulseSpec::new(PulseRole::Stokes2, 0.0, 70.0, 1.0);
        let mut tr = StokesPhaseTracker::new(s1, s2);
        let a = tr.advance(-70.5).unwrap();
        assert!(!a.indeterminate);
        let b = tr.advance(0.0).unwrap();
        assert!(b.indeterminate);
        assert!(matches!(tr.advance_strict(1.0), Err(Error::IndeterminatePhase { .. })));
        assert!(matches!(tr.advance(0.5), Err(Error::NonMonotoneTime { .. })));
    }
}
