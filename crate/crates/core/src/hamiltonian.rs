//! Rotating-wave field-interaction Hamiltonians for the supported schemes.
//!
//! With ħ = 1 every matrix is stored as `½·M`, where `M` carries the Rabi
//! frequencies off the diagonal and twice the detunings on it:
//!
//! ```text
//! three levels:  M = [[0, Ωp, 0], [Ωp, 2Δ(t), S], [0, S*, 2δ(t)]]
//! four levels:   M = [[0, Ωp, 0, 0], [Ωp, 2Δ(t), S, S],
//!                     [0, S*, 2(δ′(t) + δ′), 0], [0, S*, 0, 2δ′(t)]]
//! ```
//!
//! `S` is the (possibly two-component) Stokes coupling: `Ω_s1(t)` for the
//! single-Stokes schemes, `Ω_s1(t) + Ω_s2(t)e^{iφ}` for fractional STIRAP and
//! `Ω_s1(t) + Ω_s2(t)e^{iη(t)}` for its chirped variants. Δ(t) and δ(t) follow
//! [`one_photon_detuning`] and [`two_photon_detuning`]. Levels are ordered
//! |1⟩ (initial), |2⟩ (intermediate), |3⟩ (resonant final), |4⟩ (final state
//! lying δ′ below |3⟩).

use core::f64::consts::FRAC_PI_4;
use core::fmt;
use core::str::FromStr;

use alloc::string::ToString;

use crate::error::{Error, Result};
use crate::linalg::{eigh, CMat, CVec, Eigen, C64};
use crate::math;
use crate::pulses::{
    effective_stokes_offset, one_photon_detuning, two_photon_detuning, DetuningSpec, PulseRole, PulseSpec,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    /// Unchirped three-level STIRAP.
    Stirap3,
    /// Chirped three-level STIRAP.
    Cstirap3,
    /// Chirped STIRAP in a Λ system with two close final states.
    Cstirap4,
    /// Fractional STIRAP with a two-component Stokes field.
    Fstirap3,
    /// Chirped fractional STIRAP.
    Cfstirap3,
    /// Chirped fractional STIRAP with two close final states.
    Cfstirap4,
    /// Fractional STIRAP made with one Gaussian Stokes pulse outlasted by the pump.
    Fstirap3SingleStokes,
}

impl Scheme {
    pub const ALL: [Scheme; 7] = [
        Scheme::Stirap3,
        Scheme::Cstirap3,
        Scheme::Cstirap4,
        Scheme::Fstirap3,
        Scheme::Cfstirap3,
        Scheme::Cfstirap4,
        Scheme::Fstirap3SingleStokes,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Stirap3 => "STIRAP3",
            Scheme::Cstirap3 => "CSTIRAP3",
            Scheme::Cstirap4 => "CSTIRAP4",
            Scheme::Fstirap3 => "FSTIRAP3",
            Scheme::Cfstirap3 => "CFSTIRAP3",
            Scheme::Cfstirap4 => "CFSTIRAP4",
            Scheme::Fstirap3SingleStokes => "FSTIRAP3_SINGLE_STOKES",
        }
    }

    pub fn dim(self) -> usize {
        match self {
            Scheme::Cstirap4 | Scheme::Cfstirap4 => 4,
            _ => 3,
        }
    }

    /// Uses the two-component Stokes field `Ω_s1 + Ω_s2 e^{iη}`.
    pub fn two_component_stokes(self) -> bool {
        matches!(self, Scheme::Fstirap3 | Scheme::Cfstirap3 | Scheme::Cfstirap4)
    }

    pub fn chirped(self) -> bool {
        matches!(
            self,
            Scheme::Cstirap3 | Scheme::Cstirap4 | Scheme::Cfstirap3 | Scheme::Cfstirap4
        )
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Scheme::ALL
            .iter()
            .copied()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::UnknownScheme(s.to_string()))
    }
}

/// A complete simulation scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSpec {
    pub scheme: Scheme,
    pub detunings: DetuningSpec,
    pub pump: PulseSpec,
    pub stokes1: PulseSpec,
    pub stokes2: Option<PulseSpec>,
    /// Constant mixing angle A [rad]; sets the pump weight sin A and the
    /// second Stokes weight cos A in the fractional schemes.
    pub mixing_angle: f64,
    /// Relative phase φ of the second Stokes component [rad].
    pub phase: f64,
    pub t_start: f64,
    pub t_end: f64,
    pub initial_state: CVec,
}

impl ScenarioSpec {
    /// The reference parameter set for `scheme`: Ω0 = 1, τ = 100, t_p = 70,
    /// t_s = −70, all detunings and chirps zero, A = π/4 for the fractional
    /// schemes. The single-Stokes scheme uses Ω_p = 0.3, τ_p = 22, t_p = 171.6
    /// with Ω_s = 1, τ_s = 30, t_s = 150. The window is [`default_window`](Self::default_window).
    pub fn standard(scheme: Scheme) -> Self {
        let (pump, stokes1) = match scheme {
            Scheme::Fstirap3SingleStokes => (
                PulseSpec::new(PulseRole::Pump, 0.3, 171.6, 22.0),
                PulseSpec::new(PulseRole::Stokes1, 1.0, 150.0, 30.0),
            ),
            _ => (
                PulseSpec::new(PulseRole::Pump, 1.0, 70.0, 100.0),
                PulseSpec::new(PulseRole::Stokes1, 1.0, -70.0, 100.0),
            ),
        };
        let stokes2 = scheme
            .two_component_stokes()
            .then(|| PulseSpec::new(PulseRole::Stokes2, 1.0, 70.0, 100.0));
        let mut s = Self {
            scheme,
            detunings: DetuningSpec::new(0.0, 0.0),
            pump,
            stokes1,
            stokes2,
            mixing_angle: if scheme.two_component_stokes() { FRAC_PI_4 } else { 0.0 },
            phase: 0.0,
            t_start: 0.0,
            t_end: 0.0,
            initial_state: CVec::basis(scheme.dim(), 0),
        };
        s.apply_mixing_angle();
        s.reset_window();
        s
    }

    pub fn dim(&self) -> usize {
        self.scheme.dim()
    }

    /// `[min(t_c − 4τ), max(t_c + 5τ)]` over all pulses.
    pub fn default_window(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for p in self.pulses() {
            lo = lo.min(p.center - 4.0 * p.width);
            hi = hi.max(p.center + 5.0 * p.width);
        }
        (lo, hi)
    }

    pub fn reset_window(&mut self) {
        let (a, b) = self.default_window();
        self.t_start = a;
        self.t_end = b;
    }

    pub fn with_window(mut self, t_start: f64, t_end: f64) -> Self {
        self.t_start = t_start;
        self.t_end = t_end;
        self
    }

    pub fn with_detunings(mut self, one_photon: f64, two_photon: f64) -> Self {
        self.detunings = DetuningSpec::new(one_photon, two_photon);
        self
    }

    /// Pump chirp α and Stokes chirp β (applied to every Stokes component).
    pub fn with_chirps(mut self, alpha: f64, beta: f64) -> Self {
        self.pump.chirp = alpha;
        self.stokes1.chirp = beta;
        if let Some(s2) = self.stokes2.as_mut() {
            s2.chirp = beta;
        }
        self
    }

    pub fn with_stokes_chirp_delay(mut self, t_d: f64) -> Self {
        self.stokes1.chirp_delay = t_d;
        self
    }

    /// Chirps of the fractional schemes: pump α, Stokes components β₁, β₂ with
    /// chirp delays t_d1, t_d2.
    pub fn with_fractional_chirps(mut self, alpha: f64, beta1: f64, beta2: f64, t_d1: f64, t_d2: f64) -> Self {
        self.pump.chirp = alpha;
        self.stokes1 = self.stokes1.with_chirp(beta1, t_d1);
        if let Some(s2) = self.stokes2.as_mut() {
            *s2 = s2.with_chirp(beta2, t_d2);
        }
        self
    }

    pub fn with_phase(mut self, phi: f64) -> Self {
        self.phase = phi;
        self
    }

    pub fn with_mixing_angle(mut self, a: f64) -> Self {
        self.mixing_angle = a;
        self.apply_mixing_angle();
        self
    }

    pub fn with_initial_state(mut self, psi: CVec) -> Self {
        self.initial_state = psi;
        self
    }

    /// Sets the pump and second-Stokes weights from the mixing angle
    /// (fractional schemes only).
    pub fn apply_mixing_angle(&mut self) {
        if let Some(s2) = self.stokes2.as_mut() {
            self.pump.weight = math::sin(self.mixing_angle);
            s2.weight = math::cos(self.mixing_angle);
            self.stokes1.weight = 1.0;
        }
    }

    pub fn pulses(&self) -> impl Iterator<Item = &PulseSpec> {
        [Some(&self.pump), Some(&self.stokes1), self.stokes2.as_ref()]
            .into_iter()
            .flatten()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mixing_angle.is_finite() && (0.0..=core::f64::consts::FRAC_PI_2).contains(&self.mixing_angle)) {
            return Err(Error::invalid("mixing_angle", "must lie in [0, π/2]"));
        }
        self.detunings.validate()?;
        for p in self.pulses() {
            p.validate()?;
        }
        if self.stokes2.is_some() != self.scheme.two_component_stokes() {
            return Err(Error::invalid(
                "stokes2",
                if self.scheme.two_component_stokes() {
                    "a second Stokes component is required by this scheme"
                } else {
                    "this scheme has a single Stokes pulse"
                },
            ));
        }
        if !self.scheme.chirped() {
            let any_chirp = self.pulses().any(|p| p.chirp != 0.0 || p.chirp_delay != 0.0);
            if any_chirp {
                return Err(Error::invalid(
                    "alpha",
                    "chirps are not used by this scheme; set them to zero",
                ));
            }
        }
        if let Some(s2) = &self.stokes2 {
            let ok = (self.pump.weight - math::sin(self.mixing_angle)).abs() <= 1e-12
                && (s2.weight - math::cos(self.mixing_angle)).abs() <= 1e-12;
            if !ok {
                return Err(Error::invalid(
                    "mixing_angle",
                    "pump and second Stokes weights must equal sin A and cos A",
                ));
            }
        }
        if !self.phase.is_finite() {
            return Err(Error::invalid("phi", "must be finite"));
        }
        if !(self.t_start.is_finite() && self.t_end.is_finite() && self.t_start < self.t_end) {
            return Err(Error::invalid("t_start", "need finite t_start < t_end"));
        }
        if self.initial_state.dim != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: self.initial_state.dim,
            });
        }
        if (self.initial_state.norm() - 1.0).abs() > 1e-10 {
            return Err(Error::invalid("initial_state", "must have unit norm"));
        }
        Ok(())
    }

    /// Δ(t).
    pub fn one_photon_detuning(&self, t: f64) -> f64 {
        one_photon_detuning(&self.detunings, &self.pump, t)
    }

    /// δ(t) (δ′(t) in the four-level schemes).
    pub fn two_photon_detuning(&self, t: f64) -> f64 {
        two_photon_detuning(&self.detunings, &self.pump, &self.stokes1, t)
    }

    /// Relative phase of the second Stokes component in the coupling.
    fn stokes2_phase(&self, t: f64) -> f64 {
        match self.stokes2 {
            Some(s2) if self.scheme.chirped() => self.phase + self.stokes1.chirp_phase(t) - s2.chirp_phase(t),
            _ => self.phase,
        }
    }

    /// Complex Stokes coupling S(t) and its time derivative.
    pub fn stokes_coupling(&self, t: f64) -> (C64, C64) {
        let s1 = C64::new(self.stokes1.envelope(t), 0.0);
        let s1_rate = C64::new(self.stokes1.envelope_rate(t), 0.0);
        match self.stokes2 {
            None => (s1, s1_rate),
            Some(s2) => {
                let eta = self.stokes2_phase(t);
                let eta_rate = if self.scheme.chirped() {
                    self.stokes1.inst_chirp(t) - s2.inst_chirp(t)
                } else {
                    0.0
                };
                let rot = C64::from_polar(1.0, eta);
                let a2 = s2.envelope(t);
                let value = s1 + rot * a2;
                let rate = s1_rate + rot * C64::new(s2.envelope_rate(t), a2 * eta_rate);
                (value, rate)
            }
        }
    }

    fn build(&self, p: f64, s: C64, big_d: f64, d: f64) -> CMat {
        let n = self.dim();
        let mut h = CMat::zeros(n);
        let half_p = C64::new(0.5 * p, 0.0);
        let half_s = 0.5 * s;
        h[(0, 1)] = half_p;
        h[(1, 0)] = half_p;
        h[(1, 1)] = C64::new(big_d, 0.0);
        h[(1, 2)] = half_s;
        h[(2, 1)] = half_s.conj();
        if n == 4 {
            h[(1, 3)] = half_s;
            h[(3, 1)] = half_s.conj();
            h[(2, 2)] = C64::new(d + self.detunings.level4_splitting, 0.0);
            h[(3, 3)] = C64::new(d, 0.0);
        } else {
            h[(2, 2)] = C64::new(d, 0.0);
        }
        h
    }

    pub(crate) fn matrix_at(&self, t: f64) -> CMat {
        let (s, _) = self.stokes_coupling(t);
        self.build(
            self.pump.envelope(t),
            s,
            self.one_photon_detuning(t),
            self.two_photon_detuning(t),
        )
    }

    pub(crate) fn rate_at(&self, t: f64) -> CMat {
        let (_, s_rate) = self.stokes_coupling(t);
        let mut h = self.build(
            self.pump.envelope_rate(t),
            s_rate,
            -self.pump.chirp,
            self.stokes1.chirp - self.pump.chirp,
        );
        if self.dim() == 4 {
            h[(2, 2)] = C64::new(self.stokes1.chirp - self.pump.chirp, 0.0);
        }
        h
    }
}

/// Something that yields a Hermitian matrix H(t) of fixed dimension.
pub trait HamiltonianModel {
    fn dim(&self) -> usize;

    fn matrix(&self, t: f64) -> CMat;

    /// dH/dt; defaults to a central difference with step 1e−3.
    fn rate(&self, t: f64) -> CMat {
        let h = 1e-3;
        let a = self.matrix(t + h);
        let b = self.matrix(t - h);
        let mut out = a.sub(&b);
        for row in out.data.iter_mut() {
            for z in row.iter_mut() {
                *z /= 2.0 * h;
            }
        }
        out
    }
}

impl HamiltonianModel for ScenarioSpec {
    fn dim(&self) -> usize {
        self.scheme.dim()
    }

    fn matrix(&self, t: f64) -> CMat {
        self.matrix_at(t)
    }

    fn rate(&self, t: f64) -> CMat {
        self.rate_at(t)
    }
}

/// A Hamiltonian evaluated at one time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HermitianSample(pub CMat);

impl HermitianSample {
    pub fn dim(&self) -> usize {
        self.0.dim
    }

    pub fn matrix(&self) -> &CMat {
        &self.0
    }

    pub fn eigen(&self) -> Eigen {
        eigh(&self.0)
    }
}

/// H(t) for a validated scenario.
pub fn hamiltonian_at(s: &ScenarioSpec, t: f64) -> Result<HermitianSample> {
    s.validate()?;
    Ok(HermitianSample(s.matrix_at(t)))
}

/// dH/dt, analytic.
pub fn hamiltonian_rate(s: &ScenarioSpec, t: f64) -> Result<HermitianSample> {
    s.validate()?;
    Ok(HermitianSample(s.rate_at(t)))
}

/// η(t) = φ + (β₁/2)(t − t_c1 − t_d1)² − (β₂/2)(t − t_c2 − t_d2)² for the
/// chirped fractional schemes.
pub fn eta_phase(s: &ScenarioSpec, t: f64) -> Result<f64> {
    if !matches!(s.scheme, Scheme::Cfstirap3 | Scheme::Cfstirap4) {
        return Err(Error::SchemeMismatch {
            scheme: s.scheme,
            operation: "eta_phase",
        });
    }
    Ok(s.stokes2_phase(t))
}

/// Dressed energies `(λ₊, λ₀, λ₋)` of the three-level Hamiltonian at two-photon
/// resonance.
pub fn analytic_dressed_energies_3lvl(omega_p: f64, omega_s: f64, delta_t: f64) -> (f64, f64, f64) {
    let r = math::sqrt(delta_t * delta_t + omega_p * omega_p + omega_s * omega_s);
    (0.5 * (delta_t + r), 0.0, 0.5 * (delta_t - r))
}

/// Characteristic polynomial of the four-level matrix `M = 2H` evaluated at
/// `μ = 2λ`, split into the field-free part `f0` and the field-dependent part
/// `f1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quartic {
    pub f: f64,
    pub f0: f64,
    pub f1: f64,
    /// Coefficients of `f` in powers of μ, constant term first.
    pub coefficients: [f64; 5],
}

impl Quartic {
    pub fn max_coefficient(&self) -> f64 {
        self.coefficients.iter().fold(0.0f64, |m, c| m.max(c.abs()))
    }
}

/// Evaluates the four-level quartic at an energy λ of H:
///
/// ```text
/// f0(μ) = μ(μ − 2Δ(t))(μ − 2δ′(t) − 2δ′)(μ − 2δ′(t))
/// f1(μ) = |S|²·μ·(4δ′(t) + 2δ′ − 2μ) − Ωp²(2δ′(t) + 2δ′ − μ)(2δ′(t) − μ)
/// ```
///
/// with `μ = 2λ`; the roots in λ are exactly the eigenvalues of H(t).
pub fn quartic_eval(s: &ScenarioSpec, t: f64, lambda: f64) -> Result<Quartic> {
    if !matches!(s.scheme, Scheme::Cstirap4 | Scheme::Cfstirap4) {
        return Err(Error::SchemeMismatch {
            scheme: s.scheme,
            operation: "quartic_eval",
        });
    }
    let mu = 2.0 * lambda;
    let p2 = {
        let p = s.pump.envelope(t);
        p * p
    };
    let s2 = s.stokes_coupling(t).0.norm_sqr();
    let a1 = 2.0 * s.one_photon_detuning(t);
    let a3 = 2.0 * s.two_photon_detuning(t);
    let a2 = a3 + 2.0 * s.detunings.level4_splitting;
    let f0 = mu * (mu - a1) * (mu - a2) * (mu - a3);
    let f1 = s2 * (mu * (a2 - mu) + mu * (a3 - mu)) - p2 * (a2 - mu) * (a3 - mu);
    let coefficients = [
        -p2 * a2 * a3,
        -a1 * a2 * a3 + (s2 + p2) * (a2 + a3),
        a1 * a2 + a1 * a3 + a2 * a3 - 2.0 * s2 - p2,
        -(a1 + a2 + a3),
        1.0,
    ];
    Ok(Quartic {
        f: f0 + f1,
        f0,
        f1,
        coefficients,
    })
}

/// The four-level chirped fractional Hamiltonian written with the effective
/// Stokes field: real coupling `|Ω_s1 e^{iφ1} + Ω_s2 e^{i(φ2−φ)}|` and
/// detuning `δ′_e(t) = −δ′ + g(t) − α(t − t_p)` on |4⟩ (|3⟩ sits δ′ higher).
///
/// Under the delay-selection conditions (α = β₁ = β₂ with
/// `(t_d1, t_d2) = (0, −2t_p)` or `(2t_p, 0)`) and φ = 0 it coincides
/// entrywise with [`hamiltonian_at`].
pub fn effective_stokes_hamiltonian_at(s: &ScenarioSpec, t: f64) -> Result<HermitianSample> {
    s.validate()?;
    let s2 = match (s.scheme, s.stokes2) {
        (Scheme::Cfstirap4, Some(s2)) => s2,
        _ => {
            return Err(Error::SchemeMismatch {
                scheme: s.scheme,
                operation: "effective_stokes_hamiltonian_at",
            })
        }
    };
    let e = effective_stokes_offset(&s.stokes1, &s2, -s.phase, t);
    if e.indeterminate {
        return Err(Error::IndeterminatePhase { t });
    }
    let d = -s.detunings.two_photon + e.chirp - s.pump.inst_chirp(t);
    Ok(HermitianSample(s.build(
        s.pump.envelope(t),
        C64::new(e.amplitude, 0.0),
        s.one_photon_detuning(t),
        d,
    )))
}
