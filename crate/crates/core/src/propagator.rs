//! Adaptive Dormand–Prince 5(4) integration of `i dψ/dt = H(t)ψ`.
//!
//! Steps are clipped to land on a uniform output grid; the step-size proposal
//! is kept across clipped steps so dense sampling does not slow the
//! integration down more than necessary.

use alloc::string::ToString;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};
use crate::hamiltonian::{HamiltonianModel, ScenarioSpec};
use crate::linalg::{CVec, C64, MAX_DIM};
use crate::math;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagateOptions {
    /// Relative tolerance, within [1e−12, 1e−6].
    pub rtol: f64,
    pub atol: f64,
    /// Number of uniform output times including both ends (≥ 2).
    pub samples: usize,
    pub max_steps: usize,
}

impl Default for PropagateOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-9,
            atol: 1e-12,
            samples: 2001,
            max_steps: 5_000_000,
        }
    }
}

impl PropagateOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            rtol: tol,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(1e-12..=1e-6).contains(&self.rtol) {
            return Err(Error::invalid("tol", "relative tolerance must lie in [1e-12, 1e-6]"));
        }
        if !(self.atol.is_finite() && self.atol > 0.0) {
            return Err(Error::invalid("atol", "must be finite and > 0"));
        }
        if self.samples < 2 {
            return Err(Error::invalid("samples", "need at least 2 output times"));
        }
        Ok(())
    }
}

/// Sampled solution of the Schrödinger equation.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub dim: usize,
    pub times: Vec<f64>,
    pub amplitudes: Vec<CVec>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// ρ_ii at sample `k` (zero-based level index).
    pub fn population(&self, k: usize, i: usize) -> f64 {
        self.amplitudes[k][i].norm_sqr()
    }

    /// ρ_ij = a_i·conj(a_j) at sample `k`.
    pub fn coherence(&self, k: usize, i: usize, j: usize) -> C64 {
        let a = &self.amplitudes[k];
        a[i] * a[j].conj()
    }

    pub fn norm(&self, k: usize) -> f64 {
        self.amplitudes[k].norm()
    }

    /// Time series of ρ_ii.
    pub fn populations(&self, i: usize) -> Vec<f64> {
        (0..self.len()).map(|k| self.population(k, i)).collect()
    }

    pub fn max_norm_drift(&self) -> f64 {
        (0..self.len()).fold(0.0f64, |m, k| m.max((self.norm(k) - 1.0).abs()))
    }
}

/// A scalar read off the final state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Observable {
    /// ρ_ii, zero-based.
    Population(usize),
    /// |ρ_ij|, zero-based, i < j.
    Coherence(usize, usize),
}

impl Observable {
    /// Highest zero-based level index the observable touches.
    pub fn max_level(&self) -> usize {
        match *self {
            Observable::Population(i) => i,
            Observable::Coherence(i, j) => i.max(j),
        }
    }

    pub fn is_coherence(&self) -> bool {
        matches!(self, Observable::Coherence(..))
    }

    pub fn evaluate(&self, fo: &FinalObservables) -> f64 {
        match *self {
            Observable::Population(i) => fo.populations[i],
            Observable::Coherence(i, j) => fo.coherences[i][j],
        }
    }
}

impl fmt::Display for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Observable::Population(i) => write!(f, "rho{}{}", i + 1, i + 1),
            Observable::Coherence(i, j) => write!(f, "abs_rho{}{}", i + 1, j + 1),
        }
    }
}

impl FromStr for Observable {
    type Err = Error;

    /// Accepts `rhoII` for populations and `abs_rhoIJ`, `|rhoIJ|` or `rhoIJ`
    /// (i ≠ j) for coherence magnitudes, with one-based level digits.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::UnknownObservable(s.to_string());
        let body = s
            .strip_prefix("abs_rho")
            .or_else(|| s.strip_prefix("|rho").and_then(|r| r.strip_suffix('|')))
            .or_else(|| s.strip_prefix("rho"))
            .ok_or_else(bad)?;
        let digits: Vec<usize> = body
            .chars()
            .map(|c| c.to_digit(10).map(|d| d as usize))
            .collect::<Option<_>>()
            .ok_or_else(bad)?;
        let (i, j) = match digits.as_slice() {
            [i, j] if (1..=MAX_DIM).contains(i) && (1..=MAX_DIM).contains(j) => (i - 1, j - 1),
            _ => return Err(bad()),
        };
        if i == j {
            if s.starts_with("rho") {
                Ok(Observable::Population(i))
            } else {
                Err(bad())
            }
        } else {
            Ok(Observable::Coherence(i.min(j), i.max(j)))
        }
    }
}

/// Populations and coherence magnitudes of the last sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FinalObservables {
    pub dim: usize,
    pub time: f64,
    pub populations: [f64; MAX_DIM],
    /// |ρ_ij|, symmetric, diagonal holds ρ_ii.
    pub coherences: [[f64; MAX_DIM]; MAX_DIM],
    pub norm: f64,
}

impl FinalObservables {
    pub fn get(&self, obs: Observable) -> f64 {
        obs.evaluate(self)
    }
}

pub fn final_observables(tr: &Trajectory) -> Result<FinalObservables> {
    let k = tr.len().checked_sub(1).ok_or(Error::EmptyTrajectory)?;
    let mut populations = [0.0; MAX_DIM];
    let mut coherences = [[0.0; MAX_DIM]; MAX_DIM];
    for i in 0..tr.dim {
        populations[i] = tr.population(k, i);
        for (j, c) in coherences[i].iter_mut().enumerate().take(tr.dim) {
            *c = tr.coherence(k, i, j).norm();
        }
    }
    Ok(FinalObservables {
        dim: tr.dim,
        time: tr.times[k],
        populations,
        coherences,
        norm: tr.norm(k),
    })
}

/// Propagates a scenario over its window with relative tolerance `tol`.
pub fn propagate(s: &ScenarioSpec, tol: f64) -> Result<Trajectory> {
    propagate_with(s, &PropagateOptions::with_tol(tol))
}

pub fn propagate_with(s: &ScenarioSpec, opts: &PropagateOptions) -> Result<Trajectory> {
    s.validate()?;
    propagate_model(s, s.t_start, s.t_end, s.initial_state, opts)
}

// Dormand–Prince 5(4) tableau.
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// Fifth-order weights minus embedded fourth-order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

#[inline]
fn deriv<M: HamiltonianModel + ?Sized>(model: &M, t: f64, y: &CVec) -> CVec {
    // dψ/dt = −i H ψ
    let hy = model.matrix(t).mul_vec(y);
    let mut out = hy;
    for z in out.data[..y.dim].iter_mut() {
        *z = C64::new(z.im, -z.re);
    }
    out
}

#[inline]
fn combo(y: &CVec, h: f64, terms: &[(f64, &CVec)]) -> CVec {
    let mut out = *y;
    for i in 0..y.dim {
        let mut acc = C64::new(0.0, 0.0);
        for (c, k) in terms {
            acc += k.data[i] * *c;
        }
        out.data[i] += acc * h;
    }
    out
}

/// Integrates `model` from `t_start` to `t_end` starting at `psi0`.
pub fn propagate_model<M: HamiltonianModel + ?Sized>(
    model: &M,
    t_start: f64,
    t_end: f64,
    psi0: CVec,
    opts: &PropagateOptions,
) -> Result<Trajectory> {
    opts.validate()?;
    let n = model.dim();
    if psi0.dim != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: psi0.dim,
        });
    }
    if !(t_start.is_finite() && t_end.is_finite() && t_start < t_end) {
        return Err(Error::invalid("t_start", "need finite t_start < t_end"));
    }
    let samples = opts.samples;
    let span = t_end - t_start;
    let out_time = |k: usize| {
        if k + 1 == samples {
            t_end
        } else {
            t_start + span * (k as f64) / ((samples - 1) as f64)
        }
    };
    let norm0 = psi0.norm();

    let mut times = Vec::with_capacity(samples);
    let mut amplitudes = Vec::with_capacity(samples);
    times.push(t_start);
    amplitudes.push(psi0);

    let mut t = t_start;
    let mut y = psi0;
    let mut k1 = deriv(model, t, &y);
    // Initial step from the local coupling scale.
    let mut h = {
        let scale = k1.norm().max(model.matrix(t).max_abs()).max(1e-3);
        (0.01 / scale).min(span / (samples - 1) as f64)
    };
    let mut steps = 0usize;
    let mut err_prev = 1e-4f64;

    for k in 1..samples {
        let target = out_time(k);
        while t < target {
            if steps >= opts.max_steps {
                return Err(Error::TooManySteps { t, steps });
            }
            let clipped = t + h >= target;
            let hs = if clipped { target - t } else { h };
            if hs < 1e-12 * t.abs().max(1.0) && !clipped {
                return Err(Error::StepUnderflow { t, step: hs });
            }
            let k2 = deriv(model, t + C2 * hs, &combo(&y, hs, &[(A21, &k1)]));
            let k3 = deriv(model, t + C3 * hs, &combo(&y, hs, &[(A31, &k1), (A32, &k2)]));
            let k4 = deriv(
                model,
                t + C4 * hs,
                &combo(&y, hs, &[(A41, &k1), (A42, &k2), (A43, &k3)]),
            );
            let k5 = deriv(
                model,
                t + C5 * hs,
                &combo(&y, hs, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
            );
            let t_new = if clipped { target } else { t + hs };
            let k6 = deriv(
                model,
                t + hs,
                &combo(&y, hs, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
            );
            let y_new = combo(&y, hs, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)]);
            let k7 = deriv(model, t_new, &y_new);
            steps += 1;

            let mut acc = 0.0;
            for i in 0..n {
                let e = (k1.data[i] * E1
                    + k3.data[i] * E3
                    + k4.data[i] * E4
                    + k5.data[i] * E5
                    + k6.data[i] * E6
                    + k7.data[i] * E7)
                    * hs;
                let sc = opts.atol + opts.rtol * y.data[i].norm().max(y_new.data[i].norm());
                acc += (e.re / sc) * (e.re / sc) + (e.im / sc) * (e.im / sc);
            }
            let err = math::sqrt(acc / (2 * n) as f64);

            if err <= 1.0 {
                t = t_new;
                y = y_new;
                k1 = k7;
                // PI step control.
                let err_c = err.max(1e-10);
                let fac = 0.9 * math::powf(err_c, -0.7 / 5.0) * math::powf(err_prev, 0.4 / 5.0);
                let fac = fac.clamp(0.2, 5.0);
                err_prev = err_c;
                // A step shortened only to hit an output time keeps the old proposal.
                if !clipped || hs >= h {
                    h = hs * fac;
                } else {
                    h = h.max(hs * fac);
                }
            } else {
                let fac = (0.9 * math::powf(err, -1.0 / 5.0)).clamp(0.2, 1.0);
                h = hs * fac;
                if h < 1e-12 * t.abs().max(1.0) {
                    return Err(Error::StepUnderflow { t, step: h });
                }
            }
        }
        let drift = (y.norm() - norm0).abs();
        if drift > 1e-6 {
            return Err(Error::NormDrift { t, drift });
        }
        times.push(t);
        amplitudes.push(y);
    }

    Ok(Trajectory {
        dim: n,
        times,
        amplitudes,
    })
}
