//! Instantaneous eigenstates of H(t) followed by continuity, mixing angles,
//! non-adiabatic couplings and avoided-crossing analysis.
//!
//! Dressed state `k` is the eigenvector that starts with the largest weight on
//! bare state |k⟩ and is then followed by maximal overlap, so labels survive
//! level crossings in energy order. Eigenvalues within 1e−12 of each other
//! form a degenerate cluster; inside a cluster each tracked vector is the
//! normalized projection of its predecessor onto the cluster subspace.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};
use crate::hamiltonian::{HamiltonianModel, ScenarioSpec};
use crate::linalg::{eigh, CMat, CVec, C64, MAX_DIM};
use crate::math;
use crate::propagator::Trajectory;
use crate::pulses::PulseSpec;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DressedOptions {
    /// Eigenvalues closer than this are treated as one degenerate cluster.
    pub degeneracy_gap: f64,
    /// Smallest accepted |⟨v_k(t_i)|v_k(t_{i+1})⟩| for a non-degenerate state.
    pub min_overlap: f64,
    /// Interval bisections tried before reporting a continuity failure.
    pub max_refinements: u32,
}

impl Default for DressedOptions {
    fn default() -> Self {
        Self {
            degeneracy_gap: 1e-12,
            min_overlap: 0.9,
            max_refinements: 20,
        }
    }
}

/// Tracked dressed-state data on the trajectory's time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DressedFrame {
    pub dim: usize,
    pub times: Vec<f64>,
    /// λ_k(t), indexed by tracked label.
    pub eigenvalues: Vec<[f64; MAX_DIM]>,
    /// Column `k` is the gauge-fixed eigenvector of label `k`.
    pub eigenvectors: Vec<CMat>,
    /// |⟨λ_k|ψ⟩|².
    pub dressed_populations: Vec<[f64; MAX_DIM]>,
    /// V_kj = |⟨λ_k|Ḣ|λ_j⟩| / |λ_j − λ_k|; zero on the diagonal and inside
    /// degenerate clusters.
    pub couplings: Vec<[[f64; MAX_DIM]; MAX_DIM]>,
    /// Diagonal of H(t): the bare (diabatic) energies.
    pub bare_energies: Vec<[f64; MAX_DIM]>,
    /// The sample contains at least one degenerate cluster.
    pub degenerate: Vec<bool>,
}

impl DressedFrame {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Incoming and outgoing bare energies (first and last samples).
    pub fn bare_asymptotes(&self) -> Option<([f64; MAX_DIM], [f64; MAX_DIM])> {
        Some((*self.bare_energies.first()?, *self.bare_energies.last()?))
    }

    pub fn eigenvalue_series(&self, k: usize) -> Vec<f64> {
        self.eigenvalues.iter().map(|v| v[k]).collect()
    }

    pub fn population_series(&self, k: usize) -> Vec<f64> {
        self.dressed_populations.iter().map(|v| v[k]).collect()
    }

    pub fn coupling_series(&self, i: usize, j: usize) -> Vec<f64> {
        self.couplings.iter().map(|v| v[i][j]).collect()
    }
}

#[derive(Debug, Clone, Copy)]
struct Tracked {
    vectors: CMat,
    values: [f64; MAX_DIM],
    cluster_size: [usize; MAX_DIM],
}

/// Groups ascending eigenvalues into clusters closer than `gap`.
fn clusters(values: &[f64], gap: f64) -> ([usize; MAX_DIM], usize) {
    let mut id = [0usize; MAX_DIM];
    let mut next = 0;
    for k in 1..values.len() {
        if values[k] - values[k - 1] >= gap {
            next += 1;
        }
        id[k] = next;
    }
    (id, next + 1)
}

fn make_largest_component_real(v: &mut CVec) {
    let mut best = 0;
    for k in 1..v.dim {
        if v[k].norm() > v[best].norm() + 1e-14 {
            best = k;
        }
    }
    let z = v[best];
    if z.norm() > 0.0 {
        *v = v.scale(z.conj() / z.norm());
    }
}

/// Projects `target` onto the span of orthonormal `basis`, removes the parts
/// along `taken`, and normalizes. Returns `None` if nothing survives.
fn project(target: &CVec, basis: &[CVec], taken: &[CVec]) -> Option<CVec> {
    let mut out = CVec::zeros(target.dim);
    for b in basis {
        out = out.axpy(b.inner(target), b);
    }
    for q in taken {
        out = out.axpy(-q.inner(&out), q);
    }
    let n = out.norm();
    (n > 1e-8).then(|| out.scale(C64::new(1.0 / n, 0.0)))
}

/// Fills a cluster's leftover directions (labels whose predecessor had no
/// weight there) with an orthonormal completion.
fn complete(basis: &[CVec], taken: &[CVec]) -> CVec {
    let mut best: Option<CVec> = None;
    let mut best_norm = 0.0;
    for b in basis {
        let mut v = *b;
        for q in taken {
            v = v.axpy(-q.inner(&v), q);
        }
        let n = v.norm();
        if n > best_norm {
            best_norm = n;
            best = Some(v.scale(C64::new(1.0 / n, 0.0)));
        }
    }
    best.unwrap_or(basis[0])
}

struct Tracker<'a, M: HamiltonianModel + ?Sized> {
    model: &'a M,
    opts: DressedOptions,
}

impl<M: HamiltonianModel + ?Sized> Tracker<'_, M> {
    fn initial(&self, t: f64) -> Tracked {
        let h = self.model.matrix(t);
        let n = h.dim;
        let eig = eigh(&h);
        let (cid, ncl) = clusters(&eig.values[..n], self.opts.degeneracy_gap);
        // Orthonormal vectors per cluster, aligned to the bare basis where the
        // cluster is degenerate.
        let mut candidates: Vec<(usize, CVec)> = Vec::with_capacity(n);
        for c in 0..ncl {
            let basis: Vec<CVec> = (0..n).filter(|&k| cid[k] == c).map(|k| eig.vector(k)).collect();
            if basis.len() == 1 {
                candidates.push((c, basis[0]));
                continue;
            }
            let mut bare: Vec<(f64, CVec)> = (0..n)
                .map(|k| {
                    let e = CVec::basis(n, k);
                    let w: f64 = basis.iter().map(|b| b.inner(&e).norm_sqr()).sum();
                    (w, e)
                })
                .collect();
            bare.sort_by(|a, b| b.0.total_cmp(&a.0));
            let mut taken: Vec<CVec> = Vec::new();
            for (_, e) in &bare {
                if taken.len() == basis.len() {
                    break;
                }
                if let Some(v) = project(e, &basis, &taken) {
                    taken.push(v);
                }
            }
            while taken.len() < basis.len() {
                let v = complete(&basis, &taken);
                taken.push(v);
            }
            candidates.extend(taken.into_iter().map(|v| (c, v)));
        }
        // Greedy label assignment: label k ↔ candidate with the largest |v_k|².
        let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(n * n);
        for (ci, (_, v)) in candidates.iter().enumerate() {
            for k in 0..n {
                pairs.push((v[k].norm_sqr(), k, ci));
            }
        }
        pairs.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
        let mut label_of = [usize::MAX; MAX_DIM];
        let mut used = [false; MAX_DIM];
        for (_, k, ci) in pairs {
            if label_of[k] == usize::MAX && !used[ci] {
                label_of[k] = ci;
                used[ci] = true;
            }
        }
        let mut vectors = CMat::zeros(n);
        let mut values = [0.0; MAX_DIM];
        let mut cluster = [0usize; MAX_DIM];
        let mut sizes = [0usize; MAX_DIM];
        for k in 0..n {
            let (c, mut v) = candidates[label_of[k]];
            make_largest_component_real(&mut v);
            values[k] = h.sandwich(&v, &v).re;
            vectors.set_column(k, &v);
            cluster[k] = c;
        }
        for k in 0..n {
            sizes[k] = (0..n).filter(|&j| cluster[j] == cluster[k]).count();
        }
        Tracked {
            vectors,
            values,
            cluster_size: sizes,
        }
    }

    /// Matches the eigenvectors at `t` to `prev`; returns the new state and
    /// the worst overlap among non-degenerate labels.
    fn assign(&self, prev: &Tracked, t: f64) -> (Tracked, f64, usize) {
        let h = self.model.matrix(t);
        let n = h.dim;
        let eig = eigh(&h);
        let (cid, ncl) = clusters(&eig.values[..n], self.opts.degeneracy_gap);
        let bases: Vec<Vec<CVec>> = (0..ncl)
            .map(|c| (0..n).filter(|&k| cid[k] == c).map(|k| eig.vector(k)).collect())
            .collect();
        let prev_vecs: Vec<CVec> = (0..n).map(|k| prev.vectors.column(k)).collect();

        let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(n * ncl);
        for (i, p) in prev_vecs.iter().enumerate() {
            for (c, basis) in bases.iter().enumerate() {
                let w: f64 = basis.iter().map(|b| b.inner(p).norm_sqr()).sum();
                pairs.push((w, i, c));
            }
        }
        pairs.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
        let mut cluster_of = [usize::MAX; MAX_DIM];
        let mut capacity: Vec<usize> = bases.iter().map(|b| b.len()).collect();
        for (_, i, c) in pairs {
            if cluster_of[i] == usize::MAX && capacity[c] > 0 {
                cluster_of[i] = c;
                capacity[c] -= 1;
            }
        }

        let mut vectors = CMat::zeros(n);
        let mut values = [0.0; MAX_DIM];
        let mut sizes = [0usize; MAX_DIM];
        let mut worst = 1.0f64;
        let mut worst_label = 0;
        for (c, basis) in bases.iter().enumerate() {
            let mut labels: Vec<(f64, usize)> = (0..n)
                .filter(|&i| cluster_of[i] == c)
                .map(|i| {
                    let w: f64 = basis.iter().map(|b| b.inner(&prev_vecs[i]).norm_sqr()).sum();
                    (w, i)
                })
                .collect();
            labels.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
            let mut taken: Vec<CVec> = Vec::new();
            for &(_, i) in &labels {
                let v = project(&prev_vecs[i], basis, &taken).unwrap_or_else(|| complete(basis, &taken));
                // Gauge: overlap with the predecessor real and positive.
                let ov = v.inner(&prev_vecs[i]);
                let v = if ov.norm() > 0.0 { v.scale(ov / ov.norm()) } else { v };
                taken.push(v);
                let overlap = prev_vecs[i].inner(&v).norm();
                if basis.len() == 1 && prev.cluster_size[i] == 1 && overlap < worst {
                    worst = overlap;
                    worst_label = i;
                }
                values[i] = h.sandwich(&v, &v).re;
                vectors.set_column(i, &v);
                sizes[i] = basis.len();
            }
        }
        (
            Tracked {
                vectors,
                values,
                cluster_size: sizes,
            },
            worst,
            worst_label,
        )
    }

    fn advance(&self, prev: &Tracked, t0: f64, t1: f64, depth: u32) -> Result<Tracked> {
        let (next, worst, label) = self.assign(prev, t1);
        if worst >= self.opts.min_overlap {
            return Ok(next);
        }
        if depth == 0 {
            return Err(Error::ContinuityFailure {
                t: t1,
                state: label + 1,
                overlap: worst,
            });
        }
        let mid = 0.5 * (t0 + t1);
        let half = self.advance(prev, t0, mid, depth - 1)?;
        self.advance(&half, mid, t1, depth - 1)
    }
}

/// Dressed frame of a scenario along a propagated trajectory.
pub fn dressed_frame(s: &ScenarioSpec, tr: &Trajectory) -> Result<DressedFrame> {
    s.validate()?;
    dressed_frame_model(s, tr, &DressedOptions::default())
}

/// Dressed frame of any Hamiltonian model on the trajectory's time grid.
pub fn dressed_frame_model<M: HamiltonianModel + ?Sized>(
    model: &M,
    tr: &Trajectory,
    opts: &DressedOptions,
) -> Result<DressedFrame> {
    let n = model.dim();
    if tr.dim != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: tr.dim,
        });
    }
    if tr.is_empty() {
        return Err(Error::EmptyTrajectory);
    }
    let tracker = Tracker { model, opts: *opts };
    let len = tr.len();
    let mut frame = DressedFrame {
        dim: n,
        times: tr.times.clone(),
        eigenvalues: Vec::with_capacity(len),
        eigenvectors: Vec::with_capacity(len),
        dressed_populations: Vec::with_capacity(len),
        couplings: Vec::with_capacity(len),
        bare_energies: Vec::with_capacity(len),
        degenerate: Vec::with_capacity(len),
    };

    let mut state = tracker.initial(tr.times[0]);
    for k in 0..len {
        let t = tr.times[k];
        if k > 0 {
            let t_prev = tr.times[k - 1];
            if t <= t_prev {
                return Err(Error::NonMonotoneTime { t, previous: t_prev });
            }
            state = tracker.advance(&state, t_prev, t, opts.max_refinements)?;
        }
        let h = model.matrix(t);
        let hdot = model.rate(t);
        let psi = &tr.amplitudes[k];
        let vecs: Vec<CVec> = (0..n).map(|i| state.vectors.column(i)).collect();
        let mut pops = [0.0; MAX_DIM];
        let mut bare = [0.0; MAX_DIM];
        let mut v = [[0.0; MAX_DIM]; MAX_DIM];
        for i in 0..n {
            pops[i] = vecs[i].inner(psi).norm_sqr();
            bare[i] = h[(i, i)].re;
            for j in (i + 1)..n {
                let gap = (state.values[j] - state.values[i]).abs();
                if gap < opts.degeneracy_gap {
                    continue;
                }
                let c = hdot.sandwich(&vecs[i], &vecs[j]).norm() / gap;
                v[i][j] = c;
                v[j][i] = c;
            }
        }
        frame.eigenvalues.push(state.values);
        frame.eigenvectors.push(state.vectors);
        frame.dressed_populations.push(pops);
        frame.couplings.push(v);
        frame.bare_energies.push(bare);
        frame.degenerate.push(state.cluster_size[..n].iter().any(|&c| c > 1));
    }
    Ok(frame)
}

/// Mixing angles of the three-level dressed basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixingAngles {
    /// tan θ = Ω_p / |Ω_s|.
    pub theta: f64,
    /// tan 2φ = √(Ω_p² + |Ω_s|²) / Δ(t).
    pub phi: f64,
}

/// θ(t) and φ(t) from the pump envelope and the modulus of the Stokes
/// coupling. With both fields zero θ = 0.
pub fn mixing_angles(s: &ScenarioSpec, t: f64) -> MixingAngles {
    let p = s.pump.envelope(t);
    let q = s.stokes_coupling(t).0.norm();
    MixingAngles {
        theta: math::atan2(p, q),
        phi: 0.5 * math::atan2(math::hypot(p, q), s.one_photon_detuning(t)),
    }
}

/// Mixing angles over increasing times; where both fields vanish θ keeps
/// its previous value.
pub fn mixing_angle_series(s: &ScenarioSpec, times: &[f64]) -> Vec<MixingAngles> {
    let mut out: Vec<MixingAngles> = Vec::with_capacity(times.len());
    for &t in times {
        let mut m = mixing_angles(s, t);
        let r = math::hypot(s.pump.envelope(t), s.stokes_coupling(t).0.norm());
        if r < 1e-300 {
            if let Some(prev) = out.last() {
                m.theta = prev.theta;
            }
        }
        out.push(m);
    }
    out
}

/// The unitary T(θ, φ) whose columns are the dressed states (λ₊, λ₀, λ₋) of
/// the resonant three-level system in the bare basis.
pub fn rotation_matrix(theta: f64, phi: f64) -> CMat {
    let (st, ct) = (math::sin(theta), math::cos(theta));
    let (sp, cp) = (math::sin(phi), math::cos(phi));
    CMat::from_real(&[&[st * sp, ct, st * cp], &[cp, 0.0, -sp], &[ct * sp, -st, ct * cp]])
}

/// cos θ |1⟩ − sin θ |3⟩.
pub fn dark_state(theta: f64) -> CVec {
    let mut v = CVec::zeros(3);
    v[0] = C64::new(math::cos(theta), 0.0);
    v[2] = C64::new(-math::sin(theta), 0.0);
    v
}

/// dθ/dt = (Ω_s Ω̇_p − Ω_p Ω̇_s)/(Ω_p² + Ω_s²), the exact derivative of
/// θ = atan(Ω_p/Ω_s). Zero where both envelopes vanish.
pub fn theta_dot(pump: &PulseSpec, stokes: &PulseSpec, t: f64) -> f64 {
    let (p, q) = (pump.envelope(t), stokes.envelope(t));
    let r = math::hypot(p, q);
    if r < 1e-300 {
        return 0.0;
    }
    ((q / r) * pump.envelope_rate(t) - (p / r) * stokes.envelope_rate(t)) / r
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossingOptions {
    /// Only gap minima below this value are reported [ω].
    pub threshold: f64,
    /// Minima below this value are exact crossings and are skipped.
    pub degeneracy_gap: f64,
}

impl Default for CrossingOptions {
    fn default() -> Self {
        Self {
            threshold: 0.05,
            degeneracy_gap: 1e-12,
        }
    }
}

/// One avoided crossing between tracked dressed states `pair.0 < pair.1`
/// (zero-based labels).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossingReport {
    pub pair: (usize, usize),
    /// Time of closest approach t_a.
    pub time: f64,
    /// min |λ_i − λ_j| [ω].
    pub gap: f64,
    /// Asymptotic |d/dt(λ_i − λ_j)| on either side of the crossing [ω²].
    pub gap_slope: f64,
    /// Largest sampled V_ij near t_a.
    pub coupling_peak: f64,
    /// Landau–Zener probability from the coupling peak (see [`landau_zener`]).
    pub p_lz: f64,
    /// Landau–Zener probability from gap and slope (see [`landau_zener_diabatic`]).
    pub p_lz_gap: f64,
    /// Half width at half maximum of the ideal Lorentzian coupling, gap/slope.
    pub lorentz_hwhm: f64,
    pub lorentz_fwhm: f64,
    /// Trapezoidal ∫V_ij dt over t_a ± 50 half widths (π/2 for an isolated
    /// two-level crossing).
    pub coupling_area: f64,
}

/// `exp(−4π² V_peak² / |slope|)`, clamped to [0, 1]. A zero slope returns 0.
pub fn landau_zener(cr: &CrossingReport) -> f64 {
    if cr.gap_slope == 0.0 {
        return 0.0;
    }
    let p = math::exp(-4.0 * PI * PI * cr.coupling_peak * cr.coupling_peak / cr.gap_slope.abs());
    p.clamp(0.0, 1.0)
}

/// `exp(−π·gap² / (2|slope|))`: the two-level diabatic-passage probability
/// with gap and slope measured on the adiabatic energies. A zero slope
/// returns 0.
pub fn landau_zener_diabatic(cr: &CrossingReport) -> f64 {
    if cr.gap_slope == 0.0 {
        return 0.0;
    }
    math::exp(-PI * cr.gap * cr.gap / (2.0 * cr.gap_slope.abs())).clamp(0.0, 1.0)
}

/// Local minima of every pairwise gap, refined by a three-point quadratic
/// fit of gap² (exact for a hyperbolic avoided crossing).
pub fn find_avoided_crossings(df: &DressedFrame, opts: &CrossingOptions) -> Vec<CrossingReport> {
    let n = df.dim;
    let len = df.len();
    let mut out = Vec::new();
    if len < 3 {
        return out;
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let gap: Vec<f64> = df.eigenvalues.iter().map(|v| (v[i] - v[j]).abs()).collect();
            for k in 1..len - 1 {
                let g = gap[k];
                if !(g < gap[k - 1] && g <= gap[k + 1]) {
                    continue;
                }
                if g >= opts.threshold || g < opts.degeneracy_gap {
                    continue;
                }
                let (t0, t1, t2) = (df.times[k - 1], df.times[k], df.times[k + 1]);
                let (y0, y1, y2) = (gap[k - 1] * gap[k - 1], g * g, gap[k + 1] * gap[k + 1]);
                // Newton divided differences.
                let d01 = (y1 - y0) / (t1 - t0);
                let d12 = (y2 - y1) / (t2 - t1);
                let a = (d12 - d01) / (t2 - t0);
                let (time, gap_min, slope) = if a > 0.0 {
                    let b = d01 - a * (t0 + t1);
                    let tv = (-b / (2.0 * a)).clamp(t0, t2);
                    let yv = y1 + (tv - t1) * (d01 + a * (tv - t0));
                    (tv, math::sqrt(yv.max(0.0)).min(g), math::sqrt(a))
                } else {
                    (
                        t1,
                        g,
                        0.5 * ((gap[k + 1] - g) / (t2 - t1) + (gap[k - 1] - g) / (t1 - t0)).abs(),
                    )
                };
                let h = 0.5 * (t2 - t0);
                let hwhm = if slope > 0.0 { gap_min / slope } else { f64::INFINITY };
                let near = (3.0 * hwhm).max(2.0 * h);
                let mut peak = 0.0f64;
                for (m, &t) in df.times.iter().enumerate() {
                    if (t - time).abs() <= near {
                        peak = peak.max(df.couplings[m][i][j]);
                    }
                }
                let wide = (50.0 * hwhm).max(2.0 * h);
                let mut area = 0.0;
                for m in 1..len {
                    let (ta, tb) = (df.times[m - 1], df.times[m]);
                    if (ta - time).abs() <= wide && (tb - time).abs() <= wide {
                        area += 0.5 * (tb - ta) * (df.couplings[m - 1][i][j] + df.couplings[m][i][j]);
                    }
                }
                let mut cr = CrossingReport {
                    pair: (i, j),
                    time,
                    gap: gap_min,
                    gap_slope: slope,
                    coupling_peak: peak,
                    p_lz: 0.0,
                    p_lz_gap: 0.0,
                    lorentz_hwhm: hwhm,
                    lorentz_fwhm: 2.0 * hwhm,
                    coupling_area: area,
                };
                cr.p_lz = landau_zener(&cr);
                cr.p_lz_gap = landau_zener_diabatic(&cr);
                out.push(cr);
            }
        }
    }
    out.sort_by(|a, b| a.time.total_cmp(&b.time).then(a.pair.cmp(&b.pair)));
    out
}

/// Uniform sample times on [a, b] (both included), for building frames
/// without a propagated state.
pub fn uniform_times(a: f64, b: f64, samples: usize) -> Vec<f64> {
    let n = samples.max(2);
    (0..n)
        .map(|k| {
            if k + 1 == n {
                b
            } else {
                a + (b - a) * k as f64 / (n - 1) as f64
            }
        })
        .collect()
}

/// A trajectory placeholder carrying only times (amplitudes set to |1⟩), for
/// spectra where dressed populations are not needed.
pub fn static_trajectory(dim: usize, times: Vec<f64>) -> Trajectory {
    let amplitudes = vec![CVec::basis(dim, 0); times.len()];
    Trajectory { dim, times, amplitudes }
}
