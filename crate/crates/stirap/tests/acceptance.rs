//! Acceptance criteria, one PASS/FAIL line each. Exits nonzero when any fails.

use std::f64::consts::FRAC_PI_2;
use std::process::ExitCode;
use std::time::Instant;

use stirap::stirap_core::dressed::static_trajectory;
use stirap::stirap_core::{
    analytic_dressed_energies_3lvl, dressed_frame, eigh, final_observables, find_avoided_crossings, hamiltonian_at,
    propagate, propagate_with, quartic_eval, rotation_matrix, CMat, CrossingOptions, DressedFrame, FinalObservables,
    Observable, ScenarioSpec, Scheme, SweepAxis, SweepParam, SweepResult, C64,
};
use stirap::{preset_configs, run_scan, run_sweep, PresetOptions, RunConfig};

type Outcome = (bool, String);
type Criterion = (&'static str, &'static str, fn() -> Outcome);

fn config(id: &str, job: &str) -> RunConfig {
    preset_configs(id, &PresetOptions::default())
        .unwrap()
        .into_iter()
        .find(|(name, _)| *name == job)
        .unwrap_or_else(|| panic!("{id} has no job {job}"))
        .1
}

fn finals(c: &RunConfig) -> FinalObservables {
    final_observables(&propagate_with(&c.scenario, &c.options).unwrap()).unwrap()
}

fn frame(c: &RunConfig) -> DressedFrame {
    dressed_frame(&c.scenario, &propagate_with(&c.scenario, &c.options).unwrap()).unwrap()
}

fn sweep(c: &RunConfig) -> SweepResult {
    run_sweep(&c.sweep_plan().unwrap(), None).unwrap()
}

/// Highest occupation any single tracked dressed state keeps for the whole run.
fn single_state_occupation(df: &DressedFrame) -> f64 {
    (0..df.dim)
        .map(|k| df.population_series(k).into_iter().fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max)
}

fn at(c: &RunConfig, param: SweepParam, value: f64, obs: Observable) -> f64 {
    let mut s = c.scenario.clone();
    param.apply(&mut s, value, true).unwrap();
    final_observables(&propagate_with(&s, &c.options).unwrap())
        .unwrap()
        .get(obs)
}

/// Values of the observable against the α nearest to `slope·δ`, one per
/// δ column with |δ| ≤ 0.15.
fn on_line(r: &SweepResult, slope: f64) -> Vec<(f64, f64, f64)> {
    let (xs, ys) = (r.x.values(), r.y.values());
    let mut out = Vec::new();
    for (ix, &d) in xs.iter().enumerate() {
        if d.abs() > 0.15 + 1e-12 {
            continue;
        }
        let iy = (0..ys.len())
            .min_by(|&a, &b| (ys[a] - slope * d).abs().total_cmp(&(ys[b] - slope * d).abs()))
            .unwrap();
        out.push((d, ys[iy], r.at(ix, iy)));
    }
    out
}

fn c1() -> Outcome {
    let started = Instant::now();
    let f = finals(&config("fig2", "scan"));
    let p = f.get(Observable::Population(2));
    (
        p >= 0.99,
        format!("rho33 = {p:.6} ({:.2} s)", started.elapsed().as_secs_f64()),
    )
}

fn c2() -> Outcome {
    let c = config("fig2", "scan");
    let obs = Observable::Population(2);
    let axis = SweepAxis::new(SweepParam::TauDelta, -6.0, 6.0, 121);
    let scan: Vec<f64> = run_scan(&c.scenario, &axis, &c.options, None)
        .unwrap()
        .into_iter()
        .map(|r| r.unwrap().get(obs))
        .collect();
    let max = scan.iter().copied().fold(f64::MIN, f64::max);
    let p0 = at(&c, SweepParam::TauDelta, 0.0, obs);
    let p5 = at(&c, SweepParam::TauDelta, 5.0, obs);
    (
        p0 >= max - 1e-9 && p5 < 0.5 * p0,
        format!(
            "rho33(0) = {p0:.6}, max over scan = {max:.6}, rho33(5) = {p5:.6}, ratio = {:.4}",
            p5 / p0
        ),
    )
}

fn c3() -> Outcome {
    let mut ok = true;
    let mut detail = Vec::new();
    for id in ["fig3ab", "fig3cd"] {
        let c = config(id, "main");
        let tr = propagate_with(&c.scenario, &c.options).unwrap();
        let df = dressed_frame(&c.scenario, &tr).unwrap();
        // The dark state is the label that stays at zero energy.
        let dark = (0..df.dim)
            .min_by(|&a, &b| {
                let peak = |k: usize| df.eigenvalue_series(k).iter().fold(0.0f64, |m, v| m.max(v.abs()));
                peak(a).total_cmp(&peak(b))
            })
            .unwrap();
        let dark_min = df.population_series(dark).into_iter().fold(f64::INFINITY, f64::min);
        let p = final_observables(&tr).unwrap().get(Observable::Population(2));
        ok &= p >= 0.99 && dark_min >= 0.98;
        detail.push(format!("{id}: rho33 = {p:.6}, min dark population = {dark_min:.6}"));
    }
    (ok, detail.join("; "))
}

fn c4() -> Outcome {
    let r = sweep(&config("fig4", "main"));
    let line = on_line(&r, 1.0 / 140.0);
    let worst = line.iter().map(|c| c.2).fold(f64::INFINITY, f64::min);
    let (xs, ys) = (r.x.values(), r.y.values());
    let mut off = Vec::new();
    for (iy, &a) in ys.iter().enumerate() {
        for (ix, &d) in xs.iter().enumerate() {
            if (a - d / 140.0).abs() > 5e-4 {
                off.push(r.at(ix, iy));
            }
        }
    }
    let off_mean = off.iter().sum::<f64>() / off.len() as f64;
    (
        worst >= 0.95 && off_mean <= 0.5 && r.failures.is_empty(),
        format!(
            "min on-line rho33 = {worst:.4} over {} cells; mean off-line rho33 = {off_mean:.4} over {} cells",
            line.len(),
            off.len()
        ),
    )
}

fn c5() -> Outcome {
    let b = finals(&config("fig6b", "main"));
    let c = finals(&config("fig6c", "main"));
    let (b3, b4) = (b.populations[2], b.populations[3]);
    let (c3, c4) = (c.populations[2], c.populations[3]);
    (
        b4 >= 0.9 && b3 <= 0.05 && c3 >= 0.9 && c4 <= 0.05,
        format!("alpha>0: rho44 = {b4:.4}, rho33 = {b3:.4}; alpha<0: rho33 = {c3:.4}, rho44 = {c4:.4}"),
    )
}

fn c6() -> Outcome {
    let c = config("fig8-9", "negative");
    let df = frame(&c);
    let found: Vec<_> = find_avoided_crossings(&df, &CrossingOptions::default())
        .into_iter()
        .filter(|x| x.pair == (2, 3))
        .collect();
    let Some(x) = found
        .iter()
        .min_by(|a, b| (a.time - 198.1).abs().total_cmp(&(b.time - 198.1).abs()))
    else {
        return (false, "no (lambda3, lambda4) avoided crossing found".into());
    };
    let rel = |v: f64, want: f64| ((v - want) / want).abs();
    (
        (x.time - 198.1).abs() <= 5.0 && rel(x.gap, 8e-4) <= 0.2 && rel(x.gap_slope.abs(), 3.48e-4) <= 0.2,
        format!(
            "t_a = {:.2}, gap = {:.4e}, |slope| = {:.4e}",
            x.time,
            x.gap,
            x.gap_slope.abs()
        ),
    )
}

fn c7() -> Outcome {
    let c = config("fig8-9", "delayed");
    let axis = SweepAxis::new(SweepParam::Alpha, -2e-3, 2e-3, 81);
    let worst = run_scan(&c.scenario, &axis, &c.options, None)
        .unwrap()
        .into_iter()
        .map(|r| r.unwrap().populations[2])
        .fold(f64::INFINITY, f64::min);
    (worst >= 0.95, format!("min rho33 over 81 chirp rates = {worst:.4}"))
}

fn c8() -> Outcome {
    let f = finals(&config("fig11", "main"));
    let (coh, p2) = (f.get(Observable::Coherence(0, 2)), f.populations[1]);
    let c = config("fig12", "scan");
    let obs = Observable::Coherence(0, 2);
    let ratio = at(&c, SweepParam::TauDelta, 5.0, obs) / at(&c, SweepParam::TauDelta, 0.0, obs);
    (
        (0.48..=0.5).contains(&coh) && p2 <= 0.01 && ratio <= 0.55,
        format!("|rho13| = {coh:.6}, rho22 = {p2:.2e}, coherence ratio at tau*delta = 5: {ratio:.4}"),
    )
}

fn c9() -> Outcome {
    let coh = finals(&config("fig13", "main")).get(Observable::Coherence(0, 2));
    let r = sweep(&config("fig14", "main"));
    let xs = r.x.values();
    let regions = r.regions_at_least(0.45);
    let (lo, hi, cells) = regions.first().map_or((f64::NAN, f64::NAN, 0), |reg| {
        let d = reg.iter().map(|&(ix, _)| xs[ix]);
        (
            d.clone().fold(f64::INFINITY, f64::min),
            d.fold(f64::MIN, f64::max),
            reg.len(),
        )
    });
    (
        coh >= 0.45 && lo == 0.0 && hi >= 30.0,
        format!("|rho13| = {coh:.4}; largest |rho13| >= 0.45 region: {cells} cells, delay {lo} to {hi}"),
    )
}

fn c10() -> Outcome {
    let r = sweep(&config("fig16", "main"));
    let line = on_line(&r, 1.0 / 140.0);
    let worst = line.iter().map(|c| c.2).fold(f64::INFINITY, f64::min);
    (
        worst >= 0.45 && r.failures.is_empty(),
        format!("min on-line |rho13| = {worst:.4} over {} cells", line.len()),
    )
}

fn c11() -> Outcome {
    let b = finals(&config("fig17b", "main"));
    let c = finals(&config("fig17c", "main"));
    let (b14, b33) = (b.get(Observable::Coherence(0, 3)), b.populations[2]);
    let (c13, c44) = (c.get(Observable::Coherence(0, 2)), c.populations[3]);
    let occ14 = single_state_occupation(&frame(&config("fig19", "rho14")));
    let occ13 = single_state_occupation(&frame(&config("fig19", "rho13")));
    (
        b14 >= 0.45 && b33 <= 0.02 && c13 >= 0.45 && c44 <= 0.02 && occ14 >= 0.95 && occ13 >= 0.95,
        format!(
            "|rho14| = {b14:.4}, rho33 = {b33:.2e}; |rho13| = {c13:.4}, rho44 = {c44:.2e}; \
             dressed occupation {occ14:.4} / {occ13:.4}"
        ),
    )
}

fn c12() -> Outcome {
    let mut failed = Vec::new();
    let mut check = |name: &str, ok: bool| {
        if !ok {
            failed.push(name.to_string());
        }
    };
    let times: Vec<f64> = (0..=52).map(|k| -470.0 + 20.0 * k as f64).collect();
    let all = [
        ScenarioSpec::standard(Scheme::Stirap3).with_detunings(0.02, 0.05),
        ScenarioSpec::standard(Scheme::Cstirap3)
            .with_detunings(0.0, 0.14)
            .with_chirps(1e-3, 1e-3),
        ScenarioSpec::standard(Scheme::Cstirap4)
            .with_detunings(0.0, 0.14)
            .with_chirps(-1e-3, -1e-3),
        ScenarioSpec::standard(Scheme::Fstirap3).with_detunings(0.0, 0.03),
        ScenarioSpec::standard(Scheme::Fstirap3SingleStokes),
        ScenarioSpec::standard(Scheme::Cfstirap3)
            .with_detunings(0.0, 0.14)
            .with_fractional_chirps(1e-3, 1e-3, 1e-3, 0.0, -140.0),
        ScenarioSpec::standard(Scheme::Cfstirap4)
            .with_detunings(0.0, 0.14)
            .with_fractional_chirps(1e-3, 1e-3, 1e-3, 140.0, 0.0),
    ];

    let herm = all
        .iter()
        .flat_map(|s| {
            times
                .iter()
                .map(move |&t| hamiltonian_at(s, t).unwrap().matrix().hermiticity_defect())
        })
        .fold(0.0, f64::max);
    check("hermiticity", herm <= 1e-14);

    let drift = all
        .iter()
        .map(|s| propagate(s, 1e-9).unwrap().max_norm_drift())
        .fold(0.0, f64::max);
    check("norm", drift <= 1e-6);

    let mut eig = 0.0f64;
    for (wp, ws, d) in [(0.3, 1.2, 0.0), (1.0, 1.0, 0.4), (0.01, 1.9, -0.7), (1.5, 0.2, 0.05)] {
        let h = CMat::from_real(&[&[0.0, 0.5 * wp, 0.0], &[0.5 * wp, d, 0.5 * ws], &[0.0, 0.5 * ws, 0.0]]);
        let e = eigh(&h);
        let (lp, l0, lm) = analytic_dressed_energies_3lvl(wp, ws, d);
        eig = eig
            .max((e.values[0] - lm).abs())
            .max((e.values[1] - l0).abs())
            .max((e.values[2] - lp).abs());
    }
    check("three-level energies", eig <= 1e-12);

    let mut quartic = 0.0f64;
    for s in &all[2..=2] {
        for &t in &times {
            let e = hamiltonian_at(s, t).unwrap().eigen();
            for k in 0..4 {
                let q = quartic_eval(s, t, e.values[k]).unwrap();
                quartic = quartic.max(q.f.abs() / q.max_coefficient());
            }
        }
    }
    check("quartic residual", quartic <= 1e-8);

    let s = &all[2];
    let h = 1e-4;
    let (mut worst, mut scale) = (0.0f64, 0.0f64);
    for t in [-150.0, 0.0, 120.0] {
        let df = dressed_frame(s, &static_trajectory(4, vec![t - h, t, t + h])).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                if i == j || (df.eigenvalues[1][i] - df.eigenvalues[1][j]).abs() <= 1e-6 {
                    continue;
                }
                let dv = df.eigenvectors[2]
                    .column(j)
                    .axpy(C64::new(-1.0, 0.0), &df.eigenvectors[0].column(j))
                    .scale(C64::new(0.5 / h, 0.0));
                let fd = df.eigenvectors[1].column(i).inner(&dv).norm();
                worst = worst.max((fd - df.couplings[1][i][j]).abs());
                scale = scale.max(df.couplings[1][i][j]);
            }
        }
    }
    check("couplings", worst <= 1e-4 * scale);

    let mut unit = 0.0f64;
    for th in [0.0, 0.3, 1.1, 2.5] {
        for ph in [-1.0, 0.0, 0.7] {
            let r = rotation_matrix(th, ph);
            unit = unit.max(r.adjoint().mul_mat(&r).sub(&CMat::identity(3)).max_abs());
        }
    }
    check("rotation unitarity", unit <= 1e-12);

    let f = propagate(
        &ScenarioSpec::standard(Scheme::Fstirap3).with_mixing_angle(FRAC_PI_2),
        1e-9,
    )
    .unwrap();
    let p = propagate(&ScenarioSpec::standard(Scheme::Stirap3), 1e-9).unwrap();
    let reduce = (0..f.len())
        .flat_map(|k| (0..3).map(move |i| (k, i)))
        .map(|(k, i)| (f.amplitudes[k][i] - p.amplitudes[k][i]).norm())
        .fold(0.0, f64::max);
    check("right-angle reduction", reduce <= 1e-8);

    let mut mirror = 0.0f64;
    for (d, a) in [(0.14, 1e-3), (0.1, -5e-4)] {
        let x = final_observables(
            &propagate(
                &ScenarioSpec::standard(Scheme::Cstirap3)
                    .with_detunings(0.0, d)
                    .with_chirps(a, a),
                1e-9,
            )
            .unwrap(),
        )
        .unwrap();
        let y = final_observables(
            &propagate(
                &ScenarioSpec::standard(Scheme::Cstirap3)
                    .with_detunings(0.0, -d)
                    .with_chirps(-a, -a),
                1e-9,
            )
            .unwrap(),
        )
        .unwrap();
        for i in 0..3 {
            mirror = mirror.max((x.populations[i] - y.populations[i]).abs());
        }
    }
    check("mirror symmetry", mirror <= 1e-6);

    let mut c = config("fig7a", "main");
    let sw = c.sweep.as_mut().unwrap();
    sw.x.count = 6;
    sw.y.count = 5;
    let plan = c.sweep_plan().unwrap();
    let one = run_sweep(&plan, Some(1)).unwrap();
    let many = run_sweep(&plan, Some(4)).unwrap();
    check(
        "worker determinism",
        one.grid
            .iter()
            .map(|v| v.to_bits())
            .eq(many.grid.iter().map(|v| v.to_bits())),
    );

    let detail = format!(
        "hermiticity {herm:.1e}, norm drift {drift:.1e}, energies {eig:.1e}, quartic {quartic:.1e}, \
         couplings {:.1e}, unitarity {unit:.1e}, reduction {reduce:.1e}, mirror {mirror:.1e}",
        worst / scale
    );
    if failed.is_empty() {
        (true, detail)
    } else {
        (false, format!("failed: {}; {detail}", failed.join(", ")))
    }
}

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        ("C1", "resonant STIRAP transfer", c1),
        ("C2", "two-photon detuning falloff", c2),
        ("C3", "chirped STIRAP compensation", c3),
        ("C4", "dark-line ridge", c4),
        ("C5", "four-level selectivity", c5),
        ("C6", "avoided-crossing metrology", c6),
        ("C7", "delayed-chirp route to |3>", c7),
        ("C8", "F-STIRAP maximum coherence", c8),
        ("C9", "single-Gaussian-Stokes F-STIRAP", c9),
        ("C10", "C-F-STIRAP compensation line", c10),
        ("C11", "delay-selected coherence", c11),
        ("C12", "oracle and property suite", c12),
    ];
    let mut failures = 0;
    for (id, title, run) in criteria {
        let started = Instant::now();
        let (ok, detail) = run();
        failures += usize::from(!ok);
        println!(
            "{} {id} {title}: {detail} [{:.1} s]",
            if ok { "PASS" } else { "FAIL" },
            started.elapsed().as_secs_f64()
        );
    }
    println!("{} of 12 criteria passed", 12 - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
