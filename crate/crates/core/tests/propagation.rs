use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use stirap_core::{
    final_observables, propagate, propagate_with, Observable, PropagateOptions, ScenarioSpec, Scheme, Trajectory,
};

fn standard_cases() -> Vec<(&'static str, ScenarioSpec)> {
    vec![
        ("stirap", ScenarioSpec::standard(Scheme::Stirap3)),
        (
            "cstirap3",
            ScenarioSpec::standard(Scheme::Cstirap3)
                .with_detunings(0.0, 0.14)
                .with_chirps(1e-3, 1e-3),
        ),
        (
            "cstirap4+",
            ScenarioSpec::standard(Scheme::Cstirap4)
                .with_detunings(0.0, 0.14)
                .with_chirps(1e-3, 1e-3),
        ),
        (
            "cstirap4-",
            ScenarioSpec::standard(Scheme::Cstirap4)
                .with_detunings(0.0, 0.14)
                .with_chirps(-1e-3, -1e-3),
        ),
        (
            "cstirap4 delayed",
            ScenarioSpec::standard(Scheme::Cstirap4)
                .with_detunings(0.0, 0.14)
                .with_chirps(1e-3, 1e-3)
                .with_stokes_chirp_delay(140.0),
        ),
        ("fstirap", ScenarioSpec::standard(Scheme::Fstirap3)),
        (
            "cfstirap3",
            ScenarioSpec::standard(Scheme::Cfstirap3)
                .with_detunings(0.0, 0.14)
                .with_fractional_chirps(1e-3, 1e-3, 1e-3, 0.0, -140.0),
        ),
        (
            "cfstirap4",
            ScenarioSpec::standard(Scheme::Cfstirap4)
                .with_detunings(0.0, 0.14)
                .with_fractional_chirps(1e-3, 1e-3, 1e-3, 140.0, 0.0),
        ),
        ("single stokes", ScenarioSpec::standard(Scheme::Fstirap3SingleStokes)),
    ]
}

#[test]
fn zero_fields_leave_the_ground_state_alone() {
    let mut s = ScenarioSpec::standard(Scheme::Stirap3);
    s.pump.amplitude = 0.0;
    s.stokes1.amplitude = 0.0;
    let tr = propagate(&s, 1e-9).unwrap();
    for k in 0..tr.len() {
        assert_eq!(tr.population(k, 0), 1.0);
    }
    let fo = final_observables(&tr).unwrap();
    assert_eq!(fo.populations[..3], [1.0, 0.0, 0.0]);
    assert_eq!(fo.coherences[0][2], 0.0);
}

#[test]
fn output_grid_and_trajectory_invariants() {
    for (name, s) in standard_cases() {
        let tr = propagate(&s, 1e-9).unwrap();
        assert_eq!(tr.len(), 2001, "{name}");
        assert_eq!(tr.times[0], s.t_start);
        assert_eq!(*tr.times.last().unwrap(), s.t_end);
        assert!(tr.max_norm_drift() <= 1e-6, "{name}: drift {}", tr.max_norm_drift());
        for k in (0..tr.len()).step_by(50) {
            let total: f64 = (0..tr.dim).map(|i| tr.population(k, i)).sum();
            assert!((total - tr.norm(k).powi(2)).abs() < 1e-12);
            for i in 0..tr.dim {
                for j in 0..tr.dim {
                    let bound = (tr.population(k, i) * tr.population(k, j)).sqrt();
                    assert!(tr.coherence(k, i, j).norm() <= bound + 1e-15);
                }
            }
        }
    }
}

#[test]
fn halving_the_tolerance_changes_final_populations_by_at_most_1e6() {
    for (name, s) in standard_cases() {
        let a = final_observables(&propagate(&s, 1e-9).unwrap()).unwrap();
        let b = final_observables(&propagate(&s, 5e-10).unwrap()).unwrap();
        for i in 0..s.dim() {
            assert!(
                (a.populations[i] - b.populations[i]).abs() <= 1e-6,
                "{name} level {}: {} vs {}",
                i + 1,
                a.populations[i],
                b.populations[i]
            );
        }
    }
}

#[test]
fn mirror_symmetry_of_chirped_stirap() {
    for (delta, alpha) in [(0.14, 1e-3), (0.05, 1.5e-3), (0.1, -5e-4), (0.18, 0.0)] {
        let a = ScenarioSpec::standard(Scheme::Cstirap3)
            .with_detunings(0.0, delta)
            .with_chirps(alpha, alpha);
        let b = ScenarioSpec::standard(Scheme::Cstirap3)
            .with_detunings(0.0, -delta)
            .with_chirps(-alpha, -alpha);
        let fa = final_observables(&propagate(&a, 1e-9).unwrap()).unwrap();
        let fb = final_observables(&propagate(&b, 1e-9).unwrap()).unwrap();
        for i in 0..3 {
            assert!(
                (fa.populations[i] - fb.populations[i]).abs() <= 1e-6,
                "δ={delta} α={alpha}"
            );
        }
    }
}

fn max_amplitude_gap(a: &Trajectory, b: &Trajectory) -> f64 {
    let mut worst = 0.0f64;
    for k in 0..a.len() {
        assert_eq!(a.times[k], b.times[k]);
        for i in 0..a.dim {
            worst = worst.max((a.amplitudes[k][i] - b.amplitudes[k][i]).norm());
        }
    }
    worst
}

#[test]
fn right_angle_fractional_reproduces_plain_stirap_pointwise() {
    for delta in [0.0, 0.03] {
        let plain = ScenarioSpec::standard(Scheme::Stirap3).with_detunings(0.0, delta);
        let frac = ScenarioSpec::standard(Scheme::Fstirap3)
            .with_detunings(0.0, delta)
            .with_mixing_angle(FRAC_PI_2)
            .with_window(plain.t_start, plain.t_end);
        let a = propagate(&plain, 1e-9).unwrap();
        let b = propagate(&frac, 1e-9).unwrap();
        assert!(max_amplitude_gap(&a, &b) <= 1e-8);
    }
}

#[test]
fn fractional_stirap_reaches_the_half_coherence() {
    let s = ScenarioSpec::standard(Scheme::Fstirap3).with_mixing_angle(FRAC_PI_4);
    let fo = final_observables(&propagate(&s, 1e-9).unwrap()).unwrap();
    assert!((fo.populations[0] - 0.5).abs() <= 0.02);
    assert!((fo.populations[2] - 0.5).abs() <= 0.02);
    assert!((fo.get(Observable::Coherence(0, 2)) - 0.5).abs() <= 0.02);
}

#[test]
fn sparse_and_dense_output_agree_at_the_end() {
    let s = ScenarioSpec::standard(Scheme::Cstirap4)
        .with_detunings(0.0, 0.14)
        .with_chirps(-1e-3, -1e-3);
    let dense = final_observables(&propagate(&s, 1e-10).unwrap()).unwrap();
    let opts = PropagateOptions {
        samples: 2,
        rtol: 1e-10,
        ..PropagateOptions::default()
    };
    let sparse = final_observables(&propagate_with(&s, &opts).unwrap()).unwrap();
    for i in 0..4 {
        assert!((dense.populations[i] - sparse.populations[i]).abs() < 1e-7);
    }
}
