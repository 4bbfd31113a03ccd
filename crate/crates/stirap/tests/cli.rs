use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn stirap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stirap")).args(args).output().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

#[test]
fn simulate_writes_the_trajectory_and_is_byte_stable() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "c.json",
        r#"{"scheme":"CSTIRAP4","delta":0.14,"alpha":1e-3}"#,
    );
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for out in [&a, &b] {
        let o = stirap(&["simulate", "--config", &cfg, "--output", out.to_str().unwrap()]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    }
    let text = fs::read_to_string(&a).unwrap();
    assert_eq!(text.as_bytes(), fs::read(&b).unwrap());
    assert!(!text.contains('\r'));
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "t,re_a1,im_a1,re_a2,im_a2,re_a3,im_a3,re_a4,im_a4,rho11,rho22,rho33,rho44,\
         abs_rho12,abs_rho13,abs_rho14,abs_rho23,abs_rho24,abs_rho34,norm"
    );
    assert_eq!(text.lines().count(), 2002);
    let last: Vec<f64> = text
        .lines()
        .last()
        .unwrap()
        .split(',')
        .map(|v| v.parse().unwrap())
        .collect();
    assert_eq!(last[0], 570.0);
    assert!(last[12] > 0.9, "rho44 = {}", last[12]);
    let first = lines.next().unwrap();
    assert!(first.starts_with("-4.7000000000000000e2,1.0000000000000000e0,"));
}

#[test]
fn command_line_overrides_beat_the_config() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t.json");
    let cfg = write(
        dir.path(),
        "c.json",
        &format!(
            r#"{{"scheme":"STIRAP3","samples":11,"format":"csv","output":{:?}}}"#,
            dir.path().join("x.csv")
        ),
    );
    let o = stirap(&[
        "simulate",
        "--config",
        &cfg,
        "--format",
        "json",
        "--tol",
        "1e-10",
        "--output",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["t"].as_array().unwrap().len(), 11);
    assert!(v["rho33"][10].as_f64().unwrap() > 0.99);
    assert!(!dir.path().join("x.csv").exists());
    let o = stirap(&["simulate", "--config", &cfg, "--tol", "1"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn stdout_is_used_without_an_output_path() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.json", r#"{"scheme":"FSTIRAP3","samples":5}"#);
    let o = stirap(&["simulate", "--config", &cfg]);
    assert_eq!(code(&o), 0);
    assert_eq!(String::from_utf8(o.stdout).unwrap().lines().count(), 6);
}

#[test]
fn dressed_writes_frame_and_crossings() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "c.json",
        r#"{"scheme":"CSTIRAP4","delta":0.14,"alpha":-1e-3}"#,
    );
    let out = dir.path().join("d.csv");
    let o = stirap(&["dressed", "--config", &cfg, "--output", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let text = fs::read_to_string(&out).unwrap();
    assert_eq!(
        text.lines().next().unwrap(),
        "t,lambda1,lambda2,lambda3,lambda4,pop_d1,pop_d2,pop_d3,pop_d4,V_12,V_13,V_14,V_23,V_24,V_34"
    );
    let crossings: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("d.csv.crossings.json")).unwrap()).unwrap();
    let list = crossings.as_array().unwrap();
    assert!(!list.is_empty());
    for c in list {
        let p = c["p_lz"].as_f64().unwrap();
        assert!((0.0..=1.0).contains(&p));
        assert!(c["gap"].as_f64().unwrap() >= 0.0);
    }
}

#[test]
fn sweep_writes_row_major_grid_and_metadata() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "s.json",
        r#"{"scheme":"CSTIRAP3","samples":3,"sweep":{"x":{"param":"delta","start":-0.14,"end":0.14,"count":3},
            "y":{"param":"alpha","start":-1e-3,"end":1e-3,"count":2},"observable":"rho33"}}"#,
    );
    let out = dir.path().join("g.csv");
    let o = stirap(&[
        "sweep",
        "--config",
        &cfg,
        "--workers",
        "2",
        "--output",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(&out).unwrap();
    let rows: Vec<Vec<f64>> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(text.lines().next().unwrap(), "x,y,value");
    assert_eq!(rows.len(), 6);
    assert_eq!((rows[1][0], rows[1][1]), (0.0, -1e-3));
    assert_eq!((rows[3][0], rows[3][1]), (-0.14, 1e-3));
    // (δ, α) = (−0.14, −1e-3) and (0.14, 1e-3) sit on the dark line.
    assert!(rows[0][2] > 0.99 && rows[5][2] > 0.99);
    let meta: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("g.csv.meta.json")).unwrap()).unwrap();
    assert_eq!(meta["observable"], "rho33");
    assert_eq!(meta["constraint_lines"][0]["label"], "dark-line");
    let o = stirap(&["simulate", "--config", &cfg, "--workers", "0"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn sweep_without_a_sweep_section_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.json", r#"{"scheme":"CSTIRAP3"}"#);
    let o = stirap(&["sweep", "--config", &cfg]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("sweep"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.json", r#"{"scheme":"STIRAP3","tau":-1}"#);
    assert_eq!(code(&stirap(&["simulate", "--config", &bad])), 2);
    let unknown = write(dir.path(), "u.json", r#"{"scheme":"STIRAP3","colour":1}"#);
    assert_eq!(code(&stirap(&["dressed", "--config", &unknown])), 2);
    let missing = dir.path().join("missing.json");
    assert_eq!(code(&stirap(&["simulate", "--config", missing.to_str().unwrap()])), 1);
    assert_eq!(
        code(&stirap(&[
            "preset",
            "--id",
            "fig99",
            "--out",
            dir.path().to_str().unwrap()
        ])),
        2
    );
    assert_eq!(code(&stirap(&["simulate"])), 2);
    // A far-detuned run over a very long window exhausts the step budget.
    let stiff = write(
        dir.path(),
        "stiff.json",
        r#"{"scheme":"STIRAP3","Delta":1000,"t_end":1e6}"#,
    );
    let o = stirap(&["simulate", "--config", &stiff]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("numeric failure"));
}

#[test]
fn list_presets_names_every_figure() {
    let o = stirap(&["list-presets"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    let ids: Vec<&str> = text.lines().map(|l| l.split_whitespace().next().unwrap()).collect();
    assert_eq!(
        ids,
        [
            "fig2", "fig3ab", "fig3cd", "fig4", "fig6b", "fig6c", "fig7a", "fig7b", "fig8-9", "fig10", "fig11",
            "fig12", "fig13", "fig14", "fig15", "fig16", "fig17b", "fig17c", "fig18a", "fig18b", "fig19"
        ]
    );
}

#[test]
fn preset_writes_files_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let o = stirap(&["preset", "--id", "fig6b", "--out", d]);
    assert_eq!(code(&o), 0);
    let m: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("fig6b.manifest.json")).unwrap()).unwrap();
    assert_eq!(m["id"], "fig6b");
    assert_eq!(m["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(m["reconstructed"], false);
    assert!(m["wall_time_s"].as_f64().unwrap() >= 0.0);
    assert_eq!(m["parameters"][0]["config"]["scheme"], "CSTIRAP4");
    assert_eq!(m["parameters"][0]["config"]["alpha"].as_f64(), Some(1e-3));
    assert!(m["observables"]["main.rho44"].as_f64().unwrap() > 0.9);
    for f in m["files"].as_array().unwrap() {
        assert!(dir.path().join(f.as_str().unwrap()).exists());
    }

    let o = stirap(&[
        "preset",
        "--id",
        "fig12",
        "--out",
        d,
        "--resolution",
        "5",
        "--format",
        "json",
    ]);
    assert_eq!(code(&o), 0);
    let m: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("fig12.manifest.json")).unwrap()).unwrap();
    assert_eq!(m["reconstructed"], true);
    assert!(m["observables"]["scan.abs_rho13_ratio"].as_f64().unwrap() <= 0.55);
    assert!(dir.path().join("fig12.scan.scan.json").exists());
}
