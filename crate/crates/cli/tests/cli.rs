//! Command-line behavior: exit codes, file schemas, config precedence,
//! reproducibility.

use std::path::Path;
use std::process::Command;

fn parosc() -> Command {
    Command::new(env!("CARGO_BIN_EXE_parosc"))
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name))
        .unwrap_or_else(|e| panic!("reading {name}: {e}"))
}

fn json(dir: &Path, name: &str) -> serde_json::Value {
    serde_json::from_str(&read(dir, name)).unwrap()
}

#[test]
fn usage_errors_exit_2() {
    let st = parosc().args(["evolve", "--nu", "10"]).output().unwrap();
    assert_eq!(st.status.code(), Some(2));
    assert!(!st.stderr.is_empty());

    let st = parosc()
        .args(["evolve", "--h", "1.5", "--nu", "10"])
        .output()
        .unwrap();
    assert_eq!(st.status.code(), Some(2));

    // r with h = 0 leaves the detuning undefined
    let st = parosc()
        .args(["evolve", "--h", "0", "--r", "0.5", "--nu", "10"])
        .output()
        .unwrap();
    assert_eq!(st.status.code(), Some(2));

    let st = parosc()
        .args(["evolve", "--h", "0.1", "--eps-bar", "0.01", "--r", "0.5", "--nu", "10"])
        .output()
        .unwrap();
    assert_eq!(st.status.code(), Some(2));
}

#[test]
fn numerical_failures_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("strict.toml");
    std::fs::write(&config, "norm_tol = 1e-16\n").unwrap();
    let st = parosc()
        .args(["evolve", "--h", "0.03", "--r", "0.1", "--nu", "100"])
        .arg("--config")
        .arg(&config)
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(st.status.code(), Some(3));
    let msg = String::from_utf8_lossy(&st.stderr);
    assert!(msg.contains("unitarity"), "stderr: {msg}");
}

#[test]
fn evolve_without_drive_keeps_ground_energy() {
    let dir = tempfile::tempdir().unwrap();
    let st = parosc()
        .args(["evolve", "--h", "0", "--nu", "10", "--out"])
        .arg(dir.path())
        .status()
        .unwrap();
    assert!(st.success());
    let state = json(dir.path(), "state.json");
    assert_eq!(state["energy"].as_f64().unwrap(), 0.5);
    assert!(state["norm_residual"].as_f64().unwrap() < 1e-12);
    assert!(state["r"].is_null());
}

#[test]
fn trace_rows_strictly_increase_in_tau() {
    let dir = tempfile::tempdir().unwrap();
    let st = parosc()
        .args([
            "evolve", "--h", "0.03", "--r", "0.6", "--nu", "300", "--trace", "t.csv",
            "--samples", "200", "--out",
        ])
        .arg(dir.path())
        .status()
        .unwrap();
    assert!(st.success());
    let text = read(dir.path(), "t.csv");
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "tau,a_re,a_im,b_re,b_im,g,norm_residual,energy"
    );
    let taus: Vec<f64> = lines
        .map(|l| l.split(',').next().unwrap().parse().unwrap())
        .collect();
    assert_eq!(taus.len(), 200);
    assert!(taus.windows(2).all(|w| w[1] > w[0]));
}

#[test]
fn spectrum_of_undriven_run_is_pure_ground_state() {
    let dir = tempfile::tempdir().unwrap();
    let st = parosc()
        .args(["spectrum", "--h", "0", "--nu", "10", "--out"])
        .arg(dir.path())
        .status()
        .unwrap();
    assert!(st.success());
    let text = read(dir.path(), "spectrum.csv");
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "n,p_n");
    for line in lines {
        let mut fields = line.split(',');
        let n: usize = fields.next().unwrap().parse().unwrap();
        let p: f64 = fields.next().unwrap().parse().unwrap();
        if n == 0 {
            assert!((p - 1.0).abs() < 1e-10);
        } else {
            assert!(p < 1e-12, "n = {n}: p = {p:e}");
        }
    }
}

#[test]
fn single_point_sweep_is_valid() {
    let dir = tempfile::tempdir().unwrap();
    let st = parosc()
        .args([
            "sweep", "--h", "0.05", "--nu", "20", "--r-min", "0.3", "--r-steps", "1", "--out",
        ])
        .arg(dir.path())
        .status()
        .unwrap();
    assert!(st.success());
    let text = read(dir.path(), "sweep.csv");
    assert_eq!(text.lines().count(), 2);
    let manifest = json(dir.path(), "manifest.json");
    assert_eq!(manifest["parameters"]["r_steps"], 1);
    assert!(manifest["outputs"].as_array().unwrap().len() >= 7);
}

#[test]
fn zero_amplitude_sweep_records_error_rows() {
    let dir = tempfile::tempdir().unwrap();
    let st = parosc()
        .args([
            "sweep", "--h", "0", "--nu", "10", "--r-min", "-0.5", "--r-max", "0.5", "--r-steps",
            "3", "--out",
        ])
        .arg(dir.path())
        .status()
        .unwrap();
    assert!(st.success(), "sweep continues past per-row failures");
    let text = read(dir.path(), "sweep.csv");
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 3);
    for row in rows {
        assert!(row.ends_with("error:undefined_ratio"), "{row}");
    }
}

#[test]
fn csv_numbers_round_trip_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let st = parosc()
        .args(["spectrum", "--h", "0.03", "--r", "0.6", "--nu", "100", "--out"])
        .arg(dir.path())
        .status()
        .unwrap();
    assert!(st.success());
    for line in read(dir.path(), "spectrum.csv").lines().skip(1).take(10) {
        let p_text = line.split(',').nth(1).unwrap();
        let p: f64 = p_text.parse().unwrap();
        // 17 significant digits: re-serializing reproduces the bytes
        assert_eq!(format!("{p:.16e}"), p_text);
    }
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("exp.toml");
    std::fs::write(&config, "h = 0.03\nnu = 100\nr = 0.6\n").unwrap();
    let st = parosc()
        .args(["evolve", "--r", "0.9"])
        .arg("--config")
        .arg(&config)
        .arg("--out")
        .arg(dir.path())
        .status()
        .unwrap();
    assert!(st.success());
    let state = json(dir.path(), "state.json");
    assert_eq!(state["r"].as_f64().unwrap(), 0.9);
    let manifest = json(dir.path(), "manifest.json");
    assert_eq!(manifest["parameters"]["r"].as_f64().unwrap(), 0.9);
}

#[test]
fn unknown_config_keys_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("typo.toml");
    std::fs::write(&config, "hh = 0.03\n").unwrap();
    let st = parosc()
        .args(["evolve", "--h", "0", "--nu", "1"])
        .arg("--config")
        .arg(&config)
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(st.status.code(), Some(2));
}

#[test]
fn identical_invocations_reproduce_identical_bytes() {
    let run = |dir: &Path| {
        let st = parosc()
            .args([
                "sweep", "--h", "0.05", "--nu", "30", "--r-min", "-0.8", "--r-max", "0.8",
                "--r-steps", "9", "--out",
            ])
            .arg(dir)
            .status()
            .unwrap();
        assert!(st.success());
    };
    let d1 = tempfile::tempdir().unwrap();
    let d2 = tempfile::tempdir().unwrap();
    run(d1.path());
    run(d2.path());
    for name in ["sweep.csv", "p0.dat", "p2.dat", "p4.dat", "p6.dat", "energy.dat", "slope.dat"] {
        assert_eq!(
            std::fs::read(d1.path().join(name)).unwrap(),
            std::fs::read(d2.path().join(name)).unwrap(),
            "{name} differs between identical invocations"
        );
    }
    // digest lists in the manifests agree (the manifests themselves
    // differ only in wall-clock duration)
    let m1 = json(d1.path(), "manifest.json");
    let m2 = json(d2.path(), "manifest.json");
    assert_eq!(m1["outputs"], m2["outputs"]);
    assert_eq!(m1["parameters"], m2["parameters"]);
}

#[test]
fn fit_selects_model_by_regime() {
    let dir = tempfile::tempdir().unwrap();
    let st = parosc()
        .args(["fit", "--h", "0.03", "--r", "0.9", "--nu", "300", "--out"])
        .arg(dir.path())
        .status()
        .unwrap();
    assert!(st.success());
    let fit = json(dir.path(), "fit.json");
    assert_eq!(fit["model"], "exponential");
    assert!(fit["slope"].as_f64().unwrap() < 0.0);
    let dat = read(dir.path(), "fit.dat");
    assert!(dat.starts_with("# n p_n\n"));
}
