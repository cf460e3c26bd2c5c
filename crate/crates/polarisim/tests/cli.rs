use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn polarisim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polarisim"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    let mut all: Vec<&str> = args.to_vec();
    let out = dir.to_str().unwrap();
    all.extend(["--out", out]);
    polarisim(&all)
}

fn code(output: &Output) -> i32 {
    output.status.code().expect("exit code")
}

fn assert_ok(output: &Output) {
    assert_eq!(
        code(output),
        0,
        "stderr: {}",
        String::from_utf8_lossy(&output.stderr)
    );
}

fn read_csv(path: PathBuf) -> Vec<(f64, f64)> {
    fs::read_to_string(&path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|line| {
            let (w, v) = line.split_once(',').unwrap();
            (w.parse().unwrap(), v.parse().unwrap())
        })
        .collect()
}

fn read_json(path: PathBuf) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

const BASE_TOML: &str = "
omega_0_cm1 = 1983.0
omega_c_cm1 = 1983.0
kappa_cm1 = 11.0
gamma_m_cm1 = 3.0
delta_cm1 = 7.5
g3_ratio = -0.25
f_pu = 0.075
";

#[test]
fn spectrum_shows_negative_lp_feature() {
    let dir = tempfile::tempdir().unwrap();
    assert_ok(&run_in(dir.path(), &["spectrum", "--paper-defaults"]));
    let dt = read_csv(dir.path().join("pump_probe.csv"));
    assert_eq!(dt.len(), 17001);
    let (w_min, v_min) = dt
        .iter()
        .copied()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap();
    assert!(
        v_min < 0.0 && (w_min - 1964.0).abs() < 3.0,
        "{w_min} {v_min}"
    );
    for name in ["transmission.csv", "reflection.csv", "absorption.csv"] {
        assert_eq!(read_csv(dir.path().join(name)).len(), 17001);
    }
    let header = fs::read_to_string(dir.path().join("transmission_transfer.csv")).unwrap();
    assert!(header.starts_with("wavenumber_cm1,re,im\n"));
}

#[test]
fn harmonic_system_has_zero_pump_probe() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "spectrum",
        "--paper-defaults",
        "--set",
        "delta_cm1=0",
        "--set",
        "g3_ratio=0",
    ];
    assert_ok(&run_in(dir.path(), &args));
    let dt = read_csv(dir.path().join("pump_probe.csv"));
    assert!(dt.iter().all(|(_, v)| v.abs() <= 1e-14));
}

#[test]
fn unpumped_spectrum_omits_pump_probe() {
    let dir = tempfile::tempdir().unwrap();
    assert_ok(&run_in(
        dir.path(),
        &[
            "spectrum",
            "--paper-defaults",
            "--set",
            "f_pu=0",
            "--grid",
            "1950:2020:1",
        ],
    ));
    assert!(!dir.path().join("pump_probe.csv").exists());
    assert_eq!(read_csv(dir.path().join("transmission.csv")).len(), 71);
}

#[test]
fn reruns_are_bitwise_identical() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let args = ["spectrum", "--paper-defaults", "--grid", "1930:2040:0.1"];
    assert_ok(&run_in(a.path(), &args));
    assert_ok(&run_in(b.path(), &args));
    let manifest = read_json(a.path().join("manifest.json"));
    let files = manifest["files"].as_array().unwrap();
    assert_eq!(files.len(), 6);
    for file in files {
        let name = file.as_str().unwrap();
        assert_eq!(
            fs::read(a.path().join(name)).unwrap(),
            fs::read(b.path().join(name)).unwrap(),
            "{name}"
        );
    }
    // Nothing besides the listed files, e.g. no stray temporaries.
    assert_eq!(fs::read_dir(a.path()).unwrap().count(), files.len());
}

#[test]
fn manifest_echoes_resolved_params() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("system.toml");
    fs::write(
        &config,
        format!("{BASE_TOML}g1_cm1 = 0.019\nn_molecules = 1e6\n"),
    )
    .unwrap();
    let out = dir.path().join("out");
    let args = [
        "modes",
        "--config",
        config.to_str().unwrap(),
        "--set",
        "f_pu=0",
        "--out",
        out.to_str().unwrap(),
    ];
    assert_ok(&polarisim(&args));
    let manifest = read_json(out.join("manifest.json"));
    assert_eq!(manifest["tool"], "polarisim");
    assert_eq!(manifest["version"], env!("CARGO_PKG_VERSION"));
    let params = &manifest["params"];
    assert!((params["g1_coll_cm1"].as_f64().unwrap() - 19.0).abs() < 1e-12);
    assert_eq!(params["f_pu"], 0.0);
    let splitting = read_json(out.join("resonances.json"))["rabi_splitting_cm1"]
        .as_f64()
        .unwrap();
    assert!((splitting - 38.0).abs() < 1.0);
}

#[test]
fn overrides_are_validated_after_loading() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("system.toml");
    fs::write(&config, format!("{BASE_TOML}g1_coll_cm1 = 19.0\n")).unwrap();
    let output = run_in(
        dir.path(),
        &[
            "spectrum",
            "--config",
            config.to_str().unwrap(),
            "--set",
            "kappa_cm1=-1",
        ],
    );
    assert_eq!(code(&output), 2);
    assert!(String::from_utf8_lossy(&output.stderr).contains("kappa_cm1"));
}

#[test]
fn configuration_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let incomplete = dir.path().join("incomplete.toml");
    fs::write(&incomplete, BASE_TOML).unwrap();
    let cases: Vec<Vec<&str>> = vec![
        vec!["spectrum", "--config", "/nonexistent/system.toml"],
        vec!["spectrum", "--config", incomplete.to_str().unwrap()],
        vec!["spectrum"],
        vec!["spectrum", "--paper-defaults", "--config", "x.toml"],
        vec!["spectrum", "--paper-defaults", "--set", "nope=1"],
        vec!["spectrum", "--paper-defaults", "--grid", "2000:1900:1"],
        vec![
            "sweep",
            "--paper-defaults",
            "--param",
            "nope",
            "--from",
            "0",
            "--to",
            "1",
            "--steps",
            "2",
        ],
        vec!["oracle", "--paper-defaults", "--dt", "0.01"],
        vec!["fit", "--paper-defaults", "--data", "x.csv"],
        vec!["bogus"],
    ];
    for args in cases {
        assert_eq!(code(&run_in(dir.path(), &args)), 2, "{args:?}");
    }
}

#[test]
fn lossless_modes_match_poles() {
    let dir = tempfile::tempdir().unwrap();
    assert_ok(&run_in(
        dir.path(),
        &["modes", "--paper-defaults", "--set", "gamma_m_cm1=0"],
    ));
    let json = read_json(dir.path().join("resonances.json"));
    assert!(json["match_distance_cm1"].as_f64().unwrap() < 1e-9);
    assert_eq!(
        json["poles"]["labels"],
        serde_json::json!(["LP", "MID", "UP"])
    );
}

#[test]
fn damped_modes() {
    let dir = tempfile::tempdir().unwrap();
    assert_ok(&run_in(
        dir.path(),
        &[
            "modes",
            "--paper-defaults",
            "--set",
            "g3_ratio=0",
            "--damped",
        ],
    ));
    let json = read_json(dir.path().join("resonances.json"));
    assert_eq!(json["matrix"]["kind"], "damped");
    assert_eq!(json["eigenvalues"]["re_cm1"].as_array().unwrap().len(), 3);
    assert!(json["match_distance_cm1"].as_f64().unwrap() < 1e-8);

    let output = run_in(dir.path(), &["modes", "--paper-defaults", "--damped"]);
    assert_eq!(code(&output), 2);
    assert!(String::from_utf8_lossy(&output.stderr).contains("g3_ratio = 0"));
}

#[test]
fn lossless_matrix_with_damping_reports_no_distance() {
    let dir = tempfile::tempdir().unwrap();
    assert_ok(&run_in(dir.path(), &["modes", "--paper-defaults"]));
    assert!(read_json(dir.path().join("resonances.json"))["match_distance_cm1"].is_null());
}

#[test]
fn detuning_sweep_records() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "sweep",
        "--paper-defaults",
        "--param",
        "omega_c_cm1",
        "--from",
        "1953",
        "--to",
        "2013",
        "--steps",
        "61",
    ];
    assert_ok(&run_in(dir.path(), &args));
    let records = read_json(dir.path().join("sweep.json"));
    let records = records.as_array().unwrap();
    assert_eq!(records.len(), 61);
    let best = records
        .iter()
        .max_by(|a, b| {
            let sum = |r: &Value| r["polariton_absorption"]["sum"].as_f64().unwrap();
            sum(a).total_cmp(&sum(b))
        })
        .unwrap();
    assert_eq!(best["value"], 1983.0);
    assert!(records
        .iter()
        .all(|r| r["error"].is_null() && r["transmission"].is_null()));
}

#[test]
fn sweep_records_failures_and_spectra() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "sweep",
        "--paper-defaults",
        "--param",
        "kappa_cm1",
        "--from",
        "-2",
        "--to",
        "2",
        "--steps",
        "3",
        "--spectra",
        "--grid",
        "1950:2020:1",
    ];
    assert_ok(&run_in(dir.path(), &args));
    let records = read_json(dir.path().join("sweep.json"));
    assert!(records[0]["error"].as_str().unwrap().contains("kappa_cm1"));
    assert!(records[0]["poles"].is_null());
    assert_eq!(records[2]["transmission"].as_array().unwrap().len(), 71);
}

#[test]
fn oracle_agrees_with_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    assert_ok(&run_in(
        dir.path(),
        &["oracle", "--paper-defaults", "--trajectory"],
    ));
    let report = read_json(dir.path().join("oracle_report.json"));
    assert!(report["max_relative_error"].as_f64().unwrap() < 1e-3);
    assert_eq!(report["within_tolerance"], true);
    let traj = fs::read_to_string(dir.path().join("trajectory.csv")).unwrap();
    let mut lines = traj.lines();
    assert_eq!(
        lines.next().unwrap(),
        "t_internal,re_b,im_b,re_p1,im_p1,re_p3,im_p3,re_sin,im_sin,re_sout,im_sout"
    );
    assert_eq!(lines.count(), 24001);
}

#[test]
fn truncated_oracle_is_a_computation_error() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        code(&run_in(
            dir.path(),
            &["oracle", "--paper-defaults", "--t-end", "1"]
        )),
        3
    );
}

fn write_lorentzian(path: &Path) {
    let mut text = String::from("# synthetic bare band\nwavenumber_cm1,value\n");
    for k in 0..=400 {
        let w = 1963.0 + 0.1 * k as f64;
        let d: f64 = w - 1983.0;
        text.push_str(&format!("{w},{}\n", 0.05 + 0.9 * 2.25 / (d * d + 2.25)));
    }
    fs::write(path, text).unwrap();
}

#[test]
fn lorentzian_fit_from_csv() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("bare_vibration.csv");
    write_lorentzian(&data);
    assert_ok(&run_in(
        dir.path(),
        &["fit", "--data", data.to_str().unwrap(), "--lorentzian"],
    ));
    let fit = read_json(dir.path().join("fit.json"));
    assert_eq!(fit["model"], "lorentzian");
    assert!((fit["fwhm_cm1"].as_f64().unwrap() - 3.0).abs() / 3.0 < 1e-6);
    assert!(read_json(dir.path().join("manifest.json"))["params"].is_null());
}

#[test]
fn fpu_fit_round_trips_spectrum_output() {
    let dir = tempfile::tempdir().unwrap();
    let spectra = dir.path().join("spectra");
    let args = [
        "spectrum",
        "--paper-defaults",
        "--grid",
        "1930:2040:0.5",
        "--out",
        spectra.to_str().unwrap(),
    ];
    assert_ok(&polarisim(&args));
    let data = spectra.join("pump_probe.csv");
    assert_ok(&run_in(
        dir.path(),
        &[
            "fit",
            "--paper-defaults",
            "--set",
            "f_pu=0.3",
            "--data",
            data.to_str().unwrap(),
            "--fpu",
        ],
    ));
    let fit = read_json(dir.path().join("fit.json"));
    assert!((fit["f_pu"].as_f64().unwrap() - 0.075).abs() < 1e-4);
    assert_eq!(fit["boundary_optimum"], false);
}

#[test]
fn malformed_data_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("bad.csv");
    fs::write(&data, "wavenumber_cm1,value\n1.0,2.0\n3.0,1.0\n2.0,0.5\n").unwrap();
    let output = run_in(
        dir.path(),
        &["fit", "--data", data.to_str().unwrap(), "--lorentzian"],
    );
    assert_eq!(code(&output), 2);
    assert!(String::from_utf8_lossy(&output.stderr).contains("increasing"));
}

#[test]
fn thread_cap() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "sweep",
        "--paper-defaults",
        "--param",
        "f_pu",
        "--from",
        "0",
        "--to",
        "0.2",
        "--steps",
        "5",
        "--out",
    ];
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_polarisim"))
            .args(args)
            .arg(dir.path())
            .env("POLARISIM_THREADS", threads)
            .output()
            .unwrap()
    };
    assert_ok(&run("1"));
    assert_eq!(code(&run("zero")), 2);
}
