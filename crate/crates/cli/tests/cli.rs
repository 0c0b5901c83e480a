use std::fs;
use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use optomech_core::table::{read_figure_csv, FIGURE_HEADER};
use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_optomech"))
}

fn baseline_config() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/baseline.conf")
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}\nstderr: {}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn eval_resonance_sub_kelvin_is_entangled() {
    let cfg = baseline_config();
    let out = run(&[
        "eval",
        "--config",
        cfg.to_str().unwrap(),
        "--omega",
        "1e6",
        "--temp",
        "0.5",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let v = stdout_json(&out);
    let point = &v["result"]["point"];
    let e = point["entanglement_degree"].as_f64().unwrap();
    assert!(e < 1.0, "E = {e}");
    assert_eq!(point["flags"]["product_entangled"], Value::Bool(true));
    for key in ["var_u", "var_v", "comm_abs"] {
        assert!(point[key].as_f64().unwrap() > 0.0);
    }
    assert_eq!(v["manifest"]["command"], "eval");
}

#[test]
fn eval_rejects_zero_and_negative_frequency() {
    let out = run(&["eval", "--omega", "0"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("degenerate"), "{}", stderr(&out));
    let out = run(&["eval", "--omega", "-5"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn config_errors_name_the_key() {
    let dir = tempfile::tempdir().unwrap();
    let text = fs::read_to_string(baseline_config())
        .unwrap()
        .replace("temperature = 1 K", "temperature = 1");
    let path = dir.path().join("bad.conf");
    fs::write(&path, text).unwrap();
    let out = run(&["eval", "--config", path.to_str().unwrap(), "--omega", "1e6"]);
    assert_eq!(out.status.code(), Some(3));
    let msg = stderr(&out);
    assert!(
        msg.contains("`temperature`") && msg.contains("unit"),
        "{msg}"
    );

    let out = run(&[
        "eval",
        "--config",
        dir.path().join("absent.conf").to_str().unwrap(),
        "--omega",
        "1e6",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("absent.conf"));
}

fn figure(n: &str, dir: &Path) -> (Vec<optomech_core::table::FigureRow>, PathBuf) {
    let path = dir.join(format!("fig{n}.csv"));
    let out = run(&["figure", n, "--out", path.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
    let rows = read_figure_csv(BufReader::new(fs::File::open(&path).unwrap())).unwrap();
    (rows, path)
}

#[test]
fn figure_csv_schema_rows_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let (rows, path) = figure("3", dir.path());
    assert_eq!(rows.len(), 401 * 100);
    let text = fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().next().unwrap(), FIGURE_HEADER);
    // every real written with 17 significant digits
    let first: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(first[0].split('e').next().unwrap().len(), 18);

    let manifest: Value = serde_json::from_str(
        &fs::read_to_string(dir.path().join("fig3.csv.manifest.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(manifest["command"], "figure 3");
    assert_eq!(manifest["grid"]["omega_points"], 401);
    let m1 = manifest["config"]["mirror1"]["omega_m"].as_f64().unwrap();
    let m2 = manifest["config"]["mirror2"]["omega_m"].as_f64().unwrap();
    assert_eq!(m2 - m1, 10.0);
    assert!(manifest["config_text"]
        .as_str()
        .unwrap()
        .contains("temperature"));
}

#[test]
fn figure2_entangled_at_two_kelvin() {
    let dir = tempfile::tempdir().unwrap();
    let (rows, _) = figure("2", dir.path());
    let at_two: Vec<_> = rows
        .iter()
        .filter(|r| (r.temperature - 2.0).abs() < 1e-9)
        .collect();
    assert!(!at_two.is_empty());
    let min_e = at_two
        .iter()
        .map(|r| r.entanglement_degree)
        .fold(f64::INFINITY, f64::min);
    assert!(
        at_two.iter().any(|r| r.entanglement_degree < 1.0),
        "min E at 2 K = {min_e}"
    );
}

#[test]
fn figure4_not_entangled_at_or_above_two_kelvin() {
    let dir = tempfile::tempdir().unwrap();
    let (rows, _) = figure("4", dir.path());
    assert!(rows
        .iter()
        .filter(|r| r.temperature >= 2.0)
        .all(|r| r.entanglement_degree >= 1.0 && !r.entangled));
    assert!(rows.iter().any(|r| r.entangled));
}

#[test]
fn figure_id_is_validated() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "figure",
        "5",
        "--out",
        dir.path().join("x.csv").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_passes_and_is_deterministic() {
    let a = run(&["verify", "--draws", "200", "--seed", "11"]);
    let b = run(&["verify", "--draws", "200", "--seed", "11", "--threads", "3"]);
    assert!(a.status.success(), "{}", stderr(&a));
    assert!(b.status.success());
    let (a, b) = (stdout_json(&a), stdout_json(&b));
    assert_eq!(a["result"], b["result"]);
    assert_eq!(a["result"]["passed"], Value::Bool(true));
    assert!(a["manifest"]["worst_oracle_error"].as_f64().unwrap() < 1e-8);
    assert_eq!(a["manifest"]["sampling"]["mass_kg"][1], 0.1);
}

#[test]
fn verify_reports_corrupted_quantity() {
    let out = run(&["verify", "--draws", "20", "--corrupt", "comm_abs=1.000001"]);
    assert_eq!(out.status.code(), Some(5));
    assert!(stderr(&out).contains("comm_abs"), "{}", stderr(&out));
    let v = stdout_json(&out);
    assert_eq!(v["result"]["failed"], serde_json::json!(["comm_abs"]));
}

#[test]
fn sweep_outputs_identical_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let mut files = Vec::new();
    for threads in ["1", "4"] {
        let path = dir.path().join(format!("s{threads}.csv"));
        let out = run(&[
            "sweep",
            "--mismatch",
            "10",
            "--omega-points",
            "61",
            "--t-points",
            "15",
            "--threads",
            threads,
            "--out",
            path.to_str().unwrap(),
        ]);
        assert!(out.status.success(), "{}", stderr(&out));
        files.push(fs::read(&path).unwrap());
    }
    assert_eq!(files[0], files[1]);
    assert_eq!(
        String::from_utf8_lossy(&files[0]).lines().count(),
        61 * 15 + 1
    );
}

#[test]
fn sweep_power_scan() {
    let cfg = baseline_config();
    let out = run(&[
        "sweep",
        "--config",
        cfg.to_str().unwrap(),
        "--power-multipliers",
        "0,1,4",
        "--format",
        "json",
        "--omega-points",
        "201",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let v = stdout_json(&out);
    let rows = v["result"]["rows"].as_array().unwrap();
    let min_e: Vec<f64> = rows
        .iter()
        .map(|r| r["min_entanglement"].as_f64().unwrap())
        .collect();
    assert!(min_e[0] >= 1.0);
    assert!(min_e[2] <= min_e[1]);
}

#[test]
fn sweep_rejects_bad_grid() {
    let out = run(&["sweep", "--omega-points", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn steady_state_with_bare_detuning() {
    let out = run(&["steady-state", "--bare-detuning", "5.9e6"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let v = stdout_json(&out);
    let eff = v["result"]["effective_detuning_rad_s"].as_f64().unwrap();
    assert!(eff > 5.9e6);
    let n = v["result"]["steady_state"]["photon_number"]
        .as_f64()
        .unwrap();
    assert!(n > 0.0);
}
