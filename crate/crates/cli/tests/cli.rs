use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn scenario(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("scenarios").join(name)
}

fn kdq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kdq"))
        .args(args)
        .output()
        .expect("kdq runs")
}

fn run_on(cmd: &str, path: &Path, extra: &[&str]) -> Output {
    let mut args = vec![cmd, "--scenario", path.to_str().unwrap()];
    args.extend_from_slice(extra);
    kdq(&args)
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write_temp(dir: &tempfile::TempDir, name: &str, body: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, body).unwrap();
    p
}

/// Data rows (no `#` lines), split on commas, header dropped.
fn rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_owned).collect())
        .collect()
}

fn value_of(text: &str, key: &str) -> f64 {
    rows(text)
        .into_iter()
        .find(|r| r[0] == key)
        .unwrap_or_else(|| panic!("missing {key}"))[1]
        .parse()
        .unwrap()
}

#[test]
fn every_verb_succeeds_on_bundled_qubit() {
    let s = scenario("qubit_anomalous_t.json");
    for cmd in ["table", "decompose", "values", "transition", "decay", "validate"] {
        for format in ["csv", "json"] {
            let o = run_on(cmd, &s, &["--format", format]);
            assert!(
                o.status.success(),
                "{cmd} {format}: {}",
                String::from_utf8_lossy(&o.stderr)
            );
            if format == "json" {
                let _: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
            } else {
                assert!(stdout(&o).starts_with("# {"), "{cmd} lacks metadata line");
            }
        }
    }
}

#[test]
fn values_report_anomalous_weak_value() {
    let o = run_on("values", &scenario("qubit_anomalous_t.json"), &[]);
    let text = stdout(&o);
    let theta = 0.7 * std::f64::consts::PI;
    let oracle = (theta.cos() - theta.sin()) / (theta.cos() + theta.sin());
    assert!((value_of(&text, "weak_value_re") - oracle).abs() < 1e-12);
    assert!(text.contains("anomalous,true"));
}

#[test]
fn transition_endpoints_match_values() {
    let values = stdout(&run_on("values", &scenario("qubit_anomalous_f.json"), &[]));
    let sweep = rows(&stdout(&run_on("transition", &scenario("qubit_anomalous_f.json"), &[])));
    let first: f64 = sweep[0][3].parse().unwrap();
    let last: f64 = sweep.last().unwrap()[3].parse().unwrap();
    assert_eq!(sweep[0][1].parse::<f64>().unwrap(), 1.0);
    assert_eq!(sweep.last().unwrap()[1].parse::<f64>().unwrap(), 0.0);
    assert!((first - value_of(&values, "weak_value_re")).abs() < 1e-12);
    assert!((last - value_of(&values, "conditional_value")).abs() < 1e-12);
}

#[test]
fn time_mode_matches_decoherence_mode_for_qubit() {
    let dir = tempfile::tempdir().unwrap();
    let t_rows = rows(&stdout(&run_on("transition", &scenario("qubit_anomalous_t.json"), &[])));
    let factors: Vec<String> = t_rows.iter().map(|r| r[1].clone()).collect();
    let mut base: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(scenario("qubit_anomalous_t.json")).unwrap()).unwrap();
    let fs: Vec<f64> = factors.iter().map(|x| x.parse().unwrap()).collect();
    base["grid"] = serde_json::json!({ "f_values": fs });
    let p = write_temp(&dir, "f.json", &base.to_string());
    let f_rows = rows(&stdout(&run_on("transition", &p, &[])));
    assert_eq!(t_rows.len(), f_rows.len());
    for (t, f) in t_rows.iter().zip(&f_rows) {
        for col in [3, 4, 5] {
            let (x, y): (f64, f64) = (t[col].parse().unwrap(), f[col].parse().unwrap());
            assert!((x - y).abs() < 1e-12, "column {col}: {x} vs {y}");
        }
        assert!(t[6].parse::<f64>().unwrap() < 1e-12);
    }
}

#[test]
fn output_is_deterministic_and_out_flag_matches_stdout() {
    let s = scenario("qutrit_fourier_t.json");
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sweep.csv");
    let a = run_on("transition", &s, &[]);
    let b = run_on("transition", &s, &["--out", out.to_str().unwrap()]);
    assert!(b.status.success() && b.stdout.is_empty());
    assert_eq!(a.stdout, std::fs::read(&out).unwrap());
}

#[test]
fn table_json_round_trips_through_validate() {
    let dir = tempfile::tempdir().unwrap();
    for name in [
        "qubit_anomalous_t.json",
        "qutrit_fourier_t.json",
        "qubit_shared_basis.json",
    ] {
        let out = dir.path().join("table.json");
        let made = run_on(
            "table",
            &scenario(name),
            &["--format", "json", "--out", out.to_str().unwrap()],
        );
        assert!(made.status.success());
        let checked = run_on("validate", &out, &[]);
        assert!(
            checked.status.success(),
            "{name}: {}",
            String::from_utf8_lossy(&checked.stderr)
        );
        assert!(stdout(&checked).contains("overall,,PASS"));
    }
}

#[test]
fn validate_rejects_corrupted_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("table.json");
    run_on(
        "table",
        &scenario("qubit_anomalous_t.json"),
        &["--format", "json", "--out", out.to_str().unwrap()],
    );
    let mut v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    v["entries"][0][1] = serde_json::json!(0.25);
    let bad = write_temp(&dir, "bad.json", &v.to_string());
    let o = run_on("validate", &bad, &[]);
    assert_eq!(o.status.code(), Some(4));
    assert!(stdout(&o).contains("overall,,FAIL"));
}

#[test]
fn decay_flags_pass_for_qubit_and_report_for_qutrit() {
    let q = stdout(&run_on("decay", &scenario("qubit_anomalous_t.json"), &[]));
    assert!(rows(&q).iter().all(|r| r[6] == "PASS"));
    let t = run_on("decay", &scenario("qutrit_fourier_t.json"), &[]);
    assert!(t.status.success());
    assert!(rows(&stdout(&t)).iter().all(|r| r[6] == "REPORT"));
}

#[test]
fn shared_basis_has_no_nonclassicality() {
    let text = stdout(&run_on("decompose", &scenario("qubit_shared_basis.json"), &[]));
    let line = text.lines().find(|l| l.starts_with("# nonclassicality,")).unwrap();
    let total: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
    assert_eq!(total, 0.0);
}

#[test]
fn reconstruct_flag_reports_status() {
    let ok = stdout(&run_on(
        "table",
        &scenario("qubit_anomalous_t.json"),
        &["--reconstruct"],
    ));
    assert!(ok.contains("# reconstruction,ok"));
    let shared = run_on("table", &scenario("qubit_shared_basis.json"), &["--reconstruct"]);
    assert!(shared.status.success());
    assert!(stdout(&shared).contains("# reconstruction,non_invertible"));
    assert!(String::from_utf8_lossy(&shared.stderr).contains("warning"));
}

#[test]
fn input_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.json");
    assert_eq!(run_on("table", &missing, &[]).status.code(), Some(2));

    let broken = write_temp(&dir, "broken.json", "{\"dim\": 2,\n  \"state\": ");
    let o = run_on("table", &broken, &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));

    let mut v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(scenario("qubit_shared_basis.json")).unwrap()).unwrap();
    v["state"] = serde_json::json!({ "bloch": [1.0, 1.0, 0.0] });
    let unphysical = write_temp(&dir, "unphysical.json", &v.to_string());
    let o = run_on("values", &unphysical, &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("state"));

    v["state"] = serde_json::json!({ "bloch": [0.0, 0.0, 1.0] });
    v["a_observable"]["eigenvalues"] = serde_json::json!([1.0, 1.0]);
    let degenerate = write_temp(&dir, "degenerate.json", &v.to_string());
    assert_eq!(run_on("table", &degenerate, &[]).status.code(), Some(2));

    let o = run_on("decay", &scenario("qubit_anomalous_f.json"), &[]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn orthogonal_postselection_exits_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let mut v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(scenario("qubit_shared_basis.json")).unwrap()).unwrap();
    v["state"] = serde_json::json!({ "bloch": [0.0, 0.0, -1.0] });
    let p = write_temp(&dir, "orthogonal.json", &v.to_string());
    let o = run_on("values", &p, &[]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("postselection"));
}

#[test]
fn failing_grid_point_is_reported_in_place() {
    let dir = tempfile::tempdir().unwrap();
    let mut v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(scenario("qubit_shared_basis.json")).unwrap()).unwrap();
    v["state"] = serde_json::json!({ "bloch": [0.0, 0.0, -1.0] });
    v["grid"] = serde_json::json!({ "f_values": [1.0, 0.5, 0.0] });
    let p = write_temp(&dir, "points.json", &v.to_string());
    let o = run_on("transition", &p, &[]);
    assert!(o.status.success());
    let r = rows(&stdout(&o));
    assert_eq!(r.len(), 3);
    assert!(r.iter().all(|row| row[7].contains("grid point")));
}
