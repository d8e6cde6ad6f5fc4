use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn qtel(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qtel"))
        .args(args)
        .env_remove("QTEL_TOL")
        .output()
        .expect("qtel runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write_state(dir: &Path, name: &str, n_qubits: usize, amps: &[(usize, [f64; 2])]) -> PathBuf {
    let mut amplitudes = vec![[0.0, 0.0]; 1 << n_qubits];
    for &(k, z) in amps {
        amplitudes[k] = z;
    }
    let path = dir.join(name);
    let body = serde_json::json!({ "n_qubits": n_qubits, "amplitudes": amplitudes });
    fs::write(&path, body.to_string()).unwrap();
    path
}

struct Files {
    _dir: TempDir,
    ghz4: PathBuf,
    bell_pairs: PathBuf,
    info: PathBuf,
}

fn files() -> Files {
    let dir = TempDir::new().unwrap();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let ghz4 = write_state(dir.path(), "ghz4.json", 4, &[(0, [h, 0.0]), (15, [h, 0.0])]);
    let bell_pairs = write_state(
        dir.path(),
        "bellpairs.json",
        4,
        &[
            (0, [0.5, 0.0]),
            (5, [0.5, 0.0]),
            (10, [0.5, 0.0]),
            (15, [0.5, 0.0]),
        ],
    );
    let info = write_state(
        dir.path(),
        "info.json",
        2,
        &[
            (0, [0.36, 0.0]),
            (1, [0.0, 0.48]),
            (2, [0.48, 0.0]),
            (3, [0.0, -0.64]),
        ],
    );
    Files {
        _dir: dir,
        ghz4,
        bell_pairs,
        info,
    }
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn channel_check_ghz4_fails_with_deviation() {
    let f = files();
    let o = qtel(&["channel", "check", "--file", p(&f.ghz4)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("deviation 0.25"), "{}", stdout(&o));

    let o = qtel(&[
        "channel",
        "check",
        "--file",
        p(&f.bell_pairs),
        "--format",
        "json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["schema"], "qtel/1");
    assert_eq!(v["data"]["perfect"]["holds"], true);
}

#[test]
fn teleport_bell_pairs_all_faithful() {
    let f = files();
    let o = qtel(&[
        "teleport",
        "run",
        "--n",
        "2",
        "--info",
        p(&f.info),
        "--channel",
        p(&f.bell_pairs),
        "--expect-perfect",
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let text = stdout(&o);
    let rows: Vec<&str> = text.lines().skip(1).take(16).collect();
    assert_eq!(rows.len(), 16);
    assert!(rows.iter().all(|r| r.contains("1.000000000")), "{text}");
}

#[test]
fn teleport_ghz_expect_perfect_fails() {
    let f = files();
    let o = qtel(&[
        "teleport",
        "run",
        "--info",
        p(&f.info),
        "--channel",
        p(&f.ghz4),
        "--expect-perfect",
    ]);
    assert_eq!(o.status.code(), Some(1));
    let o = qtel(&[
        "teleport",
        "run",
        "--info",
        p(&f.info),
        "--channel",
        p(&f.ghz4),
    ]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn sampled_json_is_deterministic() {
    let f = files();
    let args = [
        "teleport",
        "run",
        "--info",
        p(&f.info),
        "--channel",
        p(&f.ghz4),
        "--mode",
        "sampled",
        "--shots",
        "300",
        "--seed",
        "42",
        "--format",
        "json",
    ];
    let a = qtel(&args);
    let b = qtel(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["data"]["samples"]["shots"], 300);
    let mut other = args.to_vec();
    other[11] = "43";
    assert_ne!(qtel(&other).stdout, a.stdout);
}

#[test]
fn magic_witness_reports_bound() {
    let o = qtel(&["magic", "witness", "--n", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("max clique 5 < 15"));
    let o = qtel(&["magic", "witness", "--n", "1", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["data"]["obstruction"], false);
}

#[test]
fn magic_verify_named_set() {
    let o = qtel(&[
        "magic",
        "verify",
        "--set",
        "F,G,D1,D2,D3",
        "--trials",
        "50",
        "--seed",
        "3",
        "--tol",
        "1e-12",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let o = qtel(&["magic", "verify", "--set", "F,B1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("commute"));
}

#[test]
fn magic_cliques_and_catalog_json() {
    let o = qtel(&["magic", "cliques", "--n", "3", "--format", "json"]);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["data"]["max_size"], 7);
    assert_eq!(v["data"]["listed"].as_array().unwrap().len(), 288);

    let o = qtel(&["magic", "catalog", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["data"]["state_typos"], serde_json::json!(["D1", "D2"]));
    assert_eq!(v["data"]["quarter_bases"]["max_sharing_only_identity"], 5);
}

#[test]
fn bell_gen_round_trips_through_teleport() {
    let f = files();
    let dir = TempDir::new().unwrap();
    let basis = dir.path().join("basis.json");
    let o = qtel(&["bell", "gen", "--n", "2", "--out", p(&basis)]);
    assert_eq!(o.status.code(), Some(0));
    let o = qtel(&[
        "teleport",
        "run",
        "--info",
        p(&f.info),
        "--channel",
        p(&f.bell_pairs),
        "--basis",
        p(&basis),
        "--expect-perfect",
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );

    let o = qtel(&["bell", "gen", "--seed-file", p(&f.ghz4)]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn masfi_matches_closed_form() {
    let o = qtel(&[
        "masfi",
        "--lambda",
        "0.7",
        "--expect-closed-form",
        "1e-3",
        "--format",
        "json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    let gap =
        (v["data"]["masfi"].as_f64().unwrap() - v["data"]["closed_form"].as_f64().unwrap()).abs();
    assert!(gap < 1e-3);
}

#[test]
fn usage_and_parse_errors_exit_2() {
    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{\"n_qubits\": 1,\n \"amplitudes\": [[1, 0], [0, ]]}").unwrap();
    let o = qtel(&["channel", "check", "--file", p(&bad)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));

    let short = dir.path().join("short.json");
    fs::write(&short, r#"{"n_qubits": 2, "amplitudes": [[1, 0]]}"#).unwrap();
    let o = qtel(&["channel", "check", "--file", p(&short)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("amplitudes"));

    assert_eq!(
        qtel(&["channel", "check", "--file", "/nonexistent.json"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        qtel(&["magic", "cliques", "--n", "4"]).status.code(),
        Some(2)
    );
    assert_eq!(
        qtel(&["magic", "witness", "--n", "2", "--tol", "-1"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn tolerance_from_environment() {
    let f = files();
    let o = Command::new(env!("CARGO_BIN_EXE_qtel"))
        .args(["channel", "check", "--file", p(&f.ghz4)])
        .env("QTEL_TOL", "0.5")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn help_names_the_relation() {
    let o = qtel(&["channel", "check", "--help"]);
    assert!(stdout(&o).contains("E†E = 2⁻ⁿ·1"));
    let o = qtel(&["teleport", "run", "--help"]);
    assert!(stdout(&o).contains("Eᵀ B^(α)†"));
}
