use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn orbitsep(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_orbitsep"))
        .args(args)
        .output()
        .expect("spawn orbitsep")
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("JSON report")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn galois_exit_codes() {
    let out = orbitsep(&["galois-check", "--n", "3"]);
    assert_eq!(code(&out), 0);
    let csv = stdout(&out);
    assert!(csv.starts_with("element_index,sigma,tau,embedded\n"));
    assert_eq!(csv.lines().count(), 7);
    assert!(csv.lines().skip(1).all(|l| l.ends_with(",true")));

    let out = orbitsep(&["galois-check", "--n", "5"]);
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(code(&orbitsep(&["separation", "--bogus"])), 2);
    assert_eq!(code(&orbitsep(&["frobnicate"])), 2);
    assert_eq!(code(&orbitsep(&["sortsep", "--generic", "--count", "3"])), 2);
    assert_eq!(code(&orbitsep(&["badset", "--n", "3", "--matrix", "{not json"])), 2);
    assert_eq!(code(&orbitsep(&["pointcloud", "--compare", "x.csv"])), 2);
}

#[test]
fn clean_separation_writes_header_only_csv() {
    let out = orbitsep(&["separation", "--n", "3", "--trials", "300"]);
    assert_eq!(code(&out), 0);
    assert_eq!(
        stdout(&out),
        "suite,record,trial,kind,feature_distance,in_bad_set,left,right,left_features,right_features\n"
    );
}

#[test]
fn broken_family_reports_replayable_witnesses() {
    let out = orbitsep(&["invariance", "--family", "raw-diagonal", "--n", "3", "--trials", "50", "--format", "json"]);
    assert_eq!(code(&out), 1);
    let v = json(&out);
    let splits = v["report"]["false_splits"].as_array().unwrap();
    assert!(!splits.is_empty());
    let w = &splits[0];
    // The raw diagonal is the diagonal itself.
    assert_eq!(w["left"]["diag"], w["left_features"]);
    assert_eq!(w["right"]["diag"], w["right_features"]);
}

#[test]
fn uncertified_merges_are_violations() {
    let out = orbitsep(&["separation", "--family", "diag-offdiag", "--n", "3", "--trials", "400", "--format", "json"]);
    assert_eq!(code(&out), 1);
    let report = &json(&out)["report"];
    assert!(report["uncertified_merges"].as_u64().unwrap() > 0);
    assert!(report["false_splits"].as_array().unwrap().is_empty());
}

#[test]
fn veronese_non_coprime_yields_collision() {
    let out = orbitsep(&["veronese", "--n", "4", "--j", "2", "--trials", "200", "--budget", "1000", "--format", "json"]);
    assert_eq!(code(&out), 1);
    assert!(!json(&out)["collision"].is_null());
    let out = orbitsep(&["veronese", "--n", "5", "--j", "2", "--trials", "500", "--budget", "1000"]);
    assert_eq!(code(&out), 0);
}

#[test]
fn badset_replays_one_matrix() {
    // Diagonal ties make some non-embedded swap fix f*.
    let tie = r#"{"n":3,"diag":[1.0,1.0,2.0],"offdiag":[0.5,-1.0,3.0]}"#;
    let out = orbitsep(&["badset", "--n", "3", "--matrix", tie, "--format", "json"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["verdict"]["member"], true);

    let generic = r#"{"n":3,"diag":[0.3,-1.2,2.1],"offdiag":[0.7,-0.4,1.9]}"#;
    let v = json(&orbitsep(&["badset", "--n", "3", "--matrix", generic, "--format", "json"]));
    assert_eq!(v["verdict"]["member"], false);

    let wrong_n = orbitsep(&["badset", "--n", "4", "--matrix", generic]);
    assert_eq!(code(&wrong_n), 2);
}

#[test]
fn report_and_manifest_files() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("sort.csv");
    let out_str = out_path.to_str().unwrap();
    let out = orbitsep(&["sortsep", "--trials", "200", "--seed", "9", "--out", out_str]);
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty());
    assert!(std::fs::read_to_string(&out_path).unwrap().starts_with("suite,record"));

    let manifest: Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("sort.csv.manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["subcommand"], "sortsep");
    assert_eq!(manifest["seed"], 9);
    assert_eq!(manifest["exit_code"], 0);
    assert_eq!(manifest["outputs"][0], out_str);
    assert_eq!(manifest["args"]["sortsep"]["trials"], 200);
    assert!(manifest["finished_at"].as_f64() >= manifest["started_at"].as_f64());
}

#[test]
fn unwritable_output_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("missing").join("r.csv");
    let out = orbitsep(&["galois-check", "--out", bad.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
}

#[test]
fn outputs_do_not_depend_on_worker_count() {
    let cases: [&[&str]; 4] = [
        &["separation", "--family", "conjugation", "--n", "4", "--trials", "400", "--seed", "3"],
        &["pointcloud", "--d", "2", "--n", "4", "--trials", "200", "--format", "json"],
        &["badset", "--n", "3", "--trials", "500", "--format", "json"],
        &["mra", "--n", "5", "--sigmas", "0.5,1", "--trials", "2", "--slope-min", "0", "--slope-max", "100"],
    ];
    for args in cases {
        let run = |threads: &str| {
            let mut a = args.to_vec();
            a.extend(["--threads", threads]);
            orbitsep(&a)
        };
        let (one, four) = (run("1"), run("4"));
        assert_eq!(one.status.code(), four.status.code(), "{args:?}");
        assert_eq!(one.stdout, four.stdout, "{args:?}");
    }
}

#[test]
fn seeds_change_samples() {
    let a = orbitsep(&["badset", "--n", "3", "--trials", "50", "--seed", "1", "--format", "json"]);
    let b = orbitsep(&["badset", "--n", "3", "--trials", "50", "--seed", "2", "--format", "json"]);
    assert_ne!(
        json(&a)["smallest_residual_over_tolerance"],
        json(&b)["smallest_residual_over_tolerance"]
    );
}

fn write_cloud(path: &Path, points: &[[f64; 2]]) {
    let mut text = String::from("x0,x1\n");
    for p in points {
        text.push_str(&format!("{},{}\n", p[0], p[1]));
    }
    std::fs::write(path, text).unwrap();
}

#[test]
fn pointcloud_files_are_compared() {
    let dir = tempfile::tempdir().unwrap();
    let square = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
    // Rotated by 90 degrees, shifted and relabeled.
    let moved = [[4.0, 6.0], [5.0, 5.0], [5.0, 6.0], [4.0, 5.0]];
    let kite = [[0.0, 0.0], [2.0, 0.0], [1.0, 1.0], [1.0, -3.0]];
    let (a, b, c) = (dir.path().join("a.csv"), dir.path().join("b.csv"), dir.path().join("c.csv"));
    write_cloud(&a, &square);
    write_cloud(&b, &moved);
    write_cloud(&c, &kite);
    let (a, b, c) = (a.to_str().unwrap(), b.to_str().unwrap(), c.to_str().unwrap());

    let single = orbitsep(&["pointcloud", "--cloud", a, "--format", "json"]);
    assert_eq!(code(&single), 0);
    assert_eq!(json(&single)["n"], 4);

    let same = orbitsep(&["pointcloud", "--cloud", a, "--compare", b, "--format", "json"]);
    assert_eq!(code(&same), 0);
    let v = json(&same);
    assert_eq!(v["same_orbit"], true);
    assert_eq!(v["features_equal"], true);
    assert!(v["alignment"]["residual"].as_f64().unwrap() < 1e-12);

    let other = json(&orbitsep(&["pointcloud", "--cloud", a, "--compare", c, "--format", "json"]));
    assert_eq!(other["same_orbit"], false);
    assert_eq!(other["features_equal"], false);

    let ragged = dir.path().join("r.csv");
    std::fs::write(&ragged, "x0,x1\n1,2\n3\n").unwrap();
    assert_eq!(code(&orbitsep(&["pointcloud", "--cloud", ragged.to_str().unwrap()])), 2);
    assert_eq!(code(&orbitsep(&["pointcloud", "--cloud", "/nonexistent/cloud.csv"])), 2);
}

#[test]
fn mra_config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("mra.cfg");
    std::fs::write(&cfg, "# small sweep\nn = 5\nsigmas = 0.5, 1\ntrials = 2\nseed = 4\n").unwrap();
    let cfg = cfg.to_str().unwrap();
    let band = ["--slope-min", "0", "--slope-max", "100"];

    let mut args = vec!["mra", "--config", cfg, "--format", "json"];
    args.extend(band);
    let out = orbitsep(&args);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["result"]["config"]["n"], 5);
    assert_eq!(v["result"]["config"]["seed"], 4);
    assert_eq!(v["result"]["rows"].as_array().unwrap().len(), 4);

    args.extend(["--trials", "1", "--n", "4"]);
    let v = json(&orbitsep(&args));
    assert_eq!(v["result"]["config"]["n"], 4);
    assert_eq!(v["result"]["rows"].as_array().unwrap().len(), 2);

    let mut csv_args = vec!["mra", "--config", cfg];
    csv_args.extend(band);
    let csv = stdout(&orbitsep(&csv_args));
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "sigma,N_required,censored,mean_err,power_err,bispec_err,align_err,kind,trial,slope");
    assert_eq!(lines.len(), 1 + 4 + 2 + 1);
    assert!(lines.last().unwrap().starts_with(",,,,,,,summary,,"));

    std::fs::write(dir.path().join("bad.cfg"), "n = seven\n").unwrap();
    let bad = dir.path().join("bad.cfg");
    assert_eq!(code(&orbitsep(&["mra", "--config", bad.to_str().unwrap()])), 2);
}

#[test]
fn mra_censoring_exits_3() {
    let out = orbitsep(&["mra", "--n", "5", "--sigmas", "1,4", "--trials", "1", "--max-samples", "64"]);
    assert_eq!(code(&out), 3);
    assert!(stdout(&out).contains("true"));
}
