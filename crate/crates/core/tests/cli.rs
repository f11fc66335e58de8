use std::path::Path;
use std::process::{Command, Output};

use serde_json::{json, Value};

fn qwk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qwk"))
        .args(args)
        .env_remove("QWK_PRECISION")
        .output()
        .expect("spawn qwk")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn json_out(args: &[&str]) -> Value {
    let o = qwk(args);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    serde_json::from_str(&stdout(&o)).unwrap()
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    r.records().map(|rec| rec.unwrap().iter().map(String::from).collect()).collect()
}

fn matrix(rows: &[[f64; 2]]) -> Value {
    json!({ "dim": rows.len(), "re": rows })
}

fn write_states(dir: &Path, pairs: Value) -> String {
    let p = dir.join("states.json");
    std::fs::write(&p, json!({ "pairs": pairs }).to_string()).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn metrics_examples() {
    let dir = tempfile::tempdir().unwrap();
    let rho = matrix(&[[0.7, 0.2], [0.2, 0.3]]);
    let diag_a = matrix(&[[0.8, 0.0], [0.0, 0.2]]);
    let diag_b = matrix(&[[0.4, 0.0], [0.0, 0.6]]);
    let sigma = matrix(&[[0.5, -0.1], [-0.1, 0.5]]);
    let states = write_states(
        dir.path(),
        json!([
            { "rho": rho, "sigma": rho },
            { "rho": diag_a, "sigma": diag_b },
            { "rho": rho, "sigma": sigma },
        ]),
    );
    let o = qwk(&["metrics", "--states", &states, "--alphas", "1.001,1.5,2"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let rows = csv_rows(&stdout(&o));
    assert_eq!(rows.len(), 9);
    let f = |s: &str| s.parse::<f64>().unwrap();
    for r in &rows {
        match r[0].as_str() {
            "0" => assert!(r[2..].iter().all(|v| f(v).abs() < 1e-12), "{r:?}"),
            "1" => assert!((f(&r[3]) - f(&r[4])).abs() < 1e-8, "{r:?}"),
            _ => {
                if r[1].starts_with("1.001") {
                    assert!((f(&r[4]) - f(&r[2])).abs() < 1e-3, "{r:?}");
                }
            }
        }
    }
}

#[test]
fn metrics_input_errors_name_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let states = write_states(dir.path(), json!([{ "rho": matrix(&[[1.0, 0.0], [0.0, 0.0]]) }]));
    let o = qwk(&["metrics", "--states", &states]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("sigma"), "{}", stderr(&o));

    let bad = matrix(&[[0.5, 0.0], [0.0, 0.6]]);
    let states = write_states(dir.path(), json!([{ "rho": bad, "sigma": bad }]));
    let o = qwk(&["metrics", "--states", &states]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("pairs[0].rho"), "{}", stderr(&o));
}

#[test]
fn bpsk_sweep_rows() {
    let o = qwk(&["bpsk-sweep", "--n-photon", "0,0.1", "--alpha-steps", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("n_photon,alpha,i_alpha_bits\n"));
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 4);
    assert_eq!(rows[0][2], "0");
    assert_eq!(rows[1][2], "0");
    let v: f64 = rows[3][2].parse().unwrap();
    assert!((v - 0.5687).abs() < 1e-4, "{v}");
}

#[test]
fn bpsk_sweep_link_parameters() {
    let v = json_out(&[
        "bpsk-sweep", "--n-photon", "0.1", "--beta-prime", "1", "--gamma", "0.1", "--eta", "1", "--alpha-steps", "1",
        "--format", "json",
    ]);
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0]["i_alpha_bits"], rows[1]["i_alpha_bits"]);
}

#[test]
fn bpsk_sweep_oracle_gap() {
    let v = json_out(&[
        "bpsk-sweep", "--n-photon", "0.1", "--alpha-steps", "2", "--oracle", "--grid-steps", "40", "--format", "json",
    ]);
    assert!(v["max_abs_gap"].as_f64().unwrap() <= 1e-4);
    assert!(v["rows"][0]["i_alpha_oracle_bits"].is_number());
}

#[test]
fn bound_operating_point() {
    let v = json_out(&["bound", "--rates", "bpsk,0.75", "--format", "json"]);
    let verdicts = v["verdicts"].as_array().unwrap();
    assert_eq!(verdicts.len(), 5);
    for verdict in &verdicts[..4] {
        assert!(verdict["rho_sec"].as_f64().unwrap() < 0.0);
        assert_eq!(verdict["feasible"], false);
    }
    assert_eq!(verdicts[4]["rate"], "3/4");
    assert!((verdicts[4]["rho_sec"].as_f64().unwrap() - 0.119).abs() < 1e-9);
    assert!(v["log2_delta_bound"].as_f64().unwrap() <= -300.0);
    assert_eq!(v["curve"].as_array().unwrap().len(), 2001);
}

#[test]
fn bound_csv_and_summary_file() {
    let dir = tempfile::tempdir().unwrap();
    let summary = dir.path().join("summary.json");
    let o = qwk(&["bound", "--alpha-steps", "100", "--summary", summary.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("alpha,i_alpha_bits,exponent,log2_delta_bound\n"));
    let s: Value = serde_json::from_str(&std::fs::read_to_string(summary).unwrap()).unwrap();
    assert_eq!(s["exponent_verdict"], "positive exponent");
}

#[test]
fn bound_without_sacrifice_is_infeasible() {
    let v = json_out(&["bound", "--rho-sac", "0", "--alpha-steps", "200", "--format", "json"]);
    assert!(v["max_exponent"].as_f64().unwrap() <= 0.0);
    assert_eq!(v["exponent_verdict"], "no positive exponent");
}

#[test]
fn codec_worked_example() {
    let v = json_out(&["codec-encode", "--k1", "2", "--k2", "2", "--m", "2", "--l", "3", "--seed-hex", "5"]);
    assert_eq!(v, json!({"k1": 2, "k2": 2, "n": 4, "seed_hex": "5", "payload_hex": "7"}));
    let d = json_out(&["codec-decode", "--k1", "2", "--k2", "2", "--seed-hex", "5", "--payload-hex", "7"]);
    assert_eq!(d["m_hex"], "2");
}

#[test]
fn codec_zero_seed_passes_payload_through() {
    let v = json_out(&["codec-encode", "--k1", "4", "--k2", "4", "--m", "a", "--l", "5", "--seed-hex", "00"]);
    assert_eq!(v["payload_hex"], "a5");
}

#[test]
fn codec_round_trip_through_frame_file() {
    let dir = tempfile::tempdir().unwrap();
    for outer in ["identity", "rep3"] {
        for m in ["00", "3d", "ff"] {
            let frame = dir.path().join("frame.json");
            let o = qwk(&[
                "codec-encode", "--k1", "8", "--k2", "5", "--outer", outer, "--m", m, "--seed", "17", "--out",
                frame.to_str().unwrap(),
            ]);
            assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
            let d = json_out(&["codec-decode", "--frame", frame.to_str().unwrap()]);
            assert_eq!(d["m_hex"], m);
        }
    }
}

#[test]
fn codec_length_errors_exit_2() {
    let o = qwk(&["codec-encode", "--k1", "2", "--k2", "2", "--m", "2", "--l", "13"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("l:"), "{}", stderr(&o));
    let o = qwk(&["codec-decode", "--k1", "2", "--k2", "2", "--seed-hex", "5", "--payload-hex", "17"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("payload_hex"), "{}", stderr(&o));
}

#[test]
fn input_errors_exit_2() {
    let o = qwk(&["bound", "--n-photon", "-1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("n_photon"));
    let o = qwk(&["bound", "--alpha-min", "0.5"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("alpha"));
    let o = qwk(&["verify", "--suite", "nope"]);
    assert_eq!(o.status.code(), Some(2));
    let o = qwk(&[]);
    assert_eq!(o.status.code(), Some(2));

    let o = Command::new(env!("CARGO_BIN_EXE_qwk"))
        .args(["bound", "--alpha-steps", "10"])
        .env("QWK_PRECISION", "quad")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("QWK_PRECISION"));
}

#[test]
fn compensated_precision_agrees() {
    let plain = qwk(&["bpsk-sweep", "--n-photon", "0.1,1", "--alpha-steps", "5"]);
    let comp = Command::new(env!("CARGO_BIN_EXE_qwk"))
        .args(["bpsk-sweep", "--n-photon", "0.1,1", "--alpha-steps", "5"])
        .env("QWK_PRECISION", "compensated")
        .output()
        .unwrap();
    let (a, b) = (csv_rows(&stdout(&plain)), csv_rows(&stdout(&comp)));
    for (x, y) in a.iter().zip(&b) {
        let (x, y): (f64, f64) = (x[2].parse().unwrap(), y[2].parse().unwrap());
        assert!((x - y).abs() <= 1e-12 * x.abs().max(1.0));
    }
}

#[test]
fn verify_wiretap_reports_exact_collision() {
    let o = qwk(&["verify", "--suite", "wiretap"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let c = v["checks"].as_array().unwrap().iter().find(|c| c["name"] == "wiretap.max_collision_k1_3_k2_2").unwrap();
    assert_eq!(c["detail"], "max collision probability 1/8");
    assert_eq!(c["passed"], true);
}

#[test]
fn verify_corrupted_tolerance_fails_by_name() {
    let o = qwk(&["verify", "--suite", "renyi", "--tolerance-scale", "1e-6", "--pairs", "10"]);
    assert_eq!(o.status.code(), Some(1));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["passed"], false);
    let c = v["checks"].as_array().unwrap().iter().find(|c| c["name"] == "renyi.alpha_to_one").unwrap();
    assert_eq!(c["passed"], false);
    assert!(c["slack"].as_f64().unwrap() < 0.0);
    assert!(stderr(&o).contains("FAIL renyi.alpha_to_one"));
    // the suite keeps going after a failure
    assert!(v["checks"].as_array().unwrap().len() > 10);
}

#[test]
fn verify_all_passes() {
    let v = json_out(&["verify", "--suite", "all"]);
    assert_eq!(v["passed"], true, "{v}");
    assert_eq!(v["failed"], 0);
}

#[test]
fn config_replay_matches_direct_run() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    let o = qwk(&["bpsk-sweep", "--n-photon", "0.3", "--alpha-steps", "3", "--format", "json", "--print-config"]);
    std::fs::write(&cfg, &o.stdout).unwrap();
    let printed: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(printed["command"], "bpsk-sweep");
    let direct = qwk(&["bpsk-sweep", "--n-photon", "0.3", "--alpha-steps", "3", "--format", "json"]);
    let replay = qwk(&["--config", cfg.to_str().unwrap()]);
    assert_eq!(replay.status.code(), Some(0));
    assert_eq!(direct.stdout, replay.stdout);

    let o = qwk(&["--config", cfg.to_str().unwrap(), "verify"]);
    assert_eq!(o.status.code(), Some(2));
}
