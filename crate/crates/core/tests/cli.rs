use std::process::{Command, Output};

use haltkit::dovetail::GroundTruth;

fn haltkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_haltkit")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[derive(serde::Deserialize)]
struct DensityRow {
    n: usize,
    t: u64,
    #[serde(rename = "H_n")]
    cum: u64,
    rho_den: u64,
}

#[test]
fn density_matches_truth() {
    let text = stdout(&haltkit(&["density", "--max-len", "10"]));
    let truth = GroundTruth::desk(10, 1_000_000, 100_000);
    let cum = truth.cumulative_halting();
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let rows: Vec<DensityRow> = rdr.deserialize().collect::<Result<_, _>>().unwrap();
    let last_t = rows.iter().map(|r| r.t).max().unwrap();
    for r in rows.iter().filter(|r| r.t == last_t) {
        assert_eq!(r.cum, cum[r.n], "H_{}", r.n);
        assert_eq!(r.rho_den, 1 << (r.n + 1));
    }
    assert_eq!(rows.iter().filter(|r| r.t == last_t).count(), 11);
}

#[test]
fn usage_errors_exit_2() {
    let out = haltkit(&["teleport"]);
    assert_eq!(out.status.code(), Some(2));
    let out = haltkit(&["approx", "--decider", "fraction", "--lengths", "5,5"]);
    assert_eq!(out.status.code(), Some(2));
    let msg: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert!(msg["error"].is_string(), "{msg}");
}

#[test]
fn bijection_seed_7_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = haltkit(&["bijection", "--seed", "7", "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.success());
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(report["report"]["failures"].as_array().unwrap().len(), 0);
    assert_eq!(report["report"]["window"], 256);
    let transcript = std::fs::read_to_string(dir.path().join("transcript.jsonl")).unwrap();
    assert!(transcript.lines().count() >= 256);
}

#[test]
fn config_file_sets_defaults_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.toml");
    std::fs::write(&cfg, "max_len = 6\nformat = \"json\"\n").unwrap();
    let cfg = cfg.to_str().unwrap();
    let v: serde_json::Value = serde_json::from_str(&stdout(&haltkit(&["--config", cfg, "density"]))).unwrap();
    let max_n = v["rows"].as_array().unwrap().iter().map(|r| r["n"].as_u64().unwrap()).max();
    assert_eq!(max_n, Some(6));
    let text = stdout(&haltkit(&["--config", cfg, "density", "--max-len", "4", "--format", "csv"]));
    assert!(text.starts_with("n,t,"));
    assert!(text.lines().last().unwrap().starts_with("4,"));

    std::fs::write(dir.path().join("bad.toml"), "max_length = 6\n").unwrap();
    let bad = dir.path().join("bad.toml");
    let out = haltkit(&["--config", bad.to_str().unwrap(), "truth"]);
    assert_eq!(out.status.code(), Some(2));
}
