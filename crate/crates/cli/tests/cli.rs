use std::path::Path;
use std::process::{Command, Output};

fn wdiomp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wdiomp"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn small_config(dir: &Path) -> std::path::PathBuf {
    let out = wdiomp(&["preset", "exp3"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout)
        .unwrap()
        .replace("num_antennas = 128", "num_antennas = 32")
        .replace("num_atoms = 200", "num_atoms = 64");
    let path = dir.join("small.toml");
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn cost_prints_both_schemes() {
    let out = wdiomp(&["cost"]);
    assert!(out.status.success());
    assert_eq!(
        String::from_utf8(out.stdout).unwrap(),
        "centralized_somp 14440\ndiomp_family 12000\n"
    );
}

#[test]
fn run_is_reproducible_and_honours_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let cfg = cfg.to_str().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for out in [&a, &b] {
        let status = wdiomp(&[
            "run", "--config", cfg, "--trials", "5", "--seed", "9", "--t", "12,24", "--out",
            out.to_str().unwrap(),
        ]);
        assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
    }
    let text = std::fs::read_to_string(&a).unwrap();
    assert_eq!(text, std::fs::read_to_string(&b).unwrap());

    let mut rows = csv::Reader::from_reader(text.as_bytes());
    let header: Vec<String> = rows.headers().unwrap().iter().map(str::to_owned).collect();
    assert_eq!(header, ["scenario", "algorithm", "T", "snr_tag", "asce", "nmse", "bits", "trials"]);
    let records: Vec<csv::StringRecord> = rows.records().map(Result::unwrap).collect();
    assert_eq!(records.len(), 2 * 4);
    assert!(records.iter().all(|r| &r[7] == "5"));
    assert!(records.iter().all(|r| &r[2] == "12" || &r[2] == "24"));
}

#[test]
fn sweep_builds_the_training_grid() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let out = dir.path().join("sweep.csv");
    let status = wdiomp(&[
        "sweep", "--config", cfg.to_str().unwrap(), "--trials", "2", "--t-min", "10", "--t-max", "20",
        "--t-step", "5", "--out", out.to_str().unwrap(),
    ]);
    assert!(status.status.success());
    let text = std::fs::read_to_string(out).unwrap();
    let ts: Vec<&str> = text.lines().skip(1).map(|l| l.split(',').nth(2).unwrap()).collect();
    assert_eq!(ts.len(), 3 * 4);
    assert!(ts[..4].iter().all(|&t| t == "10"));
    assert!(ts[8..].iter().all(|&t| t == "20"));

    let bad = wdiomp(&["sweep", "--preset", "exp1", "--t-step", "0", "--out", "/dev/null"]);
    assert!(!bad.status.success());
}

#[test]
fn trace_writes_json_lines() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let out = dir.path().join("trace.jsonl");
    let status = wdiomp(&[
        "trace", "--config", cfg.to_str().unwrap(), "--trials", "2", "--t", "20", "--out",
        out.to_str().unwrap(),
    ]);
    assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
    let text = std::fs::read_to_string(out).unwrap();
    assert!(text.lines().count() > 0);
    for line in text.lines() {
        assert!(line.starts_with('{') && line.ends_with('}'));
    }
}

#[test]
fn bad_inputs_fail_cleanly() {
    assert!(!wdiomp(&["run", "--preset", "exp9", "--out", "/dev/null"]).status.success());
    assert!(!wdiomp(&["run", "--out", "/dev/null"]).status.success());
    assert!(!wdiomp(&["run", "--config", "/nonexistent.toml", "--out", "/dev/null"]).status.success());
    let trace = wdiomp(&["trace", "--preset", "exp1", "--t", "20", "--algorithm", "omp", "--out", "/dev/null"]);
    assert!(!trace.status.success());
}
