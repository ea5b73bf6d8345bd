use std::io::Write;
use std::path::Path;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn arfima() -> Command {
    Command::new(env!("CARGO_BIN_EXE_arfima"))
}

fn run(args: &[&str]) -> Output {
    arfima().args(args).output().expect("binary runs")
}

fn run_with_stdin(args: &[&str], input: &[u8]) -> Output {
    let mut child = arfima()
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(input).unwrap();
    child.wait_with_output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("{e}: {}", String::from_utf8_lossy(&out.stdout))
    })
}

fn data(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(name)
        .display()
        .to_string()
}

fn config(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../configs")
        .join(name)
        .display()
        .to_string()
}

#[test]
fn fit_series_a_fixed_bound() {
    let input = data("seriesA.csv");
    let out = run(&[
        "fit", "--input", &input, "--p", "0", "--q", "0", "--dbar", "1.5", "--likelihood", "exact", "--mean",
        "constant",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let doc = json(&out);
    assert_eq!(doc["schema_version"], 1);
    assert_eq!(doc["status"], "ok");
    assert_eq!(doc["input"]["n"], 197);
    let est = &doc["estimate"];
    assert!((est["d_hat"].as_f64().unwrap() - 0.427).abs() < 0.005);
    assert!((est["interval"]["lower"].as_f64().unwrap() - 0.319).abs() < 0.01);
    assert!((est["interval"]["upper"].as_f64().unwrap() - 0.534).abs() < 0.01);
    assert_eq!(doc["bound_plan"]["m"], 1);
}

#[test]
fn fit_series_c_adaptive_ar1() {
    let input = data("seriesC.csv");
    let out = run(&["fit", "--input", &input, "--p", "1", "--q", "0", "--dbar", "adaptive", "--epsilon", "5e-16"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let doc = json(&out);
    let est = &doc["estimate"];
    assert!((est["d_hat"].as_f64().unwrap() - 0.972).abs() < 0.01, "{est}");
    assert!((est["phi"][0].as_f64().unwrap() - 0.842).abs() < 0.01, "{est}");
    assert_eq!(doc["adaptive"]["selected_d_bar"].as_f64(), Some(2.5));
    assert_eq!(doc["procedure"], "BFR(5e-16)");
}

#[test]
fn constant_series_is_a_fit_failure() {
    let mut csv = String::from("value\n");
    for _ in 0..40 {
        csv.push_str("2.5\n");
    }
    let out = run_with_stdin(&["fit", "--dbar", "1.5"], csv.as_bytes());
    assert_eq!(out.status.code(), Some(2));
    let doc = json(&out);
    assert_eq!(doc["status"], "error");
    assert_eq!(doc["failure"]["kind"], "zero_variance");
}

#[test]
fn usage_errors_exit_with_one() {
    assert_eq!(run(&["fit", "--no-such-flag"]).status.code(), Some(1));
    assert_eq!(run(&["fit", "--dataset", "A", "--dbar", "0.2"]).status.code(), Some(1));
    assert_eq!(run(&["fit", "--dataset", "A", "--likelihood", "css"]).status.code(), Some(1));
    let out = run_with_stdin(&["fit", "--dbar", "1.5"], b"value\n1\nNA\n3\n");
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing value"));
}

#[test]
fn simulate_is_deterministic() {
    let a = run(&["simulate", "--d", "0.55", "--n", "500", "--seed", "7"]);
    let b = run(&["simulate", "--d", "0.55", "--n", "500", "--seed", "7"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let c = run(&["simulate", "--d", "0.55", "--n", "500", "--seed", "8"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn simulate_three_values() {
    let out = run(&["simulate", "--d", "0", "--n", "3", "--seed", "1"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "t,value");
    assert_eq!(lines.len(), 4);
    for l in &lines[1..] {
        let v: f64 = l.split(',').nth(1).unwrap().parse().unwrap();
        assert!(v.is_finite());
    }
}

#[test]
fn simulate_without_seed_prints_one() {
    let out = run(&["simulate", "--d", "-0.3", "--n", "5"]);
    assert!(out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    let seed: u64 = err.trim().strip_prefix("seed: ").unwrap().parse().unwrap();
    let again = run(&["simulate", "--d", "-0.3", "--n", "5", "--seed", &seed.to_string()]);
    assert_eq!(out.stdout, again.stdout);
}

#[test]
fn simulate_pipes_into_fit() {
    let sim = run(&["simulate", "--d", "1", "--n", "100", "--seed", "2"]);
    let out = run_with_stdin(&["fit", "--p", "0", "--q", "0", "--dbar", "adaptive"], &sim.stdout);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let d = json(&out)["estimate"]["d_hat"].as_f64().unwrap();
    assert!(d > 0.6 && d < 1.4, "{d}");
}

fn profile_rows(args: &[&str]) -> Vec<(f64, Option<f64>)> {
    let out = run(args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("d,loglik"));
    lines
        .map(|l| {
            let (d, v) = l.split_once(',').unwrap();
            (d.parse().unwrap(), (v != "NA").then(|| v.parse().unwrap()))
        })
        .collect()
}

#[test]
fn profile_series_a_has_one_interior_maximum() {
    let input = data("seriesA.csv");
    let rows = profile_rows(&[
        "profile", "--input", &input, "--dbar", "1.5", "--from", "-0.4", "--to", "1.4", "--step", "0.01",
    ]);
    assert_eq!(rows.len(), 181);
    let vals: Vec<(f64, f64)> = rows.iter().map(|(d, v)| (*d, v.expect("in range"))).collect();
    let (imax, &(dmax, _)) = vals
        .iter()
        .enumerate()
        .max_by(|a, b| a.1 .1.total_cmp(&b.1 .1))
        .unwrap();
    assert!((dmax - 0.427).abs() <= 0.01, "{dmax}");
    // increasing before, decreasing after
    assert!(vals[..imax].windows(2).all(|w| w[1].1 > w[0].1));
    assert!(vals[imax..].windows(2).all(|w| w[1].1 < w[0].1));
    // smooth near the maximum
    for w in vals[imax - 10..imax + 10].windows(2) {
        assert!((w[1].1 - w[0].1).abs() < 1.0);
    }
}

#[test]
fn profile_outside_range_is_missing() {
    let rows = profile_rows(&["profile", "--dataset", "A", "--dbar", "1.5", "--from", "-2.6", "--to", "1.6", "--step", "0.05"]);
    for (d, v) in rows {
        let inside = (-2.5..1.5).contains(&d);
        assert_eq!(v.is_some(), inside, "d = {d}");
    }
}

#[test]
fn bench_rejects_bad_config_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    std::fs::write(&cfg, "replications = 3\ncolour = blue\nd_values = 0, x\n").unwrap();
    let outdir = dir.path().join("out");
    let out = run(&["bench", cfg.to_str().unwrap(), "--output", outdir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("colour") && err.contains("'x'"), "{err}");
    assert!(!outdir.exists());
}

#[test]
fn bench_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("tiny.cfg");
    std::fs::write(
        &cfg,
        "d_values = 0.2, 1.1\nn_values = 60\nreplications = 6\nobjectives = exact, whittle\nd_bar_values = 1.5, adaptive\nepsilon_values = 0.5\nseed = 3\n",
    )
    .unwrap();
    let mut csvs = Vec::new();
    for (k, jobs) in ["1", "2"].iter().enumerate() {
        let outdir = dir.path().join(format!("out{k}"));
        let out = run(&["bench", cfg.to_str().unwrap(), "--jobs", jobs, "--output", outdir.to_str().unwrap()]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        let progress = String::from_utf8_lossy(&out.stderr);
        assert_eq!(progress.lines().filter(|l| l.starts_with('[')).count(), 8);
        assert_eq!(std::fs::read_dir(outdir.join("raw")).unwrap().count(), 8);
        assert!(outdir.join("summary.json").exists());
        csvs.push(std::fs::read(outdir.join("results.csv")).unwrap());
    }
    assert_eq!(csvs[0], csvs[1]);
}

#[test]
fn bundled_desk_config_runs() {
    let dir = tempfile::tempdir().unwrap();
    let outdir = dir.path().join("desk");
    let start = std::time::Instant::now();
    let out = run(&["bench", &config("desk.cfg"), "--output", outdir.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(start.elapsed().as_secs() < 600);
    let text = std::fs::read_to_string(outdir.join("results.csv")).unwrap();
    assert_eq!(text.lines().count(), 1 + 6);
}
