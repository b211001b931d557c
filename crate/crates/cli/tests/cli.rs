use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn nsumkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nsumkit")).args(args).output().expect("binary runs")
}

fn fixture(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name).display().to_string()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.display().to_string()
}

const SS: [&str; 10] =
    ["--epsilon", "0.1", "--alpha", "0.05", "--prevalence", "0.1", "--mean-degree", "10", "--population", "10000"];

#[test]
fn samplesize_worked_example() {
    let mut args = vec!["samplesize"];
    args.extend(SS);
    args.push("--z2");
    let o = nsumkit(&args);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "n,raw,truncated\n400,399.6,false\n");

    let o = nsumkit(&args[..args.len() - 1]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with("n,raw,truncated\n384,"), "{}", stdout(&o));
}

#[test]
fn samplesize_rejects_bad_values() {
    let mut args = vec!["samplesize"];
    args.extend(SS);
    args[8] = "0";
    let o = nsumkit(&args);
    assert_eq!(code(&o), 2);
    assert!(!o.stderr.is_empty());
    assert_eq!(code(&nsumkit(&["samplesize", "--epsilon", "0.1"])), 2);
}

#[test]
fn estimate_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let constant = write(dir.path(), "c.csv", &"100,10\n".repeat(100));
    let o = nsumkit(&["estimate", "--input", &constant, "--population", "1000"]);
    assert_eq!(code(&o), 0);
    let lines: Vec<String> = stdout(&o).lines().map(String::from).collect();
    assert_eq!(lines[0], "n_hat,variance,ci_lo,ci_hi,n,alpha");
    let f: Vec<&str> = lines[1].split(',').collect();
    assert_eq!(f[0], "100");
    assert!((f[2].parse::<f64>().unwrap() - 94.12).abs() < 0.01);
    assert!((f[3].parse::<f64>().unwrap() - 105.88).abs() < 0.01);

    let no_hidden = write(dir.path(), "z.csv", &"100,0\n".repeat(5));
    let o = nsumkit(&["estimate", "--input", &no_hidden, "--population", "1000"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).lines().nth(1).unwrap().starts_with("0,0,0,0,"));

    let zeros = write(dir.path(), "zeros.csv", &"0,0\n".repeat(5));
    assert_eq!(code(&nsumkit(&["estimate", "--input", &zeros, "--population", "1000"])), 3);
    let empty = write(dir.path(), "empty.csv", "");
    assert_eq!(code(&nsumkit(&["estimate", "--input", &empty, "--population", "1000"])), 2);
    let bad = write(dir.path(), "bad.csv", "10,x\n");
    assert_eq!(code(&nsumkit(&["estimate", "--input", &bad, "--population", "1000"])), 2);
    let missing = dir.path().join("nope.csv").display().to_string();
    assert_eq!(code(&nsumkit(&["estimate", "--input", &missing, "--population", "1000"])), 2);
}

fn run_to(dir: &Path, args: &[&str]) -> Vec<u8> {
    let out = dir.display().to_string();
    let mut full: Vec<&str> = args.to_vec();
    full.extend(["--out", &out]);
    let o = nsumkit(&full);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    fs::read(dir.join(format!("{}.csv", args[0]))).unwrap()
}

fn rerun_is_identical(args: &[&str]) -> (Vec<u8>, PathBuf, tempfile::TempDir) {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let first = run_to(a.path(), args);
    let second = run_to(b.path(), args);
    assert_eq!(first, second, "{args:?}");
    let manifest = a.path().join(format!("{}.manifest.json", args[0]));
    (first, manifest, a)
}

#[test]
fn simulate_is_reproducible_and_rerunnable_from_manifest() {
    let cfg = fixture("simulate_cell.json");
    let (csv, manifest, _keep) = rerun_is_identical(&["simulate", "--config", &cfg, "--seed", "11"]);
    let text = String::from_utf8(csv.clone()).unwrap();
    assert!(text.starts_with(
        "model,M,q,alpha,epsilon,n_used,mean_rel_err,sd_rel_err,coverage,replicates,degenerate,infeasible\n"
    ));
    assert_eq!(text.lines().count(), 2);

    let m: serde_json::Value = serde_json::from_slice(&fs::read(&manifest).unwrap()).unwrap();
    assert_eq!(m["command"], "simulate");
    assert_eq!(m["seed"], 11);
    let again = tempfile::tempdir().unwrap();
    let m_path = manifest.display().to_string();
    assert_eq!(run_to(again.path(), &["simulate", "--config", &m_path]), csv);
}

#[test]
fn simulate_reports_infeasible_cells() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "ergm.json",
        r#"{"m_grid":[5000],"q_grid":[0.1],"alpha_grid":[0.05],"epsilon":0.1,
            "models":[{"ergm":{"theta_edge":-1.0,"theta_triangle":-1.0}}],"replicates":5}"#,
    );
    let csv = String::from_utf8(run_to(dir.path(), &["simulate", "--config", &cfg])).unwrap();
    assert!(csv.lines().nth(1).unwrap().ends_with(",true"), "{csv}");
}

#[test]
fn batch_commands_reject_bad_configs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().display().to_string();
    let bad = write(dir.path(), "bad.json", "{ not json");
    for cmd in ["simulate", "sweep", "retro", "grid"] {
        assert_eq!(code(&nsumkit(&[cmd, "--config", &bad, "--out", &out])), 2, "{cmd}");
    }
    let missing = dir.path().join("missing.json").display().to_string();
    assert_eq!(code(&nsumkit(&["retro", "--config", &missing, "--out", &out])), 2);
    assert_eq!(code(&nsumkit(&["simulate", "--out", &out])), 2);
    assert!(!dir.path().join("simulate.csv").exists());
}

#[test]
fn sweep_is_reproducible() {
    let cfg = fixture("sweep_small.json");
    let (csv, _, _keep) = rerun_is_identical(&["sweep", "--config", &cfg]);
    let text = String::from_utf8(csv).unwrap();
    assert!(text.lines().next().unwrap().ends_with(",delta,mean_density"));
    assert_eq!(text.lines().count(), 1 + 1 + 2 * 2);
}

#[test]
fn retro_bundled_cases() {
    let cfg = fixture("case_studies.json");
    let (csv, _, _keep) = rerun_is_identical(&["retro", "--config", &cfg, "--seed", "1", "--replicates", "200"]);
    let text = String::from_utf8(csv).unwrap();
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows[0], "name,n_study,M,N_hat,d_bar,d_bar_u,rel_err,n_min");
    assert_eq!(rows.len(), 8);
    let published = [3383.0, 2610.0, 197.0, 1141.0, 1119.0, 438.0, 81.0];
    for (row, want) in rows[1..].iter().zip(published) {
        let n: f64 = row.rsplit(',').next().unwrap().parse().unwrap();
        assert!((n / want - 1.0).abs() <= 0.05, "{row}");
    }
}

#[test]
fn grid_is_truncated_at_population() {
    let dir = tempfile::tempdir().unwrap();
    let csv = String::from_utf8(run_to(dir.path(), &["grid", "--config", &fixture("grid.json")])).unwrap();
    let ns: Vec<u64> = csv.lines().skip(1).map(|l| l.rsplit(',').next().unwrap().parse().unwrap()).collect();
    assert_eq!(ns.len(), 16);
    assert_eq!(*ns.iter().max().unwrap(), 10_000);
    assert!(dir.path().join("grid.manifest.json").exists());
}

#[test]
fn threads_flag() {
    let mut args = vec!["--threads", "0", "samplesize"];
    args.extend(SS);
    assert_eq!(code(&nsumkit(&args)), 2);
    args[1] = "1";
    assert_eq!(code(&nsumkit(&args)), 0);
}
